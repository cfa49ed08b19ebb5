// Copyright 2026 The bnfdsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bnfdsp/wav.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "bnfdsp/errors.h"

namespace bnf {
namespace {

std::uint32_t Le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
         std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

std::uint16_t Le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void Put32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Put16(std::vector<std::uint8_t>* out, std::uint16_t v) {
  out->push_back(static_cast<std::uint8_t>(v));
  out->push_back(static_cast<std::uint8_t>(v >> 8));
}

std::vector<std::uint8_t> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

PcmAudio ParseWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError("wav: not a RIFF/WAVE file");
  }
  PcmAudio audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw DataError("wav: chunk extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw DataError("wav: short fmt chunk");
      const std::uint16_t format = Le16(bytes.data() + body);
      audio.channels = Le16(bytes.data() + body + 2);
      audio.sample_rate_hz = static_cast<int>(Le32(bytes.data() + body + 4));
      const std::uint16_t bits = Le16(bytes.data() + body + 14);
      if (format != 1) {
        throw DataError("wav: only PCM format 1 is supported, got " +
                        std::to_string(format));
      }
      if (bits != 16) {
        throw DataError("wav: only 16-bit samples are supported, got " +
                        std::to_string(bits));
      }
      if (audio.channels < 1) throw DataError("wav: zero channels");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw DataError("wav: data chunk before fmt chunk");
      if (size % 2 != 0) throw DataError("wav: odd data chunk size");
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] =
            static_cast<std::int16_t>(Le16(bytes.data() + body + 2 * i));
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw DataError("wav: no data chunk");
}

PcmAudio ReadWav(const std::filesystem::path& path) {
  return ParseWav(ReadAll(path));
}

std::vector<std::uint8_t> EncodeWav(std::span<const std::int16_t> samples,
                                    int sample_rate_hz, int channels) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string("RIFF")) out.push_back(static_cast<std::uint8_t>(c));
  Put32(&out, 36 + data_bytes);
  for (char c : std::string("WAVEfmt ")) out.push_back(static_cast<std::uint8_t>(c));
  Put32(&out, 16);
  Put16(&out, 1);
  Put16(&out, static_cast<std::uint16_t>(channels));
  Put32(&out, static_cast<std::uint32_t>(sample_rate_hz));
  Put32(&out, static_cast<std::uint32_t>(sample_rate_hz * channels * 2));
  Put16(&out, static_cast<std::uint16_t>(channels * 2));
  Put16(&out, 16);
  for (char c : std::string("data")) out.push_back(static_cast<std::uint8_t>(c));
  Put32(&out, data_bytes);
  for (std::int16_t s : samples) Put16(&out, static_cast<std::uint16_t>(s));
  return out;
}

void WriteWav(const std::filesystem::path& path,
              std::span<const std::int16_t> samples, int sample_rate_hz,
              int channels) {
  const auto bytes = EncodeWav(samples, sample_rate_hz, channels);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::int16_t> ReadRawPcm(const std::filesystem::path& path) {
  const auto bytes = ReadAll(path);
  if (bytes.size() % 2 != 0) throw DataError("raw pcm: odd byte count");
  std::vector<std::int16_t> samples(bytes.size() / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<std::int16_t>(Le16(bytes.data() + 2 * i));
  }
  return samples;
}

std::vector<std::int16_t> RequireMono(const PcmAudio& audio,
                                      int sample_rate_hz) {
  if (audio.sample_rate_hz != sample_rate_hz) {
    throw DataError("wav: sample rate " + std::to_string(audio.sample_rate_hz) +
                    " Hz, expected " + std::to_string(sample_rate_hz) +
                    " Hz (no resampling is performed)");
  }
  if (audio.channels != 1) {
    throw DataError("wav: " + std::to_string(audio.channels) +
                    " channels, expected mono (no mixdown is performed)");
  }
  return audio.samples;
}

}  // namespace bnf
