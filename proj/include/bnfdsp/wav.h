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

#ifndef BNFDSP_WAV_H_
#define BNFDSP_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace bnf {

struct PcmAudio {
  int sample_rate_hz = 16000;
  int channels = 1;
  std::vector<std::int16_t> samples;  // interleaved
};

// RIFF/WAVE with a PCM (format 1) 16-bit fmt chunk. Unknown chunks are
// skipped. Throws DataError on anything else.
PcmAudio ParseWav(std::span<const std::uint8_t> bytes);
PcmAudio ReadWav(const std::filesystem::path& path);

std::vector<std::uint8_t> EncodeWav(std::span<const std::int16_t> samples,
                                    int sample_rate_hz, int channels = 1);
void WriteWav(const std::filesystem::path& path,
              std::span<const std::int16_t> samples, int sample_rate_hz,
              int channels = 1);

// Headerless little-endian int16. Odd byte counts are a DataError.
std::vector<std::int16_t> ReadRawPcm(const std::filesystem::path& path);

// Rejects anything but mono audio at `sample_rate_hz`; no resampling or
// mixdown is attempted.
std::vector<std::int16_t> RequireMono(const PcmAudio& audio,
                                      int sample_rate_hz);

}  // namespace bnf

#endif  // BNFDSP_WAV_H_
