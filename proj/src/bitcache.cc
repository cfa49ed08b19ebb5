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

#include "bnfdsp/bitcache.h"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "bnfdsp/errors.h"

namespace bnf {
namespace {

// Appends fixed-width values LSB-first.
class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>* out) : out_(out) {}

  void Write(std::uint32_t value, int bits) {
    buffer_ |= std::uint64_t{value} << filled_;
    filled_ += bits;
    while (filled_ >= 8) {
      out_->push_back(static_cast<std::uint8_t>(buffer_ & 0xFF));
      buffer_ >>= 8;
      filled_ -= 8;
    }
  }

  void Flush() {
    if (filled_ > 0) out_->push_back(static_cast<std::uint8_t>(buffer_));
    buffer_ = 0;
    filled_ = 0;
  }

 private:
  std::vector<std::uint8_t>* out_;
  std::uint64_t buffer_ = 0;
  int filled_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t Read(int bits) {
    while (filled_ < bits) {
      buffer_ |= std::uint64_t{in_[pos_++]} << filled_;
      filled_ += 8;
    }
    const auto value =
        static_cast<std::uint32_t>(buffer_ & ((std::uint64_t{1} << bits) - 1));
    buffer_ >>= bits;
    filled_ -= bits;
    return value;
  }

  // Bits left in the partially consumed byte.
  std::uint64_t Remainder() const { return buffer_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t buffer_ = 0;
  int filled_ = 0;
};

void PutLe32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetLe32(std::span<const std::uint8_t> in) {
  return std::uint32_t{in[0]} | std::uint32_t{in[1]} << 8 |
         std::uint32_t{in[2]} << 16 | std::uint32_t{in[3]} << 24;
}

}  // namespace

void CacheHeader::Validate() const {
  if (version != kCacheVersion) {
    throw DataError("cache: unsupported version " + std::to_string(version));
  }
  if (bits_per_value < 1 || bits_per_value > 16) {
    throw DataError("cache: bits_per_value must be in 1..16, got " +
                    std::to_string(bits_per_value));
  }
  if (n_channels == 0 && n_frames != 0) {
    throw DataError("cache: zero channels with nonzero frame count");
  }
  if (stride_product == 0) throw DataError("cache: stride_product is zero");
  if (frame_period_us == 0) throw DataError("cache: frame_period_us is zero");
}

BnfCache Pack(std::span<const BnfFrame> frames, int bits,
              const PackOptions& options) {
  if (bits < 1 || bits > 16) {
    throw std::invalid_argument("Pack: bits must be in 1..16");
  }
  std::size_t channels = options.n_channels > 0
                             ? static_cast<std::size_t>(options.n_channels)
                             : (frames.empty() ? 0 : frames.front().values.size());
  if (channels > 255) {
    throw std::invalid_argument("Pack: at most 255 channels");
  }
  if (frames.size() > 0xFFFFFFFFu) {
    throw std::invalid_argument("Pack: too many frames");
  }
  const std::int64_t limit = std::int64_t{1} << bits;
  BnfCache cache;
  cache.header.n_channels = static_cast<std::uint8_t>(channels);
  cache.header.bits_per_value = static_cast<std::uint8_t>(bits);
  cache.header.stride_product = options.stride_product;
  cache.header.frame_period_us = options.frame_period_us;
  cache.header.n_frames = static_cast<std::uint32_t>(frames.size());
  if (options.stride_product == 0 || options.frame_period_us == 0) {
    throw std::invalid_argument("Pack: stride and frame period must be > 0");
  }
  cache.payload.reserve(cache.header.payload_bytes());
  BitWriter writer(&cache.payload);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].values.size() != channels) {
      throw std::invalid_argument("Pack: frame " + std::to_string(t) + " has " +
                                  std::to_string(frames[t].values.size()) +
                                  " channels, expected " +
                                  std::to_string(channels));
    }
    for (std::int32_t code : frames[t].values) {
      if (code < 0 || code >= limit) {
        throw std::invalid_argument("Pack: code " + std::to_string(code) +
                                    " does not fit in " +
                                    std::to_string(bits) + " bits");
      }
      writer.Write(static_cast<std::uint32_t>(code), bits);
    }
  }
  writer.Flush();
  return cache;
}

std::vector<BnfFrame> Unpack(const BnfCache& cache, bool strict) {
  const CacheHeader& h = cache.header;
  h.Validate();
  if (cache.payload.size() != h.payload_bytes()) {
    throw DataError("cache: payload is " + std::to_string(cache.payload.size()) +
                    " bytes, header implies " +
                    std::to_string(h.payload_bytes()));
  }
  BitReader reader(cache.payload);
  std::vector<BnfFrame> frames(h.n_frames);
  for (std::uint32_t t = 0; t < h.n_frames; ++t) {
    frames[t].timestamp_us = std::int64_t{t} * h.frame_period_us;
    frames[t].values.resize(h.n_channels);
    for (auto& v : frames[t].values) {
      v = static_cast<std::int32_t>(reader.Read(h.bits_per_value));
    }
  }
  if (strict && reader.Remainder() != 0) {
    throw DataError("cache: nonzero pad bits in final byte");
  }
  return frames;
}

std::vector<std::uint8_t> Serialize(const BnfCache& cache) {
  std::vector<std::uint8_t> out(kCacheMagic.begin(), kCacheMagic.end());
  out.push_back(cache.header.version);
  out.push_back(cache.header.n_channels);
  out.push_back(cache.header.bits_per_value);
  out.push_back(cache.header.stride_product);
  PutLe32(&out, cache.header.frame_period_us);
  PutLe32(&out, cache.header.n_frames);
  out.resize(kCacheHeaderSize + cache.payload.size());
  std::copy(cache.payload.begin(), cache.payload.end(),
            out.begin() + kCacheHeaderSize);
  return out;
}

BnfCache ParseCache(std::span<const std::uint8_t> bytes, bool strict) {
  if (bytes.size() < kCacheHeaderSize) {
    throw DataError("cache: truncated header (" + std::to_string(bytes.size()) +
                    " bytes)");
  }
  if (!std::equal(kCacheMagic.begin(), kCacheMagic.end(), bytes.begin())) {
    throw DataError("cache: bad magic");
  }
  BnfCache cache;
  cache.header.version = bytes[4];
  cache.header.n_channels = bytes[5];
  cache.header.bits_per_value = bytes[6];
  cache.header.stride_product = bytes[7];
  cache.header.frame_period_us = GetLe32(bytes.subspan(8, 4));
  cache.header.n_frames = GetLe32(bytes.subspan(12, 4));
  cache.header.Validate();
  const auto payload = bytes.subspan(kCacheHeaderSize);
  if (payload.size() != cache.header.payload_bytes()) {
    throw DataError("cache: payload is " + std::to_string(payload.size()) +
                    " bytes, header implies " +
                    std::to_string(cache.header.payload_bytes()));
  }
  cache.payload.assign(payload.begin(), payload.end());
  if (strict) Unpack(cache, true);
  return cache;
}

void WriteCacheFile(const BnfCache& cache, const std::filesystem::path& path) {
  const auto bytes = Serialize(cache);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write cache " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing cache " + path.string());
}

BnfCache ReadCacheFile(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open cache " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseCache(bytes, strict);
}

BnfCache PackQmf(std::span<const QmfFrame> frames, const FrontendConfig& cfg) {
  std::vector<BnfFrame> converted(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    converted[t].values.assign(frames[t].values.begin(), frames[t].values.end());
    converted[t].timestamp_us = frames[t].timestamp_us;
  }
  PackOptions options;
  options.frame_period_us = static_cast<std::uint32_t>(cfg.hop_us());
  options.n_channels = cfg.n_mel_bins;
  return Pack(converted, cfg.qmf_spec.bits, options);
}

std::vector<QmfFrame> UnpackQmf(const BnfCache& cache, bool strict) {
  const auto frames = Unpack(cache, strict);
  std::vector<QmfFrame> out(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    out[t].timestamp_us = frames[t].timestamp_us;
    out[t].values.assign(frames[t].values.begin(), frames[t].values.end());
  }
  return out;
}

double MeasuredBandwidthKbps(const CacheHeader& header) {
  if (header.n_frames == 0) return 0.0;
  const double covered_ms =
      static_cast<double>(header.n_frames) * header.frame_period_us / 1000.0;
  return static_cast<double>(header.value_bits()) / covered_ms;
}

std::uint32_t PayloadCrc32(const BnfCache& cache) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, cache.payload.data(), static_cast<uInt>(cache.payload.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace bnf
