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

#ifndef BNFDSP_BITCACHE_H_
#define BNFDSP_BITCACHE_H_

// .bnfc feature cache: a 16-byte header followed by fixed-width codes packed
// frame-major, channel-minor, least-significant bit first. See
// docs/bnfc_format.md for the byte layout.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bnfdsp/extractor.h"
#include "bnfdsp/frontend.h"

namespace bnf {

inline constexpr std::array<std::uint8_t, 4> kCacheMagic = {'B', 'N', 'F',
                                                            'C'};
inline constexpr std::uint8_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderSize = 16;

struct CacheHeader {
  std::uint8_t version = kCacheVersion;
  std::uint8_t n_channels = 0;
  std::uint8_t bits_per_value = 0;
  std::uint8_t stride_product = 1;
  std::uint32_t frame_period_us = 0;
  std::uint32_t n_frames = 0;

  std::uint64_t value_bits() const {
    return std::uint64_t{n_frames} * n_channels * bits_per_value;
  }
  std::size_t payload_bytes() const {
    return static_cast<std::size_t>((value_bits() + 7) / 8);
  }
  // Throws DataError when a field is outside its domain.
  void Validate() const;

  bool operator==(const CacheHeader&) const = default;
};

struct BnfCache {
  CacheHeader header;
  std::vector<std::uint8_t> payload;
};

struct PackOptions {
  std::uint8_t stride_product = 1;
  std::uint32_t frame_period_us = 10000;
  // 0 infers from the frames; needed for an empty frame list with a width.
  int n_channels = 0;
};

// Throws std::invalid_argument when a code is negative or >= 2^bits, the
// channel count is not uniform, or bits is outside 1..16.
BnfCache Pack(std::span<const BnfFrame> frames, int bits,
              const PackOptions& options = {});
// Frame i gets timestamp i * frame_period_us. `strict` rejects nonzero pad
// bits. Throws DataError on an inconsistent cache.
std::vector<BnfFrame> Unpack(const BnfCache& cache, bool strict = true);

std::vector<std::uint8_t> Serialize(const BnfCache& cache);
// Validates magic, version, field ranges and payload length.
BnfCache ParseCache(std::span<const std::uint8_t> bytes, bool strict = true);

void WriteCacheFile(const BnfCache& cache, const std::filesystem::path& path);
BnfCache ReadCacheFile(const std::filesystem::path& path, bool strict = true);

// QMF frames stored as a 16-bit cache at the frontend hop.
BnfCache PackQmf(std::span<const QmfFrame> frames, const FrontendConfig& cfg);
std::vector<QmfFrame> UnpackQmf(const BnfCache& cache, bool strict = true);

// Value bits per covered audio millisecond (= kbps). Zero frames -> 0.
double MeasuredBandwidthKbps(const CacheHeader& header);

std::uint32_t PayloadCrc32(const BnfCache& cache);

}  // namespace bnf

#endif  // BNFDSP_BITCACHE_H_
