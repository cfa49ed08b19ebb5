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

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "bnfdsp/budget.h"
#include "bnfdsp/errors.h"
#include "test_util.h"

namespace bnf {
namespace {

std::vector<BnfFrame> Frames(const std::vector<std::vector<std::int32_t>>& v,
                             std::int64_t period = 10000) {
  std::vector<BnfFrame> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(BnfFrame{v[i], static_cast<std::int64_t>(i) * period});
  }
  return out;
}

// Bit-by-bit reference packer: bit j of the stream is bit (j % 8) of byte
// j / 8, values laid out frame-major with their least significant bit first.
std::vector<std::uint8_t> ReferencePack(const std::vector<BnfFrame>& frames,
                                        int bits) {
  std::vector<bool> stream;
  for (const auto& f : frames) {
    for (auto v : f.values) {
      for (int b = 0; b < bits; ++b) stream.push_back((v >> b) & 1);
    }
  }
  std::vector<std::uint8_t> bytes((stream.size() + 7) / 8, 0);
  for (std::size_t j = 0; j < stream.size(); ++j) {
    if (stream[j]) bytes[j / 8] |= static_cast<std::uint8_t>(1u << (j % 8));
  }
  return bytes;
}

std::vector<BnfFrame> RandomFrames(std::mt19937_64& rng, int frames,
                                   int channels, int bits,
                                   std::int64_t period) {
  std::uniform_int_distribution<std::int32_t> code(0, (1 << bits) - 1);
  std::vector<BnfFrame> out(frames);
  for (int t = 0; t < frames; ++t) {
    out[t].timestamp_us = t * period;
    out[t].values.resize(channels);
    for (auto& v : out[t].values) v = code(rng);
  }
  return out;
}

TEST(PackTest, TwoNibblesMakeA3) {
  const BnfCache c = Pack(Frames({{3}, {10}}), 4);
  ASSERT_EQ(c.payload.size(), 1u);
  EXPECT_EQ(c.payload[0], 0xA3);
  EXPECT_EQ(c.header.n_frames, 2u);
  EXPECT_EQ(c.header.n_channels, 1);
  EXPECT_EQ(c.header.bits_per_value, 4);
}

TEST(PackTest, EightFourBitChannelsFillFourBytes) {
  EXPECT_EQ(Pack(Frames({{1, 2, 3, 4, 5, 6, 7, 8}}), 4).payload.size(), 4u);
}

TEST(PackTest, EmptyFrameList) {
  PackOptions opt;
  opt.n_channels = 12;
  const BnfCache c = Pack(std::vector<BnfFrame>{}, 4, opt);
  EXPECT_EQ(c.header.n_frames, 0u);
  EXPECT_TRUE(c.payload.empty());
  EXPECT_TRUE(Unpack(c).empty());
  const BnfCache again = ParseCache(Serialize(c));
  EXPECT_EQ(again.header, c.header);
}

TEST(PackTest, RejectsBadInputs) {
  EXPECT_THROW(Pack(Frames({{16}}), 4), std::invalid_argument);
  EXPECT_THROW(Pack(Frames({{-1}}), 4), std::invalid_argument);
  EXPECT_THROW(Pack(Frames({{1, 2}, {3}}), 4), std::invalid_argument);
  EXPECT_THROW(Pack(Frames({{1}}), 0), std::invalid_argument);
  EXPECT_THROW(Pack(Frames({{1}}), 17), std::invalid_argument);
}

TEST(UnpackTest, A3DecodesToThreeAndTen) {
  BnfCache c;
  c.header.n_channels = 1;
  c.header.bits_per_value = 4;
  c.header.frame_period_us = 10000;
  c.header.n_frames = 2;
  c.payload = {0xA3};
  const auto f = Unpack(c);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].values[0], 3);
  EXPECT_EQ(f[1].values[0], 10);
  EXPECT_EQ(f[1].timestamp_us, 10000);
}

TEST(UnpackTest, TruncatedPayloadIsAnError) {
  const BnfCache c = Pack(Frames({{1, 2, 3}, {4, 5, 6}}), 8);
  BnfCache cut = c;
  cut.payload.pop_back();
  EXPECT_THROW(Unpack(cut), DataError);
  auto bytes = Serialize(c);
  bytes.pop_back();
  EXPECT_THROW(ParseCache(bytes), DataError);
  EXPECT_THROW(ParseCache(std::span(bytes).first(10)), DataError);
}

TEST(UnpackTest, PadBitsCheckedInStrictMode) {
  BnfCache c = Pack(Frames({{5}}), 3);
  c.payload[0] |= 0x80;
  EXPECT_THROW(Unpack(c, true), DataError);
  const auto f = Unpack(c, false);
  EXPECT_EQ(f[0].values[0], 5);
  EXPECT_THROW(ParseCache(Serialize(c), true), DataError);
  EXPECT_NO_THROW(ParseCache(Serialize(c), false));
}

TEST(ParseCacheTest, HeaderValidation) {
  const auto good = Serialize(Pack(Frames({{1, 2}}), 4));
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(ParseCache(bad), DataError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(ParseCache(bad), DataError);
  bad = good;
  bad[6] = 0;
  EXPECT_THROW(ParseCache(bad), DataError);
  bad = good;
  bad[6] = 17;
  EXPECT_THROW(ParseCache(bad), DataError);
  bad = good;
  bad[7] = 0;
  EXPECT_THROW(ParseCache(bad), DataError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(ParseCache(bad), DataError);
}

TEST(SerializeTest, ByteLayout) {
  PackOptions opt;
  opt.stride_product = 4;
  opt.frame_period_us = 40000;
  const auto bytes = Serialize(Pack(Frames({{1, 2, 3}, {4, 5, 6}}), 4, opt));
  ASSERT_EQ(bytes.size(), 16u + 3u);
  EXPECT_EQ(bytes[0], 'B');
  EXPECT_EQ(bytes[1], 'N');
  EXPECT_EQ(bytes[2], 'F');
  EXPECT_EQ(bytes[3], 'C');
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 3);
  EXPECT_EQ(bytes[6], 4);
  EXPECT_EQ(bytes[7], 4);
  // 40000 = 0x00009C40, little-endian.
  EXPECT_EQ(bytes[8], 0x40);
  EXPECT_EQ(bytes[9], 0x9C);
  EXPECT_EQ(bytes[10], 0);
  EXPECT_EQ(bytes[11], 0);
  EXPECT_EQ(bytes[12], 2);
  EXPECT_EQ(bytes[13], 0);
  EXPECT_EQ(bytes[14], 0);
  EXPECT_EQ(bytes[15], 0);
  EXPECT_EQ(bytes[16], 0x21);
  EXPECT_EQ(bytes[17], 0x43);
  EXPECT_EQ(bytes[18], 0x65);
}

TEST(PackTest, MatchesReferencePackerAndRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> ch(1, 32), fr(0, 200), bi(1, 16);
  for (int trial = 0; trial < 500; ++trial) {
    const int bits = bi(rng);
    const int channels = ch(rng);
    const auto frames = RandomFrames(rng, fr(rng), channels, bits, 20000);
    PackOptions opt;
    opt.frame_period_us = 20000;
    opt.n_channels = channels;
    const BnfCache c = Pack(frames, bits, opt);
    ASSERT_EQ(c.payload, ReferencePack(frames, bits));
    ASSERT_EQ(c.payload.size(),
              (frames.size() * channels * bits + 7) / 8);
    ASSERT_EQ(Unpack(ParseCache(Serialize(c))), frames);
  }
}

TEST(FileTest, WriteReadRoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(2);
  const auto frames = RandomFrames(rng, 37, 12, 4, 10000);
  const BnfCache c = Pack(frames, 4);
  WriteCacheFile(c, dir / "a.bnfc");
  const BnfCache r = ReadCacheFile(dir / "a.bnfc");
  EXPECT_EQ(r.header, c.header);
  EXPECT_EQ(r.payload, c.payload);
  EXPECT_EQ(PayloadCrc32(r), PayloadCrc32(c));
  EXPECT_THROW(ReadCacheFile(dir / "missing.bnfc"), DataError);
}

TEST(QmfCacheTest, RoundTrip) {
  const FrontendConfig cfg;
  std::mt19937_64 rng(3);
  std::vector<QmfFrame> frames(20);
  std::uniform_int_distribution<int> code(0, 65535);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    frames[t].timestamp_us = static_cast<std::int64_t>(t) * 10000;
    for (int b = 0; b < 32; ++b) {
      frames[t].values.push_back(static_cast<std::uint16_t>(code(rng)));
    }
  }
  const BnfCache c = PackQmf(frames, cfg);
  EXPECT_EQ(c.header.bits_per_value, 16);
  EXPECT_EQ(c.header.n_channels, 32);
  EXPECT_EQ(UnpackQmf(c), frames);
}

TEST(BandwidthTest, MeasuredEqualsBudget) {
  std::mt19937_64 rng(4);
  for (int bits : {1, 2, 4, 8, 16}) {
    for (int stride : {1, 2, 4}) {
      for (int channels : {1, 8, 12, 32}) {
        PackOptions opt;
        opt.stride_product = static_cast<std::uint8_t>(stride);
        opt.frame_period_us = 10000 * stride;
        const BnfCache c = Pack(
            RandomFrames(rng, 50, channels, bits, opt.frame_period_us), bits,
            opt);
        const double budget =
            Bandwidth(channels, bits, Rational(10), stride).ToDouble();
        EXPECT_NEAR(MeasuredBandwidthKbps(c.header), budget, 1e-9 * budget);
      }
    }
  }
  CacheHeader empty;
  empty.bits_per_value = 4;
  empty.frame_period_us = 10000;
  EXPECT_EQ(MeasuredBandwidthKbps(empty), 0.0);
}

}  // namespace
}  // namespace bnf
