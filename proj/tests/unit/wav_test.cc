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

#include <gtest/gtest.h>

#include <fstream>
#include <vector>

#include "bnfdsp/errors.h"
#include "test_util.h"

namespace bnf {
namespace {

TEST(WavTest, EncodeParseRoundTrip) {
  const std::vector<std::int16_t> s{0, 1, -1, 32767, -32768, 1234};
  const auto bytes = EncodeWav(s, 16000);
  EXPECT_EQ(bytes.size(), 44u + 12u);
  const PcmAudio a = ParseWav(bytes);
  EXPECT_EQ(a.sample_rate_hz, 16000);
  EXPECT_EQ(a.channels, 1);
  EXPECT_EQ(a.samples, s);
  EXPECT_EQ(RequireMono(a, 16000), s);
}

TEST(WavTest, HeaderFieldsAreLittleEndian) {
  const auto b = EncodeWav(std::vector<std::int16_t>(3), 16000);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "RIFF");
  EXPECT_EQ(std::string(b.begin() + 8, b.begin() + 12), "WAVE");
  // Sample rate 16000 = 0x3E80 at offset 24.
  EXPECT_EQ(b[24], 0x80);
  EXPECT_EQ(b[25], 0x3E);
  EXPECT_EQ(b[34], 16);
}

TEST(WavTest, SkipsUnknownChunks) {
  auto b = EncodeWav(std::vector<std::int16_t>{7, 8}, 16000);
  // Insert a LIST chunk between fmt and data.
  const std::vector<std::uint8_t> list{'L', 'I', 'S', 'T', 3, 0, 0, 0,
                                       'a', 'b', 'c', 0};
  b.insert(b.begin() + 36, list.begin(), list.end());
  const std::uint32_t riff = static_cast<std::uint32_t>(b.size() - 8);
  for (int i = 0; i < 4; ++i) b[4 + i] = (riff >> (8 * i)) & 0xFF;
  EXPECT_EQ(ParseWav(b).samples, (std::vector<std::int16_t>{7, 8}));
}

TEST(WavTest, RejectsWrongRateChannelsAndFormat) {
  const auto eight = ParseWav(EncodeWav(std::vector<std::int16_t>(10), 8000));
  EXPECT_THROW(RequireMono(eight, 16000), DataError);
  const auto stereo =
      ParseWav(EncodeWav(std::vector<std::int16_t>(10), 16000, 2));
  EXPECT_THROW(RequireMono(stereo, 16000), DataError);
  auto b = EncodeWav(std::vector<std::int16_t>(4), 16000);
  auto bad = b;
  bad[20] = 3;  // IEEE float format tag
  EXPECT_THROW(ParseWav(bad), DataError);
  bad = b;
  bad[34] = 8;  // 8-bit samples
  EXPECT_THROW(ParseWav(bad), DataError);
  bad = b;
  bad[0] = 'X';
  EXPECT_THROW(ParseWav(bad), DataError);
  bad = b;
  bad.resize(30);
  EXPECT_THROW(ParseWav(bad), DataError);
}

TEST(RawPcmTest, ReadsLittleEndianAndRejectsOddSize) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "a.raw", std::ios::binary);
    const unsigned char bytes[] = {0x01, 0x00, 0xFF, 0xFF, 0x00, 0x80};
    out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
  }
  EXPECT_EQ(ReadRawPcm(dir / "a.raw"),
            (std::vector<std::int16_t>{1, -1, -32768}));
  {
    std::ofstream out(dir / "b.raw", std::ios::binary);
    out.write("abc", 3);
  }
  EXPECT_THROW(ReadRawPcm(dir / "b.raw"), DataError);
  EXPECT_THROW(ReadWav(dir / "missing.wav"), DataError);
}

TEST(WavTest, FileRoundTrip) {
  testing::TempDir dir;
  const std::vector<std::int16_t> s{5, -5, 100};
  WriteWav(dir / "x.wav", s, 16000);
  EXPECT_EQ(ReadWav(dir / "x.wav").samples, s);
}

}  // namespace
}  // namespace bnf
