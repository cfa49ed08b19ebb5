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

#include "bnfdsp/fixedpoint.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "test_util.h"

namespace bnf {
namespace {

using ::bnf::testing::NearestCodeByScan;

TEST(QuantSpecTest, Ranges) {
  EXPECT_EQ((QuantSpec{8, true, 1.0}).min_code(), -128);
  EXPECT_EQ((QuantSpec{8, true, 1.0}).max_code(), 127);
  EXPECT_EQ((QuantSpec{4, false, 1.0}).min_code(), 0);
  EXPECT_EQ((QuantSpec{4, false, 1.0}).max_code(), 15);
  EXPECT_EQ((QuantSpec{32, true, 1.0}).min_code(), -2147483648LL);
  EXPECT_EQ((QuantSpec{32, false, 1.0}).max_code(), 4294967295LL);
  EXPECT_EQ((QuantSpec{1, true, 1.0}).min_code(), -1);
  EXPECT_EQ((QuantSpec{1, true, 1.0}).max_code(), 0);
}

TEST(QuantSpecTest, ValidateRejectsBadFields) {
  EXPECT_THROW((QuantSpec{0, true, 1.0}).Validate(), std::invalid_argument);
  EXPECT_THROW((QuantSpec{33, true, 1.0}).Validate(), std::invalid_argument);
  EXPECT_THROW((QuantSpec{8, true, 0.0}).Validate(), std::invalid_argument);
  EXPECT_THROW((QuantSpec{8, true, -1.0}).Validate(), std::invalid_argument);
  EXPECT_THROW((QuantSpec{8, true, std::nan("")}).Validate(),
               std::invalid_argument);
  EXPECT_NO_THROW((QuantSpec{16, false, 1.0 / 1024}).Validate());
}

TEST(QuantizeTest, ZeroMapsToZero) {
  for (int bits : {1, 2, 4, 8, 16, 32}) {
    for (bool s : {true, false}) {
      EXPECT_EQ(Quantize(0.0, QuantSpec{bits, s, 0.37}), 0);
    }
  }
}

TEST(QuantizeTest, FullScale) {
  EXPECT_EQ(Quantize(1.0, QuantSpec{4, false, 1.0 / 15}), 15);
}

TEST(QuantizeTest, SignedExamplesAgreeWithScan) {
  const QuantSpec spec{8, true, 0.01};
  EXPECT_EQ(NearestCodeByScan(0.37, spec), 37);
  EXPECT_EQ(NearestCodeByScan(-5.0, spec), -128);
  EXPECT_EQ(Quantize(0.37, spec), 37);
  EXPECT_EQ(Quantize(-5.0, spec), -128);
}

TEST(QuantizeTest, MatchesScanOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  const QuantSpec specs[] = {{8, true, 0.01}, {4, false, 1.0 / 15},
                             {6, true, 0.07}, {8, false, 1.0 / 255}};
  for (const QuantSpec& spec : specs) {
    for (int i = 0; i < 2000; ++i) {
      const double v = x(rng);
      ASSERT_EQ(Quantize(v, spec), NearestCodeByScan(v, spec)) << v;
    }
  }
}

TEST(QuantizeTest, HalfwayRoundsAwayFromZero) {
  const QuantSpec spec{8, true, 1.0};
  EXPECT_EQ(Quantize(2.5, spec), 3);
  EXPECT_EQ(Quantize(-2.5, spec), -3);
  EXPECT_EQ(Quantize(0.5, spec), 1);
  EXPECT_EQ(Quantize(-0.5, spec), -1);
  EXPECT_EQ(Quantize(0.49999999999999994, spec), 0);
}

TEST(QuantizeTest, SaturatesAndHandlesInfinity) {
  const QuantSpec spec{4, false, 1.0 / 15};
  EXPECT_EQ(Quantize(100.0, spec), 15);
  EXPECT_EQ(Quantize(-100.0, spec), 0);
  EXPECT_EQ(Quantize(std::numeric_limits<double>::infinity(), spec), 15);
  EXPECT_EQ(Quantize(-std::numeric_limits<double>::infinity(), spec), 0);
  EXPECT_EQ(Quantize(1e300, QuantSpec{32, true, 1e-300}), 2147483647);
}

TEST(QuantizeTest, NanIsAnError) {
  EXPECT_THROW(Quantize(std::nan(""), QuantSpec{8, true, 1.0}),
               std::invalid_argument);
}

TEST(DequantizeTest, Examples) {
  EXPECT_EQ(Dequantize(0, QuantSpec{8, true, 0.3}), 0.0);
  EXPECT_EQ(Dequantize(15, QuantSpec{4, false, 1.0 / 15}), 1.0);
  EXPECT_DOUBLE_EQ(Dequantize(-128, QuantSpec{8, true, 0.01}), -1.28);
}

TEST(DequantizeTest, OutOfRangeCodeThrows) {
  EXPECT_THROW(Dequantize(16, QuantSpec{4, false, 1.0}), std::out_of_range);
  EXPECT_THROW(Dequantize(-1, QuantSpec{4, false, 1.0}), std::out_of_range);
}

TEST(QuantizeTest, ExhaustiveRoundtripUpTo12Bits) {
  const double scales[] = {1.0, 0.01, 1.0 / 15, 1.0 / 1024, 3.7e-5, 123.25};
  for (int bits = 1; bits <= 12; ++bits) {
    for (bool s : {true, false}) {
      for (double scale : scales) {
        const QuantSpec spec{bits, s, scale};
        for (std::int64_t q = spec.min_code(); q <= spec.max_code(); ++q) {
          ASSERT_EQ(Quantize(Dequantize(q, spec), spec), q)
              << "bits=" << bits << " signed=" << s << " scale=" << scale;
        }
      }
    }
  }
}

TEST(QuantizeTest, RoundtripSampledWideSpecs) {
  std::mt19937_64 rng(5);
  for (int bits : {16, 24, 32}) {
    const QuantSpec spec{bits, true, 1.0 / 1024};
    std::uniform_int_distribution<std::int64_t> q(spec.min_code(),
                                                  spec.max_code());
    for (int i = 0; i < 5000; ++i) {
      const std::int64_t c = q(rng);
      ASSERT_EQ(Quantize(Dequantize(c, spec), spec), c);
    }
  }
}

TEST(QuantizeTest, MonotoneAndErrorBounded) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> x(-2.0, 2.0);
  const QuantSpec spec{6, true, 0.03};
  for (int i = 0; i < 20000; ++i) {
    const double a = x(rng);
    const double b = x(rng);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    ASSERT_LE(Quantize(lo, spec), Quantize(hi, spec));
    if (a >= spec.min_real() && a <= spec.max_real()) {
      const double err = std::abs(Dequantize(Quantize(a, spec), spec) - a);
      ASSERT_LE(err, spec.scale / 2 * (1 + 1e-12));
    } else {
      const std::int64_t q = Quantize(a, spec);
      ASSERT_EQ(q, a < 0 ? spec.min_code() : spec.max_code());
    }
  }
}

TEST(RoundingShiftTest, RoundsHalfAway) {
  EXPECT_EQ(RoundingShift(5, 1), 3);
  EXPECT_EQ(RoundingShift(-5, 1), -3);
  EXPECT_EQ(RoundingShift(4, 1), 2);
  EXPECT_EQ(RoundingShift(7, 2), 2);
  EXPECT_EQ(RoundingShift(6, 2), 2);
  EXPECT_EQ(RoundingShift(-6, 2), -2);
  EXPECT_EQ(RoundingShift(123, 0), 123);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> v(-(1LL << 40), 1LL << 40);
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t x = v(rng);
    const int s = static_cast<int>(i % 20);
    const double expect = RoundHalfAway(static_cast<double>(x) / (1LL << s));
    ASSERT_EQ(RoundingShift(x, s), static_cast<std::int64_t>(expect));
  }
}

TEST(SaturateInt32Test, CountsSaturations) {
  std::uint64_t count = 0;
  EXPECT_EQ(SaturateInt32(5, &count), 5);
  EXPECT_EQ(SaturateInt32(1LL << 40, &count), 2147483647);
  EXPECT_EQ(SaturateInt32(-(1LL << 40), &count), -2147483647 - 1);
  EXPECT_EQ(SaturateInt32(2147483647, &count), 2147483647);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(SaturateInt32(-(1LL << 33), nullptr), -2147483647 - 1);
}

double BatchNorm(double x, double g, double b, double m, double v,
                 double eps) {
  return g * (x - m) / std::sqrt(v + eps) + b;
}

TEST(FoldBatchNormTest, Identity) {
  const std::vector<double> g{1}, b{0}, m{0}, v{1};
  const FoldedAffine f = FoldBatchNorm(g, b, m, v, 0.0);
  EXPECT_EQ(f.scale_per_channel[0], 1.0);
  EXPECT_EQ(f.bias_per_channel[0], 0.0);
}

TEST(FoldBatchNormTest, WorkedExample) {
  const std::vector<double> g{2}, b{3}, m{1}, v{4};
  const FoldedAffine f = FoldBatchNorm(g, b, m, v, 0.0);
  EXPECT_DOUBLE_EQ(f.scale_per_channel[0], 1.0);
  EXPECT_DOUBLE_EQ(f.bias_per_channel[0], 2.0);
  for (double x : {-1.0, 0.0, 1.0, 2.0}) {
    EXPECT_DOUBLE_EQ(f.Apply(0, x), BatchNorm(x, 2, 3, 1, 4, 0));
  }
}

TEST(FoldBatchNormTest, ZeroGainPassesBias) {
  const std::vector<double> g{0, 0}, b{5, 5}, m{-17.5, 1e6}, v{1, 1};
  const FoldedAffine f = FoldBatchNorm(g, b, m, v, 0.0);
  for (int c = 0; c < 2; ++c) {
    EXPECT_EQ(f.scale_per_channel[c], 0.0);
    EXPECT_EQ(f.bias_per_channel[c], 5.0);
  }
}

TEST(FoldBatchNormTest, EquivalentToBatchNorm) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> pos(0.01, 4.0);
  std::uniform_real_distribution<double> eps(1e-6, 1e-1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 16;
    std::vector<double> g(n), b(n), m(n), v(n);
    for (int c = 0; c < n; ++c) {
      g[c] = u(rng);
      b[c] = u(rng);
      m[c] = u(rng);
      v[c] = pos(rng);
    }
    const double e = eps(rng);
    const FoldedAffine f = FoldBatchNorm(g, b, m, v, e);
    ASSERT_EQ(f.channels(), static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < 20; ++k) {
        const double x = u(rng) * 10;
        ASSERT_LE(std::abs(f.Apply(c, x) - BatchNorm(x, g[c], b[c], m[c], v[c], e)),
                  1e-9);
      }
    }
  }
}

TEST(FoldBatchNormTest, DefaultEpsilonAndErrors) {
  const std::vector<double> one{1}, zero{0};
  const FoldedAffine f = FoldBatchNorm(one, zero, zero, zero);
  EXPECT_DOUBLE_EQ(f.scale_per_channel[0], 1.0 / std::sqrt(1e-3));
  const std::vector<double> two{1, 1}, neg{-1};
  EXPECT_THROW(FoldBatchNorm(two, zero, zero, one), std::invalid_argument);
  EXPECT_THROW(FoldBatchNorm(one, zero, zero, neg), std::invalid_argument);
  EXPECT_THROW(FoldBatchNorm(one, zero, zero, zero, 0.0),
               std::invalid_argument);
}

TEST(FixedMultiplierTest, RepresentsDyadicValuesExactly) {
  for (int e = -40; e <= 20; ++e) {
    const double m = std::ldexp(1.0, e);
    const FixedMultiplier f = FixedMultiplier::FromReal(m);
    EXPECT_EQ(f.ToReal(), m) << e;
  }
  const FixedMultiplier f = FixedMultiplier::FromReal(0.75);
  EXPECT_EQ(f.Apply(2), 2);    // 1.5 rounds away
  EXPECT_EQ(f.Apply(-2), -2);  // -1.5
  EXPECT_EQ(f.Apply(4), 3);
  EXPECT_EQ(FixedMultiplier::FromReal(0.0).Apply(12345), 0);
}

TEST(FixedMultiplierTest, RelativeErrorIsTiny) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> e(-30.0, 10.0);
  for (int i = 0; i < 5000; ++i) {
    const double m = std::exp2(e(rng));
    const FixedMultiplier f = FixedMultiplier::FromReal(m);
    ASSERT_LE(std::abs(f.ToReal() - m), m * std::ldexp(1.0, -30));
  }
  EXPECT_THROW(FixedMultiplier::FromReal(-1.0), std::invalid_argument);
  EXPECT_THROW(FixedMultiplier::FromReal(std::nan("")), std::invalid_argument);
}

TEST(FixedMultiplierTest, ApplyMatchesRealProductAwayFromTies) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> e(-20.0, 2.0);
  std::uniform_int_distribution<std::int64_t> v(-(1LL << 31), 1LL << 31);
  for (int i = 0; i < 20000; ++i) {
    const FixedMultiplier f = FixedMultiplier::FromReal(std::exp2(e(rng)));
    const std::int64_t x = v(rng);
    const long double exact =
        static_cast<long double>(x) * static_cast<long double>(f.ToReal());
    const long double frac = exact - std::floor(exact);
    if (std::abs(frac - 0.5L) < 1e-6L) continue;
    ASSERT_EQ(f.Apply(x), static_cast<std::int64_t>(std::llround(exact)));
  }
}

TEST(QuantizeWeightsInt8Test, SymmetricPerTensor) {
  const std::vector<double> w{0.5, -1.0, 0.25, 0.0};
  const QuantizedTensor q = QuantizeWeightsInt8(w);
  EXPECT_DOUBLE_EQ(q.scale, 1.0 / 127);
  EXPECT_EQ(q.codes, (std::vector<std::int8_t>{64, -127, 32, 0}));
  const std::vector<double> zeros(5, 0.0);
  const QuantizedTensor z = QuantizeWeightsInt8(zeros);
  EXPECT_EQ(z.scale, 1.0);
  for (auto c : z.codes) EXPECT_EQ(c, 0);
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(QuantizeWeightsInt8(bad), std::invalid_argument);
}

TEST(QuantizeWeightsInt8Test, ErrorWithinHalfStep) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> w(300);
  for (auto& x : w) x = n(rng);
  const QuantizedTensor q = QuantizeWeightsInt8(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_GE(q.codes[i], -127);
    EXPECT_LE(std::abs(q.codes[i] * q.scale - w[i]), q.scale / 2 * (1 + 1e-12));
  }
}

}  // namespace
}  // namespace bnf
