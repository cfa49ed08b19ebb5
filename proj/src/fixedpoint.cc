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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bnf {
namespace {

__extension__ typedef __int128 Int128;

Int128 RoundingShift128(Int128 value, int shift) {
  if (shift <= 0) {
    return value << -shift;
  }
  if (shift >= 126) return 0;
  const Int128 magnitude = value < 0 ? -value : value;
  const Int128 half = Int128{1} << (shift - 1);
  const Int128 q = (magnitude + half) >> shift;
  return value < 0 ? -q : q;
}

std::int64_t ClampToInt64(Int128 v) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  if (v > kMax) return kMax;
  if (v < kMin) return kMin;
  return static_cast<std::int64_t>(v);
}

}  // namespace

void QuantSpec::Validate() const {
  if (bits < 1 || bits > 32) {
    throw std::invalid_argument("QuantSpec: bits must be in 1..32, got " +
                                std::to_string(bits));
  }
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw std::invalid_argument("QuantSpec: scale must be finite and > 0");
  }
}

std::int64_t QuantSpec::min_code() const {
  return is_signed ? -(std::int64_t{1} << (bits - 1)) : 0;
}

std::int64_t QuantSpec::max_code() const {
  return is_signed ? (std::int64_t{1} << (bits - 1)) - 1
                   : (std::int64_t{1} << bits) - 1;
}

double RoundHalfAway(double x) { return std::round(x); }

std::int64_t Quantize(double x, const QuantSpec& spec) {
  if (std::isnan(x)) {
    throw std::invalid_argument("Quantize: NaN input");
  }
  const double steps = RoundHalfAway(x / spec.scale);
  const auto lo = static_cast<double>(spec.min_code());
  const auto hi = static_cast<double>(spec.max_code());
  if (steps <= lo) return spec.min_code();
  if (steps >= hi) return spec.max_code();
  return static_cast<std::int64_t>(steps);
}

double Dequantize(std::int64_t code, const QuantSpec& spec) {
  if (!spec.InRange(code)) {
    throw std::out_of_range("Dequantize: code " + std::to_string(code) +
                            " outside the representable range");
  }
  return static_cast<double>(code) * spec.scale;
}

std::int64_t RoundingShift(std::int64_t value, int shift) {
  return ClampToInt64(RoundingShift128(value, shift));
}

std::int32_t SaturateInt32(std::int64_t value, std::uint64_t* saturated) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int32_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int32_t>::min();
  if (value > kMax || value < kMin) {
    if (saturated != nullptr) ++*saturated;
    return static_cast<std::int32_t>(value > kMax ? kMax : kMin);
  }
  return static_cast<std::int32_t>(value);
}

FoldedAffine FoldBatchNorm(std::span<const double> gamma,
                           std::span<const double> beta,
                           std::span<const double> mean,
                           std::span<const double> var, double eps) {
  const std::size_t n = gamma.size();
  if (beta.size() != n || mean.size() != n || var.size() != n) {
    throw std::invalid_argument("FoldBatchNorm: vector length mismatch");
  }
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("FoldBatchNorm: eps must be >= 0");
  }
  FoldedAffine folded;
  folded.scale_per_channel.resize(n);
  folded.bias_per_channel.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(var[i] >= 0.0)) {
      throw std::invalid_argument("FoldBatchNorm: negative variance at " +
                                  std::to_string(i));
    }
    const double denom = std::sqrt(var[i] + eps);
    if (denom == 0.0) {
      throw std::invalid_argument("FoldBatchNorm: zero variance with eps=0");
    }
    const double s = gamma[i] / denom;
    folded.scale_per_channel[i] = s;
    folded.bias_per_channel[i] = beta[i] - mean[i] * s;
    if (!std::isfinite(s) || !std::isfinite(folded.bias_per_channel[i])) {
      throw std::invalid_argument("FoldBatchNorm: non-finite result");
    }
  }
  return folded;
}

FixedMultiplier FixedMultiplier::FromReal(double m) {
  if (!std::isfinite(m) || m < 0.0) {
    throw std::invalid_argument("FixedMultiplier: need finite m >= 0");
  }
  FixedMultiplier out;
  if (m == 0.0) return out;
  int exponent = 0;
  const double fraction = std::frexp(m, &exponent);  // m = f * 2^e
  auto q = static_cast<std::int64_t>(std::llround(fraction * 2147483648.0));
  if (q == (std::int64_t{1} << 31)) {
    q >>= 1;
    ++exponent;
  }
  out.multiplier = q;
  out.shift = 31 - exponent;
  return out;
}

double FixedMultiplier::ToReal() const {
  return std::ldexp(static_cast<double>(multiplier), -shift);
}

std::int64_t FixedMultiplier::Apply(std::int64_t value) const {
  const Int128 product = static_cast<Int128>(value) * multiplier;
  return ClampToInt64(RoundingShift128(product, shift));
}

QuantizedTensor QuantizeWeightsInt8(std::span<const double> weights) {
  double max_abs = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw std::invalid_argument("QuantizeWeightsInt8: non-finite weight");
    }
    max_abs = std::max(max_abs, std::abs(w));
  }
  QuantizedTensor out;
  out.scale = max_abs > 0.0 ? max_abs / 127.0 : 1.0;
  const QuantSpec spec{8, true, out.scale};
  out.codes.reserve(weights.size());
  for (double w : weights) {
    // Symmetric: -128 is never produced.
    auto code = Quantize(w, spec);
    if (code < -127) code = -127;
    out.codes.push_back(static_cast<std::int8_t>(code));
  }
  return out;
}

}  // namespace bnf
