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

#ifndef BNFDSP_FIXEDPOINT_H_
#define BNFDSP_FIXEDPOINT_H_

#include <cstdint>
#include <span>
#include <vector>

namespace bnf {

// A symmetric (zero-point free) fixed-point format. `scale` is the real value
// of one code step.
struct QuantSpec {
  int bits = 8;
  bool is_signed = true;
  double scale = 1.0;

  // Throws std::invalid_argument if bits is outside 1..32 or scale is not a
  // finite positive number.
  void Validate() const;

  std::int64_t min_code() const;
  std::int64_t max_code() const;
  bool InRange(std::int64_t code) const {
    return code >= min_code() && code <= max_code();
  }
  double min_real() const { return static_cast<double>(min_code()) * scale; }
  double max_real() const { return static_cast<double>(max_code()) * scale; }

  bool operator==(const QuantSpec&) const = default;
};

// round(x / scale) with ties away from zero, saturated to the code range.
// Throws std::invalid_argument on NaN.
std::int64_t Quantize(double x, const QuantSpec& spec);

// code * scale. Throws std::out_of_range for codes outside the spec.
double Dequantize(std::int64_t code, const QuantSpec& spec);

// Round-half-away-from-zero of a real value to the nearest integer.
double RoundHalfAway(double x);

// Arithmetic right shift of a wide integer with round-half-away-from-zero.
// shift <= 0 is a left shift.
std::int64_t RoundingShift(std::int64_t value, int shift);

// Saturating narrowing to int32. `saturated` is incremented when clamping.
std::int32_t SaturateInt32(std::int64_t value, std::uint64_t* saturated);

// Per-channel affine y = scale * x + bias equivalent to inference-time batch
// normalization.
struct FoldedAffine {
  std::vector<double> scale_per_channel;
  std::vector<double> bias_per_channel;

  std::size_t channels() const { return scale_per_channel.size(); }
  double Apply(std::size_t channel, double x) const {
    return scale_per_channel[channel] * x + bias_per_channel[channel];
  }
};

inline constexpr double kDefaultBatchNormEpsilon = 1e-3;

// scale = gamma / sqrt(var + eps), bias = beta - mean * scale.
FoldedAffine FoldBatchNorm(std::span<const double> gamma,
                           std::span<const double> beta,
                           std::span<const double> mean,
                           std::span<const double> var,
                           double eps = kDefaultBatchNormEpsilon);

// Real-valued requantization factor M approximated as
// multiplier * 2^-shift with multiplier in [2^30, 2^31).
struct FixedMultiplier {
  std::int64_t multiplier = 0;
  int shift = 0;

  static FixedMultiplier FromReal(double m);
  double ToReal() const;
  // round_half_away(value * M'), saturated to int64.
  std::int64_t Apply(std::int64_t value) const;
};

// Symmetric signed 8-bit per-tensor weight quantization
// (scale = max|w| / 127). All-zero tensors get scale 1.
struct QuantizedTensor {
  std::vector<std::int8_t> codes;
  double scale = 1.0;
};
QuantizedTensor QuantizeWeightsInt8(std::span<const double> weights);

}  // namespace bnf

#endif  // BNFDSP_FIXEDPOINT_H_
