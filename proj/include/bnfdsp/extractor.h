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

#ifndef BNFDSP_EXTRACTOR_H_
#define BNFDSP_EXTRACTOR_H_

// Quantized bottleneck feature extractor. One layer is a depthwise
// convolution in time (one kernel_t tap filter per input channel) followed by
// a pointwise channel mix, 32-bit bias, activation and requantization:
//
//   acc[t, c]  = sum_k dw[k, c] * x[t * stride + k, c]            (int32)
//   mid[t, c]  = round(acc[t, c] / 2^headroom_shift)               (int16)
//   z[t, o]    = sat32(sat32(sum_c mid[t, c] * pw[c, o]) + bias[o])
//   out[t, o]  = clamp(round(act(z) * s_acc / s_out), out_spec)
//
// with s_acc = s_in * s_dw * s_pw * 2^headroom_shift. Batch norm is folded
// into pw and bias before quantization. The headroom shift is the smallest
// power of two that keeps the worst-case depthwise output for the layer's
// input spec inside int16, which keeps the pointwise sum and bias in 32 bits.

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnfdsp/fixedpoint.h"
#include "bnfdsp/frontend.h"
#include "bnfdsp/grid.h"

namespace bnf {

enum class Activation { kRelu, kIdentity };

std::string_view ActivationName(Activation activation);
// Accepts "relu" / "identity"; throws std::invalid_argument otherwise.
Activation ParseActivation(std::string_view name);

// Activation range convention: relu layers emit unsigned codes spanning
// [0, 1], identity layers signed codes spanning [-1, 1].
QuantSpec ActivationSpec(int bits, Activation activation);

inline constexpr int kIntermediateBits = 8;
inline constexpr int kDepthwiseOutputBits = 16;

struct BnfLayerConfig {
  int kernel_t = 4;
  int stride_t = 1;
  int c_in = 32;
  int c_out = 12;
  QuantSpec out_spec = ActivationSpec(4, Activation::kRelu);
  Activation activation = Activation::kRelu;

  void Validate() const;
  // Lowest code the activation can produce.
  std::int64_t activation_min_code() const;

  bool operator==(const BnfLayerConfig&) const = default;
};

// Stock layer with the activation-range output convention.
BnfLayerConfig MakeLayer(int kernel_t, int stride_t, int c_in, int c_out,
                         int out_bits,
                         Activation activation = Activation::kRelu);

struct LayerWeights {
  std::vector<std::int8_t> dw_codes;  // [kernel_t x c_in], row-major
  double dw_scale = 1.0;
  std::vector<std::int8_t> pw_codes;  // [c_in x c_out], row-major
  double pw_scale = 1.0;
  std::vector<std::int32_t> bias_codes;  // [c_out], accumulator units

  std::int8_t dw(int k, int c, int c_in) const { return dw_codes[k * c_in + c]; }
  std::int8_t pw(int c, int o, int c_out) const {
    return pw_codes[c * c_out + o];
  }

  // Throws std::invalid_argument when shapes disagree with `layer` or a scale
  // is not finite and positive.
  void Validate(const BnfLayerConfig& layer) const;

  bool operator==(const LayerWeights&) const = default;
};

struct BnfWeights {
  std::vector<LayerWeights> layers;
  bool operator==(const BnfWeights&) const = default;
};

// Real-valued parameters of one layer, BN already folded.
struct RealLayerWeights {
  std::vector<double> dw;    // [kernel_t x c_in]
  std::vector<double> pw;    // [c_in x c_out]
  std::vector<double> bias;  // [c_out]
};

struct BnfFrame {
  std::vector<std::int32_t> values;
  std::int64_t timestamp_us = 0;

  bool operator==(const BnfFrame&) const = default;
};

// Saturation tally. Any nonzero count means the integer path left the range
// the real-valued oracle models.
struct Diagnostics {
  std::uint64_t depthwise_saturations = 0;
  std::uint64_t headroom_saturations = 0;
  std::uint64_t accumulator_saturations = 0;
  std::uint64_t bias_saturations = 0;

  std::uint64_t total() const {
    return depthwise_saturations + headroom_saturations +
           accumulator_saturations + bias_saturations;
  }
  Diagnostics& operator+=(const Diagnostics& other);
};

// Valid convolution, output length floor((T - kernel_t) / stride_t) + 1.
// Throws std::invalid_argument when T < kernel_t or channels mismatch.
Grid<std::int32_t> DepthwiseTimeConv(const Grid<std::int32_t>& x,
                                     std::span<const std::int8_t> dw_codes,
                                     const BnfLayerConfig& layer,
                                     Diagnostics* diagnostics = nullptr);

// Exact integer channel mix z[t, o] = sum_c acc[t, c] * pw[c, o].
Grid<std::int64_t> PointwiseAccumulate(const Grid<std::int32_t>& acc,
                                       std::span<const std::int8_t> pw_codes,
                                       int c_out);

// Smallest shift keeping round(worst_case_depthwise / 2^shift) in int16.
int HeadroomShift(const BnfLayerConfig& layer,
                  std::span<const std::int8_t> dw_codes,
                  const QuantSpec& input_spec);

// Per-layer integer pipeline with its derived constants.
class LayerKernel {
 public:
  LayerKernel(BnfLayerConfig layer, LayerWeights weights,
              QuantSpec input_spec);

  const BnfLayerConfig& config() const { return layer_; }
  const LayerWeights& weights() const { return weights_; }
  const QuantSpec& input_spec() const { return input_spec_; }
  int headroom_shift() const { return headroom_shift_; }
  // Real value of one unit of the 32-bit pointwise accumulator.
  double accumulator_scale() const { return accumulator_scale_; }
  // Exact real requantization factor s_acc / s_out and its Q31 form.
  double requant_real() const { return requant_real_; }
  const FixedMultiplier& requant() const { return requant_; }

  Grid<std::int32_t> Depthwise(const Grid<std::int32_t>& x,
                               Diagnostics* diagnostics = nullptr) const;
  // Headroom shift, channel mix, bias, activation and requantization.
  Grid<std::int32_t> Pointwise(const Grid<std::int32_t>& acc,
                               Diagnostics* diagnostics = nullptr) const;
  Grid<std::int32_t> Run(const Grid<std::int32_t>& x,
                         Diagnostics* diagnostics = nullptr) const;

 private:
  BnfLayerConfig layer_;
  LayerWeights weights_;
  QuantSpec input_spec_;
  int headroom_shift_ = 0;
  double accumulator_scale_ = 1.0;
  double requant_real_ = 1.0;
  FixedMultiplier requant_;
};

// Free-function form of LayerKernel::Pointwise.
Grid<std::int32_t> PointwiseConv(const Grid<std::int32_t>& acc,
                                 const LayerKernel& kernel,
                                 Diagnostics* diagnostics = nullptr);

// Quantizes real weights: per-tensor symmetric int8 for dw and pw, bias to
// int32 accumulator units (saturating).
LayerWeights QuantizeLayerWeights(const RealLayerWeights& real,
                                  const BnfLayerConfig& layer,
                                  const QuantSpec& input_spec);
// Exact real values of quantized weights (bias in real units).
RealLayerWeights DequantizeLayerWeights(const LayerWeights& weights,
                                        const BnfLayerConfig& layer,
                                        const QuantSpec& input_spec);

// Immutable stack of layers; shareable across threads.
class Extractor {
 public:
  Extractor(std::vector<BnfLayerConfig> layers, BnfWeights weights,
            QuantSpec input_spec = kQmfSpec);

  const std::vector<BnfLayerConfig>& layers() const { return layers_; }
  const BnfWeights& weights() const { return weights_; }
  const std::vector<LayerKernel>& kernels() const { return kernels_; }
  const QuantSpec& input_spec() const { return input_spec_; }
  const QuantSpec& output_spec() const { return layers_.back().out_spec; }
  int input_channels() const { return layers_.front().c_in; }
  int output_channels() const { return layers_.back().c_out; }

  int receptive_field() const { return receptive_field_; }
  int total_stride() const { return total_stride_; }
  // floor((T - R) / S) + 1, or 0 when T < R.
  std::size_t OutputLength(std::size_t input_length) const;

  // Input rows are frames of input_spec codes.
  Grid<std::int32_t> RunCodes(const Grid<std::int32_t>& input,
                              Diagnostics* diagnostics = nullptr) const;
  std::vector<BnfFrame> Run(std::span<const QmfFrame> frames,
                            Diagnostics* diagnostics = nullptr) const;

 private:
  std::vector<BnfLayerConfig> layers_;
  BnfWeights weights_;
  QuantSpec input_spec_;
  std::vector<LayerKernel> kernels_;
  int receptive_field_ = 1;
  int total_stride_ = 1;
};

std::vector<BnfFrame> RunExtractor(std::span<const QmfFrame> frames,
                                   const BnfWeights& weights,
                                   const std::vector<BnfLayerConfig>& layers,
                                   Diagnostics* diagnostics = nullptr);

Grid<std::int32_t> FramesToGrid(std::span<const QmfFrame> frames);

// Causal streaming execution. Each layer keeps its last kernel_t input frames;
// the concatenated output equals Extractor::Run on the concatenated input.
// One stream per state; the state may move between threads.
class ExtractorStream {
 public:
  explicit ExtractorStream(std::shared_ptr<const Extractor> extractor);

  std::vector<BnfFrame> Push(const QmfFrame& frame);
  std::vector<BnfFrame> Push(std::span<const QmfFrame> frames);
  void Reset();

  const Diagnostics& diagnostics() const { return diagnostics_; }
  const Extractor& extractor() const { return *extractor_; }

 private:
  struct LayerState {
    std::deque<std::vector<std::int32_t>> rows;
    std::deque<std::int64_t> timestamps;
    std::uint64_t received = 0;
  };

  void PushToLayer(std::size_t layer, std::vector<std::int32_t> row,
                   std::int64_t timestamp, std::vector<BnfFrame>* out);

  std::shared_ptr<const Extractor> extractor_;
  std::vector<LayerState> states_;
  Diagnostics diagnostics_;
};

}  // namespace bnf

#endif  // BNFDSP_EXTRACTOR_H_
