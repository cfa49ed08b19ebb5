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

#include "bnfdsp/extractor.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace bnf {
namespace {

constexpr std::int64_t kInt16Max = std::numeric_limits<std::int16_t>::max();
constexpr std::int64_t kInt16Min = std::numeric_limits<std::int16_t>::min();

std::string Shape(std::size_t a, std::size_t b) {
  return std::to_string(a) + "x" + std::to_string(b);
}

}  // namespace

std::string_view ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "identity";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation '" + std::string(name) +
                              "'");
}

QuantSpec ActivationSpec(int bits, Activation activation) {
  if (activation == Activation::kRelu) {
    if (bits < 1 || bits > 16) {
      throw std::invalid_argument("ActivationSpec: bits must be in 1..16");
    }
    return {bits, false, 1.0 / static_cast<double>((1 << bits) - 1)};
  }
  if (bits < 2 || bits > 16) {
    throw std::invalid_argument(
        "ActivationSpec: identity layers need 2..16 bits");
  }
  return {bits, true, 1.0 / static_cast<double>((1 << (bits - 1)) - 1)};
}

void BnfLayerConfig::Validate() const {
  if (kernel_t < 1 || stride_t < 1 || c_in < 1 || c_out < 1) {
    throw std::invalid_argument(
        "BnfLayerConfig: kernel_t, stride_t, c_in, c_out must be positive");
  }
  out_spec.Validate();
  if (out_spec.bits > 16) {
    throw std::invalid_argument("BnfLayerConfig: out_spec bits must be <= 16");
  }
}

std::int64_t BnfLayerConfig::activation_min_code() const {
  return activation == Activation::kRelu
             ? std::max<std::int64_t>(0, out_spec.min_code())
             : out_spec.min_code();
}

BnfLayerConfig MakeLayer(int kernel_t, int stride_t, int c_in, int c_out,
                         int out_bits, Activation activation) {
  BnfLayerConfig layer;
  layer.kernel_t = kernel_t;
  layer.stride_t = stride_t;
  layer.c_in = c_in;
  layer.c_out = c_out;
  layer.activation = activation;
  layer.out_spec = ActivationSpec(out_bits, activation);
  layer.Validate();
  return layer;
}

void LayerWeights::Validate(const BnfLayerConfig& layer) const {
  const auto k = static_cast<std::size_t>(layer.kernel_t);
  const auto ci = static_cast<std::size_t>(layer.c_in);
  const auto co = static_cast<std::size_t>(layer.c_out);
  if (dw_codes.size() != k * ci) {
    throw std::invalid_argument("LayerWeights: dw_codes has " +
                                std::to_string(dw_codes.size()) +
                                " entries, layer needs " + Shape(k, ci));
  }
  if (pw_codes.size() != ci * co) {
    throw std::invalid_argument("LayerWeights: pw_codes has " +
                                std::to_string(pw_codes.size()) +
                                " entries, layer needs " + Shape(ci, co));
  }
  if (bias_codes.size() != co) {
    throw std::invalid_argument("LayerWeights: bias_codes has " +
                                std::to_string(bias_codes.size()) +
                                " entries, layer needs " + std::to_string(co));
  }
  for (double s : {dw_scale, pw_scale}) {
    if (!std::isfinite(s) || s <= 0.0) {
      throw std::invalid_argument(
          "LayerWeights: scales must be finite and > 0");
    }
  }
}

Diagnostics& Diagnostics::operator+=(const Diagnostics& other) {
  depthwise_saturations += other.depthwise_saturations;
  headroom_saturations += other.headroom_saturations;
  accumulator_saturations += other.accumulator_saturations;
  bias_saturations += other.bias_saturations;
  return *this;
}

Grid<std::int32_t> DepthwiseTimeConv(const Grid<std::int32_t>& x,
                                     std::span<const std::int8_t> dw_codes,
                                     const BnfLayerConfig& layer,
                                     Diagnostics* diagnostics) {
  const auto k = static_cast<std::size_t>(layer.kernel_t);
  const auto stride = static_cast<std::size_t>(layer.stride_t);
  const auto channels = static_cast<std::size_t>(layer.c_in);
  if (x.cols() != channels) {
    throw std::invalid_argument("DepthwiseTimeConv: input has " +
                                std::to_string(x.cols()) +
                                " channels, layer expects " +
                                std::to_string(channels));
  }
  if (dw_codes.size() != k * channels) {
    throw std::invalid_argument("DepthwiseTimeConv: kernel shape mismatch");
  }
  if (x.rows() < k) {
    throw std::invalid_argument("DepthwiseTimeConv: " +
                                std::to_string(x.rows()) +
                                " frames is shorter than kernel_t " +
                                std::to_string(k));
  }
  const std::size_t out_rows = (x.rows() - k) / stride + 1;
  Grid<std::int32_t> acc(out_rows, channels);
  std::uint64_t saturated = 0;
  for (std::size_t t = 0; t < out_rows; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::int64_t sum = 0;
      for (std::size_t j = 0; j < k; ++j) {
        sum += std::int64_t{dw_codes[j * channels + c]} * x(t * stride + j, c);
      }
      acc(t, c) = SaturateInt32(sum, &saturated);
    }
  }
  if (diagnostics != nullptr) diagnostics->depthwise_saturations += saturated;
  return acc;
}

Grid<std::int64_t> PointwiseAccumulate(const Grid<std::int32_t>& acc,
                                       std::span<const std::int8_t> pw_codes,
                                       int c_out) {
  const std::size_t c_in = acc.cols();
  const auto co = static_cast<std::size_t>(c_out);
  if (pw_codes.size() != c_in * co) {
    throw std::invalid_argument("PointwiseAccumulate: expected " +
                                Shape(c_in, co) + " weights");
  }
  Grid<std::int64_t> z(acc.rows(), co);
  for (std::size_t t = 0; t < acc.rows(); ++t) {
    for (std::size_t c = 0; c < c_in; ++c) {
      const std::int64_t a = acc(t, c);
      if (a == 0) continue;
      for (std::size_t o = 0; o < co; ++o) {
        z(t, o) += a * pw_codes[c * co + o];
      }
    }
  }
  return z;
}

int HeadroomShift(const BnfLayerConfig& layer,
                  std::span<const std::int8_t> dw_codes,
                  const QuantSpec& input_spec) {
  const std::int64_t max_input =
      std::max(std::abs(input_spec.min_code()), std::abs(input_spec.max_code()));
  const auto channels = static_cast<std::size_t>(layer.c_in);
  std::int64_t worst = 0;
  for (std::size_t c = 0; c < channels; ++c) {
    std::int64_t l1 = 0;
    for (int k = 0; k < layer.kernel_t; ++k) {
      l1 += std::abs(std::int64_t{dw_codes[k * channels + c]});
    }
    worst = std::max(worst, l1);
  }
  // Depthwise accumulators are stored saturated to int32.
  const std::int64_t bound = std::min<std::int64_t>(
      worst * max_input, std::numeric_limits<std::int32_t>::max() + 1LL);
  int shift = 0;
  while (RoundingShift(bound, shift) > kInt16Max) ++shift;
  return shift;
}

LayerKernel::LayerKernel(BnfLayerConfig layer, LayerWeights weights,
                         QuantSpec input_spec)
    : layer_(std::move(layer)),
      weights_(std::move(weights)),
      input_spec_(input_spec) {
  layer_.Validate();
  input_spec_.Validate();
  weights_.Validate(layer_);
  headroom_shift_ = HeadroomShift(layer_, weights_.dw_codes, input_spec_);
  accumulator_scale_ = std::ldexp(
      input_spec_.scale * weights_.dw_scale * weights_.pw_scale,
      headroom_shift_);
  requant_real_ = accumulator_scale_ / layer_.out_spec.scale;
  requant_ = FixedMultiplier::FromReal(requant_real_);
}

Grid<std::int32_t> LayerKernel::Depthwise(const Grid<std::int32_t>& x,
                                          Diagnostics* diagnostics) const {
  return DepthwiseTimeConv(x, weights_.dw_codes, layer_, diagnostics);
}

Grid<std::int32_t> LayerKernel::Pointwise(const Grid<std::int32_t>& acc,
                                          Diagnostics* diagnostics) const {
  const auto c_in = static_cast<std::size_t>(layer_.c_in);
  const auto c_out = static_cast<std::size_t>(layer_.c_out);
  if (acc.cols() != c_in) {
    throw std::invalid_argument("PointwiseConv: accumulator has " +
                                std::to_string(acc.cols()) +
                                " channels, layer expects " +
                                std::to_string(c_in));
  }
  Diagnostics local;
  Grid<std::int32_t> mid(acc.rows(), c_in);
  for (std::size_t t = 0; t < acc.rows(); ++t) {
    for (std::size_t c = 0; c < c_in; ++c) {
      std::int64_t v = RoundingShift(acc(t, c), headroom_shift_);
      if (v > kInt16Max || v < kInt16Min) {
        ++local.headroom_saturations;
        v = std::clamp(v, kInt16Min, kInt16Max);
      }
      mid(t, c) = static_cast<std::int32_t>(v);
    }
  }
  const Grid<std::int64_t> z =
      PointwiseAccumulate(mid, weights_.pw_codes, layer_.c_out);
  const std::int64_t lo = layer_.activation_min_code();
  const std::int64_t hi = layer_.out_spec.max_code();
  Grid<std::int32_t> out(acc.rows(), c_out);
  for (std::size_t t = 0; t < acc.rows(); ++t) {
    for (std::size_t o = 0; o < c_out; ++o) {
      const std::int32_t sum =
          SaturateInt32(z(t, o), &local.accumulator_saturations);
      std::int32_t total = SaturateInt32(
          std::int64_t{sum} + weights_.bias_codes[o], &local.bias_saturations);
      if (layer_.activation == Activation::kRelu && total < 0) total = 0;
      const std::int64_t code = std::clamp(requant_.Apply(total), lo, hi);
      out(t, o) = static_cast<std::int32_t>(code);
    }
  }
  if (diagnostics != nullptr) *diagnostics += local;
  return out;
}

Grid<std::int32_t> LayerKernel::Run(const Grid<std::int32_t>& x,
                                    Diagnostics* diagnostics) const {
  return Pointwise(Depthwise(x, diagnostics), diagnostics);
}

Grid<std::int32_t> PointwiseConv(const Grid<std::int32_t>& acc,
                                 const LayerKernel& kernel,
                                 Diagnostics* diagnostics) {
  return kernel.Pointwise(acc, diagnostics);
}

LayerWeights QuantizeLayerWeights(const RealLayerWeights& real,
                                  const BnfLayerConfig& layer,
                                  const QuantSpec& input_spec) {
  layer.Validate();
  const auto k = static_cast<std::size_t>(layer.kernel_t);
  const auto ci = static_cast<std::size_t>(layer.c_in);
  const auto co = static_cast<std::size_t>(layer.c_out);
  if (real.dw.size() != k * ci || real.pw.size() != ci * co ||
      real.bias.size() != co) {
    throw std::invalid_argument("QuantizeLayerWeights: shape mismatch");
  }
  LayerWeights out;
  QuantizedTensor dw = QuantizeWeightsInt8(real.dw);
  QuantizedTensor pw = QuantizeWeightsInt8(real.pw);
  out.dw_codes = std::move(dw.codes);
  out.dw_scale = dw.scale;
  out.pw_codes = std::move(pw.codes);
  out.pw_scale = pw.scale;
  const int shift = HeadroomShift(layer, out.dw_codes, input_spec);
  const double acc_scale =
      std::ldexp(input_spec.scale * out.dw_scale * out.pw_scale, shift);
  const QuantSpec bias_spec{32, true, acc_scale};
  out.bias_codes.reserve(co);
  for (double b : real.bias) {
    out.bias_codes.push_back(static_cast<std::int32_t>(Quantize(b, bias_spec)));
  }
  return out;
}

RealLayerWeights DequantizeLayerWeights(const LayerWeights& weights,
                                        const BnfLayerConfig& layer,
                                        const QuantSpec& input_spec) {
  weights.Validate(layer);
  RealLayerWeights real;
  real.dw.reserve(weights.dw_codes.size());
  for (auto c : weights.dw_codes) real.dw.push_back(c * weights.dw_scale);
  real.pw.reserve(weights.pw_codes.size());
  for (auto c : weights.pw_codes) real.pw.push_back(c * weights.pw_scale);
  const int shift = HeadroomShift(layer, weights.dw_codes, input_spec);
  const double acc_scale =
      std::ldexp(input_spec.scale * weights.dw_scale * weights.pw_scale, shift);
  real.bias.reserve(weights.bias_codes.size());
  for (auto b : weights.bias_codes) real.bias.push_back(b * acc_scale);
  return real;
}

Extractor::Extractor(std::vector<BnfLayerConfig> layers, BnfWeights weights,
                     QuantSpec input_spec)
    : layers_(std::move(layers)),
      weights_(std::move(weights)),
      input_spec_(input_spec) {
  if (layers_.empty()) {
    throw std::invalid_argument("Extractor: need at least one layer");
  }
  if (weights_.layers.size() != layers_.size()) {
    throw std::invalid_argument(
        "Extractor: " + std::to_string(weights_.layers.size()) +
        " weight blocks for " + std::to_string(layers_.size()) + " layers");
  }
  QuantSpec spec = input_spec_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (i > 0 && layers_[i].c_in != layers_[i - 1].c_out) {
      throw std::invalid_argument("Extractor: layer " + std::to_string(i) +
                                  " c_in does not match previous c_out");
    }
    kernels_.emplace_back(layers_[i], weights_.layers[i], spec);
    spec = layers_[i].out_spec;
  }
  receptive_field_ = 1;
  total_stride_ = 1;
  for (const auto& layer : layers_) {
    receptive_field_ += (layer.kernel_t - 1) * total_stride_;
    total_stride_ *= layer.stride_t;
  }
}

std::size_t Extractor::OutputLength(std::size_t input_length) const {
  const auto r = static_cast<std::size_t>(receptive_field_);
  if (input_length < r) return 0;
  return (input_length - r) / static_cast<std::size_t>(total_stride_) + 1;
}

Grid<std::int32_t> Extractor::RunCodes(const Grid<std::int32_t>& input,
                                       Diagnostics* diagnostics) const {
  if (input.cols() != static_cast<std::size_t>(input_channels())) {
    throw std::invalid_argument("Extractor: input has " +
                                std::to_string(input.cols()) +
                                " channels, first layer expects " +
                                std::to_string(input_channels()));
  }
  if (input.rows() < static_cast<std::size_t>(receptive_field_)) {
    throw std::invalid_argument(
        "Extractor: " + std::to_string(input.rows()) +
        " frames is shorter than the receptive field " +
        std::to_string(receptive_field_));
  }
  for (auto v : input.data()) {
    if (!input_spec_.InRange(v)) {
      throw std::invalid_argument("Extractor: input code out of range");
    }
  }
  Grid<std::int32_t> x = input;
  for (const auto& kernel : kernels_) x = kernel.Run(x, diagnostics);
  return x;
}

Grid<std::int32_t> FramesToGrid(std::span<const QmfFrame> frames) {
  if (frames.empty()) return {};
  const std::size_t channels = frames.front().values.size();
  Grid<std::int32_t> grid(frames.size(), channels);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].values.size() != channels) {
      throw std::invalid_argument("FramesToGrid: ragged frames");
    }
    for (std::size_t c = 0; c < channels; ++c) {
      grid(t, c) = frames[t].values[c];
    }
  }
  return grid;
}

std::vector<BnfFrame> Extractor::Run(std::span<const QmfFrame> frames,
                                     Diagnostics* diagnostics) const {
  const Grid<std::int32_t> out = RunCodes(FramesToGrid(frames), diagnostics);
  std::vector<BnfFrame> result(out.rows());
  for (std::size_t t = 0; t < out.rows(); ++t) {
    result[t].values.assign(out.row(t).begin(), out.row(t).end());
    result[t].timestamp_us = frames[t * total_stride_].timestamp_us;
  }
  return result;
}

std::vector<BnfFrame> RunExtractor(std::span<const QmfFrame> frames,
                                   const BnfWeights& weights,
                                   const std::vector<BnfLayerConfig>& layers,
                                   Diagnostics* diagnostics) {
  return Extractor(layers, weights).Run(frames, diagnostics);
}

ExtractorStream::ExtractorStream(std::shared_ptr<const Extractor> extractor)
    : extractor_(std::move(extractor)) {
  if (extractor_ == nullptr) {
    throw std::invalid_argument("ExtractorStream: null extractor");
  }
  states_.resize(extractor_->layers().size());
}

void ExtractorStream::Reset() {
  for (auto& state : states_) state = LayerState{};
  diagnostics_ = Diagnostics{};
}

std::vector<BnfFrame> ExtractorStream::Push(const QmfFrame& frame) {
  const auto channels = static_cast<std::size_t>(extractor_->input_channels());
  if (frame.values.size() != channels) {
    throw std::invalid_argument("ExtractorStream: frame has " +
                                std::to_string(frame.values.size()) +
                                " channels, expected " +
                                std::to_string(channels));
  }
  std::vector<std::int32_t> row(frame.values.begin(), frame.values.end());
  for (auto v : row) {
    if (!extractor_->input_spec().InRange(v)) {
      throw std::invalid_argument("ExtractorStream: input code out of range");
    }
  }
  std::vector<BnfFrame> out;
  PushToLayer(0, std::move(row), frame.timestamp_us, &out);
  return out;
}

std::vector<BnfFrame> ExtractorStream::Push(std::span<const QmfFrame> frames) {
  std::vector<BnfFrame> out;
  for (const auto& frame : frames) {
    auto emitted = Push(frame);
    out.insert(out.end(), std::make_move_iterator(emitted.begin()),
               std::make_move_iterator(emitted.end()));
  }
  return out;
}

void ExtractorStream::PushToLayer(std::size_t layer,
                                  std::vector<std::int32_t> row,
                                  std::int64_t timestamp,
                                  std::vector<BnfFrame>* out) {
  const LayerKernel& kernel = extractor_->kernels()[layer];
  const auto k = static_cast<std::size_t>(kernel.config().kernel_t);
  const auto stride = static_cast<std::uint64_t>(kernel.config().stride_t);
  LayerState& state = states_[layer];
  state.rows.push_back(std::move(row));
  state.timestamps.push_back(timestamp);
  if (state.rows.size() > k) {
    state.rows.pop_front();
    state.timestamps.pop_front();
  }
  ++state.received;
  if (state.received < k || (state.received - k) % stride != 0) return;

  Grid<std::int32_t> window(k, static_cast<std::size_t>(kernel.config().c_in));
  for (std::size_t j = 0; j < k; ++j) {
    std::copy(state.rows[j].begin(), state.rows[j].end(),
              window.row(j).begin());
  }
  const Grid<std::int32_t> y = kernel.Run(window, &diagnostics_);
  std::vector<std::int32_t> next(y.row(0).begin(), y.row(0).end());
  const std::int64_t ts = state.timestamps.front();
  if (layer + 1 < states_.size()) {
    PushToLayer(layer + 1, std::move(next), ts, out);
  } else {
    out->push_back(BnfFrame{std::move(next), ts});
  }
}

}  // namespace bnf
