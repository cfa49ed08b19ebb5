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

#include "bnfdsp/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace bnf {
namespace {

constexpr std::int64_t kInt32Max = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t kInt32Min = std::numeric_limits<std::int32_t>::min();

double ClampReal(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Real output range the layer can produce.
double LayerLow(const BnfLayerConfig& layer) {
  return static_cast<double>(layer.activation_min_code()) *
         layer.out_spec.scale;
}

double LayerHigh(const BnfLayerConfig& layer) {
  return layer.out_spec.max_real();
}

}  // namespace

RealModel RealModel::FromExtractor(const Extractor& extractor) {
  RealModel model;
  model.layers = extractor.layers();
  model.input_spec = extractor.input_spec();
  for (const LayerKernel& kernel : extractor.kernels()) {
    model.weights.push_back(DequantizeLayerWeights(
        kernel.weights(), kernel.config(), kernel.input_spec()));
  }
  return model;
}

Grid<double> ReferencePreActivation(const Grid<double>& x,
                                    const BnfLayerConfig& layer,
                                    const RealLayerWeights& weights) {
  const auto k = static_cast<std::size_t>(layer.kernel_t);
  const auto stride = static_cast<std::size_t>(layer.stride_t);
  const auto ci = static_cast<std::size_t>(layer.c_in);
  const auto co = static_cast<std::size_t>(layer.c_out);
  if (x.cols() != ci) {
    throw std::invalid_argument("ReferencePreActivation: channel mismatch");
  }
  if (weights.dw.size() != k * ci || weights.pw.size() != ci * co ||
      weights.bias.size() != co) {
    throw std::invalid_argument("ReferencePreActivation: weight shape mismatch");
  }
  if (x.rows() < k) {
    throw std::invalid_argument("ReferencePreActivation: input too short");
  }
  const std::size_t rows = (x.rows() - k) / stride + 1;
  Grid<double> out(rows, co);
  std::vector<double> depthwise(ci);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t c = 0; c < ci; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        acc += weights.dw[j * ci + c] * x(t * stride + j, c);
      }
      depthwise[c] = acc;
    }
    for (std::size_t o = 0; o < co; ++o) {
      double acc = weights.bias[o];
      for (std::size_t c = 0; c < ci; ++c) {
        acc += weights.pw[c * co + o] * depthwise[c];
      }
      out(t, o) = acc;
    }
  }
  return out;
}

Grid<double> ReferenceLayer(const Grid<double>& x, const BnfLayerConfig& layer,
                            const RealLayerWeights& weights) {
  Grid<double> y = ReferencePreActivation(x, layer, weights);
  const double lo = LayerLow(layer);
  const double hi = LayerHigh(layer);
  for (double& v : y.data()) {
    if (layer.activation == Activation::kRelu) v = std::max(v, 0.0);
    v = ClampReal(v, lo, hi);
  }
  return y;
}

Grid<double> ReferenceFromInput(const Grid<double>& input,
                                const RealModel& model) {
  if (model.layers.size() != model.weights.size() || model.layers.empty()) {
    throw std::invalid_argument("ReferenceFromInput: malformed model");
  }
  Grid<double> x = input;
  const double lo = model.input_spec.min_real();
  const double hi = model.input_spec.max_real();
  for (double& v : x.data()) v = ClampReal(v, lo, hi);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    x = ReferenceLayer(x, model.layers[i], model.weights[i]);
  }
  return x;
}

Grid<double> ReferenceRun(std::span<const std::int16_t> pcm,
                          const FrontendConfig& cfg, const RealModel& model) {
  const Frontend frontend(cfg);
  return ReferenceFromInput(frontend.LogMel(pcm), model);
}

ErrorBound Certify(const Extractor& extractor, const CertifyOptions& options) {
  const auto& kernels = extractor.kernels();
  if (options.reference != nullptr &&
      options.reference->weights.size() != kernels.size()) {
    throw std::invalid_argument("Certify: reference model layer mismatch");
  }
  ErrorBound bound;
  bound.per_stage_steps.push_back(options.input_error);

  double error = options.input_error;
  const QuantSpec& in_spec = extractor.input_spec();
  double input_magnitude =
      std::max(std::abs(in_spec.min_real()), std::abs(in_spec.max_real()));
  std::int64_t input_max_code =
      std::max(std::abs(in_spec.min_code()), std::abs(in_spec.max_code()));

  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const LayerKernel& kernel = kernels[i];
    const BnfLayerConfig& layer = kernel.config();
    const LayerWeights& w = kernel.weights();
    const RealLayerWeights q =
        DequantizeLayerWeights(w, layer, kernel.input_spec());
    const RealLayerWeights& r =
        options.reference != nullptr ? options.reference->weights[i] : q;
    const auto k = static_cast<std::size_t>(layer.kernel_t);
    const auto ci = static_cast<std::size_t>(layer.c_in);
    const auto co = static_cast<std::size_t>(layer.c_out);
    if (r.dw.size() != k * ci || r.pw.size() != ci * co || r.bias.size() != co) {
      throw std::invalid_argument("Certify: reference weight shape mismatch");
    }

    const double shift_half_step =
        kernel.headroom_shift() == 0
            ? 0.0
            : std::ldexp(kernel.input_spec().scale * w.dw_scale,
                         kernel.headroom_shift() - 1);

    // Per input channel: depthwise error bound and reference magnitude.
    std::vector<double> dw_error(ci);
    std::vector<double> dw_ref_gain(ci);
    std::vector<std::int64_t> mid_max(ci);
    bool depthwise_may_saturate = false;
    for (std::size_t c = 0; c < ci; ++c) {
      double gain_q = 0.0;
      double gain_r = 0.0;
      double diff = 0.0;
      std::int64_t l1_codes = 0;
      for (std::size_t j = 0; j < k; ++j) {
        gain_q += std::abs(q.dw[j * ci + c]);
        gain_r += std::abs(r.dw[j * ci + c]);
        diff += std::abs(q.dw[j * ci + c] - r.dw[j * ci + c]);
        l1_codes += std::abs(std::int64_t{w.dw_codes[j * ci + c]});
      }
      dw_error[c] = shift_half_step + error * gain_q + input_magnitude * diff;
      dw_ref_gain[c] = gain_r;
      const std::int64_t worst = l1_codes * input_max_code;
      if (worst > kInt32Max) depthwise_may_saturate = true;
      mid_max[c] = std::min<std::int64_t>(
          RoundingShift(std::min(worst, kInt32Max + 1), kernel.headroom_shift()),
          32768);
    }

    double worst_b = 0.0;
    std::int64_t worst_total = 0;
    bool transparent = !depthwise_may_saturate;
    const std::int64_t hi_code = layer.out_spec.max_code();
    const std::int64_t lo_code = layer.activation_min_code();
    for (std::size_t o = 0; o < co; ++o) {
      double b = std::abs(q.bias[o] - r.bias[o]);
      std::int64_t total = std::abs(std::int64_t{w.bias_codes[o]});
      for (std::size_t c = 0; c < ci; ++c) {
        const double pq = q.pw[c * co + o];
        const double pr = r.pw[c * co + o];
        b += std::abs(pq) * dw_error[c] +
             std::abs(pq - pr) * dw_ref_gain[c] * input_magnitude;
        total += std::abs(std::int64_t{w.pw_codes[c * co + o]}) * mid_max[c];
      }
      worst_b = std::max(worst_b, b);
      if (total > kInt32Max) {
        const std::int64_t bias = w.bias_codes[o];
        const bool pos_ok =
            kernel.requant().Apply(kInt32Max + std::min<std::int64_t>(bias, 0)) >=
            hi_code;
        const std::int64_t neg_total = kInt32Min + std::max<std::int64_t>(bias, 0);
        const bool neg_ok = layer.activation == Activation::kRelu
                                ? neg_total < 0 || lo_code >= 0
                                : kernel.requant().Apply(neg_total) <= lo_code;
        transparent = transparent && pos_ok && neg_ok;
      }
      worst_total = std::max(worst_total, std::min(total, kInt32Max + 1));
    }

    const double s_out = layer.out_spec.scale;
    const double span = static_cast<double>(hi_code - lo_code) * s_out;
    const double multiplier_error =
        static_cast<double>(worst_total) *
        std::abs(kernel.requant().ToReal() - kernel.requant_real());
    double layer_error = worst_b + s_out * (0.5 + multiplier_error);
    if (!transparent) {
      layer_error += span;
      bound.saturation_transparent = false;
    }
    layer_error = std::min(layer_error, span);

    bound.per_stage_steps.push_back(s_out);
    bound.per_layer_bound.push_back(layer_error);
    error = layer_error;
    input_magnitude = std::max(std::abs(static_cast<double>(lo_code)),
                               std::abs(static_cast<double>(hi_code))) *
                      s_out;
    input_max_code = std::max(std::abs(layer.out_spec.min_code()),
                              std::abs(layer.out_spec.max_code()));
  }
  bound.end_to_end_bound = error;
  return bound;
}

ErrorBound Certify(const std::vector<BnfLayerConfig>& layers,
                   const BnfWeights& weights, const CertifyOptions& options) {
  return Certify(Extractor(layers, weights), options);
}

double MaxAbsDeviation(const Grid<std::int32_t>& codes, const QuantSpec& spec,
                       const Grid<double>& reference) {
  if (codes.rows() != reference.rows() || codes.cols() != reference.cols()) {
    throw std::invalid_argument("MaxAbsDeviation: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < codes.data().size(); ++i) {
    worst = std::max(worst, std::abs(codes.data()[i] * spec.scale -
                                     reference.data()[i]));
  }
  return worst;
}

Grid<std::int32_t> QuantizeReference(const Grid<double>& reference,
                                     const QuantSpec& spec) {
  Grid<std::int32_t> out(reference.rows(), reference.cols());
  for (std::size_t i = 0; i < reference.data().size(); ++i) {
    out.data()[i] = static_cast<std::int32_t>(Quantize(reference.data()[i], spec));
  }
  return out;
}

}  // namespace bnf
