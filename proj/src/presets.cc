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

#include "bnfdsp/presets.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "bnfdsp/fixedpoint.h"
#include "bnfdsp/frontend.h"
#include "bnfdsp/oracle.h"

namespace bnf {
namespace {

// Distribution code of the standard library is implementation-defined, so
// uniforms and normals are derived from raw mt19937_64 words to stay
// reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal() {
    const double u1 = 1.0 - Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<Preset> MakePresets() {
  std::vector<Preset> presets;
  presets.push_back({"best-1/10", "Best ~1/10 BW BNF model",
                     {MakeLayer(4, 1, 32, 12, 4)}, 1, "512 (4KB)"});
  presets.push_back({"best-1/20", "Best ~1/20 BW BNF model",
                     {MakeLayer(4, 2, 32, 12, 4)}, 1, "512 (4KB)"});
  presets.push_back({"best-1/32", "Best 1/32 BW BNF model",
                     {MakeLayer(4, 2, 32, 8, 4)}, 1, "384 (3KB)"});
  presets.push_back({"best-1/16", "Best 1/16 BW BNF model",
                     {MakeLayer(4, 2, 32, 16, 4)}, 2, "640 (5KB)"});
  presets.push_back({"ct-1/32", "1/32 BW BNF model (constant time)",
                     {MakeLayer(4, 2, 32, 8, 4)}, 2, "384 (3KB)"});
  presets.push_back({"best-1/64", "Best 1/64 BW BNF model",
                     {MakeLayer(4, 2, 32, 32, kIntermediateBits),
                      MakeLayer(4, 2, 32, 8, 4)},
                     1, "1536 (123KB)"});
  return presets;
}

}  // namespace

const std::vector<Preset>& BnfPresets() {
  static const std::vector<Preset> presets = MakePresets();
  return presets;
}

const Preset& FindPreset(std::string_view name) {
  for (const Preset& preset : BnfPresets()) {
    if (preset.name == name) return preset;
  }
  std::string known;
  for (const Preset& preset : BnfPresets()) {
    known += (known.empty() ? "" : ", ") + preset.name;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (known: " + known + ")");
}

std::vector<std::int16_t> SyntheticSignal(std::size_t num_samples,
                                          std::uint64_t seed) {
  Rng rng(seed);
  constexpr double kRate = 16000.0;
  constexpr int kVoices = 3;
  double f0[kVoices];
  double sweep[kVoices];
  double phase[kVoices];
  for (int v = 0; v < kVoices; ++v) {
    f0[v] = rng.Uniform(110.0, 320.0);
    sweep[v] = rng.Uniform(-60.0, 60.0);  // Hz per second
    phase[v] = 0.0;
  }
  const double envelope_hz = rng.Uniform(2.0, 5.0);
  const double noise_level = rng.Uniform(200.0, 800.0);
  std::vector<std::int16_t> pcm(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    const double t = static_cast<double>(n) / kRate;
    const double envelope =
        0.25 + 0.75 * std::abs(std::sin(std::numbers::pi * envelope_hz * t));
    double s = 0.0;
    for (int v = 0; v < kVoices; ++v) {
      const double f = f0[v] + sweep[v] * t;
      phase[v] += 2.0 * std::numbers::pi * f / kRate;
      for (int h = 1; h <= 8; ++h) {
        if (f * h > 3800.0) break;
        s += std::sin(h * phase[v]) / h;
      }
    }
    const double value =
        2500.0 * envelope * s + noise_level * rng.Uniform(-1.0, 1.0);
    pcm[n] = static_cast<std::int16_t>(
        std::clamp(std::lround(value), -32768L, 32767L));
  }
  return pcm;
}

WeightFile SyntheticWeights(const std::vector<BnfLayerConfig>& layers,
                            std::uint64_t seed) {
  if (layers.empty()) {
    throw std::invalid_argument("SyntheticWeights: need at least one layer");
  }
  Rng rng(seed);
  FrontendConfig cfg;
  cfg.n_mel_bins = layers.front().c_in;
  const Frontend frontend(cfg);
  Grid<double> x = frontend.LogMel(SyntheticSignal(3 * 16000, seed ^ 0xca1bULL));
  for (double& v : x.data()) v = std::min(v, kQmfSpec.max_real());

  WeightFile file;
  file.layers = layers;
  QuantSpec input_spec = kQmfSpec;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const BnfLayerConfig& layer = layers[i];
    if (i > 0 && layer.c_in != layers[i - 1].c_out) {
      throw std::invalid_argument("SyntheticWeights: channels do not chain");
    }
    const auto k = static_cast<std::size_t>(layer.kernel_t);
    const auto ci = static_cast<std::size_t>(layer.c_in);
    const auto co = static_cast<std::size_t>(layer.c_out);
    RealLayerWeights real;
    real.dw.resize(k * ci);
    real.pw.resize(ci * co);
    real.bias.assign(co, 0.0);
    for (double& w : real.dw) w = rng.Uniform(-1.0, 1.0);
    const double pw_std = 1.0 / std::sqrt(static_cast<double>(ci));
    for (double& w : real.pw) w = pw_std * rng.Normal();

    // Fit batch norm to the pre-activation statistics, then fold it.
    const Grid<double> pre = ReferencePreActivation(x, layer, real);
    std::vector<double> mean(co, 0.0);
    std::vector<double> var(co, 0.0);
    for (std::size_t t = 0; t < pre.rows(); ++t) {
      for (std::size_t o = 0; o < co; ++o) mean[o] += pre(t, o);
    }
    for (double& m : mean) m /= static_cast<double>(pre.rows());
    for (std::size_t t = 0; t < pre.rows(); ++t) {
      for (std::size_t o = 0; o < co; ++o) {
        const double d = pre(t, o) - mean[o];
        var[o] += d * d;
      }
    }
    for (double& v : var) v /= static_cast<double>(pre.rows());
    const bool relu = layer.activation == Activation::kRelu;
    const std::vector<double> gamma(co, relu ? 0.25 : 0.33);
    const std::vector<double> beta(co, relu ? 0.5 : 0.0);
    const FoldedAffine bn = FoldBatchNorm(gamma, beta, mean, var);
    for (std::size_t c = 0; c < ci; ++c) {
      for (std::size_t o = 0; o < co; ++o) {
        real.pw[c * co + o] *= bn.scale_per_channel[o];
      }
    }
    for (std::size_t o = 0; o < co; ++o) {
      real.bias[o] = bn.Apply(o, real.bias[o]);
    }

    LayerWeights quantized = QuantizeLayerWeights(real, layer, input_spec);
    x = ReferenceLayer(x, layer,
                       DequantizeLayerWeights(quantized, layer, input_spec));
    file.weights.layers.push_back(std::move(quantized));
    input_spec = layer.out_spec;
  }
  return file;
}

WeightFile SyntheticPresetWeights(const Preset& preset, std::uint64_t seed) {
  return SyntheticWeights(preset.layers, seed);
}

}  // namespace bnf
