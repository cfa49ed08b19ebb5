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

#ifndef BNFDSP_ORACLE_H_
#define BNFDSP_ORACLE_H_

// Real-arithmetic reference for the frontend + extractor chain and an
// analytic bound on how far the integer path may deviate from it.
//
// The reference follows the same dataflow with no rounding anywhere. It does
// clamp every stage to the real range of that stage's QuantSpec, since
// saturation is part of the modelled arithmetic; clamping is 1-Lipschitz so
// per-stage errors compose.

#include <cstdint>
#include <span>
#include <vector>

#include "bnfdsp/extractor.h"
#include "bnfdsp/frontend.h"
#include "bnfdsp/grid.h"

namespace bnf {

struct RealModel {
  std::vector<BnfLayerConfig> layers;
  std::vector<RealLayerWeights> weights;
  QuantSpec input_spec = kQmfSpec;

  // Exact real values of an extractor's quantized parameters.
  static RealModel FromExtractor(const Extractor& extractor);
};

// P[t, o] = sum_c pw[c, o] * sum_k dw[k, c] * x[t * stride + k, c] + bias[o].
Grid<double> ReferencePreActivation(const Grid<double>& x,
                                    const BnfLayerConfig& layer,
                                    const RealLayerWeights& weights);
// Activation and clamp to the layer's output range, in real units.
Grid<double> ReferenceLayer(const Grid<double>& x, const BnfLayerConfig& layer,
                            const RealLayerWeights& weights);
// Input rows in real units; clamped to model.input_spec's range first.
Grid<double> ReferenceFromInput(const Grid<double>& input,
                                const RealModel& model);
// ln(1 + mel energy) clamped to the QMF range, then the layers.
Grid<double> ReferenceRun(std::span<const std::int16_t> pcm,
                          const FrontendConfig& cfg, const RealModel& model);

struct ErrorBound {
  // Entry 0 is the input error; entry i is layer i's output step (s_out).
  std::vector<double> per_stage_steps;
  // Bound on |dequantized code - reference| after each layer, real units.
  std::vector<double> per_layer_bound;
  double end_to_end_bound = 0.0;
  // True when no layer can reach int32 accumulator saturation in a way that
  // changes its output.
  bool saturation_transparent = true;
};

struct CertifyOptions {
  // L-infinity error of the extractor input relative to the reference input,
  // real units. 0 when codes are the input; kQmfSpec.scale / 2 from PCM.
  double input_error = 0.0;
  // Reference weights when they differ from the quantized ones.
  const RealModel* reference = nullptr;
};

// Per layer, with e the input error, X the input magnitude bound, q/r the
// quantized/reference weights and s_out the output step:
//   B_o = sum_c |pw_q[c,o]| (e_shift + e sum_k |dw_q[k,c]| + X sum_k |dw_q-dw_r|)
//         + X sum_c |pw_q[c,o]-pw_r[c,o]| sum_k |dw_r[k,c]| + |b_q[o]-b_r[o]|
//   e' = min(max_o B_o + s_out (1/2 + T |M' - M|), output span)
// where e_shift is half a headroom-shift step and T bounds the accumulator.
// The sum_c |pw| sum_k |dw| factor is the layer's L-infinity gain.
ErrorBound Certify(const Extractor& extractor,
                   const CertifyOptions& options = {});
ErrorBound Certify(const std::vector<BnfLayerConfig>& layers,
                   const BnfWeights& weights,
                   const CertifyOptions& options = {});

// Absolute float slack allowed on top of the analytic bound when comparing
// against the double-precision reference.
inline constexpr double kReferenceFloatSlack = 1e-9;

// max |code * spec.scale - reference| over all entries.
double MaxAbsDeviation(const Grid<std::int32_t>& codes, const QuantSpec& spec,
                       const Grid<double>& reference);

// Quantizes reference outputs to codes of `spec` (round-half-away, clamp).
Grid<std::int32_t> QuantizeReference(const Grid<double>& reference,
                                     const QuantSpec& spec);

}  // namespace bnf

#endif  // BNFDSP_ORACLE_H_
