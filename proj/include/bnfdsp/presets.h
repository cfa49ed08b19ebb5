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

#ifndef BNFDSP_PRESETS_H_
#define BNFDSP_PRESETS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnfdsp/extractor.h"
#include "bnfdsp/weights_io.h"

namespace bnf {

struct Preset {
  std::string name;
  std::string label;
  std::vector<BnfLayerConfig> layers;
  // Extra stride applied downstream of the cache; only affects the printed
  // "total stride" column, never the cached bandwidth.
  int downstream_stride = 1;
  std::string printed_weights;
};

// Kernel 4, 4-bit relu output. best-1/10 .. ct-1/32 have one layer; best-1/64
// has a 32-channel 8-bit hidden layer.
const std::vector<Preset>& BnfPresets();

// Throws std::invalid_argument for unknown names.
const Preset& FindPreset(std::string_view name);

inline constexpr std::uint64_t kDefaultWeightSeed = 0x5eed'b0f7ULL;

// Deterministic stand-in weights: random separable filters, batch norm fitted
// on a synthetic signal so every output channel has mean 0.5 and std 0.25 on
// the [0, 1] activation range, folded and quantized.
WeightFile SyntheticWeights(const std::vector<BnfLayerConfig>& layers,
                            std::uint64_t seed = kDefaultWeightSeed);
WeightFile SyntheticPresetWeights(const Preset& preset,
                                  std::uint64_t seed = kDefaultWeightSeed);

// Deterministic speech-like test signal: harmonic chirps with a slow
// amplitude envelope plus noise, int16 at 16 kHz.
std::vector<std::int16_t> SyntheticSignal(std::size_t num_samples,
                                          std::uint64_t seed);

}  // namespace bnf

#endif  // BNFDSP_PRESETS_H_
