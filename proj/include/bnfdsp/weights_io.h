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

#ifndef BNFDSP_WEIGHTS_IO_H_
#define BNFDSP_WEIGHTS_IO_H_

// Weight interchange file: UTF-8 JSON
//
//   {"version": 1,
//    "layers": [{"kernel_t": 4, "stride_t": 1, "c_in": 32, "c_out": 12,
//                "out_bits": 4, "activation": "relu",
//                "dw_scale": "0.0123", "dw_codes": [...],   // kernel_t*c_in
//                "pw_scale": "0.0045", "pw_codes": [...],   // c_in*c_out
//                "bias_codes": [...]}]}                     // c_out
//
// Code arrays are flat row-major. Scales are decimal strings read as IEEE
// doubles; they are written in shortest round-trip form. Layer out_spec is
// derived from out_bits and activation via ActivationSpec.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bnfdsp/extractor.h"

namespace bnf {

inline constexpr int kWeightFileVersion = 1;

struct WeightFile {
  std::vector<BnfLayerConfig> layers;
  BnfWeights weights;
};

// Throws DataError on malformed documents, schema violations, or weights
// that do not fit their layer shapes.
WeightFile ParseWeightFile(std::string_view text);
WeightFile LoadWeightFile(const std::filesystem::path& path);

std::string SerializeWeightFile(const WeightFile& file);
void SaveWeightFile(const WeightFile& file, const std::filesystem::path& path);

// Decimal scale parsing shared with other readers. Throws DataError unless
// the whole string is a finite positive number.
double ParseScale(std::string_view text);
std::string FormatScale(double scale);

}  // namespace bnf

#endif  // BNFDSP_WEIGHTS_IO_H_
