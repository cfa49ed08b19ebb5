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

#ifndef BNFDSP_BUDGET_H_
#define BNFDSP_BUDGET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnfdsp/extractor.h"

namespace bnf {

// Exact nonnegative-denominator rational, always in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Bits per millisecond = kbps: dims * bits / (hop_ms * total_stride).
Rational Bandwidth(std::int64_t dims, std::int64_t bits, Rational hop_ms,
                   std::int64_t total_stride);
double BandwidthKbps(int dims, int bits, double hop_ms, int total_stride);

// printf %.Ng: 153.6 -> "154", 51.2 -> "51.2", 0.8 -> "0.8".
std::string FormatSignificant(double value, int digits = 3);

// Sum over layers of kernel_t * c_in + c_in * c_out; biases excluded.
// Throws std::invalid_argument when channels do not chain.
std::int64_t WeightCount(std::span<const BnfLayerConfig> layers);

enum class RowKind { kReference, kFrontend, kBottleneck };

struct BudgetReport {
  std::string name;
  std::string label;
  RowKind kind = RowKind::kBottleneck;
  std::string input_dims;  // "32 x 1", "80 x 3", ...
  int bits_per_value = 0;
  Rational bandwidth;
  double bandwidth_kbps = 0.0;
  std::int64_t weights_count = 0;
  std::int64_t weights_bytes = 0;
  // Temporal stride of the feature stream itself (drives bandwidth).
  int total_stride = 1;
  std::int64_t frame_period_out_us = 0;
  // Published weight annotations, verbatim; empty when absent.
  std::string printed_weights;
  std::optional<int> table_total_stride;

  std::string bandwidth_display() const {
    return FormatSignificant(bandwidth_kbps);
  }
};

// Report for an arbitrary extractor config at the given input hop.
BudgetReport ReportForLayers(std::span<const BnfLayerConfig> layers,
                             Rational hop_ms = Rational(10));

// Reference rows (raw PCM, float baseline, QMF variants) followed by the
// bottleneck presets.
std::vector<BudgetReport> PresetTable();

std::string FormatBudgetText(std::span<const BudgetReport> rows);
std::string FormatBudgetCsv(std::span<const BudgetReport> rows);

}  // namespace bnf

#endif  // BNFDSP_BUDGET_H_
