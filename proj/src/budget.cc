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

#include "bnfdsp/budget.h"

#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bnfdsp/presets.h"

namespace bnf {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational operator*(const Rational& a, const Rational& b) {
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  const std::int64_t n1 = g1 == 0 ? a.num_ : a.num_ / g1;
  const std::int64_t d2 = g1 == 0 ? b.den_ : b.den_ / g1;
  const std::int64_t n2 = g2 == 0 ? b.num_ : b.num_ / g2;
  const std::int64_t d1 = g2 == 0 ? a.den_ : a.den_ / g2;
  return Rational(n1 * n2, d1 * d2);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  return a * Rational(b.den_, b.num_);
}

Rational Bandwidth(std::int64_t dims, std::int64_t bits, Rational hop_ms,
                   std::int64_t total_stride) {
  if (dims <= 0 || bits <= 0 || hop_ms.num() <= 0 || total_stride <= 0) {
    throw std::invalid_argument("Bandwidth: all arguments must be positive");
  }
  return Rational(dims * bits) / (hop_ms * Rational(total_stride));
}

double BandwidthKbps(int dims, int bits, double hop_ms, int total_stride) {
  if (dims <= 0 || bits <= 0 || !(hop_ms > 0.0) || total_stride <= 0) {
    throw std::invalid_argument("Bandwidth: all arguments must be positive");
  }
  return static_cast<double>(dims) * bits / (hop_ms * total_stride);
}

std::string FormatSignificant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

std::int64_t WeightCount(std::span<const BnfLayerConfig> layers) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    l.Validate();
    if (i > 0 && l.c_in != layers[i - 1].c_out) {
      throw std::invalid_argument("WeightCount: layer " + std::to_string(i) +
                                  " c_in does not match previous c_out");
    }
    count += std::int64_t{l.kernel_t} * l.c_in + std::int64_t{l.c_in} * l.c_out;
  }
  return count;
}

BudgetReport ReportForLayers(std::span<const BnfLayerConfig> layers,
                             Rational hop_ms) {
  if (layers.empty()) {
    throw std::invalid_argument("ReportForLayers: need at least one layer");
  }
  BudgetReport r;
  r.kind = RowKind::kBottleneck;
  int stride = 1;
  for (const auto& l : layers) stride *= l.stride_t;
  const auto& last = layers.back();
  r.input_dims = std::to_string(layers.front().c_in) + " x 1";
  r.bits_per_value = last.out_spec.bits;
  r.total_stride = stride;
  r.bandwidth = Bandwidth(last.c_out, last.out_spec.bits, hop_ms, stride);
  r.bandwidth_kbps = r.bandwidth.ToDouble();
  r.weights_count = WeightCount(layers);
  r.weights_bytes = r.weights_count;  // one 8-bit code per weight
  const Rational period_us = hop_ms * Rational(1000) * Rational(stride);
  r.frame_period_out_us = period_us.num() / period_us.den();
  return r;
}

namespace {

BudgetReport FeatureRow(std::string name, std::string label, RowKind kind,
                        int dims, int stack, int bits, Rational hop_ms) {
  BudgetReport r;
  r.name = std::move(name);
  r.label = std::move(label);
  r.kind = kind;
  r.input_dims = kind == RowKind::kReference && stack == 0
                     ? "--"
                     : std::to_string(dims) + " x " + std::to_string(stack);
  r.bits_per_value = bits;
  r.bandwidth = Bandwidth(std::int64_t{dims} * std::max(stack, 1), bits,
                          hop_ms, 1);
  r.bandwidth_kbps = r.bandwidth.ToDouble();
  const Rational period_us = hop_ms * Rational(1000);
  r.frame_period_out_us = period_us.num() / period_us.den();
  return r;
}

}  // namespace

std::vector<BudgetReport> PresetTable() {
  std::vector<BudgetReport> rows;
  // 16 kHz 16-bit PCM viewed as 16-sample frames every millisecond.
  rows.push_back(FeatureRow("raw-pcm", "16kHz 16-bit raw PCM audio",
                            RowKind::kReference, 16, 0, 16, Rational(1)));
  auto baseline = FeatureRow("baseline-las", "Baseline LAS model (float mel)",
                             RowKind::kReference, 80, 3, 32, Rational(10));
  baseline.table_total_stride = 4;
  rows.push_back(baseline);
  rows.push_back(FeatureRow("qmf-deltas", "Standard QMF + deltas",
                            RowKind::kFrontend, 32, 3, 16, Rational(10)));
  auto standard = FeatureRow("qmf-standard", "Standard QMF",
                             RowKind::kFrontend, 32, 1, 16, Rational(10));
  standard.printed_weights = "0 (0)";
  standard.table_total_stride = 4;
  rows.push_back(standard);
  rows.push_back(FeatureRow("qmf-3/4", "3/4 BW QMF", RowKind::kFrontend, 24, 1,
                            16, Rational(10)));
  rows.push_back(FeatureRow("qmf-1/2", "1/2 BW QMF", RowKind::kFrontend, 16, 1,
                            16, Rational(10)));
  rows.push_back(FeatureRow("qmf-1/4", "1/4 BW QMF", RowKind::kFrontend, 8, 1,
                            16, Rational(10)));

  for (const Preset& preset : BnfPresets()) {
    BudgetReport r = ReportForLayers(preset.layers, Rational(10));
    r.name = preset.name;
    r.label = preset.label;
    r.printed_weights = preset.printed_weights;
    r.table_total_stride = r.total_stride * preset.downstream_stride;
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string Exact(const Rational& r) {
  if (r.den() == 1) return std::to_string(r.num());
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

std::string WeightsCell(const BudgetReport& r) {
  return r.kind == RowKind::kBottleneck ? std::to_string(r.weights_count)
                                        : std::string("--");
}

std::string TableStrideCell(const BudgetReport& r) {
  return r.table_total_stride ? std::to_string(*r.table_total_stride)
                              : std::string("--");
}

}  // namespace

std::string FormatBudgetText(std::span<const BudgetReport> rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line),
                "%-14s %-8s %4s %9s %8s %8s %6s %6s %10s %12s\n", "name",
                "input", "bits", "BW(kbps)", "exact", "weights", "bytes",
                "stride", "period_ms", "table_stride");
  out << line;
  for (const auto& r : rows) {
    const std::string bytes = r.kind == RowKind::kBottleneck
                                  ? std::to_string(r.weights_bytes)
                                  : std::string("--");
    char period[32];
    std::snprintf(period, sizeof(period), "%g", r.frame_period_out_us / 1000.0);
    std::snprintf(line, sizeof(line),
                  "%-14s %-8s %4d %9s %8s %8s %6s %6d %10s %12s\n",
                  r.name.c_str(), r.input_dims.c_str(), r.bits_per_value,
                  r.bandwidth_display().c_str(), Exact(r.bandwidth).c_str(),
                  WeightsCell(r).c_str(), bytes.c_str(), r.total_stride,
                  period, TableStrideCell(r).c_str());
    out << line;
  }
  return out.str();
}

std::string FormatBudgetCsv(std::span<const BudgetReport> rows) {
  std::ostringstream out;
  out << "name,label,input_dims,bits,bandwidth_kbps,bandwidth_exact,"
         "weights_count,weights_bytes,total_stride,frame_period_out_us,"
         "table_total_stride,printed_weights\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.label << ',' << r.input_dims << ','
        << r.bits_per_value << ',' << r.bandwidth_display() << ','
        << Exact(r.bandwidth) << ',' << WeightsCell(r) << ','
        << (r.kind == RowKind::kBottleneck ? std::to_string(r.weights_bytes)
                                           : std::string("--"))
        << ',' << r.total_stride << ',' << r.frame_period_out_us << ','
        << TableStrideCell(r) << ',' << r.printed_weights << '\n';
  }
  return out.str();
}

}  // namespace bnf
