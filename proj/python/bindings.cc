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

// Python bindings for the main operations. Arrays are numpy, frames are rows.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "bnfdsp/bitcache.h"
#include "bnfdsp/budget.h"
#include "bnfdsp/errors.h"
#include "bnfdsp/extractor.h"
#include "bnfdsp/frontend.h"
#include "bnfdsp/oracle.h"
#include "bnfdsp/presets.h"
#include "bnfdsp/weights_io.h"

namespace py = pybind11;

namespace bnf {
namespace {

using I16Array = py::array_t<std::int16_t, py::array::c_style | py::array::forcecast>;
using I32Array = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> ToNumpy(const Grid<T>& g) {
  py::array_t<T> out({g.rows(), g.cols()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

Grid<std::int32_t> FromNumpy(const I32Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Grid<std::int32_t> g(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

std::span<const std::int16_t> Samples(const I16Array& pcm) {
  if (pcm.ndim() != 1) throw std::invalid_argument("expected 1-D int16 pcm");
  return {pcm.data(), static_cast<std::size_t>(pcm.size())};
}

FrontendConfig Config(int n_mel_bins) {
  return ReduceBins(FrontendConfig{}, n_mel_bins);
}

py::array_t<std::uint16_t> ComputeQmf(const I16Array& pcm, int n_mel_bins) {
  const auto frames = Frontend(Config(n_mel_bins)).Compute(Samples(pcm));
  py::array_t<std::uint16_t> out(
      {frames.size(), static_cast<std::size_t>(n_mel_bins)});
  auto* dst = out.mutable_data();
  for (const auto& f : frames) dst = std::copy(f.values.begin(), f.values.end(), dst);
  return out;
}

std::vector<BnfFrame> ToFrames(const Grid<std::int32_t>& g,
                               std::int64_t period_us) {
  std::vector<BnfFrame> frames(g.rows());
  for (std::size_t t = 0; t < g.rows(); ++t) {
    frames[t].values.assign(g.row(t).begin(), g.row(t).end());
    frames[t].timestamp_us = static_cast<std::int64_t>(t) * period_us;
  }
  return frames;
}

py::bytes PackCodes(const I32Array& codes, int bits, int stride_product,
                    std::uint32_t frame_period_us) {
  const Grid<std::int32_t> g = FromNumpy(codes);
  PackOptions opt;
  opt.stride_product = static_cast<std::uint8_t>(stride_product);
  opt.frame_period_us = frame_period_us;
  opt.n_channels = static_cast<int>(g.cols());
  const auto bytes = Serialize(Pack(ToFrames(g, frame_period_us), bits, opt));
  return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

py::tuple UnpackCodes(const py::bytes& data, bool strict) {
  const std::string s = data;
  const BnfCache cache = ParseCache(
      std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()),
      strict);
  const auto frames = Unpack(cache, strict);
  const CacheHeader& h = cache.header;
  I32Array out({static_cast<std::size_t>(h.n_frames),
                static_cast<std::size_t>(h.n_channels)});
  auto* dst = out.mutable_data();
  for (const auto& f : frames) dst = std::copy(f.values.begin(), f.values.end(), dst);
  py::dict header;
  header["version"] = int{h.version};
  header["n_channels"] = int{h.n_channels};
  header["bits_per_value"] = int{h.bits_per_value};
  header["stride_product"] = int{h.stride_product};
  header["frame_period_us"] = h.frame_period_us;
  header["n_frames"] = h.n_frames;
  header["bandwidth_kbps"] = MeasuredBandwidthKbps(h);
  return py::make_tuple(out, header);
}

py::list BudgetTable() {
  py::list rows;
  for (const auto& r : PresetTable()) {
    py::dict d;
    d["name"] = r.name;
    d["label"] = r.label;
    d["input_dims"] = r.input_dims;
    d["bits"] = r.bits_per_value;
    d["bandwidth_kbps"] = r.bandwidth_kbps;
    d["bandwidth_exact"] = py::make_tuple(r.bandwidth.num(), r.bandwidth.den());
    d["bandwidth_display"] = r.bandwidth_display();
    d["weights_count"] = r.weights_count;
    d["total_stride"] = r.total_stride;
    d["frame_period_out_us"] = r.frame_period_out_us;
    rows.append(d);
  }
  return rows;
}

// Extractor owning its weight file, constructed from JSON text or a preset.
class PyExtractor {
 public:
  explicit PyExtractor(const WeightFile& wf)
      : extractor_(std::make_shared<const Extractor>(wf.layers, wf.weights)),
        file_(wf) {}

  static PyExtractor FromJson(const std::string& text) {
    return PyExtractor(ParseWeightFile(text));
  }
  static PyExtractor FromPreset(const std::string& name, std::uint64_t seed) {
    return PyExtractor(SyntheticPresetWeights(FindPreset(name), seed));
  }

  I32Array Run(const I32Array& codes) const {
    return ToNumpy(extractor_->RunCodes(FromNumpy(codes)));
  }
  py::array_t<double> Reference(const I32Array& codes) const {
    const Grid<std::int32_t> g = FromNumpy(codes);
    Grid<double> x(g.rows(), g.cols());
    for (std::size_t i = 0; i < x.data().size(); ++i) {
      x.data()[i] = g.data()[i] * extractor_->input_spec().scale;
    }
    return ToNumpy(ReferenceFromInput(x, RealModel::FromExtractor(*extractor_)));
  }
  double Bound(double input_error) const {
    CertifyOptions opt;
    opt.input_error = input_error;
    return Certify(*extractor_, opt).end_to_end_bound;
  }
  std::string ToJson() const { return SerializeWeightFile(file_); }
  int receptive_field() const { return extractor_->receptive_field(); }
  int total_stride() const { return extractor_->total_stride(); }
  int input_channels() const { return extractor_->input_channels(); }
  int output_channels() const { return extractor_->output_channels(); }
  int output_bits() const { return extractor_->output_spec().bits; }
  double output_scale() const { return extractor_->output_spec().scale; }
  std::int64_t weight_count() const { return WeightCount(extractor_->layers()); }

 private:
  std::shared_ptr<const Extractor> extractor_;
  WeightFile file_;
};

}  // namespace
}  // namespace bnf

PYBIND11_MODULE(_bnfdsp, m) {
  using namespace bnf;
  m.doc() = "Fixed-point mel features and bottleneck feature caches";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("quantize",
        [](double x, int bits, bool is_signed, double scale) {
          const QuantSpec spec{bits, is_signed, scale};
          spec.Validate();
          return Quantize(x, spec);
        },
        py::arg("x"), py::arg("bits"), py::arg("signed"), py::arg("scale"));
  m.def("dequantize",
        [](std::int64_t q, int bits, bool is_signed, double scale) {
          const QuantSpec spec{bits, is_signed, scale};
          spec.Validate();
          return Dequantize(q, spec);
        },
        py::arg("code"), py::arg("bits"), py::arg("signed"), py::arg("scale"));
  m.def("compute_qmf", &ComputeQmf, py::arg("pcm"), py::arg("n_mel_bins") = 32,
        "int16 PCM at 16 kHz -> uint16 QMF codes [frames x bins]");
  m.def("log_mel",
        [](const I16Array& pcm, int n_mel_bins) {
          return ToNumpy(Frontend(Config(n_mel_bins)).LogMel(Samples(pcm)));
        },
        py::arg("pcm"), py::arg("n_mel_bins") = 32);
  m.def("num_frames",
        [](std::size_t n) { return NumFrames(n, FrontendConfig{}); },
        py::arg("num_samples"));
  m.def("synthetic_signal", [](std::size_t n, std::uint64_t seed) {
    const auto s = SyntheticSignal(n, seed);
    py::array_t<std::int16_t> out(s.size());
    std::copy(s.begin(), s.end(), out.mutable_data());
    return out;
  }, py::arg("num_samples"), py::arg("seed") = 0);

  m.def("pack", &PackCodes, py::arg("codes"), py::arg("bits"),
        py::arg("stride_product") = 1, py::arg("frame_period_us") = 10000,
        "codes [frames x channels] -> .bnfc bytes");
  m.def("unpack", &UnpackCodes, py::arg("data"), py::arg("strict") = true,
        ".bnfc bytes -> (codes, header dict)");

  m.def("bandwidth_kbps",
        [](int dims, int bits, double hop_ms, int total_stride) {
          return BandwidthKbps(dims, bits, hop_ms, total_stride);
        },
        py::arg("dims"), py::arg("bits"), py::arg("hop_ms"),
        py::arg("total_stride"));
  m.def("budget_table", &BudgetTable);
  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : BnfPresets()) names.push_back(p.name);
    return names;
  });

  py::class_<PyExtractor>(m, "Extractor")
      .def_static("from_json", &PyExtractor::FromJson, py::arg("text"))
      .def_static("from_preset", &PyExtractor::FromPreset, py::arg("name"),
                  py::arg("seed") = kDefaultWeightSeed)
      .def("run", &PyExtractor::Run, py::arg("codes"),
           "input codes [frames x c_in] -> output codes")
      .def("reference", &PyExtractor::Reference, py::arg("codes"),
           "real-arithmetic reference outputs for the same input")
      .def("bound", &PyExtractor::Bound, py::arg("input_error") = 0.0)
      .def("to_json", &PyExtractor::ToJson)
      .def_property_readonly("receptive_field", &PyExtractor::receptive_field)
      .def_property_readonly("total_stride", &PyExtractor::total_stride)
      .def_property_readonly("input_channels", &PyExtractor::input_channels)
      .def_property_readonly("output_channels", &PyExtractor::output_channels)
      .def_property_readonly("output_bits", &PyExtractor::output_bits)
      .def_property_readonly("output_scale", &PyExtractor::output_scale)
      .def_property_readonly("weight_count", &PyExtractor::weight_count);
}
