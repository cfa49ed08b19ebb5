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

#include "bnfdsp/weights_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bnfdsp/errors.h"
#include "json.hpp"

namespace bnf {
namespace {

using Json = nlohmann::json;

const Json& Field(const Json& obj, const char* key, std::size_t layer) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError("weight file: layer " + std::to_string(layer) +
                    " is missing '" + key + "'");
  }
  return *it;
}

int IntField(const Json& obj, const char* key, std::size_t layer) {
  const Json& v = Field(obj, key, layer);
  if (!v.is_number_integer()) {
    throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                    key + "' must be an integer");
  }
  const auto value = v.get<std::int64_t>();
  if (value < 1 || value > std::numeric_limits<int>::max()) {
    throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                    key + "' must be positive");
  }
  return static_cast<int>(value);
}

template <typename T>
std::vector<T> CodeArray(const Json& obj, const char* key, std::size_t layer) {
  const Json& v = Field(obj, key, layer);
  if (!v.is_array()) {
    throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                    key + "' must be an array");
  }
  std::vector<T> out;
  out.reserve(v.size());
  for (const Json& item : v) {
    if (!item.is_number_integer()) {
      throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                      key + "' must contain integers");
    }
    const auto code = item.get<std::int64_t>();
    if (code < std::numeric_limits<T>::min() ||
        code > std::numeric_limits<T>::max()) {
      throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                      key + "' code " + std::to_string(code) +
                      " out of range");
    }
    out.push_back(static_cast<T>(code));
  }
  return out;
}

double ScaleField(const Json& obj, const char* key, std::size_t layer) {
  const Json& v = Field(obj, key, layer);
  if (!v.is_string()) {
    throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                    key + "' must be a decimal string");
  }
  try {
    return ParseScale(v.get<std::string>());
  } catch (const DataError& e) {
    throw DataError("weight file: layer " + std::to_string(layer) + " '" +
                    key + "': " + e.what());
  }
}

}  // namespace

double ParseScale(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw DataError("malformed scale '" + std::string(text) + "'");
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw DataError("scale must be finite and > 0, got '" + std::string(text) +
                    "'");
  }
  return value;
}

std::string FormatScale(double scale) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), scale);
  return std::string(buf, ptr);
}

WeightFile ParseWeightFile(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("weight file: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("weight file: top level must be an object");
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer() ||
      version->get<std::int64_t>() != kWeightFileVersion) {
    throw DataError("weight file: unsupported or missing version");
  }
  auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array() || layers->empty()) {
    throw DataError("weight file: 'layers' must be a non-empty array");
  }

  WeightFile file;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const Json& obj = (*layers)[i];
    if (!obj.is_object()) {
      throw DataError("weight file: layer " + std::to_string(i) +
                      " must be an object");
    }
    BnfLayerConfig layer;
    LayerWeights w;
    try {
      const Json& act = Field(obj, "activation", i);
      if (!act.is_string()) throw DataError("activation must be a string");
      layer = MakeLayer(IntField(obj, "kernel_t", i), IntField(obj, "stride_t", i),
                        IntField(obj, "c_in", i), IntField(obj, "c_out", i),
                        IntField(obj, "out_bits", i),
                        ParseActivation(act.get<std::string>()));
      w.dw_scale = ScaleField(obj, "dw_scale", i);
      w.pw_scale = ScaleField(obj, "pw_scale", i);
      w.dw_codes = CodeArray<std::int8_t>(obj, "dw_codes", i);
      w.pw_codes = CodeArray<std::int8_t>(obj, "pw_codes", i);
      w.bias_codes = CodeArray<std::int32_t>(obj, "bias_codes", i);
      w.Validate(layer);
    } catch (const std::invalid_argument& e) {
      throw DataError("weight file: layer " + std::to_string(i) + ": " +
                      e.what());
    }
    if (i > 0 && layer.c_in != file.layers.back().c_out) {
      throw DataError("weight file: layer " + std::to_string(i) +
                      " c_in does not match previous c_out");
    }
    file.layers.push_back(layer);
    file.weights.layers.push_back(std::move(w));
  }
  return file;
}

WeightFile LoadWeightFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open weight file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseWeightFile(buffer.str());
}

std::string SerializeWeightFile(const WeightFile& file) {
  if (file.layers.size() != file.weights.layers.size()) {
    throw std::invalid_argument("SerializeWeightFile: layer count mismatch");
  }
  Json layers = Json::array();
  for (std::size_t i = 0; i < file.layers.size(); ++i) {
    const BnfLayerConfig& layer = file.layers[i];
    const LayerWeights& w = file.weights.layers[i];
    w.Validate(layer);
    if (layer.out_spec != ActivationSpec(layer.out_spec.bits, layer.activation)) {
      throw std::invalid_argument(
          "SerializeWeightFile: out_spec must follow the activation-range "
          "convention to be representable");
    }
    Json obj;
    obj["kernel_t"] = layer.kernel_t;
    obj["stride_t"] = layer.stride_t;
    obj["c_in"] = layer.c_in;
    obj["c_out"] = layer.c_out;
    obj["out_bits"] = layer.out_spec.bits;
    obj["activation"] = std::string(ActivationName(layer.activation));
    obj["dw_scale"] = FormatScale(w.dw_scale);
    obj["dw_codes"] = std::vector<int>(w.dw_codes.begin(), w.dw_codes.end());
    obj["pw_scale"] = FormatScale(w.pw_scale);
    obj["pw_codes"] = std::vector<int>(w.pw_codes.begin(), w.pw_codes.end());
    obj["bias_codes"] = w.bias_codes;
    layers.push_back(std::move(obj));
  }
  Json doc;
  doc["version"] = kWeightFileVersion;
  doc["layers"] = std::move(layers);
  return doc.dump(1) + "\n";
}

void SaveWeightFile(const WeightFile& file, const std::filesystem::path& path) {
  const std::string text = SerializeWeightFile(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write weight file " + path.string());
  out << text;
  if (!out) throw DataError("failed writing weight file " + path.string());
}

}  // namespace bnf
