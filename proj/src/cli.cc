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

#include "bnfdsp/cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "bnfdsp/bitcache.h"
#include "bnfdsp/budget.h"
#include "bnfdsp/errors.h"
#include "bnfdsp/extractor.h"
#include "bnfdsp/frontend.h"
#include "bnfdsp/presets.h"
#include "bnfdsp/wav.h"
#include "bnfdsp/weights_io.h"

namespace bnf::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::string preset;
  std::string weights;
  int bins = 32;
  bool raw_pcm = false;
  bool strict = true;
  bool csv = false;
  std::uint64_t seed = kDefaultWeightSeed;
};

std::string Heading(const std::string& text, const CliEnvironment& env) {
  return env.color ? "\033[1m" + text + "\033[0m" : text;
}

bool LooksLikeCache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::equal(magic, magic + 4, kCacheMagic.begin());
}

FrontendConfig ConfigForBins(int bins) {
  try {
    return ReduceBins(FrontendConfig{}, bins);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::int16_t> LoadAudio(const Options& opt,
                                    const FrontendConfig& cfg) {
  if (opt.raw_pcm) return ReadRawPcm(opt.input);
  return RequireMono(ReadWav(opt.input), cfg.sample_rate_hz);
}

std::vector<QmfFrame> ComputeQmf(const std::vector<std::int16_t>& pcm,
                                 const FrontendConfig& cfg) {
  if (pcm.size() < static_cast<std::size_t>(cfg.window_samples())) {
    throw DataError("input has " + std::to_string(pcm.size()) +
                    " samples, shorter than one " +
                    std::to_string(cfg.window_samples()) + "-sample window");
  }
  return Frontend(cfg).Compute(pcm);
}

std::string Hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

int Extract(const Options& opt, std::ostream& out) {
  const FrontendConfig cfg = ConfigForBins(opt.bins);
  const auto frames = ComputeQmf(LoadAudio(opt, cfg), cfg);
  const BnfCache cache = PackQmf(frames, cfg);
  WriteCacheFile(cache, opt.output);
  out << "frames " << cache.header.n_frames << ", channels "
      << int{cache.header.n_channels} << ", bits 16, "
      << FormatSignificant(MeasuredBandwidthKbps(cache.header), 6)
      << " kbps -> " << opt.output << "\n";
  return kExitOk;
}

WeightFile ResolveModel(const Options& opt) {
  if (opt.preset.empty() && opt.weights.empty()) {
    throw UsageError("compress needs --preset and/or --weights");
  }
  const Preset* preset = nullptr;
  if (!opt.preset.empty()) {
    try {
      preset = &FindPreset(opt.preset);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (opt.weights.empty()) return SyntheticPresetWeights(*preset, opt.seed);
  WeightFile file = LoadWeightFile(opt.weights);
  if (preset != nullptr && file.layers != preset->layers) {
    throw DataError("weight file layers do not match preset " + preset->name);
  }
  return file;
}

int Compress(const Options& opt, std::ostream& out, std::ostream& err) {
  const WeightFile model = ResolveModel(opt);
  const auto extractor =
      std::make_shared<const Extractor>(model.layers, model.weights);

  std::vector<QmfFrame> frames;
  std::uint32_t input_period_us = 0;
  if (!opt.raw_pcm && LooksLikeCache(opt.input)) {
    const BnfCache qmf = ReadCacheFile(opt.input, opt.strict);
    if (qmf.header.bits_per_value != kQmfSpec.bits ||
        qmf.header.stride_product != 1) {
      throw DataError("compress: input cache is not a 16-bit QMF cache");
    }
    frames = UnpackQmf(qmf, opt.strict);
    input_period_us = qmf.header.frame_period_us;
    if (qmf.header.n_channels != extractor->input_channels()) {
      throw DataError("input has " + std::to_string(qmf.header.n_channels) +
                      " channels, weights expect c_in=" +
                      std::to_string(extractor->input_channels()));
    }
  } else {
    const FrontendConfig cfg = ConfigForBins(opt.bins);
    if (cfg.n_mel_bins != extractor->input_channels()) {
      throw DataError("input has " + std::to_string(cfg.n_mel_bins) +
                      " channels, weights expect c_in=" +
                      std::to_string(extractor->input_channels()));
    }
    frames = ComputeQmf(LoadAudio(opt, cfg), cfg);
    input_period_us = static_cast<std::uint32_t>(cfg.hop_us());
  }
  if (frames.size() < static_cast<std::size_t>(extractor->receptive_field())) {
    throw DataError("input has " + std::to_string(frames.size()) +
                    " frames, receptive field is " +
                    std::to_string(extractor->receptive_field()));
  }

  Diagnostics diagnostics;
  const auto features = extractor->Run(frames, &diagnostics);
  if (diagnostics.total() > 0) {
    err << "warning: " << diagnostics.total()
        << " saturating accumulator events\n";
  }
  PackOptions pack;
  pack.stride_product = static_cast<std::uint8_t>(extractor->total_stride());
  pack.frame_period_us =
      input_period_us * static_cast<std::uint32_t>(extractor->total_stride());
  pack.n_channels = extractor->output_channels();
  BnfCache cache;
  try {
    cache = Pack(features, extractor->output_spec().bits, pack);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("cannot cache features: ") + e.what());
  }
  WriteCacheFile(cache, opt.output);

  const BudgetReport budget = ReportForLayers(
      model.layers, Rational(static_cast<std::int64_t>(input_period_us), 1000));
  const double measured = MeasuredBandwidthKbps(cache.header);
  out << "frames " << cache.header.n_frames << ", channels "
      << int{cache.header.n_channels} << ", bits "
      << int{cache.header.bits_per_value} << ", stride "
      << int{cache.header.stride_product} << ", period "
      << cache.header.frame_period_us << " us\n";
  out << "bandwidth " << FormatSignificant(measured, 6) << " kbps (budget "
      << FormatSignificant(budget.bandwidth_kbps, 6) << ")\n";
  out << "weights " << WeightCount(model.layers) << " (budget "
      << budget.weights_count << ")\n";
  out << "payload " << cache.payload.size() << " bytes -> " << opt.output
      << "\n";
  if (cache.header.n_frames > 0 &&
      std::abs(measured - budget.bandwidth_kbps) >
          1e-9 * budget.bandwidth_kbps) {
    throw DataError("measured bandwidth disagrees with budget");
  }
  return kExitOk;
}

int Inspect(const Options& opt, std::ostream& out, const CliEnvironment& env) {
  const BnfCache cache = ReadCacheFile(opt.input, opt.strict);
  const CacheHeader& h = cache.header;
  out << Heading(opt.input, env) << "\n";
  out << "magic           BNFC\n";
  out << "version         " << int{h.version} << "\n";
  out << "channels        " << int{h.n_channels} << "\n";
  out << "bits_per_value  " << int{h.bits_per_value} << "\n";
  out << "stride_product  " << int{h.stride_product} << "\n";
  out << "frame_period_us " << h.frame_period_us << "\n";
  out << "n_frames        " << h.n_frames << "\n";
  out << "payload_bytes   " << cache.payload.size() << "\n";
  out << "duration_s      "
      << FormatSignificant(h.n_frames * (h.frame_period_us / 1e6), 9) << "\n";
  out << "bandwidth_kbps  " << FormatSignificant(MeasuredBandwidthKbps(h), 9)
      << "\n";
  out << "crc32           " << Hex32(PayloadCrc32(cache)) << "\n";
  return kExitOk;
}

int Budget(const Options& opt, std::ostream& out, const CliEnvironment& env) {
  const auto rows = PresetTable();
  if (opt.csv) {
    out << FormatBudgetCsv(rows);
  } else {
    const std::string text = FormatBudgetText(rows);
    const auto newline = text.find('\n');
    out << Heading(text.substr(0, newline), env) << text.substr(newline);
  }
  return kExitOk;
}

int ExportWeights(const Options& opt, std::ostream& out) {
  const Preset* preset = nullptr;
  try {
    preset = &FindPreset(opt.preset);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  SaveWeightFile(SyntheticPresetWeights(*preset, opt.seed), opt.output);
  out << "wrote " << preset->name << " weights -> " << opt.output << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const CliEnvironment& env) {
  Options opt;
  CLI::App app{"Quantized mel features and bottleneck feature caches"};
  app.require_subcommand(1);

  auto* extract = app.add_subcommand("extract", "WAV -> 16-bit QMF .bnfc cache");
  extract->add_option("input", opt.input, "16 kHz mono WAV")->required();
  extract->add_option("-o,--output", opt.output, "Output .bnfc")->required();
  extract->add_option("--bins", opt.bins, "Mel bins: 8, 16, 24 or 32");
  extract->add_flag("--raw-pcm", opt.raw_pcm, "Input is headerless int16 LE");

  auto* compress =
      app.add_subcommand("compress", "WAV or QMF cache -> bottleneck cache");
  compress->add_option("input", opt.input, "WAV or QMF .bnfc")->required();
  compress->add_option("-o,--output", opt.output, "Output .bnfc")->required();
  compress->add_option("--preset", opt.preset, "Named preset");
  compress->add_option("--weights", opt.weights, "Weight file (JSON)");
  compress->add_option("--bins", opt.bins, "Mel bins for WAV input");
  compress->add_option("--seed", opt.seed, "Seed for synthetic preset weights");
  compress->add_flag("--raw-pcm", opt.raw_pcm, "Input is headerless int16 LE");
  compress->add_flag("--strict,!--no-strict", opt.strict,
                     "Reject nonzero pad bits in input caches");

  auto* inspect = app.add_subcommand("inspect", "Print a cache header report");
  inspect->add_option("input", opt.input, ".bnfc file")->required();
  inspect->add_flag("--strict,!--no-strict", opt.strict,
                    "Reject nonzero pad bits");

  auto* budget = app.add_subcommand("budget", "Print bandwidth/weight table");
  budget->add_flag("--csv", opt.csv, "Comma-separated rows");

  auto* export_weights = app.add_subcommand(
      "export-weights", "Write a preset's synthetic weights as JSON");
  export_weights->add_option("--preset", opt.preset, "Named preset")->required();
  export_weights->add_option("-o,--output", opt.output, "Output JSON")
      ->required();
  export_weights->add_option("--seed", opt.seed, "Weight seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (extract->parsed()) return Extract(opt, out);
    if (compress->parsed()) return Compress(opt, out, err);
    if (inspect->parsed()) return Inspect(opt, out, env);
    if (budget->parsed()) return Budget(opt, out, env);
    if (export_weights->parsed()) return ExportWeights(opt, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bnf::cli
