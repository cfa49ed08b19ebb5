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

#ifndef BNFDSP_FRONTEND_H_
#define BNFDSP_FRONTEND_H_

// Quantized mel features (QMF): 16 kHz PCM -> framed, Hann-windowed power
// spectrum -> triangular mel filterbank -> ln(1 + e) -> unsigned 16-bit codes
// with a 2^-10 step.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bnfdsp/fixedpoint.h"
#include "bnfdsp/grid.h"

namespace bnf {

inline constexpr QuantSpec kQmfSpec{16, false, 1.0 / 1024.0};

struct FrontendConfig {
  int sample_rate_hz = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int n_mel_bins = 32;
  double f_min_hz = 125.0;
  double f_max_hz = 3800.0;
  int fft_size = 512;
  QuantSpec qmf_spec = kQmfSpec;

  int window_samples() const;
  int hop_samples() const;
  std::int64_t hop_us() const;

  // Throws std::invalid_argument on an inconsistent config.
  void Validate() const;

  bool operator==(const FrontendConfig&) const = default;
};

struct QmfFrame {
  std::vector<std::uint16_t> values;
  std::int64_t timestamp_us = 0;

  bool operator==(const QmfFrame&) const = default;
};

struct StackedFrame {
  QmfFrame base;
  std::vector<double> delta;
  std::vector<double> delta_delta;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters with centers uniform on the mel scale. Filter i spans
// edge(i)..edge(i + 2) and peaks at edge(i + 1); edge(0) = f_min and
// edge(n + 1) = f_max.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FrontendConfig& cfg);

  int num_bins() const { return num_bins_; }
  double edge_hz(int i) const { return edges_hz_[i]; }
  double center_hz(int bin) const { return edges_hz_[bin + 1]; }

  // Power spectrum has fft_size / 2 + 1 entries.
  std::vector<double> Apply(std::span<const double> power_spectrum) const;

  // Weight of FFT bin k in filter `bin`.
  double Weight(int bin, int k) const;

 private:
  struct Band {
    int first_fft_bin = 0;
    std::vector<double> weights;
  };
  int num_bins_;
  std::vector<double> edges_hz_;
  std::vector<Band> bands_;
};

// Splits PCM into Hann-windowed blocks of window_samples, one every
// hop_samples. Samples stay in int16 units. Throws std::invalid_argument when
// the input is shorter than one window.
std::vector<std::vector<double>> FrameSignal(std::span<const std::int16_t> pcm,
                                             const FrontendConfig& cfg);

std::size_t NumFrames(std::size_t num_samples, const FrontendConfig& cfg);

// Holds the FFT plan, window and filterbank for one configuration.
// Const methods are safe to call concurrently.
class Frontend {
 public:
  explicit Frontend(const FrontendConfig& cfg);
  ~Frontend();
  Frontend(const Frontend&) = delete;
  Frontend& operator=(const Frontend&) = delete;
  Frontend(Frontend&&) noexcept;
  Frontend& operator=(Frontend&&) noexcept;

  const FrontendConfig& config() const;
  const MelFilterbank& filterbank() const;

  std::vector<double> Window(std::span<const std::int16_t> samples) const;
  std::vector<double> PowerSpectrum(std::span<const double> block) const;
  std::vector<double> MelEnergies(std::span<const double> block) const;

  // Unquantized ln(1 + e) per frame; rows are frames.
  Grid<double> LogMel(std::span<const std::int16_t> pcm) const;
  std::vector<QmfFrame> Compute(std::span<const std::int16_t> pcm) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> MelEnergies(std::span<const double> block,
                                const FrontendConfig& cfg);

// code_i = quantize(ln(1 + e_i), qmf_spec). Energies must be nonnegative.
QmfFrame QmfQuantize(std::span<const double> energies,
                     const FrontendConfig& cfg, std::int64_t timestamp_us = 0);

// Delta regression with context 2 over rows, replicating edge rows.
Grid<double> RegressionDeltas(const Grid<double>& x);

// Needs at least 5 frames. Deltas are computed on dequantized values.
std::vector<StackedFrame> StackDeltas(std::span<const QmfFrame> frames,
                                      const FrontendConfig& cfg = {});

// Same frequency span with n filters; n must be one of 8, 16, 24, 32.
FrontendConfig ReduceBins(const FrontendConfig& cfg, int n);

// Incremental PCM -> QMF. Emits exactly the frames Frontend::Compute would
// emit for the concatenated input. Single writer.
class FrontendStream {
 public:
  explicit FrontendStream(const FrontendConfig& cfg);

  std::vector<QmfFrame> Push(std::span<const std::int16_t> samples);
  void Reset();
  const FrontendConfig& config() const { return frontend_.config(); }

 private:
  Frontend frontend_;
  std::vector<std::int16_t> pending_;
  std::int64_t frames_emitted_ = 0;
};

}  // namespace bnf

#endif  // BNFDSP_FRONTEND_H_
