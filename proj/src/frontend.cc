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

#include "bnfdsp/frontend.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bnf {
namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

// Symmetric Hann window.
std::vector<double> HannWindow(std::size_t length) {
  std::vector<double> window(length, 1.0);
  if (length == 1) return window;
  for (std::size_t n = 0; n < length; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(n) /
                                     static_cast<double>(length - 1));
  }
  return window;
}

}  // namespace

int FrontendConfig::window_samples() const {
  return static_cast<int>(std::lround(sample_rate_hz * window_ms / 1000.0));
}

int FrontendConfig::hop_samples() const {
  return static_cast<int>(std::lround(sample_rate_hz * hop_ms / 1000.0));
}

std::int64_t FrontendConfig::hop_us() const {
  return std::llround(hop_ms * 1000.0);
}

void FrontendConfig::Validate() const {
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("FrontendConfig: sample rate must be > 0");
  }
  if (hop_samples() < 1 || window_samples() < hop_samples()) {
    throw std::invalid_argument("FrontendConfig: need window >= hop >= 1");
  }
  if (n_mel_bins < 1) {
    throw std::invalid_argument("FrontendConfig: n_mel_bins must be >= 1");
  }
  if (!(f_min_hz >= 0.0 && f_min_hz < f_max_hz &&
        f_max_hz <= sample_rate_hz / 2.0)) {
    throw std::invalid_argument(
        "FrontendConfig: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (fft_size < window_samples()) {
    throw std::invalid_argument("FrontendConfig: fft_size < window length");
  }
  qmf_spec.Validate();
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(const FrontendConfig& cfg)
    : num_bins_(cfg.n_mel_bins) {
  cfg.Validate();
  const double mel_lo = HzToMel(cfg.f_min_hz);
  const double mel_hi = HzToMel(cfg.f_max_hz);
  std::vector<double> edges_mel(num_bins_ + 2);
  edges_hz_.resize(num_bins_ + 2);
  for (int i = 0; i < num_bins_ + 2; ++i) {
    edges_mel[i] = mel_lo + (mel_hi - mel_lo) * i / (num_bins_ + 1);
    edges_hz_[i] = MelToHz(edges_mel[i]);
  }
  edges_hz_.front() = cfg.f_min_hz;
  edges_hz_.back() = cfg.f_max_hz;

  const int num_fft_bins = cfg.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate_hz) / cfg.fft_size;
  bands_.resize(num_bins_);
  for (int b = 0; b < num_bins_; ++b) {
    const double left = edges_mel[b];
    const double center = edges_mel[b + 1];
    const double right = edges_mel[b + 2];
    Band& band = bands_[b];
    band.first_fft_bin = -1;
    for (int k = 0; k < num_fft_bins; ++k) {
      const double mel = HzToMel(k * bin_hz);
      double w = 0.0;
      if (mel > left && mel < center) {
        w = (mel - left) / (center - left);
      } else if (mel >= center && mel < right) {
        w = (right - mel) / (right - center);
      }
      if (w > 0.0) {
        if (band.first_fft_bin < 0) band.first_fft_bin = k;
        band.weights.resize(k - band.first_fft_bin + 1, 0.0);
        band.weights.back() = w;
      }
    }
    if (band.first_fft_bin < 0) band.first_fft_bin = 0;
  }
}

double MelFilterbank::Weight(int bin, int k) const {
  const Band& band = bands_.at(bin);
  const int offset = k - band.first_fft_bin;
  if (offset < 0 || offset >= static_cast<int>(band.weights.size())) {
    return 0.0;
  }
  return band.weights[offset];
}

std::vector<double> MelFilterbank::Apply(
    std::span<const double> power_spectrum) const {
  std::vector<double> out(num_bins_, 0.0);
  for (int b = 0; b < num_bins_; ++b) {
    const Band& band = bands_[b];
    double acc = 0.0;
    for (std::size_t j = 0; j < band.weights.size(); ++j) {
      const std::size_t k = band.first_fft_bin + j;
      if (k < power_spectrum.size()) acc += band.weights[j] * power_spectrum[k];
    }
    out[b] = acc;
  }
  return out;
}

std::size_t NumFrames(std::size_t num_samples, const FrontendConfig& cfg) {
  const auto w = static_cast<std::size_t>(cfg.window_samples());
  const auto h = static_cast<std::size_t>(cfg.hop_samples());
  if (num_samples < w) return 0;
  return (num_samples - w) / h + 1;
}

struct Frontend::Impl {
  FrontendConfig cfg;
  MelFilterbank filterbank;
  std::vector<double> window;
  fftw_plan plan = nullptr;

  explicit Impl(const FrontendConfig& c) : cfg(c), filterbank(c) {
    window = HannWindow(static_cast<std::size_t>(cfg.window_samples()));
    std::vector<double> in(cfg.fft_size);
    std::vector<std::complex<double>> out(cfg.fft_size / 2 + 1);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_r2c_1d(
        cfg.fft_size, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan);
  }
};

Frontend::Frontend(const FrontendConfig& cfg)
    : impl_(std::make_unique<Impl>(cfg)) {}
Frontend::~Frontend() = default;
Frontend::Frontend(Frontend&&) noexcept = default;
Frontend& Frontend::operator=(Frontend&&) noexcept = default;

const FrontendConfig& Frontend::config() const { return impl_->cfg; }
const MelFilterbank& Frontend::filterbank() const { return impl_->filterbank; }

std::vector<double> Frontend::Window(
    std::span<const std::int16_t> samples) const {
  const auto& window = impl_->window;
  if (samples.size() != window.size()) {
    throw std::invalid_argument("Frontend::Window: block length mismatch");
  }
  std::vector<double> out(window.size());
  for (std::size_t n = 0; n < window.size(); ++n) {
    out[n] = window[n] * samples[n];
  }
  return out;
}

std::vector<double> Frontend::PowerSpectrum(
    std::span<const double> block) const {
  const int fft_size = impl_->cfg.fft_size;
  if (block.size() > static_cast<std::size_t>(fft_size)) {
    throw std::invalid_argument("PowerSpectrum: block longer than fft_size");
  }
  std::vector<double> in(fft_size, 0.0);
  std::copy(block.begin(), block.end(), in.begin());
  std::vector<std::complex<double>> out(fft_size / 2 + 1);
  fftw_execute_dft_r2c(impl_->plan, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  std::vector<double> power(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) power[k] = std::norm(out[k]);
  return power;
}

std::vector<double> Frontend::MelEnergies(std::span<const double> block) const {
  if (block.size() != static_cast<std::size_t>(impl_->cfg.window_samples())) {
    throw std::invalid_argument("MelEnergies: block length must equal window");
  }
  return impl_->filterbank.Apply(PowerSpectrum(block));
}

Grid<double> Frontend::LogMel(std::span<const std::int16_t> pcm) const {
  const auto blocks = FrameSignal(pcm, impl_->cfg);
  Grid<double> out(blocks.size(), impl_->cfg.n_mel_bins);
  for (std::size_t t = 0; t < blocks.size(); ++t) {
    const auto energies = MelEnergies(blocks[t]);
    for (std::size_t b = 0; b < energies.size(); ++b) {
      out(t, b) = std::log1p(energies[b]);
    }
  }
  return out;
}

std::vector<QmfFrame> Frontend::Compute(
    std::span<const std::int16_t> pcm) const {
  const auto blocks = FrameSignal(pcm, impl_->cfg);
  std::vector<QmfFrame> frames;
  frames.reserve(blocks.size());
  for (std::size_t t = 0; t < blocks.size(); ++t) {
    frames.push_back(QmfQuantize(MelEnergies(blocks[t]), impl_->cfg,
                                 static_cast<std::int64_t>(t) *
                                     impl_->cfg.hop_us()));
  }
  return frames;
}

std::vector<std::vector<double>> FrameSignal(std::span<const std::int16_t> pcm,
                                             const FrontendConfig& cfg) {
  cfg.Validate();
  const auto w = static_cast<std::size_t>(cfg.window_samples());
  const auto h = static_cast<std::size_t>(cfg.hop_samples());
  if (pcm.size() < w) {
    throw std::invalid_argument("FrameSignal: need at least " +
                                std::to_string(w) + " samples, got " +
                                std::to_string(pcm.size()));
  }
  const std::vector<double> window = HannWindow(w);
  const std::size_t count = NumFrames(pcm.size(), cfg);
  std::vector<std::vector<double>> blocks(count, std::vector<double>(w));
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t n = 0; n < w; ++n) {
      blocks[t][n] = window[n] * pcm[t * h + n];
    }
  }
  return blocks;
}

std::vector<double> MelEnergies(std::span<const double> block,
                                const FrontendConfig& cfg) {
  return Frontend(cfg).MelEnergies(block);
}

QmfFrame QmfQuantize(std::span<const double> energies,
                     const FrontendConfig& cfg, std::int64_t timestamp_us) {
  if (cfg.qmf_spec.is_signed || cfg.qmf_spec.bits > 16) {
    throw std::invalid_argument("QmfQuantize: QMF spec must be unsigned <=16");
  }
  QmfFrame frame;
  frame.timestamp_us = timestamp_us;
  frame.values.reserve(energies.size());
  for (double e : energies) {
    if (!(e >= 0.0)) {
      throw std::invalid_argument("QmfQuantize: energies must be >= 0");
    }
    frame.values.push_back(
        static_cast<std::uint16_t>(Quantize(std::log1p(e), cfg.qmf_spec)));
  }
  return frame;
}

Grid<double> RegressionDeltas(const Grid<double>& x) {
  constexpr int kContext = 2;
  constexpr double kNorm = 2.0 * (1 * 1 + 2 * 2);
  const auto rows = static_cast<std::ptrdiff_t>(x.rows());
  Grid<double> d(x.rows(), x.cols());
  auto clamp_row = [rows](std::ptrdiff_t t) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(t, 0, rows - 1));
  };
  for (std::ptrdiff_t t = 0; t < rows; ++t) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double acc = 0.0;
      for (int n = 1; n <= kContext; ++n) {
        acc += n * (x(clamp_row(t + n), c) - x(clamp_row(t - n), c));
      }
      d(t, c) = acc / kNorm;
    }
  }
  return d;
}

std::vector<StackedFrame> StackDeltas(std::span<const QmfFrame> frames,
                                      const FrontendConfig& cfg) {
  if (frames.size() < 5) {
    throw std::invalid_argument("StackDeltas: need at least 5 frames");
  }
  const std::size_t bins = frames.front().values.size();
  Grid<double> x(frames.size(), bins);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].values.size() != bins) {
      throw std::invalid_argument("StackDeltas: ragged frames");
    }
    for (std::size_t b = 0; b < bins; ++b) {
      x(t, b) = Dequantize(frames[t].values[b], cfg.qmf_spec);
    }
  }
  const Grid<double> d = RegressionDeltas(x);
  const Grid<double> dd = RegressionDeltas(d);
  std::vector<StackedFrame> out(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    out[t].base = frames[t];
    out[t].delta.assign(d.row(t).begin(), d.row(t).end());
    out[t].delta_delta.assign(dd.row(t).begin(), dd.row(t).end());
  }
  return out;
}

FrontendConfig ReduceBins(const FrontendConfig& cfg, int n) {
  if (n != 8 && n != 16 && n != 24 && n != 32) {
    throw std::invalid_argument("ReduceBins: supported bin counts are 8, 16, "
                                "24, 32; got " + std::to_string(n));
  }
  FrontendConfig out = cfg;
  out.n_mel_bins = n;
  out.Validate();
  return out;
}

FrontendStream::FrontendStream(const FrontendConfig& cfg) : frontend_(cfg) {}

std::vector<QmfFrame> FrontendStream::Push(
    std::span<const std::int16_t> samples) {
  pending_.insert(pending_.end(), samples.begin(), samples.end());
  const FrontendConfig& cfg = frontend_.config();
  const auto w = static_cast<std::size_t>(cfg.window_samples());
  const auto h = static_cast<std::size_t>(cfg.hop_samples());
  std::vector<QmfFrame> out;
  std::size_t start = 0;
  while (pending_.size() - start >= w) {
    const auto block = frontend_.Window(
        std::span<const std::int16_t>(pending_.data() + start, w));
    out.push_back(QmfQuantize(frontend_.MelEnergies(block), cfg,
                              frames_emitted_ * cfg.hop_us()));
    ++frames_emitted_;
    start += h;
  }
  pending_.erase(pending_.begin(),
                 pending_.begin() + static_cast<std::ptrdiff_t>(
                                        std::min(start, pending_.size())));
  return out;
}

void FrontendStream::Reset() {
  pending_.clear();
  frames_emitted_ = 0;
}

}  // namespace bnf
