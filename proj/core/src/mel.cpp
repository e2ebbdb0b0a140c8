#include "melrefine/mel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "melrefine/fft.hpp"

namespace melrefine {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void MelConfig::validate() const {
  if (sample_rate == 0) throw std::invalid_argument("MelConfig: sample_rate must be > 0");
  if (n_fft < 2) throw std::invalid_argument("MelConfig: n_fft must be >= 2");
  if (hop == 0 || hop > n_fft) throw std::invalid_argument("MelConfig: need 0 < hop <= n_fft");
  if (n_mels == 0) throw std::invalid_argument("MelConfig: n_mels must be >= 1");
  const double fmax = f_max_effective();
  if (!(f_min >= 0.0) || !(f_min < fmax) || fmax > sample_rate / 2.0 + 1e-9) {
    throw std::invalid_argument("MelConfig: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (!(log_floor > 0.0)) throw std::invalid_argument("MelConfig: log_floor must be > 0");
}

Map2D mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const std::size_t bins = cfg.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(cfg.f_max_effective());

  // n_mels + 2 edge frequencies, equally spaced in mel.
  std::vector<double> edges(cfg.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.n_mels + 1));
  }

  Map2D fb(cfg.n_mels, bins);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / static_cast<double>(cfg.n_fft);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    double peak = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double wgt = 0.0;
      if (f > left && f < right) {
        wgt = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
      }
      fb.at(m, k) = static_cast<float>(wgt);
      peak = std::max(peak, wgt);
    }
    if (peak <= 0.0) {
      throw Error("mel_filterbank: band " + std::to_string(m) +
                  " covers no FFT bin; n_mels is too large for this resolution");
    }
    for (std::size_t k = 0; k < bins; ++k) {
      fb.at(m, k) = static_cast<float>(fb.at(m, k) / peak);
    }
  }
  return fb;
}

Map2D mel_spectrogram(const Waveform& w, const MelConfig& cfg) {
  cfg.validate();
  const std::size_t len = w.samples.size();
  if (len < cfg.n_fft) {
    throw Error("mel_spectrogram: clip of " + std::to_string(len) +
                " samples is shorter than one frame (n_fft = " + std::to_string(cfg.n_fft) + ")");
  }

  const std::size_t pad = cfg.n_fft / 2;
  const std::size_t frames = 1 + len / cfg.hop;
  const std::size_t bins = cfg.n_fft / 2 + 1;

  // Reflection padding (edge excluded, same as the usual centered STFT).
  auto sample_at = [&](std::ptrdiff_t i) -> double {
    if (i < 0) i = -i;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(len);
    if (i >= n) i = 2 * n - 2 - i;
    return w.samples[static_cast<std::size_t>(i)];
  };

  // Periodic raised-cosine window.
  std::vector<double> window(cfg.n_fft);
  for (std::size_t i = 0; i < cfg.n_fft; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(cfg.n_fft));
  }

  Map2D fb = mel_filterbank(cfg);
  Map2D out(cfg.n_mels, frames);
  std::vector<std::complex<double>> buf(cfg.n_fft);
  std::vector<double> power(bins);

  for (std::size_t f = 0; f < frames; ++f) {
    const std::ptrdiff_t start =
        static_cast<std::ptrdiff_t>(f * cfg.hop) - static_cast<std::ptrdiff_t>(pad);
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      buf[i] = {sample_at(start + static_cast<std::ptrdiff_t>(i)) * window[i], 0.0};
    }
    fftdetail::fft(buf.data(), cfg.n_fft, false);
    for (std::size_t k = 0; k < bins; ++k) {
      power[k] = buf[k].real() * buf[k].real() + buf[k].imag() * buf[k].imag();
    }
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < bins; ++k) acc += fb.at(m, k) * power[k];
      out.at(m, f) = static_cast<float>(std::log(std::max(acc, cfg.log_floor)));
    }
  }
  return out;
}

}  // namespace melrefine
