#pragma once

#include <cstdint>

#include "melrefine/feature_map.hpp"
#include "melrefine/wav.hpp"

namespace melrefine {

// Mel front-end settings. Defaults follow the common 16 kHz text-to-audio
// configuration: 1024-point FFT, hop 160, 64 mel bands over the full band.
struct MelConfig {
  std::uint32_t sample_rate = 16000;
  std::size_t n_fft = 1024;
  std::size_t hop = 160;
  std::size_t n_mels = 64;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 means sample_rate / 2
  double log_floor = 1e-5;

  void validate() const;
  double f_max_effective() const { return f_max > 0.0 ? f_max : sample_rate / 2.0; }
};

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filterbank, n_mels rows x (n_fft/2 + 1) columns. Peaks are
// equally spaced on the mel scale between f_min and f_max; each row is
// normalized so its largest sampled weight is exactly 1 (no area
// normalization). A band narrow enough to miss every FFT bin is an error.
Map2D mel_filterbank(const MelConfig& cfg);

// Log-power mel spectrogram, n_mels rows x frames columns. STFT frames are
// reflection-center-padded with a periodic raised-cosine window, so
// frames == 1 + len/hop. Cell value is ln(max(power, log_floor)).
Map2D mel_spectrogram(const Waveform& w, const MelConfig& cfg);

}  // namespace melrefine
