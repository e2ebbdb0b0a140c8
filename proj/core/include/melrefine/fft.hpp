#pragma once

#include <complex>
#include <vector>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// Forward 2D DFT of each (b, c) slice over (y, x), then a center shift so the
// DC bin lands at (h/2, w/2) (floor convention). The forward transform is
// unnormalized; all scaling lives in the inverse. Accumulation is double
// precision, storage is 32-bit.
SpectrumMap fft2_shifted(const FeatureMap& x);

// Inverse of fft2_shifted, including the 1/(H*W) normalization. The result
// must be real up to rounding: per slice the imaginary residue is discarded
// after asserting max |imag| <= 1e-4 * max |real|; anything above raises an
// Error (a non-conjugate-symmetric spectrum was passed where a real map was
// demanded).
FeatureMap ifft2_shifted(const SpectrumMap& s);

namespace fftdetail {

// In-place 1D complex FFT, any length (radix-2 for powers of two, Bluestein
// otherwise). Forward is unnormalized; inverse multiplies by 1/n.
void fft(std::complex<double>* a, std::size_t n, bool inverse);

// Index of the conjugate partner of shifted-frequency index j on an axis of
// length n: the pair (j, conj_index(j, n)) holds mirrored frequencies +/-f.
inline std::size_t conj_index(std::size_t j, std::size_t n) {
  return (2 * (n / 2) + n - j) % n;
}

}  // namespace fftdetail

}  // namespace melrefine
