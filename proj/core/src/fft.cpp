#include "melrefine/fft.hpp"

#include <cmath>
#include <numbers>

namespace melrefine {
namespace fftdetail {
namespace {

constexpr double kPi = std::numbers::pi;

void fft_radix2(std::complex<double>* a, std::size_t n, bool inverse) {
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
  }
}

// Chirp-z transform for arbitrary lengths. Phases are reduced mod 2n so the
// k^2 argument stays accurate for any n.
void fft_bluestein(std::complex<double>* a, std::size_t n, bool inverse) {
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    double ang = kPi * static_cast<double>(k2) / static_cast<double>(n);
    if (!inverse) ang = -ang;
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  std::vector<std::complex<double>> fa(m, {0.0, 0.0});
  std::vector<std::complex<double>> fb(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> c = std::conj(chirp[k]);
    fb[k] = c;
    if (k != 0) fb[m - k] = c;
  }
  fft_radix2(fa.data(), m, false);
  fft_radix2(fb.data(), m, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  fft_radix2(fa.data(), m, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * chirp[k];

  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
  }
}

}  // namespace

void fft(std::complex<double>* a, std::size_t n, bool inverse) {
  if (n <= 1) return;
  if ((n & (n - 1)) == 0) {
    fft_radix2(a, n, inverse);
  } else {
    fft_bluestein(a, n, inverse);
  }
}

}  // namespace fftdetail

namespace {

// 2D transform of one (h x w) slice held in complex double, rows then columns.
void fft2_inplace(std::vector<std::complex<double>>& buf, std::size_t h, std::size_t w,
                  bool inverse) {
  for (std::size_t y = 0; y < h; ++y) {
    fftdetail::fft(buf.data() + y * w, w, inverse);
  }
  std::vector<std::complex<double>> col(h);
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < h; ++y) col[y] = buf[y * w + x];
    fftdetail::fft(col.data(), h, inverse);
    for (std::size_t y = 0; y < h; ++y) buf[y * w + x] = col[y];
  }
}

}  // namespace

SpectrumMap fft2_shifted(const FeatureMap& x) {
  const Dims& d = x.dims();
  const auto& data = x.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error("fft2_shifted: non-finite input at flat index " + std::to_string(i));
    }
  }

  std::vector<std::complex<float>> out(d.count());
  std::vector<std::complex<double>> buf(d.plane());
  const std::size_t sh = d.h / 2, sw = d.w / 2;
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      const std::size_t base = x.slice_offset(b, c);
      for (std::size_t i = 0; i < d.plane(); ++i) buf[i] = {static_cast<double>(data[base + i]), 0.0};
      fft2_inplace(buf, d.h, d.w, false);
      // Center shift: DC moves from (0, 0) to (h/2, w/2).
      for (std::size_t y = 0; y < d.h; ++y) {
        std::size_t ys = (y + sh) % d.h;
        for (std::size_t xcol = 0; xcol < d.w; ++xcol) {
          std::size_t xs = (xcol + sw) % d.w;
          out[base + ys * d.w + xs] = {static_cast<float>(buf[y * d.w + xcol].real()),
                                       static_cast<float>(buf[y * d.w + xcol].imag())};
        }
      }
    }
  }
  return SpectrumMap(d, std::move(out));
}

FeatureMap ifft2_shifted(const SpectrumMap& s) {
  const Dims& d = s.dims();
  const auto& data = s.data();

  std::vector<float> out(d.count());
  std::vector<std::complex<double>> buf(d.plane());
  const std::size_t sh = d.h / 2, sw = d.w / 2;
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      const std::size_t base = (b * d.c + c) * d.plane();
      // Undo the center shift, then invert.
      for (std::size_t y = 0; y < d.h; ++y) {
        std::size_t ys = (y + sh) % d.h;
        for (std::size_t xcol = 0; xcol < d.w; ++xcol) {
          std::size_t xs = (xcol + sw) % d.w;
          buf[y * d.w + xcol] = {static_cast<double>(data[base + ys * d.w + xs].real()),
                                 static_cast<double>(data[base + ys * d.w + xs].imag())};
        }
      }
      fft2_inplace(buf, d.h, d.w, true);

      double max_re = 0.0, max_im = 0.0;
      for (const auto& v : buf) {
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
      }
      if (max_im > 1e-4 * max_re) {
        throw Error("ifft2_shifted: spectrum is not conjugate-symmetric (max |imag| = " +
                    std::to_string(max_im) + " vs max |real| = " + std::to_string(max_re) +
                    " in slice (b=" + std::to_string(b) + ", c=" + std::to_string(c) +
                    ")); a real output was demanded");
      }
      for (std::size_t i = 0; i < d.plane(); ++i) {
        out[base + i] = static_cast<float>(buf[i].real());
      }
    }
  }
  return FeatureMap(d, std::move(out));
}

}  // namespace melrefine
