// Independent reference implementations used as test oracles. Everything here
// is deliberately naive (textbook double loops) and shares no code with the
// library paths it checks.
#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "melrefine/feature_map.hpp"

namespace oracle {

using cplx = std::complex<double>;

// O(N^2) 2D DFT of one slice, unnormalized, then center-shifted so DC lands
// at (h/2, w/2).
inline std::vector<cplx> naive_dft2_shifted(const std::vector<double>& x, std::size_t h,
                                            std::size_t w) {
  std::vector<cplx> unshifted(h * w);
  for (std::size_t ky = 0; ky < h; ++ky) {
    for (std::size_t kx = 0; kx < w; ++kx) {
      cplx acc(0.0, 0.0);
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t xx = 0; xx < w; ++xx) {
          const double ang = -2.0 * std::numbers::pi *
                             (static_cast<double>(ky * y) / h + static_cast<double>(kx * xx) / w);
          acc += x[y * w + xx] * cplx(std::cos(ang), std::sin(ang));
        }
      }
      unshifted[ky * w + kx] = acc;
    }
  }
  std::vector<cplx> shifted(h * w);
  for (std::size_t ky = 0; ky < h; ++ky) {
    for (std::size_t kx = 0; kx < w; ++kx) {
      shifted[((ky + h / 2) % h) * w + ((kx + w / 2) % w)] = unshifted[ky * w + kx];
    }
  }
  return shifted;
}

// Inverse of naive_dft2_shifted including 1/(h*w); returns complex so callers
// can inspect the imaginary residue themselves.
inline std::vector<cplx> naive_idft2_shifted(const std::vector<cplx>& s, std::size_t h,
                                             std::size_t w) {
  std::vector<cplx> unshifted(h * w);
  for (std::size_t ky = 0; ky < h; ++ky) {
    for (std::size_t kx = 0; kx < w; ++kx) {
      unshifted[ky * w + kx] = s[((ky + h / 2) % h) * w + ((kx + w / 2) % w)];
    }
  }
  std::vector<cplx> out(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t xx = 0; xx < w; ++xx) {
      cplx acc(0.0, 0.0);
      for (std::size_t ky = 0; ky < h; ++ky) {
        for (std::size_t kx = 0; kx < w; ++kx) {
          const double ang = 2.0 * std::numbers::pi *
                             (static_cast<double>(ky * y) / h + static_cast<double>(kx * xx) / w);
          acc += unshifted[ky * w + kx] * cplx(std::cos(ang), std::sin(ang));
        }
      }
      out[y * w + xx] = acc / static_cast<double>(h * w);
    }
  }
  return out;
}

// Scalar-loop reference for the structure-aware gain (channel mean,
// min/max-normalized, scaled into [1, m], broadcast over channels). Output is
// rounded to float like the real implementation so comparisons are tight.
inline melrefine::FeatureMap naive_structure_scale(const melrefine::FeatureMap& x, double m,
                                                   double eps) {
  const auto& d = x.dims();
  melrefine::FeatureMap out = melrefine::FeatureMap::zeros(d);
  for (std::size_t b = 0; b < d.b; ++b) {
    std::vector<double> mean(d.h * d.w, 0.0);
    for (std::size_t c = 0; c < d.c; ++c) {
      for (std::size_t y = 0; y < d.h; ++y) {
        for (std::size_t xx = 0; xx < d.w; ++xx) {
          mean[y * d.w + xx] += x.at(b, c, y, xx);
        }
      }
    }
    for (double& v : mean) v /= static_cast<double>(d.c);
    double lo = mean[0], hi = mean[0];
    for (double v : mean) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    std::vector<double> alpha(d.h * d.w, 1.0);
    if (hi - lo >= eps) {
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        alpha[i] = (m - 1.0) * (mean[i] - lo) / (hi - lo) + 1.0;
      }
    }
    for (std::size_t c = 0; c < d.c; ++c) {
      for (std::size_t y = 0; y < d.h; ++y) {
        for (std::size_t xx = 0; xx < d.w; ++xx) {
          out.at(b, c, y, xx) =
              static_cast<float>(x.at(b, c, y, xx) * alpha[y * d.w + xx]);
        }
      }
    }
  }
  return out;
}

// The alpha plane itself (per batch element), for the bounds checks.
inline std::vector<double> naive_alpha(const melrefine::FeatureMap& x, std::size_t b, double m,
                                       double eps) {
  const auto& d = x.dims();
  std::vector<double> mean(d.h * d.w, 0.0);
  for (std::size_t c = 0; c < d.c; ++c) {
    for (std::size_t y = 0; y < d.h; ++y) {
      for (std::size_t xx = 0; xx < d.w; ++xx) mean[y * d.w + xx] += x.at(b, c, y, xx);
    }
  }
  for (double& v : mean) v /= static_cast<double>(d.c);
  double lo = mean[0], hi = mean[0];
  for (double v : mean) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  std::vector<double> alpha(d.h * d.w, 1.0);
  if (hi - lo >= eps) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      alpha[i] = (m - 1.0) * (mean[i] - lo) / (hi - lo) + 1.0;
    }
  }
  return alpha;
}

// Two-pass covariance (and mean) over an n x d row-major matrix, unbiased.
struct NaiveGaussian {
  std::vector<double> mu;
  std::vector<double> sigma;
};

inline NaiveGaussian naive_gaussian(const std::vector<double>& v, std::size_t n, std::size_t d) {
  NaiveGaussian g;
  g.mu.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) g.mu[j] += v[i * d + j];
  }
  for (double& m : g.mu) m /= static_cast<double>(n);
  g.sigma.assign(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += (v[i * d + j] - g.mu[j]) * (v[i * d + k] - g.mu[k]);
      }
      g.sigma[j * d + k] = acc / static_cast<double>(n - 1);
    }
  }
  return g;
}

// Cyclic Jacobi eigensolver for small symmetric matrices: A = V diag(ev) V^T.
// Used as the independent route behind the matrix-sqrt trace.
struct JacobiEigen {
  std::vector<double> values;   // n
  std::vector<double> vectors;  // n x n, column j is the eigenvector of values[j]
};

inline JacobiEigen jacobi_eigensystem(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    }
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p * n + q] == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * a[p * n + q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  JacobiEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
  out.vectors = std::move(v);
  return out;
}

// V f(diag) V^T for a symmetric matrix, via the Jacobi eigensystem.
inline std::vector<double> jacobi_matrix_sqrt(const std::vector<double>& a, std::size_t n) {
  JacobiEigen e = jacobi_eigensystem(a, n);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double lam = e.values[k] > 0.0 ? std::sqrt(e.values[k]) : 0.0;
        acc += e.vectors[i * n + k] * lam * e.vectors[j * n + k];
      }
      out[i * n + j] = acc;
    }
  }
  return out;
}

// Full closed form via the oracle-side tools only.
inline double naive_frechet(const std::vector<double>& mu_a, const std::vector<double>& sig_a,
                            const std::vector<double>& mu_b, const std::vector<double>& sig_b,
                            std::size_t d) {
  double mean_term = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    mean_term += (mu_a[i] - mu_b[i]) * (mu_a[i] - mu_b[i]);
  }
  std::vector<double> root_a = jacobi_matrix_sqrt(sig_a, d);
  std::vector<double> prod = matmul(matmul(root_a, sig_b, d), root_a, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double s = 0.5 * (prod[i * d + j] + prod[j * d + i]);
      prod[i * d + j] = prod[j * d + i] = s;
    }
  }
  JacobiEigen e = jacobi_eigensystem(prod, d);
  double tr_sqrt = 0.0;
  for (double lam : e.values) {
    if (lam > 0.0) tr_sqrt += std::sqrt(lam);
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += sig_a[i * d + i] + sig_b[i * d + i];
  return mean_term + trace - 2.0 * tr_sqrt;
}

// Matrix product helper for the oracle-side Frechet trace.
inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                                  std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    }
  }
  return c;
}

// Uniformly seeded random map in [-1, 1), plain LCG-free (std engine is fine
// for test data; determinism of the values does not matter, only of the run).
inline melrefine::FeatureMap random_map(melrefine::Dims dims, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> data(dims.count());
  for (float& f : data) f = dist(gen);
  return melrefine::FeatureMap(dims, std::move(data));
}

// Random map whose spectrum is zero on every bin whose conjugate partner has
// a different central-region membership (the boundary lines of the half-open
// rectangle). On this input class a two-valued band mask acts exactly, so
// the band-energy laws hold to rounding rather than to a boundary-leakage
// term. Built via the naive DFT, symmetric zeroing and the naive inverse.
inline melrefine::FeatureMap random_band_clean_map(melrefine::Dims dims, unsigned seed) {
  using melrefine::FeatureMap;
  FeatureMap raw = random_map(dims, seed);
  const std::size_t h = dims.h, w = dims.w;
  auto in_low = [&](std::size_t y, std::size_t x) {
    return y >= h / 4 && y < (3 * h) / 4 && x >= w / 4 && x < (3 * w) / 4;
  };
  auto conj_of = [](std::size_t j, std::size_t n) { return (2 * (n / 2) + n - j) % n; };

  FeatureMap out = FeatureMap::zeros(dims);
  std::vector<double> slice(h * w);
  for (std::size_t b = 0; b < dims.b; ++b) {
    for (std::size_t c = 0; c < dims.c; ++c) {
      const std::size_t base = raw.slice_offset(b, c);
      for (std::size_t i = 0; i < h * w; ++i) slice[i] = raw.data()[base + i];
      auto spec = naive_dft2_shifted(slice, h, w);
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          if (in_low(y, x) != in_low(conj_of(y, h), conj_of(x, w))) {
            spec[y * w + x] = {0.0, 0.0};
          }
        }
      }
      auto back = naive_idft2_shifted(spec, h, w);
      for (std::size_t i = 0; i < h * w; ++i) {
        out.data()[base + i] = static_cast<float>(back[i].real());
      }
    }
  }
  return out;
}

}  // namespace oracle
