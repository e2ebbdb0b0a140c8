#include "melrefine/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "melrefine/fft.hpp"
#include "melrefine/refine.hpp"

namespace melrefine {

EmbeddingSet EmbeddingSet::from_feature_map(const FeatureMap& x) {
  const Dims& d = x.dims();
  if (d.b != 1 || d.c != 1) {
    throw Error("EmbeddingSet: expected FMAP dims (1, 1, n, d), got " + d.str());
  }
  EmbeddingSet e;
  e.n = d.h;
  e.d = d.w;
  if (e.n < 2) throw Error("EmbeddingSet: need n >= 2 embeddings, got " + std::to_string(e.n));
  e.v.assign(x.data().begin(), x.data().end());
  return e;
}

GaussianStats gaussian_stats(const EmbeddingSet& e) {
  if (e.n < 2) {
    throw std::invalid_argument("gaussian_stats: need n >= 2, got " + std::to_string(e.n));
  }
  if (e.d < 1 || e.v.size() != e.n * e.d) {
    throw std::invalid_argument("gaussian_stats: inconsistent embedding set");
  }

  GaussianStats g;
  g.d = e.d;
  g.mu.assign(e.d, 0.0);
  for (std::size_t i = 0; i < e.n; ++i) {
    for (std::size_t j = 0; j < e.d; ++j) g.mu[j] += e.at(i, j);
  }
  for (double& m : g.mu) m /= static_cast<double>(e.n);

  g.sigma.assign(e.d * e.d, 0.0);
  for (std::size_t i = 0; i < e.n; ++i) {
    for (std::size_t j = 0; j < e.d; ++j) {
      const double dj = e.at(i, j) - g.mu[j];
      for (std::size_t k = j; k < e.d; ++k) {
        g.sigma[j * e.d + k] += dj * (e.at(i, k) - g.mu[k]);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(e.n - 1);
  for (std::size_t j = 0; j < e.d; ++j) {
    for (std::size_t k = j; k < e.d; ++k) {
      const double v = g.sigma[j * e.d + k] * inv;
      g.sigma[j * e.d + k] = v;
      g.sigma[k * e.d + j] = v;
    }
  }
  return g;
}

namespace {

Eigen::MatrixXd as_matrix(const GaussianStats& g) {
  Eigen::MatrixXd s(g.d, g.d);
  for (std::size_t i = 0; i < g.d; ++i) {
    for (std::size_t j = 0; j < g.d; ++j) s(i, j) = g.sigma[i * g.d + j];
  }
  return s;
}

void check_stats(const GaussianStats& g, const char* which) {
  if (g.mu.size() != g.d || g.sigma.size() != g.d * g.d) {
    throw std::invalid_argument(std::string("frechet_distance: malformed stats ") + which);
  }
  for (double v : g.mu) {
    if (!std::isfinite(v)) throw Error(std::string("frechet_distance: non-finite mean in ") + which);
  }
  double scale = 0.0;
  for (double v : g.sigma) {
    if (!std::isfinite(v)) {
      throw Error(std::string("frechet_distance: non-finite covariance in ") + which);
    }
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < g.d; ++i) {
    for (std::size_t j = i + 1; j < g.d; ++j) {
      if (std::abs(g.sigma[i * g.d + j] - g.sigma[j * g.d + i]) > 1e-8 * std::max(1.0, scale)) {
        throw Error(std::string("frechet_distance: covariance not symmetric in ") + which);
      }
    }
  }
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.d != b.d) {
    throw std::invalid_argument("frechet_distance: dimension mismatch (" + std::to_string(a.d) +
                                " vs " + std::to_string(b.d) + ")");
  }
  check_stats(a, "a");
  check_stats(b, "b");

  double mean_term = 0.0;
  for (std::size_t i = 0; i < a.d; ++i) {
    const double diff = a.mu[i] - b.mu[i];
    mean_term += diff * diff;
  }

  Eigen::MatrixXd sa = as_matrix(a);
  Eigen::MatrixXd sb = as_matrix(b);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a(sa);
  if (eig_a.info() != Eigen::Success) throw Error("frechet_distance: eigendecomposition failed");
  Eigen::VectorXd ev = eig_a.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-8) {
      throw Error("frechet_distance: covariance has eigenvalue " + std::to_string(ev[i]) +
                  " below -1e-8");
    }
    ev[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
  }
  Eigen::MatrixXd root_a = eig_a.eigenvectors() * ev.asDiagonal() * eig_a.eigenvectors().transpose();

  Eigen::MatrixXd prod = root_a * sb * root_a;
  prod = 0.5 * (prod + prod.transpose().eval());  // kill asymmetry from round-off
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_p(prod);
  if (eig_p.info() != Eigen::Success) throw Error("frechet_distance: eigendecomposition failed");

  double tr_sqrt = 0.0;
  for (Eigen::Index i = 0; i < eig_p.eigenvalues().size(); ++i) {
    const double lam = eig_p.eigenvalues()[i];
    if (lam < -1e-8) {
      throw Error("frechet_distance: product matrix has eigenvalue " + std::to_string(lam) +
                  " below -1e-8");
    }
    if (lam > 0.0) tr_sqrt += std::sqrt(lam);
  }

  double fd = mean_term + sa.trace() + sb.trace() - 2.0 * tr_sqrt;
  if (fd < 0.0 && fd > -1e-8) fd = 0.0;
  return fd;
}

std::vector<PosteriorPair> posterior_pairs_from_feature_map(const FeatureMap& x) {
  const Dims& d = x.dims();
  if (d.b != 1 || d.c != 2) {
    throw Error("posterior pairs: expected FMAP dims (1, 2, n, k), got " + d.str());
  }
  std::vector<PosteriorPair> pairs(d.h);
  for (std::size_t i = 0; i < d.h; ++i) {
    pairs[i].p_ref.resize(d.w);
    pairs[i].p_gen.resize(d.w);
    for (std::size_t j = 0; j < d.w; ++j) {
      pairs[i].p_ref[j] = x.at(0, 0, i, j);
      pairs[i].p_gen[j] = x.at(0, 1, i, j);
    }
  }
  return pairs;
}

namespace {

void normalize_posterior(std::vector<double>& p, std::size_t pair_index, const char* side) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw Error("mean_paired_kl: negative probability in pair " + std::to_string(pair_index) +
                  " (" + side + ")");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error("mean_paired_kl: probabilities in pair " + std::to_string(pair_index) + " (" +
                side + ") sum to " + std::to_string(sum) + ", more than 1e-6 away from 1");
  }
  for (double& v : p) v /= sum;
}

}  // namespace

double mean_paired_kl(const std::vector<PosteriorPair>& pairs, double eps) {
  if (pairs.empty()) throw std::invalid_argument("mean_paired_kl: empty pair list");
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto p = pairs[i].p_ref;
    auto q = pairs[i].p_gen;
    if (p.size() != q.size() || p.empty()) {
      throw std::invalid_argument("mean_paired_kl: pair " + std::to_string(i) +
                                  " has mismatched class counts");
    }
    normalize_posterior(p, i, "ref");
    normalize_posterior(q, i, "gen");
    double kl = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] > 0.0) kl += p[j] * (std::log(p[j] + eps) - std::log(q[j] + eps));
    }
    total += kl;
  }
  return total / static_cast<double>(pairs.size());
}

BandEnergy band_energy(const FeatureMap& x) {
  const Dims& d = x.dims();
  if (d.h < 2 || d.w < 2) {
    throw std::invalid_argument("band_energy: need spatial dims >= 2, got " + d.str());
  }
  SpectrumMap spec = fft2_shifted(x);
  BandMask mask = central_region_mask(d.h, d.w, 1.0, 0.0);  // 1 marks the low region

  BandEnergy result;
  result.slices.reserve(d.b * d.c);
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      double lf = 0.0, hf = 0.0;
      for (std::size_t y = 0; y < d.h; ++y) {
        for (std::size_t xcol = 0; xcol < d.w; ++xcol) {
          const std::complex<float> v = spec.at(b, c, y, xcol);
          const double p = static_cast<double>(v.real()) * v.real() +
                           static_cast<double>(v.imag()) * v.imag();
          if (mask.in_low_region(y, xcol)) {
            lf += p;
          } else {
            hf += p;
          }
        }
      }
      result.slices.emplace_back(lf, hf);
      result.lf += lf;
      result.hf += hf;
    }
  }
  return result;
}

}  // namespace melrefine
