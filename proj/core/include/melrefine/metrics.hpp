#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// One embedding per audio clip, n x d row-major. Stored double: the Frechet
// math wants the headroom even though the on-disk FMAP payload is float32.
struct EmbeddingSet {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> v;

  double at(std::size_t i, std::size_t j) const { return v[i * d + j]; }
  // On-disk shape is (1, 1, n, d).
  static EmbeddingSet from_feature_map(const FeatureMap& x);
};

struct GaussianStats {
  std::size_t d = 0;
  std::vector<double> mu;     // d
  std::vector<double> sigma;  // d x d, symmetric
};

// mu = column mean, sigma = unbiased sample covariance (n - 1), symmetrized.
GaussianStats gaussian_stats(const EmbeddingSet& e);

// Frechet distance between two Gaussians:
//   |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa Sb)^(1/2))
// with tr((Sa Sb)^(1/2)) taken as sum_i sqrt(lambda_i) of the symmetric
// product sqrt(Sa) Sb sqrt(Sa). Eigenvalues below -1e-8 are rejected, small
// negatives are clamped to zero, and a tiny negative total rounds up to 0.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

// Class posteriors for one paired clip (reference vs generated). Entries must
// be nonnegative; sums within 1e-6 of 1 are renormalized, worse is an error.
struct PosteriorPair {
  std::vector<double> p_ref;
  std::vector<double> p_gen;
};

// On-disk shape is (1, 2, n, k): channel 0 reference, channel 1 generated.
std::vector<PosteriorPair> posterior_pairs_from_feature_map(const FeatureMap& x);

// Mean over pairs of KL(ref || gen) with additive eps smoothing:
//   sum_i p_ref[i] * (ln(p_ref[i] + eps) - ln(p_gen[i] + eps))
double mean_paired_kl(const std::vector<PosteriorPair>& pairs, double eps = 1e-10);

// Spectral power split by the central low-frequency rectangle, per (b, c)
// slice plus batch totals. Power is |F|^2 of the unnormalized forward
// transform, so lf + hf == (H*W) * sum(x^2) per slice (Parseval).
struct BandEnergy {
  std::vector<std::pair<double, double>> slices;  // (lf, hf) per (b, c)
  double lf = 0.0;
  double hf = 0.0;
};

BandEnergy band_energy(const FeatureMap& x);

}  // namespace melrefine
