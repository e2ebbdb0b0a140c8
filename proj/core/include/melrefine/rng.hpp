#pragma once

#include <cstdint>
#include <random>

#include "melrefine/feature_map.hpp"

namespace melrefine {

// Inverse normal CDF (Acklam's rational approximation, |error| < 1.2e-9).
// Used instead of std::normal_distribution so that seeded draws are
// identical across standard libraries: mt19937_64 is specified bit-exactly
// by the standard, the distribution adapters are not.
double inverse_normal_cdf(double p);

// Deterministic N(0, 1) stream: mt19937_64 -> 53-bit uniform in (0, 1) ->
// inverse CDF.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    std::uint64_t bits = gen_();
    double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    return inverse_normal_cdf(u);
  }

 private:
  std::mt19937_64 gen_;
};

// Seeded standard-normal FeatureMap (the sampler's initial noise).
FeatureMap gaussian_map(Dims dims, std::uint64_t seed);

}  // namespace melrefine
