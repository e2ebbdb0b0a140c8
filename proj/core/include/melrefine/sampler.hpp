#pragma once

#include <cstdint>
#include <vector>

#include "melrefine/unet.hpp"

namespace melrefine {

// Deterministic DDIM loop over a linear cumulative-product schedule.
// alpha_bar(i) runs from 0.9999 (cleanest, forward-time index 0) down to 0.02
// (noisiest, index steps - 1); sampling walks the indices backwards and each
// update is
//   x <- (x - sqrt(1 - ab) * eps) / sqrt(ab) * sqrt(ab_prev)
//        + sqrt(1 - ab_prev) * eps
// with ab_prev = alpha_bar(i - 1), and 1 for the final update. The network
// sees t = (i + 0.5) / steps. steps == 1 degenerates to the single level
// 0.02.
struct SamplerConfig {
  std::size_t steps = 25;
  std::uint64_t seed = 0;
  double alpha_bar_start = 0.9999;
  double alpha_bar_end = 0.02;

  void validate() const;
  std::vector<double> alpha_bar() const;  // forward-time, strictly decreasing
};

// Runs the full loop from seeded Gaussian noise. With capture != nullptr the
// decoder intermediates of the final step are recorded.
FeatureMap ddim_sample(const ToyUNet& net, const SamplerConfig& scfg,
                       const RefineParams* params = nullptr,
                       std::vector<BlockCapture>* capture = nullptr);

}  // namespace melrefine
