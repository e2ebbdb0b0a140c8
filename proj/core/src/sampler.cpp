#include "melrefine/sampler.hpp"

#include <cmath>

#include "melrefine/rng.hpp"

namespace melrefine {

void SamplerConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("SamplerConfig: steps must be >= 1");
  if (!(alpha_bar_start > alpha_bar_end) || alpha_bar_end <= 0.0 || alpha_bar_start >= 1.0) {
    throw std::invalid_argument("SamplerConfig: need 1 > alpha_bar_start > alpha_bar_end > 0");
  }
}

std::vector<double> SamplerConfig::alpha_bar() const {
  validate();
  std::vector<double> ab(steps);
  if (steps == 1) {
    ab[0] = alpha_bar_end;
    return ab;
  }
  const double span = alpha_bar_end - alpha_bar_start;
  for (std::size_t i = 0; i < steps; ++i) {
    ab[i] = alpha_bar_start + span * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return ab;
}

FeatureMap ddim_sample(const ToyUNet& net, const SamplerConfig& scfg, const RefineParams* params,
                       std::vector<BlockCapture>* capture) {
  const std::vector<double> ab = scfg.alpha_bar();
  const UNetConfig& ucfg = net.config();

  FeatureMap x = gaussian_map({1, ucfg.in_channels, ucfg.height, ucfg.width}, scfg.seed);
  for (std::size_t step = scfg.steps; step-- > 0;) {
    const double t = (static_cast<double>(step) + 0.5) / static_cast<double>(scfg.steps);
    const bool last = step == 0;
    FeatureMap eps = net.forward(x, t, params, last ? capture : nullptr);

    const double a_cur = ab[step];
    const double a_prev = step > 0 ? ab[step - 1] : 1.0;
    const double c_eps = std::sqrt(1.0 - a_cur);
    const double c_x0 = std::sqrt(a_prev) / std::sqrt(a_cur);
    const double c_dir = std::sqrt(1.0 - a_prev);

    auto& xd = x.data();
    const auto& ed = eps.data();
    for (std::size_t i = 0; i < xd.size(); ++i) {
      const double x0 = (static_cast<double>(xd[i]) - c_eps * ed[i]) * c_x0;
      xd[i] = static_cast<float>(x0 + c_dir * ed[i]);
    }
  }
  return x;
}

}  // namespace melrefine
