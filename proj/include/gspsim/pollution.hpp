#pragma once

#include <cmath>
#include <stdexcept>

#include "gspsim/errors.hpp"
#include "gspsim/sampling.hpp"

namespace gspsim {

/// Maps the ranking exponent alpha to the beta parameters of the CTR
/// distribution. When enabled, the beta b-shape moves linearly with alpha
/// around the empirical anchor at alpha = 1, shifting the whole CTR
/// distribution left as alpha drops (searchers fatigued by irrelevant ads) and
/// right as it rises. `strength` scales the slope only, so the anchor holds
/// for every strength.
struct PollutionModel {
  double base_a = 2.71;    // beta a-shape, unchanged by the shift
  double anchor_b = 25.43; // beta b-shape at alpha = 1
  double slope = 7.0;      // decrease in b per unit alpha
  double strength = 1.0;   // sensitivity multiplier on the slope
  bool enabled = false;

  void validate() const {
    if (!(base_a > 0.0) || !std::isfinite(base_a))
      throw std::invalid_argument("pollution model: base_a must be positive");
    if (!(anchor_b > 0.0) || !std::isfinite(anchor_b))
      throw std::invalid_argument("pollution model: anchor_b must be positive");
    if (!(strength >= 0.0) || !std::isfinite(strength))
      throw std::invalid_argument("pollution model: strength must be non-negative");
    if (!std::isfinite(slope)) throw std::invalid_argument("pollution model: slope must be finite");
  }
};

inline BetaParams ctr_params_for_alpha(const PollutionModel& model, double alpha) {
  model.validate();
  if (!model.enabled) return BetaParams(model.base_a, model.anchor_b);
  const double b = model.anchor_b - model.slope * model.strength * (alpha - 1.0);
  if (!(b > 0.0))
    throw NumericDomainError("pollution model: beta b-shape is not positive at this alpha");
  return BetaParams(model.base_a, b);
}

/// Mean of the shifted CTR distribution, a / (a + b(alpha)). Strictly
/// increasing in alpha for enabled models with positive strength.
inline double mean_ctr_for_alpha(const PollutionModel& model, double alpha) {
  return ctr_params_for_alpha(model, alpha).mean();
}

}  // namespace gspsim
