#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "gspsim/errors.hpp"

namespace gspsim {

inline double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Standard normal quantile. pre: 0 < p < 1.
inline double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::quantile(unit, p);
}

inline double beta_cdf(double a, double b, double x) {
  return boost::math::ibeta(a, b, std::clamp(x, 0.0, 1.0));
}

/// Regularized incomplete beta inverse. Reference path: full precision, slow.
inline double beta_quantile(double a, double b, double p) {
  return boost::math::ibeta_inv(a, b, p);
}

inline double beta_log_pdf(double a, double b, double x) {
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta;
}

// Evaluates x = F_beta^{-1}(Phi(z)) through a precomputed cubic Hermite table
// with nodes uniform in z. Node values come from boost's ibeta_inv, node
// slopes from the exact derivative d/dz = phi(z) / f_beta(x); slopes are
// Fritsch-Carlson limited so the interpolant is monotone like the function it
// approximates. Construction measures the probability-space error
// |F_beta(x~) - Phi(z)| at every interval midpoint and doubles the node count
// until the target accuracy holds (1e-9 by default, usually met with orders of
// magnitude to spare). Immutable after construction; cheap to evaluate, so one
// table amortizes millions of draws from the same (a, b).
class BetaQuantileTable {
 public:
  static constexpr double kDefaultAccuracy = 1e-9;

  BetaQuantileTable(double a, double b, double accuracy = kDefaultAccuracy) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw NumericDomainError("beta parameters must be positive and finite");
    for (std::size_t nodes = 2048; nodes <= 16384; nodes *= 2) {
      build(nodes);
      if (verified_error_ <= accuracy) return;
    }
    throw NumericDomainError("beta quantile table did not reach the accuracy target");
  }

  /// Beta quantile at probability Phi(z). Outside the tabulated range
  /// (|z| > 8.6, beyond the resolution of a 53-bit uniform) the end values
  /// are returned.
  double from_normal(double z) const noexcept {
    if (z <= z_lo_) return value_.front();
    if (z >= z_hi_) return value_.back();
    const double s = (z - z_lo_) * inv_step_;
    std::size_t i = static_cast<std::size_t>(s);
    if (i > value_.size() - 2) i = value_.size() - 2;
    const double t = s - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double x =
        (2.0 * t3 - 3.0 * t2 + 1.0) * value_[i] + (t3 - 2.0 * t2 + t) * step_ * slope_[i] +
        (-2.0 * t3 + 3.0 * t2) * value_[i + 1] + (t3 - t2) * step_ * slope_[i + 1];
    // node bracket keeps the map monotone across intervals despite rounding
    return std::clamp(x, value_[i], value_[i + 1]);
  }

  double operator()(double z) const noexcept { return from_normal(z); }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  /// Largest probability-space error observed at interval midpoints.
  double verified_error() const noexcept { return verified_error_; }

 private:
  void build(std::size_t nodes) {
    step_ = (z_hi_ - z_lo_) / static_cast<double>(nodes - 1);
    inv_step_ = 1.0 / step_;
    value_.assign(nodes, 0.0);
    slope_.assign(nodes, 0.0);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double z = z_lo_ + static_cast<double>(i) * step_;
      const double x = boost::math::ibeta_inv(a_, b_, normal_cdf(z));
      value_[i] = x;
      double slope = 0.0;
      if (x > 0.0 && x < 1.0) {
        const double density = std::exp(beta_log_pdf(a_, b_, x));
        if (density > 0.0) slope = std::exp(-0.5 * z * z) * inv_sqrt_2pi / density;
      }
      slope_[i] = std::isfinite(slope) ? slope : 0.0;
    }
    // monotonicity limiter: m_i <= 3 * min(adjacent secants)
    for (std::size_t i = 0; i < nodes; ++i) {
      double cap = std::numeric_limits<double>::infinity();
      if (i > 0) cap = std::min(cap, 3.0 * (value_[i] - value_[i - 1]) * inv_step_);
      if (i + 1 < nodes) cap = std::min(cap, 3.0 * (value_[i + 1] - value_[i]) * inv_step_);
      slope_[i] = std::clamp(slope_[i], 0.0, std::max(cap, 0.0));
    }
    verified_error_ = 0.0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
      const double z = z_lo_ + (static_cast<double>(i) + 0.5) * step_;
      const double err = std::fabs(beta_cdf(a_, b_, from_normal(z)) - normal_cdf(z));
      verified_error_ = std::max(verified_error_, err);
    }
  }

  double a_, b_;
  double z_lo_ = -8.6, z_hi_ = 8.6;
  double step_ = 0.0, inv_step_ = 0.0;
  double verified_error_ = 0.0;
  std::vector<double> value_, slope_;
};

}  // namespace gspsim
