#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "gspsim/distributions.hpp"
#include "gspsim/errors.hpp"
#include "gspsim/rng.hpp"

namespace gspsim {

/// Sampled CTRs are clamped into [kCtrFloor, 1 - kCtrFloor] so ctr^alpha stays
/// finite for negative alpha.
inline constexpr double kCtrFloor = 1e-12;

/// Location/scale of the normal underlying a lognormal value-per-click
/// distribution (log-dollars).
struct LognormalParams {
  double mu;
  double sigma;

  LognormalParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("lognormal params: sigma must be positive and finite");
  }

  double mean() const { return std::exp(mu + 0.5 * sigma * sigma); }
  double variance() const {
    const double s2 = sigma * sigma;
    return (std::exp(s2) - 1.0) * std::exp(2.0 * mu + s2);
  }
};

/// Log-space parameters of the lognormal whose distribution-space mean and
/// standard deviation are the given moments.
inline LognormalParams lognormal_from_moments(double mean, double stddev) {
  if (!(mean > 0.0) || !(stddev > 0.0))
    throw std::invalid_argument("lognormal moments: mean and stddev must be positive");
  const double s2 = std::log1p((stddev * stddev) / (mean * mean));
  return LognormalParams(std::log(mean) - 0.5 * s2, std::sqrt(s2));
}

struct BetaParams {
  double a;
  double b;

  BetaParams(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("beta params: shapes must be positive and finite");
  }

  double mean() const { return a / (a + b); }
};

/// Pearson correlation of the Gaussian copula that induces the given Spearman
/// rank correlation: 2*sin(pi*rho/6). Monotone, fixed points at -1, 0, 1.
inline double spearman_to_pearson(double spearman_rho) {
  if (!(std::fabs(spearman_rho) <= 1.0))
    throw NumericDomainError("spearman correlation must lie in [-1, 1]");
  if (spearman_rho == 1.0 || spearman_rho == -1.0 || spearman_rho == 0.0) return spearman_rho;
  return 2.0 * std::sin(std::numbers::pi * spearman_rho / 6.0);
}

struct CopulaConfig {
  double spearman_rho;
  double pearson_rho;

  explicit CopulaConfig(double spearman)
      : spearman_rho(spearman), pearson_rho(spearman_to_pearson(spearman)) {}
};

/// One bidder's private value per click (dollars) and intrinsic clickthrough
/// probability.
struct AdvertiserDraw {
  double value;
  double ctr;
};

// Draws correlated (value, ctr) pairs: a standard bivariate normal pair with
// the copula's Pearson correlation is pushed through the marginal quantile
// functions. Both maps are strictly monotone, so the pair's ranks are exactly
// the ranks of the underlying Gaussian pair and the Spearman target is hit by
// construction. Consumes exactly two uniforms per draw, value coordinate
// first. Immutable after construction; safe to share across threads as long
// as each thread owns its substream.
class BidderSampler {
 public:
  BidderSampler(const LognormalParams& value_params, const BetaParams& ctr_params,
                const CopulaConfig& copula)
      : BidderSampler(value_params, ctr_params, copula,
                      std::make_shared<const BetaQuantileTable>(ctr_params.a, ctr_params.b)) {}

  /// Shares a prebuilt quantile table; `table` must match `ctr_params`.
  BidderSampler(const LognormalParams& value_params, const BetaParams& ctr_params,
                const CopulaConfig& copula, std::shared_ptr<const BetaQuantileTable> table)
      : value_(value_params),
        ctr_(ctr_params),
        copula_(copula),
        mix_(std::sqrt(1.0 - copula.pearson_rho * copula.pearson_rho)),
        table_(std::move(table)) {
    if (!(std::fabs(copula.pearson_rho) < 1.0))
      throw NumericDomainError("copula correlation must satisfy |rho| < 1 for sampling");
  }

  void sample(std::span<AdvertiserDraw> out, Substream& stream) const {
    for (auto& draw : out) {
      const double z_value = normal_quantile(stream.uniform01());
      const double z_ctr = copula_.pearson_rho * z_value + mix_ * normal_quantile(stream.uniform01());
      draw.value = std::exp(value_.mu + value_.sigma * z_value);
      draw.ctr = std::clamp(table_->from_normal(z_ctr), kCtrFloor, 1.0 - kCtrFloor);
    }
  }

  std::vector<AdvertiserDraw> sample(std::size_t n, Substream& stream) const {
    std::vector<AdvertiserDraw> out(n);
    sample(std::span<AdvertiserDraw>(out), stream);
    return out;
  }

  const LognormalParams& value_params() const noexcept { return value_; }
  const BetaParams& ctr_params() const noexcept { return ctr_; }
  const CopulaConfig& copula() const noexcept { return copula_; }
  const BetaQuantileTable& table() const noexcept { return *table_; }

 private:
  LognormalParams value_;
  BetaParams ctr_;
  CopulaConfig copula_;
  double mix_;
  std::shared_ptr<const BetaQuantileTable> table_;
};

inline std::vector<AdvertiserDraw> sample_bidders(std::size_t n, const LognormalParams& value_params,
                                                  const BetaParams& ctr_params,
                                                  const CopulaConfig& copula, Substream& stream) {
  if (n < 1) throw std::invalid_argument("sample_bidders: need at least one bidder");
  return BidderSampler(value_params, ctr_params, copula).sample(n, stream);
}

namespace detail {

// midranks (ties get the average of the ranks they span)
inline std::vector<double> ranks_of(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

/// Spearman rank correlation (midranks for ties). pre: >= 2 pairs, no NaN.
inline double empirical_spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("empirical_spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw NumericDomainError("empirical_spearman: need at least two pairs");
  for (std::size_t i = 0; i < n; ++i)
    if (std::isnan(x[i]) || std::isnan(y[i]))
      throw NumericDomainError("empirical_spearman: NaN in input");

  const std::vector<double> rx = detail::ranks_of(x);
  const std::vector<double> ry = detail::ranks_of(y);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw NumericDomainError("empirical_spearman: a coordinate is constant");
  return sxy / std::sqrt(sxx * syy);
}

inline double empirical_spearman(std::span<const std::pair<double, double>> pairs) {
  std::vector<double> x(pairs.size()), y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x[i] = pairs[i].first;
    y[i] = pairs[i].second;
  }
  return empirical_spearman(std::span<const double>(x), std::span<const double>(y));
}

inline double empirical_spearman(std::span<const AdvertiserDraw> draws) {
  std::vector<double> x(draws.size()), y(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    x[i] = draws[i].value;
    y[i] = draws[i].ctr;
  }
  return empirical_spearman(std::span<const double>(x), std::span<const double>(y));
}

}  // namespace gspsim
