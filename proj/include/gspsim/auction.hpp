#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gspsim/errors.hpp"
#include "gspsim/sampling.hpp"

namespace gspsim {

// Relative slack when checking that a bid vector is consistent with the rank
// order that produced it; absorbs the last-ulp rounding of the recursion.
inline constexpr double kRankOrderSlack = 1e-9;

/// Per-slot view-probability multipliers x_1 >= ... >= x_K, with the implicit
/// x_{K+1} = 0 (the slot beyond the page gets no views).
class PositionBias {
 public:
  explicit PositionBias(std::vector<double> multipliers) : x_(std::move(multipliers)) {
    if (x_.empty()) throw std::invalid_argument("position bias: need at least one slot");
    double prev = 1.0;
    for (double v : x_) {
      if (!(v > 0.0) || !(v <= prev) || !std::isfinite(v))
        throw std::invalid_argument("position bias: multipliers must satisfy 1 >= x1 >= ... >= xK > 0");
      prev = v;
    }
  }

  static PositionBias geometric(std::size_t slots, double ratio = 0.75) {
    if (slots < 1) throw std::invalid_argument("position bias: need at least one slot");
    if (!(ratio > 0.0) || !(ratio <= 1.0))
      throw std::invalid_argument("position bias: ratio must lie in (0, 1]");
    std::vector<double> x(slots);
    double v = 1.0;
    for (std::size_t i = 0; i < slots; ++i, v *= ratio) x[i] = v;
    return PositionBias(std::move(x));
  }

  std::size_t slots() const noexcept { return x_.size(); }

  /// 0-based; returns exactly 0 for any slot index at or beyond K.
  double at(std::size_t slot) const noexcept { return slot < x_.size() ? x_[slot] : 0.0; }

  std::span<const double> multipliers() const noexcept { return x_; }

 private:
  std::vector<double> x_;
};

struct AuctionConfig {
  std::size_t slots;
  std::size_t bidders;
  double alpha;

  AuctionConfig(std::size_t slots_, std::size_t bidders_, double alpha_)
      : slots(slots_), bidders(bidders_), alpha(alpha_) {
    if (slots < 1) throw std::invalid_argument("auction config: need at least one slot");
    if (bidders <= slots)
      throw std::invalid_argument("auction config: bidders must exceed slots (K < N)");
    if (!std::isfinite(alpha)) throw std::invalid_argument("auction config: alpha must be finite");
  }
};

struct RankedBidder {
  double value;
  double ctr;
  double weight;           // ctr^alpha
  double equilibrium_bid;  // dollars per click
  double price;            // GSP payment per click; 0 for the excluded bidder
};

struct PageMetrics {
  double revenue = 0.0;
  double efficiency = 0.0;
  double relevance = 0.0;
};

/// Ranked allocation (K winners plus the first excluded bidder, which prices
/// slot K) and the three page-level metrics.
struct AuctionOutcome {
  std::vector<RankedBidder> ranked;
  double revenue = 0.0;
  double efficiency = 0.0;
  double relevance = 0.0;
};

/// Ranking weight ctr^alpha, computed as exp(alpha*ln(ctr)) on the clamped
/// ctr. A weight that overflows or underflows to zero aborts the auction
/// rather than letting a NaN propagate through prices.
inline double bidder_weight(double ctr, double alpha) {
  const double clamped = std::clamp(ctr, kCtrFloor, 1.0 - kCtrFloor);
  const double weight = std::exp(alpha * std::log(clamped));
  if (!std::isfinite(weight) || !(weight > 0.0))
    throw NumericDomainError("bidder weight ctr^alpha is not finite and positive");
  return weight;
}

namespace detail {

inline void compute_weights(std::span<const AdvertiserDraw> draws, double alpha,
                            std::span<double> weights) {
  for (std::size_t i = 0; i < draws.size(); ++i) weights[i] = bidder_weight(draws[i].ctr, alpha);
}

// Sort indices by weight*value descending; ties break by higher ctr, then by
// input index, so the order is total and deterministic.
inline void rank_order(std::span<const AdvertiserDraw> draws, std::span<const double> weights,
                       std::span<std::uint32_t> order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double score = weights[i] * draws[i].value;
    if (!std::isfinite(score)) throw NumericDomainError("ranking score is not finite");
    order[i] = static_cast<std::uint32_t>(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double sa = weights[a] * draws[a].value;
    const double sb = weights[b] * draws[b].value;
    if (sa != sb) return sa > sb;
    if (draws[a].ctr != draws[b].ctr) return draws[a].ctr > draws[b].ctr;
    return a < b;
  });
}

// Smallest symmetric (locally envy-free) equilibrium over the ranked list.
// In score space (sigma_r = w_r v_r, pi_r = w_{r+1} Bid_{r+1}) the binding
// adjacent constraints give
//   x_r pi_r = sum_{j=r..K-1} (x_j - x_{j+1}) sigma_{j+1},
// seeded by the first excluded bidder bidding its value. Each bidder's own
// ctr multiplies both sides of every envy comparison, so it cancels and the
// bids depend only on scores and the bias profile.
// values/weights are rank-ordered spans of length K+1; writes K+1 bids.
inline void equilibrium_bids_core(std::span<const double> values, std::span<const double> weights,
                                  const PositionBias& bias, std::span<double> bids) {
  const std::size_t k = bias.slots();
  bids[0] = values[0];  // never enters any price; truthful by convention
  double weighted_price = 0.0;  // x_r * pi_r
  for (std::size_t r = k; r-- > 0;) {
    weighted_price += (bias.at(r) - bias.at(r + 1)) * weights[r + 1] * values[r + 1];
    bids[r + 1] = weighted_price / (bias.at(r) * weights[r + 1]);
  }
}

// price_r = Bid_{r+1} * w_{r+1} / w_r. pre: bids consistent with rank order.
inline void gsp_prices_core(std::span<const double> bids, std::span<const double> weights,
                            std::span<double> prices) {
  const std::size_t k = prices.size();
  for (std::size_t r = 0; r < k; ++r) {
    const double score_here = bids[r] * weights[r];
    const double score_below = bids[r + 1] * weights[r + 1];
    if (score_below > score_here * (1.0 + kRankOrderSlack))
      throw std::invalid_argument("gsp prices: bids are not in rank order; rank bidders first");
    prices[r] = score_below / weights[r];
  }
}

}  // namespace detail

/// Permutation placing all N bidders in allocation order (decreasing
/// ctr^alpha * value).
inline std::vector<std::uint32_t> rank_bidders(std::span<const AdvertiserDraw> draws, double alpha) {
  if (draws.empty()) throw std::invalid_argument("rank_bidders: no bidders");
  for (const auto& d : draws)
    if (!(d.value > 0.0) || !(d.ctr > 0.0) || !(d.ctr < 1.0))
      throw std::invalid_argument("rank_bidders: draws must satisfy value > 0 and 0 < ctr < 1");
  std::vector<double> weights(draws.size());
  detail::compute_weights(draws, alpha, weights);
  std::vector<std::uint32_t> order(draws.size());
  detail::rank_order(draws, weights, order);
  return order;
}

/// Equilibrium bids for an allocation-ordered list of at least K+1 draws.
/// Returns K+1 bids: the top bidder's value, then the bid pinned down for each
/// occupant below.
inline std::vector<double> equilibrium_bids(std::span<const AdvertiserDraw> ranked, double alpha,
                                            const PositionBias& bias) {
  const std::size_t k = bias.slots();
  if (ranked.size() < k + 1)
    throw std::invalid_argument("equilibrium_bids: need K+1 ranked bidders (K < N)");
  std::vector<double> values(k + 1), weights(k + 1);
  for (std::size_t r = 0; r <= k; ++r) {
    values[r] = ranked[r].value;
    weights[r] = bidder_weight(ranked[r].ctr, alpha);
  }
  std::vector<double> bids(k + 1);
  detail::equilibrium_bids_core(values, weights, bias, bids);
  return bids;
}

/// Per-click GSP prices for the K occupied slots. `ranked` and `bids` carry
/// K+1 entries; slot K is priced by the first excluded bidder.
inline std::vector<double> gsp_prices(std::span<const AdvertiserDraw> ranked,
                                      std::span<const double> bids, double alpha) {
  if (ranked.size() < 2 || bids.size() != ranked.size())
    throw std::invalid_argument("gsp_prices: need K+1 ranked bidders with matching bids");
  std::vector<double> weights(ranked.size());
  detail::compute_weights(ranked, alpha, weights);
  std::vector<double> prices(ranked.size() - 1);
  detail::gsp_prices_core(bids, weights, prices);
  return prices;
}

/// Page revenue: sum over slots of ctr_i * x_i * price_i.
inline double page_revenue(std::span<const AdvertiserDraw> winners, std::span<const double> prices,
                           const PositionBias& bias) {
  double total = 0.0;
  for (std::size_t r = 0; r < prices.size(); ++r)
    total += winners[r].ctr * bias.at(r) * prices[r];
  return total;
}

/// Page revenue stated directly in values: sum over slots of
/// (ctr_r / w_r) * sum_{j>=r} (x_j - x_{j+1}) * v_{j+1} * w_{j+1}.
/// Independent route of the bid recursion; must agree with page_revenue.
inline double revenue_from_values(std::span<const AdvertiserDraw> ranked, double alpha,
                                  const PositionBias& bias) {
  const std::size_t k = bias.slots();
  if (ranked.size() < k + 1)
    throw std::invalid_argument("revenue_from_values: need K+1 ranked bidders (K < N)");
  std::vector<double> weights(k + 1);
  detail::compute_weights(ranked.first(k + 1), alpha, weights);
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    double inner = 0.0;
    for (std::size_t j = r; j < k; ++j)
      inner += (bias.at(j) - bias.at(j + 1)) * ranked[j + 1].value * weights[j + 1];
    total += ranked[r].ctr / weights[r] * inner;
  }
  return total;
}

/// Total advertiser value delivered: sum of ctr_i * x_i * value_i.
inline double page_efficiency(std::span<const AdvertiserDraw> winners, const PositionBias& bias) {
  double total = 0.0;
  const std::size_t k = std::min(winners.size(), bias.slots());
  for (std::size_t r = 0; r < k; ++r) total += winners[r].ctr * bias.at(r) * winners[r].value;
  return total;
}

/// Expected clicks on the page: sum of ctr_i * x_i.
inline double page_relevance(std::span<const AdvertiserDraw> winners, const PositionBias& bias) {
  double total = 0.0;
  const std::size_t k = std::min(winners.size(), bias.slots());
  for (std::size_t r = 0; r < k; ++r) total += winners[r].ctr * bias.at(r);
  return total;
}

/// Reusable buffers for the per-auction pipeline; one per worker thread.
struct AuctionScratch {
  std::vector<double> weights;        // N
  std::vector<std::uint32_t> order;   // N
  std::vector<AdvertiserDraw> ranked; // K+1, allocation order
  std::vector<double> ranked_values, ranked_weights;  // K+1
  std::vector<double> bids;           // K+1
  std::vector<double> prices;         // K
};

/// Ranks, solves equilibrium bids, prices, and accumulates the three page
/// metrics. Allocation-free after the first call with a given shape; scratch
/// retains the ranked list, bids, and prices of the last page.
inline PageMetrics simulate_page(std::span<const AdvertiserDraw> draws, const AuctionConfig& config,
                                 const PositionBias& bias, AuctionScratch& scratch) {
  const std::size_t n = draws.size();
  const std::size_t k = config.slots;
  if (n != config.bidders) throw std::invalid_argument("simulate_page: draw count != bidders");
  if (bias.slots() != k) throw std::invalid_argument("simulate_page: bias has wrong slot count");

  scratch.weights.resize(n);
  scratch.order.resize(n);
  detail::compute_weights(draws, config.alpha, scratch.weights);
  detail::rank_order(draws, scratch.weights, scratch.order);

  scratch.ranked.resize(k + 1);
  scratch.ranked_values.resize(k + 1);
  scratch.ranked_weights.resize(k + 1);
  for (std::size_t r = 0; r <= k; ++r) {
    const std::uint32_t who = scratch.order[r];
    scratch.ranked[r] = draws[who];
    scratch.ranked_values[r] = draws[who].value;
    scratch.ranked_weights[r] = scratch.weights[who];
  }

  scratch.bids.resize(k + 1);
  detail::equilibrium_bids_core(scratch.ranked_values, scratch.ranked_weights, bias, scratch.bids);
  scratch.prices.resize(k);
  detail::gsp_prices_core(scratch.bids, scratch.ranked_weights, scratch.prices);

  PageMetrics metrics;
  for (std::size_t r = 0; r < k; ++r) {
    const double views = scratch.ranked[r].ctr * bias.at(r);
    metrics.revenue += views * scratch.prices[r];
    metrics.efficiency += views * scratch.ranked[r].value;
    metrics.relevance += views;
  }
  return metrics;
}

/// Full single-auction pipeline; returns the ranked outcome with bids, prices,
/// and metrics.
inline AuctionOutcome run_single_auction(std::span<const AdvertiserDraw> draws,
                                         const AuctionConfig& config, const PositionBias& bias) {
  for (const auto& d : draws)
    if (!(d.value > 0.0) || !(d.ctr > 0.0) || !(d.ctr < 1.0))
      throw std::invalid_argument("run_single_auction: draws must satisfy value > 0, 0 < ctr < 1");
  AuctionScratch scratch;
  const PageMetrics metrics = simulate_page(draws, config, bias, scratch);

  AuctionOutcome outcome;
  outcome.revenue = metrics.revenue;
  outcome.efficiency = metrics.efficiency;
  outcome.relevance = metrics.relevance;
  outcome.ranked.resize(config.slots + 1);
  for (std::size_t r = 0; r <= config.slots; ++r) {
    outcome.ranked[r] = RankedBidder{scratch.ranked[r].value, scratch.ranked[r].ctr,
                                     scratch.ranked_weights[r], scratch.bids[r],
                                     r < config.slots ? scratch.prices[r] : 0.0};
  }
  return outcome;
}

}  // namespace gspsim
