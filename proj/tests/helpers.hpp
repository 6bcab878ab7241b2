#pragma once

#include <cmath>
#include <vector>

#include "gspsim/auction.hpp"
#include "gspsim/rng.hpp"
#include "gspsim/sampling.hpp"

namespace test_helpers {

struct Instance {
  std::vector<gspsim::AdvertiserDraw> draws;
  gspsim::PositionBias bias;
  std::size_t slots;
  double alpha;
};

// Random auction instance with moderate magnitudes so 1e-9 absolute envy
// tolerances are meaningful even at alpha = -2.
inline Instance random_instance(gspsim::Substream& rng, std::size_t max_slots, double alpha) {
  const std::size_t slots = 1 + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(max_slots));
  const std::size_t bidders = slots + 1 + static_cast<std::size_t>(rng.uniform01() * 3.0);
  std::vector<gspsim::AdvertiserDraw> draws(bidders);
  for (auto& d : draws) {
    d.value = 0.2 + 10.0 * rng.uniform01();
    d.ctr = 0.01 + 0.6 * rng.uniform01();
  }
  std::vector<double> x(slots);
  double level = 1.0;
  for (std::size_t i = 0; i < slots; ++i) {
    x[i] = level;
    level *= 0.35 + 0.6 * rng.uniform01();
  }
  return Instance{std::move(draws), gspsim::PositionBias(std::move(x)), slots, alpha};
}

// Brute-force symmetric-equilibrium (locally envy-free) check over every
// occupied slot pair: x_i (w_i V_i - w_{i+1} B_{i+1}) >= x_j (w_i V_i - w_{j+1} B_{j+1}).
// Returns the largest violation found (0 when envy-free).
inline double max_envy_violation(const gspsim::AuctionOutcome& outcome,
                                 const gspsim::PositionBias& bias) {
  const std::size_t k = bias.slots();
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double own_score = outcome.ranked[i].weight * outcome.ranked[i].value;
    const double stay = bias.at(i) * (own_score - outcome.ranked[i + 1].weight *
                                                      outcome.ranked[i + 1].equilibrium_bid);
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      const double move = bias.at(j) * (own_score - outcome.ranked[j + 1].weight *
                                                        outcome.ranked[j + 1].equilibrium_bid);
      worst = std::max(worst, move - stay);
    }
  }
  return worst;
}

}  // namespace test_helpers
