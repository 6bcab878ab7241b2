#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gspsim/auction.hpp"
#include "helpers.hpp"

using namespace gspsim;
using Catch::Approx;
using test_helpers::max_envy_violation;
using test_helpers::random_instance;

namespace {
const std::vector<double> kAlphaSet{-2.0, -1.0, 0.0, 0.5, 1.0, 2.0};
}

TEST_CASE("position bias validates its shape") {
  CHECK_THROWS_AS(PositionBias({}), std::invalid_argument);
  CHECK_THROWS_AS(PositionBias({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PositionBias({0.5, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(PositionBias({1.2}), std::invalid_argument);
  const PositionBias bias = PositionBias::geometric(3);
  CHECK(bias.at(0) == 1.0);
  CHECK(bias.at(1) == Approx(0.75));
  CHECK(bias.at(2) == Approx(0.5625));
  CHECK(bias.at(3) == 0.0);  // x_{K+1} is exactly zero
  CHECK(bias.at(17) == 0.0);
}

TEST_CASE("rank_bidders orders by ctr^alpha * value") {
  // two bidders, $3 and $2, both at 1% ctr: the $3 bid wins at any alpha
  const std::vector<AdvertiserDraw> paper_pair{{3.0, 0.01}, {2.0, 0.01}};
  for (double alpha : kAlphaSet) {
    const auto order = rank_bidders(paper_pair, alpha);
    CHECK(order[0] == 0);
    CHECK(order[1] == 1);
  }

  // alpha = 0 ranks by value alone
  const std::vector<AdvertiserDraw> by_value{{1.0, 0.9}, {5.0, 0.001}, {2.0, 0.5}};
  const auto order0 = rank_bidders(by_value, 0.0);
  CHECK(order0 == std::vector<std::uint32_t>{1, 2, 0});

  // values (1,2), ctrs (0.2, 0.05), alpha 1 -> scores (0.2, 0.1)
  const std::vector<AdvertiserDraw> scored{{1.0, 0.2}, {2.0, 0.05}};
  const auto order1 = rank_bidders(scored, 1.0);
  CHECK(order1 == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("rank_bidders ties break by ctr then index") {
  // alpha = 0 makes every weight exactly 1, so equal values tie exactly and
  // the higher-ctr bidder wins
  const std::vector<AdvertiserDraw> tied{{1.0, 0.1}, {1.0, 0.2}};
  CHECK(rank_bidders(tied, 0.0) == std::vector<std::uint32_t>{1, 0});
  const std::vector<AdvertiserDraw> identical{{1.0, 0.1}, {1.0, 0.1}, {1.0, 0.1}};
  CHECK(rank_bidders(identical, 1.0) == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("rank_bidders rejects bad draws and non-finite scores") {
  CHECK_THROWS_AS(rank_bidders(std::vector<AdvertiserDraw>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rank_bidders(std::vector<AdvertiserDraw>{{1.0, 0.0}}, -1.0),
                  std::invalid_argument);  // ctr = 0 violates the draw invariant
  // a weight that overflows is a numeric-domain error
  CHECK_THROWS_AS(rank_bidders(std::vector<AdvertiserDraw>{{1.0, 0.5}, {1.0, 0.2}}, -5000.0),
                  NumericDomainError);
  CHECK_THROWS_AS(bidder_weight(0.5, -1e6), NumericDomainError);
}

TEST_CASE("equilibrium bids: single slot means the loser bids its value") {
  const std::vector<AdvertiserDraw> two{{3.0, 0.01}, {2.0, 0.01}};
  const PositionBias bias({1.0});
  const auto bids = equilibrium_bids(two, 1.0, bias);
  REQUIRE(bids.size() == 2);
  CHECK(bids[0] == 3.0);
  CHECK(bids[1] == 2.0);
}

TEST_CASE("equilibrium bids: hand-solved two-slot recursion") {
  // K=2, N=3, equal ctrs, alpha=1, x=(1, 0.5), values (3,2,1):
  //   Bid_3 = 1, Bid_2 = (0.5*2 + 0.5*1)/1 = 1.5
  const std::vector<AdvertiserDraw> three{{3.0, 0.2}, {2.0, 0.2}, {1.0, 0.2}};
  const PositionBias bias({1.0, 0.5});
  const auto bids = equilibrium_bids(three, 1.0, bias);
  REQUIRE(bids.size() == 3);
  CHECK(bids[0] == 3.0);
  CHECK(bids[1] == Approx(1.5).margin(1e-12));
  CHECK(bids[2] == Approx(1.0).margin(1e-12));
}

TEST_CASE("equilibrium bids stay consistent with the allocation order") {
  Substream rng(301);
  for (int trial = 0; trial < 400; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const auto order = rank_bidders(inst.draws, alpha);
    std::vector<AdvertiserDraw> ranked;
    for (auto idx : order) ranked.push_back(inst.draws[idx]);
    const auto bids = equilibrium_bids(ranked, alpha, inst.bias);

    // re-scoring by bid * ctr^alpha preserves the allocation order
    double prev_score = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < bids.size(); ++r) {
      const double score = bids[r] * bidder_weight(ranked[r].ctr, alpha);
      CHECK(score <= prev_score * (1.0 + 1e-9));
      prev_score = score;
    }

    // re-ranking the bid vector as values reproduces the identity permutation
    std::vector<AdvertiserDraw> rebid(bids.size());
    for (std::size_t r = 0; r < bids.size(); ++r) rebid[r] = {bids[r], ranked[r].ctr};
    if (std::all_of(bids.begin(), bids.end(), [](double b) { return b > 0.0; })) {
      const auto reorder = rank_bidders(rebid, alpha);
      std::vector<std::uint32_t> identity(reorder.size());
      std::iota(identity.begin(), identity.end(), 0u);
      CHECK(reorder == identity);
    }
  }
}

TEST_CASE("gsp prices follow the weight-scaled next bid") {
  const PositionBias bias({1.0});
  const std::vector<AdvertiserDraw> pair{{3.0, 0.01}, {2.0, 0.01}};
  const auto prices = gsp_prices(pair, std::vector<double>{3.0, 2.0}, 1.0);
  REQUIRE(prices.size() == 1);
  CHECK(prices[0] == Approx(2.0));

  // alpha = 0: price equals the next bid exactly
  const std::vector<AdvertiserDraw> trio{{5.0, 0.3}, {4.0, 0.1}, {1.0, 0.7}};
  const auto flat = gsp_prices(trio, std::vector<double>{5.0, 4.0, 1.0}, 0.0);
  CHECK(flat[0] == 4.0);
  CHECK(flat[1] == 1.0);

  // bids (3, 2) with ctrs (0.01, 0.02) at alpha 1 are out of rank order
  // (2*0.02 > 3*0.01); the precondition must catch the inversion
  const std::vector<AdvertiserDraw> inverted{{3.0, 0.01}, {2.0, 0.02}};
  CHECK_THROWS_AS(gsp_prices(inverted, std::vector<double>{3.0, 2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("page revenue sums ctr * bias * price") {
  // K=1: ctr 0.01, x=1, price 2 -> 0.02
  const std::vector<AdvertiserDraw> one{{3.0, 0.01}};
  CHECK(page_revenue(one, std::vector<double>{2.0}, PositionBias({1.0})) == Approx(0.02));
  CHECK(page_revenue(one, std::vector<double>{0.0}, PositionBias({1.0})) == 0.0);
  // K=2: 0.1*1*1.0 + 0.2*0.5*0.5 = 0.15
  const std::vector<AdvertiserDraw> two{{9.0, 0.1}, {9.0, 0.2}};
  CHECK(page_revenue(two, std::vector<double>{1.0, 0.5}, PositionBias({1.0, 0.5})) == Approx(0.15));
}

TEST_CASE("value-form revenue collapses to the single-slot closed form") {
  // K=1, x=1: revenue = ctr_1 * value_2 * w_2 / w_1
  const std::vector<AdvertiserDraw> pair{{4.0, 0.3}, {2.0, 0.1}};
  const PositionBias bias({1.0});
  const double alpha = 1.0;
  const double expected = 0.3 * 2.0 * bidder_weight(0.1, alpha) / bidder_weight(0.3, alpha);
  CHECK(revenue_from_values(pair, alpha, bias) == Approx(expected).epsilon(1e-12));

  const std::vector<AdvertiserDraw> worthless{{0.0, 0.3}, {0.0, 0.1}};
  CHECK(revenue_from_values(worthless, alpha, bias) == 0.0);
}

TEST_CASE("bid-path revenue and value-form revenue agree to 1e-9 relative") {
  Substream rng(302);
  for (int trial = 0; trial < 600; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const AuctionConfig config(inst.slots, inst.draws.size(), alpha);
    const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);

    std::vector<AdvertiserDraw> ranked;
    for (const auto& r : outcome.ranked) ranked.push_back({r.value, r.ctr});
    const double by_values = revenue_from_values(ranked, alpha, inst.bias);
    CHECK(std::fabs(outcome.revenue - by_values) <=
          1e-9 * std::max(1e-12, std::fabs(outcome.revenue)));
  }
}

TEST_CASE("page efficiency and its revenue/surplus decomposition") {
  const std::vector<AdvertiserDraw> one{{3.0, 0.01}};
  CHECK(page_efficiency(one, PositionBias({1.0})) == Approx(0.03));
  const std::vector<AdvertiserDraw> zero{{0.0, 0.01}};
  CHECK(page_efficiency(zero, PositionBias({1.0})) == 0.0);

  Substream rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const AuctionConfig config(inst.slots, inst.draws.size(), alpha);
    const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);
    double surplus = 0.0;
    for (std::size_t r = 0; r < inst.slots; ++r)
      surplus += outcome.ranked[r].ctr * inst.bias.at(r) *
                 (outcome.ranked[r].value - outcome.ranked[r].price);
    CHECK(surplus >= -1e-12);
    CHECK(outcome.efficiency ==
          Approx(outcome.revenue + surplus).epsilon(1e-9).margin(1e-12));
  }
}

TEST_CASE("page relevance sums actual clickthrough") {
  const std::vector<AdvertiserDraw> two{{1.0, 0.1}, {1.0, 0.2}};
  CHECK(page_relevance(two, PositionBias({1.0, 0.5})) == Approx(0.2));
  const std::vector<AdvertiserDraw> one{{1.0, 0.01}};
  CHECK(page_relevance(one, PositionBias({1.0})) == Approx(0.01));
  // identical ctrs: relevance is allocation-order invariant
  const std::vector<AdvertiserDraw> same{{5.0, 0.3}, {1.0, 0.3}, {2.0, 0.3}};
  const PositionBias bias({1.0, 0.4, 0.2});
  CHECK(page_relevance(same, bias) == Approx(0.3 * (1.0 + 0.4 + 0.2)));
}

TEST_CASE("run_single_auction reproduces the two-bidder page") {
  const std::vector<AdvertiserDraw> pair{{3.0, 0.01}, {2.0, 0.01}};
  const AuctionOutcome outcome = run_single_auction(pair, AuctionConfig(1, 2, 1.0), PositionBias({1.0}));
  CHECK(outcome.revenue == Approx(0.02));
  CHECK(outcome.efficiency == Approx(0.03));
  CHECK(outcome.relevance == Approx(0.01));
  REQUIRE(outcome.ranked.size() == 2);
  CHECK(outcome.ranked[0].value == 3.0);
  CHECK(outcome.ranked[0].price == Approx(2.0));
  CHECK(outcome.ranked[1].equilibrium_bid == Approx(2.0));
}

TEST_CASE("outcome invariants hold on random instances") {
  Substream rng(304);
  for (int trial = 0; trial < 400; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const AuctionConfig config(inst.slots, inst.draws.size(), alpha);
    const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);

    CHECK(std::isfinite(outcome.revenue));
    CHECK(outcome.revenue >= 0.0);
    CHECK(outcome.revenue <= outcome.efficiency * (1.0 + 1e-12));
    CHECK(outcome.relevance > 0.0);
    for (std::size_t r = 0; r < inst.slots; ++r) {
      CHECK(outcome.ranked[r].price >= 0.0);
      CHECK(outcome.ranked[r].price <=
            outcome.ranked[r].equilibrium_bid * (1.0 + 1e-9));
      // price_i * w_i = bid_{i+1} * w_{i+1}
      CHECK(outcome.ranked[r].price * outcome.ranked[r].weight ==
            Approx(outcome.ranked[r + 1].equilibrium_bid * outcome.ranked[r + 1].weight)
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("symmetric equilibrium is envy-free under brute force") {
  Substream rng(305);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const AuctionConfig config(inst.slots, inst.draws.size(), alpha);
    const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);
    CHECK(max_envy_violation(outcome, inst.bias) <= 1e-9);
  }
}

TEST_CASE("alpha = 1 allocation maximizes efficiency over all assignments") {
  Substream rng(306);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_instance(rng, 4, 1.0);
    const AuctionConfig config(inst.slots, inst.draws.size(), 1.0);
    const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);

    // exhaustive: every ordered choice of K bidders out of N
    std::vector<std::uint32_t> idx(inst.draws.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end());
    double best = 0.0;
    std::vector<std::uint32_t> chosen;
    const std::size_t k = inst.slots;
    const auto recurse = [&](auto&& self, std::vector<bool>& used) -> void {
      if (chosen.size() == k) {
        double eff = 0.0;
        for (std::size_t r = 0; r < k; ++r)
          eff += inst.draws[chosen[r]].ctr * inst.bias.at(r) * inst.draws[chosen[r]].value;
        best = std::max(best, eff);
        return;
      }
      for (std::size_t i = 0; i < inst.draws.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        chosen.push_back(static_cast<std::uint32_t>(i));
        self(self, used);
        chosen.pop_back();
        used[i] = false;
      }
    };
    std::vector<bool> used(inst.draws.size(), false);
    recurse(recurse, used);
    CHECK(outcome.efficiency >= best * (1.0 - 1e-12));
  }
}

TEST_CASE("scaling all values scales revenue and efficiency, not the allocation") {
  Substream rng(307);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = kAlphaSet[trial % kAlphaSet.size()];
    auto inst = random_instance(rng, 4, alpha);
    const AuctionConfig config(inst.slots, inst.draws.size(), alpha);
    const AuctionOutcome base = run_single_auction(inst.draws, config, inst.bias);

    // power-of-two scale: bit-exact covariance
    auto scaled = inst.draws;
    for (auto& d : scaled) d.value *= 4.0;
    const AuctionOutcome big = run_single_auction(scaled, config, inst.bias);
    CHECK(big.revenue == 4.0 * base.revenue);
    CHECK(big.efficiency == 4.0 * base.efficiency);
    CHECK(big.relevance == base.relevance);
    CHECK(rank_bidders(scaled, alpha) == rank_bidders(inst.draws, alpha));

    auto odd = inst.draws;
    for (auto& d : odd) d.value *= 1.7;
    const AuctionOutcome tilted = run_single_auction(odd, config, inst.bias);
    CHECK(tilted.revenue == Approx(1.7 * base.revenue).epsilon(1e-12));
    CHECK(tilted.efficiency == Approx(1.7 * base.efficiency).epsilon(1e-12));
  }
}

TEST_CASE("alpha = 0 reduces to a by-bid auction") {
  Substream rng(308);
  auto inst = random_instance(rng, 3, 0.0);
  const AuctionConfig config(inst.slots, inst.draws.size(), 0.0);
  const AuctionOutcome outcome = run_single_auction(inst.draws, config, inst.bias);
  for (std::size_t r = 0; r <= inst.slots; ++r) CHECK(outcome.ranked[r].weight == 1.0);
  for (std::size_t r = 0; r < inst.slots; ++r)
    CHECK(outcome.ranked[r].price == Approx(outcome.ranked[r + 1].equilibrium_bid));
  // allocation is by value alone
  std::vector<double> values;
  for (const auto& d : inst.draws) values.push_back(d.value);
  std::sort(values.rbegin(), values.rend());
  for (std::size_t r = 0; r <= inst.slots; ++r) CHECK(outcome.ranked[r].value == values[r]);
}

TEST_CASE("configuration errors are rejected") {
  CHECK_THROWS_AS(AuctionConfig(0, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AuctionConfig(2, 2, 1.0), std::invalid_argument);  // K < N violated
  CHECK_THROWS_AS(AuctionConfig(1, 2, std::nan("")), std::invalid_argument);
  const std::vector<AdvertiserDraw> pair{{3.0, 0.1}, {2.0, 0.1}};
  // missing K+1-th bidder
  CHECK_THROWS_AS(equilibrium_bids(pair, 1.0, PositionBias({1.0, 0.5})), std::invalid_argument);
}
