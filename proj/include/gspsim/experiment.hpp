#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gspsim/auction.hpp"
#include "gspsim/errors.hpp"
#include "gspsim/pollution.hpp"
#include "gspsim/rng.hpp"
#include "gspsim/sampling.hpp"

namespace gspsim {

enum class Metric { revenue, efficiency, relevance };

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::revenue: return "revenue";
    case Metric::efficiency: return "efficiency";
    case Metric::relevance: return "relevance";
  }
  return "revenue";
}

/// Grid lo, lo+step, ... up to hi (inclusive when hi falls on the grid).
inline std::vector<double> make_alpha_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("alpha grid: step must be positive");
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("alpha grid: need finite lo <= hi");
  const std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

struct SweepConfig {
  std::vector<double> alphas = make_alpha_grid(-2.0, 2.0, 0.1);
  std::size_t auctions_per_alpha = 234000;  // 41-point grid ~ 9.6M auctions
  std::size_t slots = 12;
  std::size_t bidders = 13;
  std::uint64_t seed = 0;
  double spearman_rho = 0.4;
  LognormalParams value_params{0.35, 0.71};
  PollutionModel pollution{};
  PositionBias bias = PositionBias::geometric(12);
  double flat_tolerance = 0.03;
  unsigned threads = 0;  // 0 = hardware concurrency; any count gives identical results

  void validate() const {
    if (alphas.empty()) throw std::invalid_argument("sweep config: alpha grid is empty");
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
      if (!(alphas[i] < alphas[i + 1]))
        throw std::invalid_argument("sweep config: alpha grid must be strictly increasing");
    if (auctions_per_alpha < 1)
      throw std::invalid_argument("sweep config: need at least one auction per alpha");
    if (slots < 1 || bidders <= slots)
      throw std::invalid_argument("sweep config: bidders must exceed slots (K < N)");
    if (bias.slots() != slots)
      throw std::invalid_argument("sweep config: bias length must equal slot count");
    if (!(std::fabs(spearman_rho) < 1.0))
      throw std::invalid_argument("sweep config: spearman correlation must satisfy |rho| < 1");
    if (!(flat_tolerance > 0.0) || !(flat_tolerance < 1.0))
      throw std::invalid_argument("sweep config: flat tolerance must lie in (0, 1)");
    pollution.validate();
  }
};

struct SweepRow {
  double alpha = 0.0;
  double revenue = 0.0;    // dollars, summed over all simulated pages
  double efficiency = 0.0; // dollars
  double relevance = 0.0;  // expected clicks
  double revenue_norm = 0.0;
  double efficiency_norm = 0.0;
  double relevance_norm = 0.0;
  std::size_t auctions = 0;
};

struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepConfig config;
  double argmax_revenue_alpha = 0.0;
  AlphaInterval revenue_flat_region{};
};

/// Divides by the series maximum, so the peak maps to exactly 1.0.
inline std::vector<double> normalize_series(std::span<const double> totals) {
  if (totals.empty()) throw std::invalid_argument("normalize_series: empty series");
  double max = 0.0;
  for (double v : totals) {
    if (!(v >= 0.0)) throw std::invalid_argument("normalize_series: values must be non-negative");
    max = std::max(max, v);
  }
  if (!(max > 0.0)) throw NumericDomainError("normalize_series: degenerate all-zero series");
  std::vector<double> out(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) out[i] = totals[i] / max;
  return out;
}

namespace detail {

inline double metric_of(const SweepRow& row, Metric m) {
  switch (m) {
    case Metric::revenue: return row.revenue;
    case Metric::efficiency: return row.efficiency;
    case Metric::relevance: return row.relevance;
  }
  return row.revenue;
}

// Fixed-order compensated (Neumaier) accumulator; makes the cross-block
// reduction insensitive to magnitude ordering while staying deterministic.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// Maximal contiguous grid interval on which the metric stays within
/// `tolerance` (relative) of its maximum; always contains the argmax.
inline AlphaInterval flat_region(std::span<const SweepRow> rows, Metric metric, double tolerance) {
  if (rows.empty()) throw std::invalid_argument("flat_region: no rows");
  if (!(tolerance > 0.0) || !(tolerance < 1.0))
    throw std::invalid_argument("flat_region: tolerance must lie in (0, 1)");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (detail::metric_of(rows[i], metric) > detail::metric_of(rows[peak], metric)) peak = i;
  const double threshold = (1.0 - tolerance) * detail::metric_of(rows[peak], metric);
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && detail::metric_of(rows[lo - 1], metric) >= threshold) --lo;
  while (hi + 1 < rows.size() && detail::metric_of(rows[hi + 1], metric) >= threshold) ++hi;
  return AlphaInterval{rows[lo].alpha, rows[hi].alpha};
}

/// Monte-Carlo sweep over the alpha grid. Auction j at every alpha uses the
/// substream keyed by (seed, j), so grids, strengths, and correlations are
/// compared on common random numbers and alpha is the only varying factor
/// within a sweep. Work is split into fixed blocks reduced in index order;
/// results are bit-identical at any thread count.
inline SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const std::size_t n_alpha = config.alphas.size();
  const std::size_t auctions = config.auctions_per_alpha;
  const CopulaConfig copula(config.spearman_rho);

  // Per-alpha samplers; identical (a, b) share one quantile table.
  std::vector<BidderSampler> samplers;
  samplers.reserve(n_alpha);
  std::vector<AuctionConfig> auction_configs;
  auction_configs.reserve(n_alpha);
  {
    std::map<std::pair<double, double>, std::shared_ptr<const BetaQuantileTable>> tables;
    for (double alpha : config.alphas) {
      BetaParams params = [&] {
        try {
          return ctr_params_for_alpha(config.pollution, alpha);
        } catch (const NumericDomainError& e) {
          throw NumericDomainError("alpha=" + std::to_string(alpha) + ": " + e.what());
        }
      }();
      auto& table = tables[{params.a, params.b}];
      if (!table) table = std::make_shared<const BetaQuantileTable>(params.a, params.b);
      samplers.emplace_back(config.value_params, params, copula, table);
      auction_configs.emplace_back(config.slots, config.bidders, alpha);
    }
  }

  constexpr std::size_t kBlock = 1024;  // fixed so the partition is thread-count independent
  const std::size_t blocks_per_alpha = (auctions + kBlock - 1) / kBlock;
  const std::size_t total_tasks = n_alpha * blocks_per_alpha;
  std::vector<PageMetrics> partial(total_tasks);

  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  double error_alpha = 0.0;

  auto worker = [&]() {
    AuctionScratch scratch;
    std::vector<AdvertiserDraw> draws(config.bidders);
    for (;;) {
      const std::size_t task = next_task.fetch_add(1, std::memory_order_relaxed);
      if (task >= total_tasks || failed.load(std::memory_order_relaxed)) return;
      const std::size_t alpha_idx = task / blocks_per_alpha;
      const std::size_t first = (task % blocks_per_alpha) * kBlock;
      const std::size_t last = std::min(auctions, first + kBlock);
      try {
        PageMetrics acc;
        for (std::size_t j = first; j < last; ++j) {
          Substream stream = substream_at(config.seed, j);
          samplers[alpha_idx].sample(std::span<AdvertiserDraw>(draws), stream);
          const PageMetrics page =
              simulate_page(draws, auction_configs[alpha_idx], config.bias, scratch);
          acc.revenue += page.revenue;
          acc.efficiency += page.efficiency;
          acc.relevance += page.relevance;
        }
        partial[task] = acc;
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) {
          error = std::current_exception();
          error_alpha = config.alphas[alpha_idx];
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  unsigned thread_count = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  if (thread_count < 1) thread_count = 1;
  thread_count = static_cast<unsigned>(
      std::min<std::size_t>(thread_count, std::max<std::size_t>(total_tasks, 1)));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const NumericDomainError& e) {
      throw NumericDomainError("alpha=" + std::to_string(error_alpha) + ": " + e.what());
    }
  }

  SweepResult result;
  result.config = config;
  result.rows.resize(n_alpha);
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    detail::CompensatedSum revenue, efficiency, relevance;
    for (std::size_t b = 0; b < blocks_per_alpha; ++b) {
      const PageMetrics& p = partial[ai * blocks_per_alpha + b];
      revenue.add(p.revenue);
      efficiency.add(p.efficiency);
      relevance.add(p.relevance);
    }
    SweepRow& row = result.rows[ai];
    row.alpha = config.alphas[ai];
    row.revenue = revenue.value();
    row.efficiency = efficiency.value();
    row.relevance = relevance.value();
    row.auctions = auctions;
  }

  std::vector<double> rev(n_alpha), eff(n_alpha), rel(n_alpha);
  for (std::size_t i = 0; i < n_alpha; ++i) {
    rev[i] = result.rows[i].revenue;
    eff[i] = result.rows[i].efficiency;
    rel[i] = result.rows[i].relevance;
  }
  const std::vector<double> rev_n = normalize_series(rev);
  const std::vector<double> eff_n = normalize_series(eff);
  const std::vector<double> rel_n = normalize_series(rel);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n_alpha; ++i) {
    result.rows[i].revenue_norm = rev_n[i];
    result.rows[i].efficiency_norm = eff_n[i];
    result.rows[i].relevance_norm = rel_n[i];
    if (rev[i] > rev[peak]) peak = i;
  }
  result.argmax_revenue_alpha = result.rows[peak].alpha;
  result.revenue_flat_region = flat_region(result.rows, Metric::revenue, config.flat_tolerance);
  return result;
}

/// One full sweep per strength, all on the same master seed so the strength is
/// the only varying factor.
inline std::vector<std::pair<double, SweepResult>> sensitivity_sweep(
    const SweepConfig& config, std::span<const double> strengths) {
  std::vector<std::pair<double, SweepResult>> out;
  out.reserve(strengths.size());
  for (double strength : strengths) {
    if (!(strength >= 0.0)) throw std::invalid_argument("sensitivity_sweep: strength must be >= 0");
    SweepConfig c = config;
    c.pollution.strength = strength;
    out.emplace_back(strength, run_sweep(c));
  }
  return out;
}

/// One full sweep per Spearman target, sharing the master seed.
inline std::vector<std::pair<double, SweepResult>> correlation_sweep(
    const SweepConfig& config, std::span<const double> spearman_rhos) {
  std::vector<std::pair<double, SweepResult>> out;
  out.reserve(spearman_rhos.size());
  for (double rho : spearman_rhos) {
    SweepConfig c = config;
    c.spearman_rho = rho;
    out.emplace_back(rho, run_sweep(c));
  }
  return out;
}

}  // namespace gspsim
