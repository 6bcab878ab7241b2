#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gspsim/errors.hpp"
#include "gspsim/experiment.hpp"
#include "gspsim/version.hpp"

namespace gspsim {

/// FNV-1a 64-bit checksum; cheap and stable, enough to verify a reproduction.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json config_to_json(const SweepConfig& config) {
  nlohmann::json j;
  j["alphas"] = config.alphas;
  j["auctions_per_alpha"] = config.auctions_per_alpha;
  j["slots"] = config.slots;
  j["bidders"] = config.bidders;
  j["seed"] = config.seed;
  j["spearman_rho"] = config.spearman_rho;
  j["value_mu"] = config.value_params.mu;
  j["value_sigma"] = config.value_params.sigma;
  j["pollution"] = {{"enabled", config.pollution.enabled},
                    {"base_a", config.pollution.base_a},
                    {"anchor_b", config.pollution.anchor_b},
                    {"slope", config.pollution.slope},
                    {"strength", config.pollution.strength}};
  j["bias"] = std::vector<double>(config.bias.multipliers().begin(), config.bias.multipliers().end());
  j["flat_tolerance"] = config.flat_tolerance;
  j["threads"] = config.threads;
  return j;
}

/// Everything needed to reproduce a run byte-for-byte: the resolved config,
/// the master seed, the tool version, and a checksum per written output.
struct RunManifest {
  std::string tool{kToolName};
  std::string version{kVersion};
  std::string started_utc;
  std::string finished_utc;
  std::uint64_t seed = 0;
  bool seed_was_random = false;
  nlohmann::json config;

  struct Output {
    std::string path;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
  };
  std::vector<Output> outputs;

  void record_output(const std::filesystem::path& path, std::string_view bytes) {
    outputs.push_back(Output{path.string(), bytes.size(), hex64(gspsim::fnv1a64(bytes))});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = tool;
    j["version"] = version;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["seed"] = seed;
    j["seed_was_random"] = seed_was_random;
    j["config"] = config;
    j["outputs"] = nlohmann::json::array();
    for (const Output& o : outputs)
      j["outputs"].push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
    return j;
  }
};

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  file << manifest.to_json().dump(2) << '\n';
  if (!file) throw IoError("write failed: " + path.string());
}

}  // namespace gspsim
