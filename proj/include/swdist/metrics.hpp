#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swdist/protocol.hpp"

namespace swdist {

/// Named metric configuration resolved into a MetricHandle.
/// Known ids: swd, fid, kid, cmmd, mmd-rbf-mixture.
struct MetricConfig {
  std::string id;
  std::size_t num_directions = 500;     // swd
  std::optional<std::uint64_t> seed;    // swd; falls back to the run seed
  double sigma = 10.0;                  // cmmd
  std::vector<double> multipliers{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};  // mmd-rbf-mixture
  std::size_t median_cap = 2000;        // mmd-rbf-mixture
  double ridge = 0.0;                   // fid

  bool operator==(const MetricConfig&) const = default;
};

const std::vector<std::string>& known_metric_ids();
bool is_known_metric(const std::string& id);

/// Parameters that affect the metric's value, for provenance columns.
nlohmann::json provenance(const MetricConfig& config, std::uint64_t run_seed);

MetricHandle make_metric(const MetricConfig& config, std::uint64_t run_seed);

void to_json(nlohmann::json& j, const MetricConfig& c);
void from_json(const nlohmann::json& j, MetricConfig& c);

/// Everything a batch run needs. Serialises to the config-file schema.
struct RunConfig {
  std::vector<MetricConfig> metrics;
  std::optional<std::string> manifest;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: OpenMP default
  std::size_t repetitions = 20;
  std::optional<std::size_t> half_size;
  std::vector<std::size_t> grid;  // empty: default ablation grid
  std::size_t num_seeds = 10;
  std::size_t permutations = 10000;

  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace swdist
