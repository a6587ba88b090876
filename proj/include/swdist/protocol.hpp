#pragma once

// Evaluation statistics over metric responses: degradation curves, split
// stability, cross-dataset consistency, refinement curves and rank
// correlation against human scores. Metrics enter as opaque handles so this
// module does not depend on any particular distance.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swdist/embed_io.hpp"

namespace swdist {

struct MetricHandle {
  std::string id;
  nlohmann::json config;  // parameter record echoed into reports
  std::function<double(const EmbeddingSet&, const EmbeddingSet&)> distance;

  double operator()(const EmbeddingSet& a, const EmbeddingSet& b) const { return distance(a, b); }
};

struct MetricResult {
  std::string metric_id;
  double value = 0.0;
  nlohmann::json config;
  std::size_t n = 0;
  std::size_t m = 0;
};

MetricResult evaluate(const MetricHandle& metric, const EmbeddingSet& a, const EmbeddingSet& b);

// ---------------------------------------------------------------------------
// Degradation sensitivity

struct Violation {
  std::size_t index = 0;
  double relative_decrease = 0.0;  // (raw[i-1] - raw[i]) / |raw[i-1]|
};

struct DegradationCurve {
  std::string dataset_id;
  std::string degradation;
  std::vector<double> severities;
  std::vector<double> raw;
  std::vector<double> normalized;  // min-max to [0, 1]; constant curves map to 0
  std::vector<Violation> violations;
};

/// Builds the normalised curve and monotonicity violations from raw values.
DegradationCurve curve_from_raw(std::string dataset_id, std::string degradation,
                                std::vector<double> severities, std::vector<double> raw);

/// raw[i] = metric(degraded[i], clean). Severities must be strictly increasing.
DegradationCurve degradation_curve(const MetricHandle& metric, const EmbeddingSet& clean,
                                   std::span<const EmbeddingSet> degraded,
                                   std::vector<double> severities, std::string dataset_id = {},
                                   std::string degradation = {});

// ---------------------------------------------------------------------------
// Finite-sample stability

struct StabilityReport {
  std::string dataset_k;
  std::string dataset_j;
  double mean = 0.0;            // finite-sample bias
  double sigma = 0.0;           // sample std, divisor R - 1
  std::optional<double> cv;     // sigma / |mean|; empty when mean == 0
  bool cv_unreliable = false;   // |mean| < 10 sigma / sqrt(R)
  std::size_t r = 0;
  std::size_t half_size = 0;
  std::vector<double> per_split;
};

/// Aggregates per-split values into bias, spread and CV.
StabilityReport summarize_splits(std::vector<double> per_split);

/// Intra-dataset: each split compares two disjoint halves of `set`.
StabilityReport finite_sample_bias(const MetricHandle& metric, const EmbeddingSet& set,
                                   std::size_t r, std::size_t half_size, std::uint64_t seed);

/// Cross-dataset: each split draws `half_size` rows from each set.
StabilityReport finite_sample_bias(const MetricHandle& metric, const EmbeddingSet& set_k,
                                   const EmbeddingSet& set_j, std::size_t r, std::size_t half_size,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cross-dataset consistency

struct SignalKey {
  std::string dataset;
  std::string degradation;
  double severity = 0.0;

  auto operator<=>(const SignalKey&) const = default;
};

struct LogRatio {
  std::string dataset_j;
  std::string dataset_k;
  std::string degradation;
  double severity = 0.0;
  double value = 0.0;  // log2(signal_j / signal_k)
};

struct InteractionVariance {
  std::string dataset_j;
  std::string dataset_k;
  double variance = 0.0;  // over (degradation, severity), divisor n - 1
};

struct ConsistencyReport {
  std::vector<LogRatio> log_ratios;
  double lambda = 0.0;
  std::vector<InteractionVariance> interaction;
  double mean_interaction = 0.0;
  std::size_t num_terms = 0;  // |T| * |S| * C(K, 2)
  std::vector<std::string> warnings;
};

inline constexpr double kSignalFloor = 1e-12;

/// Requires the complete dataset x degradation x severity grid and at least two
/// datasets. Datasets are ordered lexicographically; pairs are j < k.
ConsistencyReport consistency(const std::map<SignalKey, double>& signals);

// ---------------------------------------------------------------------------
// Refinement

struct RefinementCurve {
  std::string metric_id;
  std::vector<double> timesteps;
  std::vector<double> values;
};

RefinementCurve refinement_curve(const MetricHandle& metric, const EmbeddingSet& real_set,
                                 std::span<const std::pair<double, EmbeddingSet>> snapshots);

// ---------------------------------------------------------------------------
// Human alignment

inline constexpr std::size_t kDefaultPermutations = 10000;

struct CorrelationReport {
  double spearman = 0.0;
  double kendall = 0.0;
  double p_spearman = 1.0;
  double p_kendall = 1.0;
  std::size_t n_conditions = 0;
  std::size_t permutations = 0;
};

/// Ranks starting at 1, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);
double spearman_rho(std::span<const double> x, std::span<const double> y);
/// Tie-corrected Kendall tau-b.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Both statistics plus two-sided permutation p-values, (count + 1) / (P + 1).
/// Permutation p is keyed by (seed, p), so results ignore the worker count.
CorrelationReport rank_correlation(std::span<const double> human, std::span<const double> predicted,
                                   std::size_t permutations = kDefaultPermutations,
                                   std::uint64_t seed = 0);

std::map<std::string, double> mos_aggregate(const std::map<std::string, std::vector<int>>& ratings);

}  // namespace swdist
