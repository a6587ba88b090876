#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swdist/embed_io.hpp"

namespace swdist {

inline constexpr std::size_t kDefaultProjections = 500;

/// Monte Carlo configuration for the sliced estimator. Directions are a pure
/// function of (num_directions, dimension, seed).
struct ProjectionPlan {
  std::size_t num_directions = kDefaultProjections;
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
};

/// L x d matrix of i.i.d. directions, uniform on the unit sphere (normalised
/// standard-normal draws).
RowMatrix sample_directions(const ProjectionPlan& plan);

/// Exact squared 1-D Wasserstein-2 distance between two empirical samples.
/// Inputs need not be sorted; sizes may differ.
double w2_squared_1d(std::span<const double> x, std::span<const double> y);

struct SwdResult {
  double value = 0.0;
  ProjectionPlan plan;
  std::optional<std::vector<double>> per_direction_values;
};

enum class Backend { Serial, Parallel };

/// Monte Carlo sliced Wasserstein-2 (squared) estimate: the mean over plan
/// directions of the 1-D distance between projected samples. Per-direction
/// values are reduced in index order, so the result does not depend on the
/// worker count.
SwdResult swd_squared(const EmbeddingSet& a, const EmbeddingSet& b, const ProjectionPlan& plan,
                      bool keep_per_direction = false, Backend backend = Backend::Parallel);

/// Inputs to the projection-count bound.
struct BoundQuery {
  std::size_t intrinsic_dim = 1;  // k
  double diameter = 2.0;          // D
  double tolerance = 0.1;         // tau
  double failure_prob = 0.05;     // delta
  double curvature_const = 1.0;   // C
};

/// Smallest L for which |estimate - true SW2^2| <= tolerance holds with
/// probability at least 1 - failure_prob on a k-dimensional support of
/// diameter D:
///
///   L = ceil( 2 D^4 / tau^2 * ( 2k ln(8 C D^2 / tau) - ln(delta / 2) ) )
///
/// Throws a Domain error when 8 C D^2 / tau <= 1.
std::size_t plan_projections(const BoundQuery& q);

struct AblationRow {
  std::size_t num_directions = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std (divisor S - 1) across seeds
  double seconds = 0.0; // mean wall time of one estimate
};

inline const std::vector<std::size_t>& default_ablation_grid() {
  static const std::vector<std::size_t> grid{10,   50,   70,    100,   500,  1000,
                                             2000, 5000, 10000, 15000, 20000};
  return grid;
}

/// Sweeps the number of directions. Seed i of the list yields plan seed
/// derive_seed({base_seed, seeds[i]}), shared across grid entries.
std::vector<AblationRow> ablate_projections(const EmbeddingSet& a, const EmbeddingSet& b,
                                            std::span<const std::size_t> grid,
                                            std::span<const std::uint64_t> seeds,
                                            std::uint64_t base_seed);

}  // namespace swdist
