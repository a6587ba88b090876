#include "swdist/sliced_ot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "swdist/error.hpp"
#include "swdist/kernels.hpp"
#include "swdist/random.hpp"

namespace swdist {

namespace {

// Directions drawn row by row from one engine; chunked draws concatenate to
// the same sequence as a single draw.
class DirectionStream {
 public:
  DirectionStream(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), engine_(seed) {}

  void fill(RowMatrix& dirs, std::size_t count) {
    dirs.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dimension_));
    for (Eigen::Index l = 0; l < dirs.rows(); ++l) {
      double norm = 0.0;
      do {
        for (Eigen::Index k = 0; k < dirs.cols(); ++k) dirs(l, k) = normal_(engine_);
        norm = dirs.row(l).norm();
      } while (norm == 0.0);
      dirs.row(l) /= norm;
    }
  }

 private:
  std::size_t dimension_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

void check_plan(const ProjectionPlan& plan) {
  if (plan.dimension == 0) throw Error(ErrorKind::Dimension, "projection dimension must be >= 1");
  if (plan.num_directions == 0) throw Error(ErrorKind::Input, "number of directions must be >= 1");
}

constexpr std::size_t kDirectionChunk = 4096;

}  // namespace

RowMatrix sample_directions(const ProjectionPlan& plan) {
  check_plan(plan);
  RowMatrix dirs;
  DirectionStream(plan.dimension, plan.seed).fill(dirs, plan.num_directions);
  return dirs;
}

double w2_squared_1d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::Arity, "w2_squared_1d needs nonempty inputs");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
    throw Error(ErrorKind::Data, "w2_squared_1d inputs must be finite");
  }
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  return kernels::w2_squared_sorted(xs, ys);
}

SwdResult swd_squared(const EmbeddingSet& a, const EmbeddingSet& b, const ProjectionPlan& plan,
                      bool keep_per_direction, Backend backend) {
  if (a.dim() != b.dim() || a.dim() != plan.dimension) {
    throw Error(ErrorKind::Shape, "dimension mismatch: a is " + std::to_string(a.rows()) + "x" +
                                      std::to_string(a.dim()) + ", b is " +
                                      std::to_string(b.rows()) + "x" + std::to_string(b.dim()) +
                                      ", plan d=" + std::to_string(plan.dimension));
  }
  check_plan(plan);
  // Bounded memory for large L: directions are generated and consumed in chunks.
  DirectionStream stream(plan.dimension, plan.seed);
  RowMatrix dirs;
  std::vector<double> values;
  values.reserve(plan.num_directions);
  for (std::size_t done = 0; done < plan.num_directions; done += kDirectionChunk) {
    stream.fill(dirs, std::min(kDirectionChunk, plan.num_directions - done));
    const MatrixView dview{dirs.data(), static_cast<std::size_t>(dirs.rows()),
                           static_cast<std::size_t>(dirs.cols())};
    const std::vector<double> part = backend == Backend::Serial
                                         ? kernels::serial::sliced_w2(a.view(), b.view(), dview)
                                         : kernels::parallel::sliced_w2(a.view(), b.view(), dview);
    values.insert(values.end(), part.begin(), part.end());
  }

  double total = 0.0;
  for (double v : values) total += v;

  SwdResult result;
  result.value = total / static_cast<double>(values.size());
  result.plan = plan;
  if (keep_per_direction) result.per_direction_values = std::move(values);
  return result;
}

std::size_t plan_projections(const BoundQuery& q) {
  if (q.intrinsic_dim < 1) throw Error(ErrorKind::Domain, "intrinsic dimension k must be >= 1");
  if (!(q.diameter > 0.0)) throw Error(ErrorKind::Domain, "diameter D must be positive");
  if (!(q.tolerance > 0.0)) throw Error(ErrorKind::Domain, "tolerance tau must be positive");
  if (!(q.failure_prob > 0.0 && q.failure_prob < 1.0)) {
    throw Error(ErrorKind::Domain, "failure probability delta must lie in (0, 1)");
  }
  if (!(q.curvature_const > 0.0)) throw Error(ErrorKind::Domain, "curvature constant C must be positive");

  const double d2 = q.diameter * q.diameter;
  const double log_arg = 8.0 * q.curvature_const * d2 / q.tolerance;
  if (!(log_arg > 1.0)) {
    throw Error(ErrorKind::Domain,
                "tolerance tau = " + std::to_string(q.tolerance) +
                    " is too large relative to C*D^2 = " + std::to_string(q.curvature_const * d2) +
                    " (need 8*C*D^2/tau > 1)");
  }
  const double k = static_cast<double>(q.intrinsic_dim);
  const double interior = 2.0 * k * std::log(log_arg) - std::log(q.failure_prob / 2.0);
  const double bound = 2.0 * d2 * d2 / (q.tolerance * q.tolerance) * interior;
  return static_cast<std::size_t>(std::ceil(bound));
}

std::vector<AblationRow> ablate_projections(const EmbeddingSet& a, const EmbeddingSet& b,
                                            std::span<const std::size_t> grid,
                                            std::span<const std::uint64_t> seeds,
                                            std::uint64_t base_seed) {
  if (grid.empty()) throw Error(ErrorKind::Input, "ablation grid must be nonempty");
  if (seeds.empty()) throw Error(ErrorKind::Input, "ablation needs at least one seed");

  std::vector<AblationRow> rows;
  rows.reserve(grid.size());
  for (std::size_t num : grid) {
    std::vector<double> values;
    values.reserve(seeds.size());
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t s : seeds) {
      ProjectionPlan plan{num, a.dim(), derive_seed({base_seed, s})};
      values.push_back(swd_squared(a, b, plan).value);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    AblationRow row;
    row.num_directions = num;
    row.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    row.seconds = elapsed.count() / static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swdist
