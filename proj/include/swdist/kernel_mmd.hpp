#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swdist/embed_io.hpp"
#include "swdist/kernels.hpp"
#include "swdist/sliced_ot.hpp"

namespace swdist {

struct PolynomialKernel {
  int degree = 3;
  std::optional<double> gamma;  // nullopt: 1/d
  double coef = 1.0;
};

struct RbfKernel {
  double sigma = 10.0;
};

/// Mean of RBF kernels with bandwidths multiplier * median pairwise distance
/// of the pooled sample.
struct RbfMixtureKernel {
  std::vector<double> multipliers;
  std::size_t median_cap = 2000;
  std::uint64_t median_seed = 0;
};

using KernelSpec = std::variant<PolynomialKernel, RbfKernel, RbfMixtureKernel>;

inline const std::vector<double>& default_mixture_multipliers() {
  static const std::vector<double> m{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  return m;
}

inline constexpr double kCmmdSigma = 10.0;
inline constexpr std::size_t kDefaultMedianCap = 2000;

std::string describe(const KernelSpec& kernel);

struct MmdResult {
  double value = 0.0;  // may be negative
  KernelSpec kernel;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Full N x M Gram matrix (mixtures resolve their bandwidths on x and y).
RowMatrix gram(const KernelSpec& kernel, const EmbeddingSet& x, const EmbeddingSet& y);

/// Unbiased squared MMD (U-statistic, diagonal excluded from the within-sample sums).
MmdResult mmd2_unbiased(const KernelSpec& kernel, const EmbeddingSet& x, const EmbeddingSet& y,
                        Backend backend = Backend::Parallel);

/// Polynomial kernel (u.v / d + 1)^3.
MmdResult kid(const EmbeddingSet& x, const EmbeddingSet& y);

/// RBF kernel with sigma = 10, no output scaling.
MmdResult cmmd(const EmbeddingSet& x, const EmbeddingSet& y, double sigma = kCmmdSigma);

/// Mean over bandwidths multiplier * median of the per-bandwidth unbiased MMD^2.
MmdResult mmd_rbf_mixture(const EmbeddingSet& x, const EmbeddingSet& y,
                          const std::vector<double>& multipliers = default_mixture_multipliers(),
                          std::size_t median_cap = kDefaultMedianCap, std::uint64_t seed = 0);

/// Median of pairwise Euclidean distances over the pooled sample, on at most
/// `cap` uniformly subsampled points. Returns 0 for a degenerate pool.
double median_heuristic(const EmbeddingSet& x, const EmbeddingSet& y,
                        std::size_t cap = kDefaultMedianCap, std::uint64_t seed = 0);

/// Resolves a spec into the concrete pair kernels it averages over.
std::vector<kernels::PairKernel> resolve_kernels(const KernelSpec& kernel, const EmbeddingSet& x,
                                                 const EmbeddingSet& y);

}  // namespace swdist
