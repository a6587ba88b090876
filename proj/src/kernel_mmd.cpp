#include "swdist/kernel_mmd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernel_eval.hpp"
#include "swdist/error.hpp"

namespace swdist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const KernelSpec& kernel) {
  std::visit(overloaded{
                 [](const PolynomialKernel& k) {
                   if (k.degree < 1) throw Error(ErrorKind::Input, "polynomial degree must be >= 1");
                   if (k.gamma && !(*k.gamma > 0.0)) throw Error(ErrorKind::Input, "polynomial gamma must be positive");
                 },
                 [](const RbfKernel& k) {
                   if (!(k.sigma > 0.0)) throw Error(ErrorKind::Input, "rbf sigma must be positive");
                 },
                 [](const RbfMixtureKernel& k) {
                   if (k.multipliers.empty()) throw Error(ErrorKind::Input, "mixture needs at least one multiplier");
                   for (double m : k.multipliers)
                     if (!(m > 0.0)) throw Error(ErrorKind::Input, "mixture multipliers must be positive");
                 },
             },
             kernel);
}

void check_dims(const EmbeddingSet& x, const EmbeddingSet& y) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::Shape, "dimension mismatch: " + std::to_string(x.rows()) + "x" +
                                      std::to_string(x.dim()) + " vs " + std::to_string(y.rows()) +
                                      "x" + std::to_string(y.dim()));
  }
}

}  // namespace

std::string describe(const KernelSpec& kernel) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const PolynomialKernel& k) {
                   os << "polynomial(degree=" << k.degree << ", gamma=";
                   if (k.gamma) os << *k.gamma; else os << "1/d";
                   os << ", coef=" << k.coef << ")";
                 },
                 [&](const RbfKernel& k) { os << "rbf(sigma=" << k.sigma << ")"; },
                 [&](const RbfMixtureKernel& k) {
                   os << "rbf_mixture(multipliers=[";
                   for (std::size_t i = 0; i < k.multipliers.size(); ++i) os << (i ? "," : "") << k.multipliers[i];
                   os << "], base=median)";
                 },
             },
             kernel);
  return os.str();
}

double median_heuristic(const EmbeddingSet& x, const EmbeddingSet& y, std::size_t cap,
                        std::uint64_t seed) {
  check_dims(x, y);
  const std::size_t pooled = x.rows() + y.rows();
  if (pooled < 2) throw Error(ErrorKind::Arity, "median heuristic needs at least two pooled points");
  if (cap < 2) throw Error(ErrorKind::Input, "median heuristic cap must be >= 2");

  std::vector<std::size_t> idx;
  if (pooled > cap) {
    idx = sample_without_replacement(pooled, cap, {seed});
    std::sort(idx.begin(), idx.end());
  } else {
    idx.resize(pooled);
    for (std::size_t i = 0; i < pooled; ++i) idx[i] = i;
  }
  auto row = [&](std::size_t i) {
    return i < x.rows() ? x.data().row(static_cast<Eigen::Index>(i))
                        : y.data().row(static_cast<Eigen::Index>(i - x.rows()));
  };

  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) dists.push_back((row(idx[i]) - row(idx[j])).norm());

  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  const double upper = dists[mid];
  if (dists.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<kernels::PairKernel> resolve_kernels(const KernelSpec& kernel, const EmbeddingSet& x,
                                                 const EmbeddingSet& y) {
  validate(kernel);
  check_dims(x, y);
  return std::visit(
      overloaded{
          [&](const PolynomialKernel& k) {
            const double gamma = k.gamma.value_or(1.0 / static_cast<double>(x.dim()));
            return std::vector{kernels::PairKernel::polynomial(k.degree, gamma, k.coef)};
          },
          [&](const RbfKernel& k) { return std::vector{kernels::PairKernel::rbf(k.sigma)}; },
          [&](const RbfMixtureKernel& k) {
            const double median = median_heuristic(x, y, k.median_cap, k.median_seed);
            if (!(median > 0.0)) {
              throw Error(ErrorKind::Bandwidth, "median pairwise distance is 0; cannot set RBF bandwidths");
            }
            std::vector<kernels::PairKernel> out;
            for (double m : k.multipliers) out.push_back(kernels::PairKernel::rbf(m * median));
            return out;
          },
      },
      kernel);
}

RowMatrix gram(const KernelSpec& kernel, const EmbeddingSet& x, const EmbeddingSet& y) {
  const auto pair_kernels = resolve_kernels(kernel, x, y);
  RowMatrix g(x.rows(), y.rows());
  const auto& X = x.data();
  const auto& Y = y.data();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.rows(); ++j) {
      const double dot = X.row(i).dot(Y.row(j));
      const double sq = (X.row(i) - Y.row(j)).squaredNorm();
      double v = 0.0;
      for (const auto& k : pair_kernels) v += kernels::evaluate(k, dot, sq);
      g(i, j) = v / static_cast<double>(pair_kernels.size());
    }
  }
  return g;
}

MmdResult mmd2_unbiased(const KernelSpec& kernel, const EmbeddingSet& x, const EmbeddingSet& y,
                        Backend backend) {
  const std::size_t n = x.rows(), m = y.rows();
  if (n < 2 || m < 2) {
    throw Error(ErrorKind::Arity, "unbiased MMD needs at least 2 samples per side, got n=" +
                                      std::to_string(n) + ", m=" + std::to_string(m));
  }
  const auto pair_kernels = resolve_kernels(kernel, x, y);
  const auto sums = backend == Backend::Serial
                        ? kernels::serial::gram_sums(x.view(), y.view(), pair_kernels)
                        : kernels::parallel::gram_sums(x.view(), y.view(), pair_kernels);

  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  double total = 0.0;
  for (const auto& s : sums) {
    total += s.xx_offdiag / (dn * (dn - 1.0)) + s.yy_offdiag / (dm * (dm - 1.0)) -
             2.0 * s.xy / (dn * dm);
  }
  return MmdResult{total / static_cast<double>(sums.size()), kernel, n, m};
}

MmdResult kid(const EmbeddingSet& x, const EmbeddingSet& y) {
  return mmd2_unbiased(PolynomialKernel{3, std::nullopt, 1.0}, x, y);
}

MmdResult cmmd(const EmbeddingSet& x, const EmbeddingSet& y, double sigma) {
  return mmd2_unbiased(RbfKernel{sigma}, x, y);
}

MmdResult mmd_rbf_mixture(const EmbeddingSet& x, const EmbeddingSet& y,
                          const std::vector<double>& multipliers, std::size_t median_cap,
                          std::uint64_t seed) {
  return mmd2_unbiased(RbfMixtureKernel{multipliers, median_cap, seed}, x, y);
}

}  // namespace swdist
