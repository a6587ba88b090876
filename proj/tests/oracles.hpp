#pragma once

// Brute-force references used only by tests. Deliberately naive and
// independent of the library's compute paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "swdist/embed_io.hpp"

namespace oracle {

/// Minimum over all N! pairings of the mean squared pairing cost.
inline double w2_permutation_min(std::vector<double> x, const std::vector<double>& y) {
  std::vector<std::size_t> perm(y.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cost += (x[i] - y[perm[i]]) * (x[i] - y[perm[i]]);
    best = std::min(best, cost / static_cast<double>(x.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

using Kernel = std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>;

/// Unbiased MMD^2 by three explicit double loops.
inline double mmd2_double_loop(const Kernel& k, const swdist::RowMatrix& x, const swdist::RowMatrix& y) {
  const auto n = x.rows(), m = y.rows();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) sxx += k(x.row(i), x.row(j));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (i != j) syy += k(y.row(i), y.row(j));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sxy += k(x.row(i), y.row(j));
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return sxx / (dn * (dn - 1)) + syy / (dm * (dm - 1)) - 2.0 * sxy / (dn * dm);
}

inline Kernel rbf(double sigma) {
  return [sigma](const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
    return std::exp(-(u - v).squaredNorm() / (2 * sigma * sigma));
  };
}

inline Kernel polynomial(int degree, double gamma, double coef) {
  return [=](const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
    return std::pow(gamma * u.dot(v) + coef, degree);
  };
}

inline double median_pairwise(const swdist::RowMatrix& pooled) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < pooled.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pooled.rows(); ++j) d.push_back((pooled.row(i) - pooled.row(j)).norm());
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

inline swdist::RowMatrix covariance_double_loop(const swdist::RowMatrix& x) {
  const auto n = x.rows(), d = x.cols();
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) mean += x.row(i);
  mean /= static_cast<double>(n);
  swdist::RowMatrix c = swdist::RowMatrix::Zero(d, d);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < d; ++q)
      for (Eigen::Index i = 0; i < n; ++i) c(p, q) += (x(i, p) - mean(p)) * (x(i, q) - mean(q));
  return c / static_cast<double>(n - 1);
}

inline swdist::RowMatrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0,
                                  double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  swdist::RowMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * normal(rng) + shift;
  return m;
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

}  // namespace oracle
