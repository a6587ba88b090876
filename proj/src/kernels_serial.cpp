#include <algorithm>
#include <cmath>

#include "kernel_eval.hpp"
#include "swdist/kernels.hpp"

namespace swdist::kernels {

double w2_squared_sorted(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n == m) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = x[i] - y[i];
      total += diff * diff;
    }
    return total / static_cast<double>(n);
  }
  // Quantile levels i/n and j/m scaled by n*m so breakpoints compare exactly.
  const std::uint64_t nn = n, mm = m;
  std::uint64_t prev = 0;
  std::size_t i = 0, j = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next_x = (i + 1) * mm;
    const std::uint64_t next_y = (j + 1) * nn;
    const std::uint64_t next = std::min(next_x, next_y);
    const double diff = x[i] - y[j];
    total += static_cast<double>(next - prev) * diff * diff;
    prev = next;
    if (next_x == next) ++i;
    if (next_y == next) ++j;
  }
  return total / (static_cast<double>(nn) * static_cast<double>(mm));
}

namespace serial {

std::vector<double> sliced_w2(MatrixView a, MatrixView b, MatrixView directions) {
  const std::size_t d = directions.cols;
  std::vector<double> out(directions.rows);
  std::vector<double> pa(a.rows), pb(b.rows);
  for (std::size_t l = 0; l < directions.rows; ++l) {
    const auto theta = directions.row(l);
    for (std::size_t i = 0; i < a.rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a(i, k) * theta[k];
      pa[i] = s;
    }
    for (std::size_t i = 0; i < b.rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += b(i, k) * theta[k];
      pb[i] = s;
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    out[l] = w2_squared_sorted(pa, pb);
  }
  return out;
}

std::vector<GramSums> gram_sums(MatrixView x, MatrixView y, std::span<const PairKernel> kernels) {
  std::vector<GramSums> sums(kernels.size());
  auto pair_stats = [](std::span<const double> u, std::span<const double> v) {
    double dot = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      dot += u[k] * v[k];
      const double diff = u[k] - v[k];
      sq += diff * diff;
    }
    return std::pair{dot, sq};
  };
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      if (i == j) continue;
      const auto [dot, sq] = pair_stats(x.row(i), x.row(j));
      for (std::size_t k = 0; k < kernels.size(); ++k) sums[k].xx_offdiag += evaluate(kernels[k], dot, sq);
    }
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      if (i == j) continue;
      const auto [dot, sq] = pair_stats(y.row(i), y.row(j));
      for (std::size_t k = 0; k < kernels.size(); ++k) sums[k].yy_offdiag += evaluate(kernels[k], dot, sq);
    }
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      const auto [dot, sq] = pair_stats(x.row(i), y.row(j));
      for (std::size_t k = 0; k < kernels.size(); ++k) sums[k].xy += evaluate(kernels[k], dot, sq);
    }
  }
  return sums;
}

RowMatrix covariance(MatrixView x) {
  const std::size_t n = x.rows, d = x.cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) mean[k] += x(i, k);
  for (double& v : mean) v /= static_cast<double>(n);

  RowMatrix cov = RowMatrix::Zero(d, d);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (x(i, p) - mean[p]) * (x(i, q) - mean[q]);
      cov(p, q) = cov(q, p) = s / static_cast<double>(n - 1);
    }
  }
  return cov;
}

}  // namespace serial
}  // namespace swdist::kernels
