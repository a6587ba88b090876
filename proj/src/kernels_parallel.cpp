#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "kernel_eval.hpp"
#include "swdist/kernels.hpp"

namespace swdist::kernels::parallel {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;

constexpr std::size_t kDirectionBlock = 32;
constexpr std::size_t kRowBlock = 256;
constexpr std::size_t kCovColumnBlock = 64;
constexpr std::size_t kCovRowChunk = 4096;

ConstRowMap as_map(MatrixView v) {
  return ConstRowMap(v.data, static_cast<Eigen::Index>(v.rows), static_cast<Eigen::Index>(v.cols));
}

std::size_t block_count(std::size_t n, std::size_t block) { return (n + block - 1) / block; }

}  // namespace

std::vector<double> sliced_w2(MatrixView a, MatrixView b, MatrixView directions) {
  const auto A = as_map(a);
  const auto B = as_map(b);
  const auto Theta = as_map(directions);
  const std::size_t total = directions.rows;
  const auto blocks = static_cast<std::int64_t>(block_count(total, kDirectionBlock));
  std::vector<double> out(total);

#pragma omp parallel
  {
    Eigen::MatrixXd pa, pb;  // column-major: one projection per column
    std::vector<double> sa(a.rows), sb(b.rows);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
      const auto first = static_cast<Eigen::Index>(blk * kDirectionBlock);
      const auto count = static_cast<Eigen::Index>(
          std::min<std::size_t>(kDirectionBlock, total - static_cast<std::size_t>(first)));
      const auto theta = Theta.middleRows(first, count);
      pa.noalias() = A * theta.transpose();
      pb.noalias() = B * theta.transpose();
      for (Eigen::Index c = 0; c < count; ++c) {
        std::copy_n(pa.col(c).data(), a.rows, sa.begin());
        std::copy_n(pb.col(c).data(), b.rows, sb.begin());
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        out[static_cast<std::size_t>(first + c)] = w2_squared_sorted(sa, sb);
      }
    }
  }
  return out;
}

std::vector<GramSums> gram_sums(MatrixView x, MatrixView y, std::span<const PairKernel> kernels) {
  const std::size_t nk = kernels.size();
  const bool translation_invariant = std::all_of(
      kernels.begin(), kernels.end(), [](const PairKernel& k) { return k.kind == PairKernel::Kind::Rbf; });

  // RBF only depends on distances, so shift by the pooled mean to keep the
  // norm expansion ||u||^2 + ||v||^2 - 2 u.v well conditioned.
  RowMatrix X = as_map(x);
  RowMatrix Y = as_map(y);
  if (translation_invariant) {
    const Eigen::RowVectorXd pooled =
        (X.colwise().sum() + Y.colwise().sum()) / static_cast<double>(x.rows + y.rows);
    X.rowwise() -= pooled;
    Y.rowwise() -= pooled;
  }
  const Eigen::VectorXd xnorm = X.rowwise().squaredNorm();
  const Eigen::VectorXd ynorm = Y.rowwise().squaredNorm();

  enum class Part { XX, YY, XY };
  struct Task {
    Part part;
    std::size_t bi, bj;
  };
  std::vector<Task> tasks;
  const std::size_t nbx = block_count(x.rows, kRowBlock);
  const std::size_t nby = block_count(y.rows, kRowBlock);
  for (std::size_t i = 0; i < nbx; ++i)
    for (std::size_t j = i; j < nbx; ++j) tasks.push_back({Part::XX, i, j});
  for (std::size_t i = 0; i < nby; ++i)
    for (std::size_t j = i; j < nby; ++j) tasks.push_back({Part::YY, i, j});
  for (std::size_t i = 0; i < nbx; ++i)
    for (std::size_t j = 0; j < nby; ++j) tasks.push_back({Part::XY, i, j});

  std::vector<double> partial(tasks.size() * nk, 0.0);
  const auto ntasks = static_cast<std::int64_t>(tasks.size());

#pragma omp parallel
  {
    Eigen::MatrixXd dots;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < ntasks; ++t) {
      const Task& task = tasks[static_cast<std::size_t>(t)];
      const RowMatrix& L = task.part == Part::YY ? Y : X;
      const RowMatrix& R = task.part == Part::XX ? X : Y;
      const Eigen::VectorXd& ln = task.part == Part::YY ? ynorm : xnorm;
      const Eigen::VectorXd& rn = task.part == Part::XX ? xnorm : ynorm;

      const auto r0 = static_cast<Eigen::Index>(task.bi * kRowBlock);
      const auto c0 = static_cast<Eigen::Index>(task.bj * kRowBlock);
      const auto rows = std::min<Eigen::Index>(kRowBlock, L.rows() - r0);
      const auto cols = std::min<Eigen::Index>(kRowBlock, R.rows() - c0);
      dots.noalias() = L.middleRows(r0, rows) * R.middleRows(c0, cols).transpose();

      const bool diagonal_block = task.part != Part::XY && task.bi == task.bj;
      // off-diagonal blocks of a symmetric sum appear twice
      const double weight = (task.part != Part::XY && !diagonal_block) ? 2.0 : 1.0;
      double* acc = &partial[static_cast<std::size_t>(t) * nk];
      for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
          if (diagonal_block && i == j) continue;
          const double dot = dots(i, j);
          const double sq = std::max(0.0, ln(r0 + i) + rn(c0 + j) - 2.0 * dot);
          for (std::size_t k = 0; k < nk; ++k) acc[k] += weight * evaluate(kernels[k], dot, sq);
        }
      }
    }
  }

  std::vector<GramSums> sums(nk);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t k = 0; k < nk; ++k) {
      const double v = partial[t * nk + k];
      switch (tasks[t].part) {
        case Part::XX: sums[k].xx_offdiag += v; break;
        case Part::YY: sums[k].yy_offdiag += v; break;
        case Part::XY: sums[k].xy += v; break;
      }
    }
  }
  return sums;
}

RowMatrix covariance(MatrixView x) {
  const auto X = as_map(x);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const auto d = static_cast<Eigen::Index>(x.cols);
  const auto n = static_cast<Eigen::Index>(x.rows);
  Eigen::MatrixXd cov(d, d);
  const auto col_blocks = static_cast<std::int64_t>(block_count(x.cols, kCovColumnBlock));

#pragma omp parallel
  {
    Eigen::MatrixXd chunk;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t cb = 0; cb < col_blocks; ++cb) {
      const auto c0 = static_cast<Eigen::Index>(cb * kCovColumnBlock);
      const auto cols = std::min<Eigen::Index>(kCovColumnBlock, d - c0);
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, cols);
      for (Eigen::Index r0 = 0; r0 < n; r0 += kCovRowChunk) {
        const auto rows = std::min<Eigen::Index>(kCovRowChunk, n - r0);
        chunk = X.middleRows(r0, rows).rowwise() - mean;
        acc.noalias() += chunk.transpose() * chunk.middleCols(c0, cols);
      }
      cov.middleCols(c0, cols) = acc / static_cast<double>(n - 1);
    }
  }
  RowMatrix sym = 0.5 * (cov + cov.transpose());
  return sym;
}

}  // namespace swdist::kernels::parallel
