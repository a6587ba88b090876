#pragma once

// Hot loops behind the metric modules. Each kernel has a plain serial
// reference (`serial::`) and an OpenMP implementation (`parallel::`). The
// parallel versions partition work into fixed-size blocks that do not depend
// on the thread count and write results by block index, so any worker count
// produces bit-identical output.

#include <cstddef>
#include <span>
#include <vector>

#include "swdist/embed_io.hpp"

namespace swdist::kernels {

/// Exact squared 2-Wasserstein distance between two sorted 1-D samples.
/// Equal sizes reduce to the mean squared difference of order statistics;
/// otherwise the quantile functions are integrated over merged breakpoints.
double w2_squared_sorted(std::span<const double> x, std::span<const double> y);

/// One kernel evaluated on a pair, expressed through the dot product and
/// both squared norms so the blocked path can reuse a GEMM.
struct PairKernel {
  enum class Kind { Polynomial, Rbf };
  Kind kind = Kind::Rbf;
  int degree = 3;
  double gamma = 1.0;
  double coef = 1.0;
  double sigma = 1.0;

  static PairKernel polynomial(int degree, double gamma, double coef) {
    return {Kind::Polynomial, degree, gamma, coef, 1.0};
  }
  static PairKernel rbf(double sigma) { return {Kind::Rbf, 3, 1.0, 1.0, sigma}; }
};

/// U-statistic ingredients: off-diagonal sums within each sample and the
/// full cross sum.
struct GramSums {
  double xx_offdiag = 0.0;
  double yy_offdiag = 0.0;
  double xy = 0.0;
};

namespace serial {

/// Per-direction squared 1-D W2 between projections of `a` and `b` onto the
/// rows of `directions` (L x d).
std::vector<double> sliced_w2(MatrixView a, MatrixView b, MatrixView directions);

/// One GramSums per kernel, by direct pairwise evaluation.
std::vector<GramSums> gram_sums(MatrixView x, MatrixView y, std::span<const PairKernel> kernels);

/// Unbiased covariance (divisor n - 1) by the textbook double loop.
RowMatrix covariance(MatrixView x);

}  // namespace serial

namespace parallel {

std::vector<double> sliced_w2(MatrixView a, MatrixView b, MatrixView directions);

std::vector<GramSums> gram_sums(MatrixView x, MatrixView y, std::span<const PairKernel> kernels);

RowMatrix covariance(MatrixView x);

}  // namespace parallel

}  // namespace swdist::kernels
