#include "swdist/gaussian_frechet.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "swdist/error.hpp"
#include "swdist/kernels.hpp"

namespace swdist {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kTraceFloor = -1e-6;

}  // namespace

GaussianSummary fit_gaussian(const EmbeddingSet& x, Backend backend) {
  if (x.rows() < 2) throw Error(ErrorKind::Arity, "fitting a Gaussian needs n >= 2 samples");
  GaussianSummary g;
  g.n = x.rows();
  g.mean = x.data().colwise().mean().transpose();
  const RowMatrix cov = backend == Backend::Serial ? kernels::serial::covariance(x.view())
                                                   : kernels::parallel::covariance(x.view());
  g.cov = 0.5 * (cov + cov.transpose());
  return g;
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Input, "sqrtm_psd needs a square matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorKind::Input, "sqrtm_psd input is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd s = v * roots.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

double frechet_distance_squared(const GaussianSummary& g1, const GaussianSummary& g2,
                                const FrechetOptions& options) {
  if (g1.mean.size() != g2.mean.size() || g1.cov.rows() != g2.cov.rows()) {
    throw Error(ErrorKind::Shape, "dimension mismatch: " + std::to_string(g1.mean.size()) +
                                      " vs " + std::to_string(g2.mean.size()));
  }
  Eigen::MatrixXd s1 = g1.cov;
  Eigen::MatrixXd s2 = g2.cov;
  if (options.ridge > 0.0) {
    s1.diagonal().array() += options.ridge;
    s2.diagonal().array() += options.ridge;
  }

  const Eigen::MatrixXd root1 = sqrtm_psd(s1);
  Eigen::MatrixXd inner = root1 * s2 * root1;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
  const double cross_trace = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  double trace_term = s1.trace() + s2.trace() - 2.0 * cross_trace;
  if (trace_term < 0.0 && trace_term >= kTraceFloor * std::max(1.0, s1.trace() + s2.trace())) {
    trace_term = 0.0;
  }
  const double mean_term = (g1.mean - g2.mean).squaredNorm();
  return std::max(0.0, mean_term + trace_term);
}

double fid(const EmbeddingSet& x, const EmbeddingSet& y, const FrechetOptions& options) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::Shape, "dimension mismatch: " + std::to_string(x.rows()) + "x" +
                                      std::to_string(x.dim()) + " vs " + std::to_string(y.rows()) +
                                      "x" + std::to_string(y.dim()));
  }
  return frechet_distance_squared(fit_gaussian(x), fit_gaussian(y), options);
}

}  // namespace swdist
