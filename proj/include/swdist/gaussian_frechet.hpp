#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "swdist/embed_io.hpp"
#include "swdist/sliced_ot.hpp"

namespace swdist {

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t n = 0;
};

/// Sample mean and unbiased covariance (divisor n - 1), symmetrised.
GaussianSummary fit_gaussian(const EmbeddingSet& x, Backend backend = Backend::Parallel);

/// Symmetric PSD square root by eigendecomposition; negative eigenvalues are
/// clamped to zero. Throws Input if `a` is asymmetric beyond 1e-10 relative.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a);

struct FrechetOptions {
  double ridge = 0.0;  // added as ridge * I to both covariances
};

/// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
double frechet_distance_squared(const GaussianSummary& g1, const GaussianSummary& g2,
                                const FrechetOptions& options = {});

/// Frechet distance between Gaussians fitted to the two embedding sets.
double fid(const EmbeddingSet& x, const EmbeddingSet& y, const FrechetOptions& options = {});

}  // namespace swdist
