#pragma once

#include "gpbold/rng.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Matern-5/2 kernel hyperparameters. Lengthscale is in time samples
/// (coincides with seconds at TR = 1 s). Jitter is relative to the
/// signal variance.
struct KernelHyper {
  double lengthscale = 4.0;
  double variance = 0.1;  // omega^2
  double jitter = 1e-6;

  void validate() const {
    if (lengthscale <= 0.0) throw ParameterError("kernel: lengthscale must be positive");
    if (variance < 0.0) throw ParameterError("kernel: variance must be >= 0");
    if (jitter < 0.0) throw ParameterError("kernel: jitter must be >= 0");
  }
};

/// k(r) = omega^2 (1 + sqrt(5) r / l + 5 r^2 / l^2) exp(-sqrt(5) r / l).
double matern52(double r, const KernelHyper& hyper);

/// GP prior for one predicted-BOLD column: mean over the T+K grid, dense
/// covariance and its lower Cholesky factor.
struct GpPrior {
  Vector mean;
  Matrix cov;
  Matrix chol;  // lower triangular
  double jitter_used = 0.0;
};

/// Build the prior over an equispaced, strictly increasing grid. Jitter
/// escalates by 10x up to 1e-2 (relative) on factorization failure, then
/// a NumericalError reports the minimum eigenvalue estimate.
GpPrior build_gp_prior(const Vector& mean, const Vector& times, const KernelHyper& hyper);

/// mean + chol * z with z standard normal.
Vector sample_gp(const GpPrior& prior, Rng& rng);

}  // namespace gpbold
