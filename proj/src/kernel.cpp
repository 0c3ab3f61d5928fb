#include "gpbold/kernel.hpp"

#include <cmath>
#include <sstream>

namespace gpbold {

double matern52(double r, const KernelHyper& hyper) {
  hyper.validate();
  if (r < 0.0) throw ParameterError("matern52: distance must be >= 0");
  const double s = std::sqrt(5.0) * r / hyper.lengthscale;
  return hyper.variance * (1.0 + s + 5.0 * r * r / (hyper.lengthscale * hyper.lengthscale)) *
         std::exp(-s);
}

GpPrior build_gp_prior(const Vector& mean, const Vector& times, const KernelHyper& hyper) {
  hyper.validate();
  const Index n = times.size();
  if (mean.size() != n) throw ShapeError("build_gp_prior: mean/grid length mismatch");
  if (n < 1) throw ShapeError("build_gp_prior: empty grid");
  for (Index i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1]))
      throw ParameterError("build_gp_prior: times must be strictly increasing");

  GpPrior prior;
  prior.mean = mean;
  prior.cov.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double v = matern52(std::abs(times[i] - times[j]), hyper);
      prior.cov(i, j) = v;
      prior.cov(j, i) = v;
    }
  }

  if (hyper.variance == 0.0) {
    // degenerate prior: all draws equal the mean
    prior.chol = Matrix::Zero(n, n);
    prior.jitter_used = 0.0;
    return prior;
  }

  double jitter = hyper.jitter;
  for (;;) {
    Matrix work = prior.cov;
    work.diagonal().array() += jitter * hyper.variance;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) {
      prior.cov = work;
      prior.chol = llt.matrixL();
      prior.jitter_used = jitter;
      return prior;
    }
    if (jitter == 0.0) {
      jitter = 1e-8;
    } else {
      jitter *= 10.0;
    }
    if (jitter > 1e-2) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(prior.cov, Eigen::EigenvaluesOnly);
      std::ostringstream msg;
      msg << "build_gp_prior: Cholesky failed even at relative jitter 1e-2; minimum "
             "eigenvalue estimate "
          << es.eigenvalues().minCoeff();
      throw NumericalError(msg.str());
    }
  }
}

Vector sample_gp(const GpPrior& prior, Rng& rng) {
  return prior.mean + prior.chol * rng.normal_vector(prior.mean.size());
}

}  // namespace gpbold
