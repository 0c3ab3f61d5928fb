#pragma once

#include <cmath>

#include "gpbold/rng.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

struct EssResult {
  int evals = 0;
  double loglik = 0.0;
};

/// One elliptical slice sampling step for a latent vector with Gaussian
/// prior N(prior_mean, K). nu must be a fresh zero-mean prior draw
/// (chol * z). Proposals move on the ellipse through the centered state
/// and nu; the angle bracket shrinks toward 0 until the log-likelihood
/// exceeds the slice level. Accepted state is written back into current.
template <typename LogLik>
EssResult ess_step(Vector& current, const Vector& prior_mean, const Vector& nu, LogLik&& loglik,
                   Rng& rng) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double ll0 = loglik(current);

  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  const double level = ll0 + std::log(u);

  const Vector centered = current - prior_mean;
  double theta = rng.uniform(0.0, two_pi);
  double lo = theta - two_pi;
  double hi = theta;

  EssResult res;
  res.evals = 1;
  for (;;) {
    const Vector proposal =
        centered * std::cos(theta) + nu * std::sin(theta) + prior_mean;
    const double ll = loglik(proposal);
    ++res.evals;
    if (ll > level) {
      current = proposal;
      res.loglik = ll;
      return res;
    }
    if (theta < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (hi - lo < 1e-14)
      throw NumericalError("ess_step: angle bracket collapsed (degenerate likelihood)");
    theta = rng.uniform(lo, hi);
  }
}

}  // namespace gpbold
