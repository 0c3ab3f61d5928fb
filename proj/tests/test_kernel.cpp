#include <doctest.h>

#include <cmath>

#include "gpbold/kernel.hpp"
#include "gpbold/rng.hpp"

using namespace gpbold;

namespace {

Vector grid(Index n) {
  Vector t(n);
  for (Index i = 0; i < n; ++i) t[i] = static_cast<double>(i);
  return t;
}

}  // namespace

TEST_CASE("matern52 at zero distance equals the signal variance") {
  KernelHyper k{4.0, 0.1, 0.0};
  CHECK(matern52(0.0, k) == doctest::Approx(0.1).epsilon(1e-15));
  KernelHyper k2{2.0, 3.7, 0.0};
  CHECK(matern52(0.0, k2) == doctest::Approx(3.7).epsilon(1e-15));
}

TEST_CASE("matern52 closed form at r = l = 4") {
  // direct scalar evaluation of omega^2 (1 + sqrt5 r/l + 5 r^2/l^2) exp(-sqrt5 r/l)
  KernelHyper k{4.0, 0.1, 0.0};
  CHECK(matern52(4.0, k) == doctest::Approx(0.08802538610331061).epsilon(1e-5));
}

TEST_CASE("matern52 decays monotonically beyond the inflection and stays positive") {
  KernelHyper k{3.0, 1.0, 0.0};
  double prev = matern52(k.lengthscale / std::sqrt(5.0), k);
  for (double r = k.lengthscale / std::sqrt(5.0) + 0.05; r < 60.0; r += 0.05) {
    const double v = matern52(r, k);
    CHECK(v > 0.0);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(matern52(1e3, k) < 1e-12);
}

TEST_CASE("matern52 rejects negative distances") {
  KernelHyper k;
  CHECK_THROWS_AS(matern52(-0.1, k), ParameterError);
  CHECK_THROWS_AS(matern52(1.0, KernelHyper{0.0, 1.0, 0.0}), ParameterError);
}

TEST_CASE("single-point prior is the jittered variance") {
  KernelHyper k{4.0, 0.1, 1e-6};
  const GpPrior prior = build_gp_prior(Vector::Zero(1), grid(1), k);
  CHECK(prior.cov(0, 0) == doctest::Approx(0.1 * (1.0 + 1e-6)).epsilon(1e-15));
}

TEST_CASE("prior covariance is bitwise symmetric and Toeplitz on an equispaced grid") {
  KernelHyper k{4.0, 0.1, 1e-6};
  const GpPrior prior = build_gp_prior(Vector::Zero(24), grid(24), k);
  for (Index i = 0; i < 24; ++i)
    for (Index j = 0; j < 24; ++j) {
      CHECK(prior.cov(i, j) == prior.cov(j, i));
      if (i > 0 && j > 0) CHECK(prior.cov(i, j) == prior.cov(i - 1, j - 1));
    }
}

TEST_CASE("Cholesky succeeds at T+K = 153 with jitter 1e-6") {
  KernelHyper k{4.0, 0.1, 1e-6};
  const GpPrior prior = build_gp_prior(Vector::Zero(153), grid(153), k);
  CHECK(prior.jitter_used == 1e-6);
  const Matrix reconstructed = prior.chol * prior.chol.transpose();
  const double rel = (reconstructed - prior.cov).cwiseAbs().maxCoeff() /
                     prior.cov.cwiseAbs().maxCoeff();
  CHECK(rel < 1e-8);
}

TEST_CASE("factorization reports the minimum eigenvalue when jitter escalation fails") {
  // a grid with a duplicated point is impossible; emulate failure via an
  // increasing grid that is not strictly increasing
  Vector t(3);
  t << 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(build_gp_prior(Vector::Zero(3), t, KernelHyper{4.0, 0.1, 0.0}),
                  ParameterError);
}

TEST_CASE("degenerate prior with zero variance returns the mean exactly") {
  KernelHyper k{4.0, 0.0, 0.0};
  Vector mean(5);
  mean << 1.0, -2.0, 0.5, 3.25, -0.125;
  const GpPrior prior = build_gp_prior(mean, grid(5), k);
  Rng rng(7);
  const Vector draw = sample_gp(prior, rng);
  CHECK((draw - mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("empirical covariance of 20000 draws matches the prior covariance") {
  const Index n = 6;
  KernelHyper k{2.0, 0.5, 1e-8};
  Vector mean(n);
  mean << 0.3, -1.0, 2.0, 0.0, 1.5, -0.7;
  const GpPrior prior = build_gp_prior(mean, grid(n), k);

  Rng rng(12345);
  const int draws = 20000;
  Matrix sample(draws, n);
  for (int d = 0; d < draws; ++d) sample.row(d) = sample_gp(prior, rng).transpose();

  const Vector m = sample.colwise().mean();
  Matrix centered = sample.rowwise() - m.transpose();
  const Matrix emp = centered.transpose() * centered / static_cast<double>(draws - 1);

  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      // standard error of a sample covariance entry
      const double se = std::sqrt((prior.cov(i, i) * prior.cov(j, j) +
                                   prior.cov(i, j) * prior.cov(i, j)) /
                                  static_cast<double>(draws));
      CHECK(std::abs(emp(i, j) - prior.cov(i, j)) < 5.0 * se);
    }
}

TEST_CASE("sample_gp is reproducible for a fixed seed") {
  KernelHyper k{4.0, 0.1, 1e-6};
  const GpPrior prior = build_gp_prior(Vector::Zero(20), grid(20), k);
  Rng a(99), b(99);
  const Vector da = sample_gp(prior, a);
  const Vector db = sample_gp(prior, b);
  CHECK((da - db).cwiseAbs().maxCoeff() == 0.0);
}
