#pragma once

#include "gpbold/rng.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Prior on the AR coefficients: N(rho0, A0) truncated to the stationary
/// region, A0 = diag(c^2 / k^zeta) for lag k = 1..K.
struct ArPriorSpec {
  Vector rho0;
  double c2 = 0.5;
  double zeta = 5.0;

  Matrix a0() const;
  Matrix a0_inverse() const;
  void validate() const;
};

/// K x K companion matrix: first row rho, unit subdiagonal.
Matrix companion_matrix(const Vector& rho);

/// Largest modulus among companion eigenvalues.
double max_companion_modulus(const Vector& rho);

/// True iff the AR(K) process with coefficients rho is stationary.
/// K = 0 (no AR part) counts as stationary.
bool is_stationary(const Vector& rho);

/// Column-wise lag filter Phi_C(L): row t of the output is
/// x[K+t] - sum_k rho[k] x[K+t-k]. Input must carry K presample rows on
/// top; output drops them.
Matrix prewhiten_columns(const Matrix& x_star, const Vector& rho);

/// Row-wise lag filter Phi_R(L): the same filter applied independently
/// within each t_star-row block of a stacked matrix, dropping the first K
/// rows of every block.
Matrix prewhiten_rows(const Matrix& w, const Vector& rho, Index t_star);

/// Stationary autocovariances gamma_0..gamma_{n-1} for unit innovation
/// variance, from the Yule-Walker equations.
Vector ar_autocovariances(const Vector& rho, Index n);

/// Dense unit-innovation AR covariance M_rho (Toeplitz). Test oracle.
Matrix ar_covariance(const Vector& rho, Index t);

/// Exact stationary-start AR path of length t_star with innovation sd sigma.
Vector simulate_ar(const Vector& rho, double sigma, Index t_star, Rng& rng);

}  // namespace gpbold
