#include "gpbold/ar.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gpbold {

void ArPriorSpec::validate() const {
  if (c2 <= 0.0) throw ParameterError("ar prior: c^2 must be positive");
}

Matrix ArPriorSpec::a0() const {
  validate();
  const Index k = rho0.size();
  Matrix a = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) a(i, i) = c2 / std::pow(static_cast<double>(i + 1), zeta);
  return a;
}

Matrix ArPriorSpec::a0_inverse() const {
  validate();
  const Index k = rho0.size();
  Matrix a = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) a(i, i) = std::pow(static_cast<double>(i + 1), zeta) / c2;
  return a;
}

Matrix companion_matrix(const Vector& rho) {
  const Index k = rho.size();
  if (k < 1) throw ShapeError("companion_matrix: empty coefficient vector");
  Matrix c = Matrix::Zero(k, k);
  c.row(0) = rho.transpose();
  for (Index i = 1; i < k; ++i) c(i, i - 1) = 1.0;
  return c;
}

double max_companion_modulus(const Vector& rho) {
  const Matrix c = companion_matrix(rho);
  Eigen::EigenSolver<Matrix> es(c, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stationary(const Vector& rho) {
  if (rho.size() == 0) return true;
  return max_companion_modulus(rho) < 1.0;
}

Matrix prewhiten_columns(const Matrix& x_star, const Vector& rho) {
  const Index k = rho.size();
  const Index t = x_star.rows() - k;
  if (t < 1) throw ShapeError("prewhiten_columns: needs K presample rows plus data");
  Matrix out = x_star.bottomRows(t);
  for (Index lag = 1; lag <= k; ++lag)
    out.noalias() -= rho[lag - 1] * x_star.middleRows(k - lag, t);
  return out;
}

Matrix prewhiten_rows(const Matrix& w, const Vector& rho, Index t_star) {
  if (t_star < 1 || w.rows() % t_star != 0)
    throw ShapeError("prewhiten_rows: row count must be a positive multiple of t_star");
  const Index k = rho.size();
  const Index blocks = w.rows() / t_star;
  const Index t = t_star - k;
  if (t < 1) throw ShapeError("prewhiten_rows: blocks shorter than the AR order");
  Matrix out(blocks * t, w.cols());
  for (Index b = 0; b < blocks; ++b)
    out.middleRows(b * t, t) = prewhiten_columns(w.middleRows(b * t_star, t_star), rho);
  return out;
}

Vector ar_autocovariances(const Vector& rho, Index n) {
  if (!is_stationary(rho)) throw NumericalError("ar_autocovariances: non-stationary rho");
  const Index k = rho.size();
  if (n < 1) throw ShapeError("ar_autocovariances: n must be >= 1");
  if (k == 0) {
    Vector g = Vector::Zero(n);
    g[0] = 1.0;
    return g;
  }
  // Solve for gamma_0..gamma_K: gamma_j - sum_k rho_k gamma_{|j-k|} = 1{j=0}
  Matrix a = Matrix::Zero(k + 1, k + 1);
  Vector b = Vector::Zero(k + 1);
  b[0] = 1.0;
  for (Index j = 0; j <= k; ++j) {
    a(j, j) += 1.0;
    for (Index lag = 1; lag <= k; ++lag) {
      const Index idx = std::abs(j - lag);
      a(j, idx) -= rho[lag - 1];
    }
  }
  const Vector head = a.fullPivLu().solve(b);
  Vector g(std::max(n, k + 1));
  g.head(k + 1) = head;
  for (Index j = k + 1; j < g.size(); ++j) {
    double acc = 0.0;
    for (Index lag = 1; lag <= k; ++lag) acc += rho[lag - 1] * g[j - lag];
    g[j] = acc;
  }
  return g.head(n);
}

Matrix ar_covariance(const Vector& rho, Index t) {
  const Vector g = ar_autocovariances(rho, t);
  Matrix m(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) m(i, j) = g[std::abs(i - j)];
  return m;
}

Vector simulate_ar(const Vector& rho, double sigma, Index t_star, Rng& rng) {
  if (!is_stationary(rho)) throw NumericalError("simulate_ar: non-stationary rho");
  if (t_star < 1) throw ShapeError("simulate_ar: t_star must be >= 1");
  const Index k = rho.size();
  Vector u(t_star);
  if (sigma == 0.0) {
    u.setZero();
    return u;
  }
  const Index head = std::min(k, t_star);
  if (head > 0) {
    // exact stationary start for the first K values
    const Matrix m0 = ar_covariance(rho, head);
    Eigen::LLT<Matrix> llt(m0);
    if (llt.info() != Eigen::Success)
      throw NumericalError("simulate_ar: stationary covariance not positive definite");
    u.head(head) = sigma * (Matrix(llt.matrixL()) * rng.normal_vector(head));
  }
  for (Index i = head; i < t_star; ++i) {
    double acc = sigma * rng.normal();
    for (Index lag = 1; lag <= k; ++lag) acc += rho[lag - 1] * u[i - lag];
    u[i] = acc;
  }
  return u;
}

}  // namespace gpbold
