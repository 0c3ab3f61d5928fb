#include "gpbold/sampler.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "gpbold/ar.hpp"
#include "gpbold/stats.hpp"

namespace gpbold {

namespace {

Matrix kron_identity2(const Matrix& p) {
  // kron(P, I2): each stimulus precision applies to both basis columns
  const Index m = p.rows();
  Matrix out = Matrix::Zero(2 * m, 2 * m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      out(2 * i, 2 * j) = p(i, j);
      out(2 * i + 1, 2 * j + 1) = p(i, j);
    }
  return out;
}

}  // namespace

ParcelModel::ParcelModel(ParcelData data, Paradigm paradigm, ModelSpec spec, BoldModel kind)
    : data_(std::move(data)), paradigm_(std::move(paradigm)), spec_(std::move(spec)), kind_(kind) {
  data_.validate();
  paradigm_.validate();
  spec_.validate();

  if (data_.presample != spec_.ar_order)
    throw ShapeError("parcel presample rows (" + std::to_string(data_.presample) +
                     ") must equal the AR order (" + std::to_string(spec_.ar_order) + ")");
  if (paradigm_.n_points() != data_.t_star())
    throw ShapeError("paradigm grid and data rows disagree");

  n_stimuli_ = paradigm_.n_stimuli();
  if (spec_.mean_override) {
    mean_fn_ = *spec_.mean_override;
    if (mean_fn_.rows() != data_.t_star() || mean_fn_.cols() != n_stimuli_)
      throw ShapeError("spec: mean_override shape must be (T+K) x M");
  } else {
    mean_fn_ = build_mean_function(paradigm_, spec_.hrf, spec_.standardize_mean).values;
  }

  std::vector<KernelHyper> kernels = spec_.kernel;
  if (kernels.size() == 1 && n_stimuli_ > 1) kernels.assign(n_stimuli_, kernels[0]);
  if (static_cast<Index>(kernels.size()) != n_stimuli_)
    throw ParameterError("spec: kernel entries must match the stimulus count");

  const Vector times = paradigm_.time_grid();

  switch (kind_) {
    case BoldModel::gp: {
      n_bold_ = n_stimuli_;
      f0_ = mean_fn_;
      for (Index m = 0; m < n_stimuli_; ++m)
        f_priors_.push_back(build_gp_prior(mean_fn_.col(m), times, kernels[m]));
      break;
    }
    case BoldModel::fixed: {
      n_bold_ = n_stimuli_;
      f0_ = mean_fn_;
      fixed_design_ = transform(mean_fn_, f0_).transformed;
      break;
    }
    case BoldModel::fixed_deriv: {
      n_bold_ = 2 * n_stimuli_;
      if (data_.t_star() < 2) throw ShapeError("fixed-deriv: needs at least two time points");
      fixed_design_.resize(data_.t_star(), n_bold_);
      for (Index m = 0; m < n_stimuli_; ++m) {
        const Vector col = mean_fn_.col(m);
        Vector deriv = Vector::Zero(col.size());
        for (Index i = 1; i < col.size(); ++i) deriv[i] = (col[i] - col[i - 1]) / paradigm_.tr;
        try {
          fixed_design_.col(2 * m) = standardized(col);
          fixed_design_.col(2 * m + 1) = standardized(deriv);
        } catch (const NumericalError&) {
          throw ParameterError("fixed-deriv: basis column for stimulus " + std::to_string(m) +
                               " is constant (collinear design)");
        }
      }
      break;
    }
    case BoldModel::fir: {
      n_bold_ = n_stimuli_;
      fir_taps_ = spec_.fir.filter_taps.value_or(sample_hrf(spec_.hrf, paradigm_.tr).size());
      if (fir_taps_ > data_.t())
        throw ParameterError("fir: filter length exceeds the estimation sample");
      if (fir_taps_ < 3) throw ParameterError("fir: need at least 3 taps to clamp endpoints");

      x_fir_.resize(data_.t_star(), fir_taps_ * n_stimuli_);
      for (Index m = 0; m < n_stimuli_; ++m)
        for (Index k = 0; k < fir_taps_; ++k)
          for (Index i = 0; i < data_.t_star(); ++i)
            x_fir_(i, m * fir_taps_ + k) =
                paradigm_.indicator_at(m, paradigm_.first_index() + static_cast<int>(i - k));

      h0_.resize(fir_taps_ * n_stimuli_);
      for (Index m = 0; m < n_stimuli_; ++m)
        for (Index k = 0; k < fir_taps_; ++k)
          h0_[m * fir_taps_ + k] = double_gamma(k * paradigm_.tr, spec_.hrf);

      f0_.resize(data_.t_star(), n_stimuli_);
      for (Index m = 0; m < n_stimuli_; ++m)
        f0_.col(m) = x_fir_.middleCols(m * fir_taps_, fir_taps_) * h0_.segment(m * fir_taps_, fir_taps_);

      // conditional prior for interior taps given clamped endpoints
      Vector lags(fir_taps_);
      for (Index k = 0; k < fir_taps_; ++k) lags[k] = static_cast<double>(k);
      const GpPrior full = build_gp_prior(Vector::Zero(fir_taps_), lags, spec_.fir.kernel);
      for (Index k = 1; k + 1 < fir_taps_; ++k) fir_interior_.push_back(k);
      const Index ni = static_cast<Index>(fir_interior_.size());
      Matrix k_ii(ni, ni), k_ie(ni, 2), k_ee(2, 2);
      const Index e0 = 0, e1 = fir_taps_ - 1;
      k_ee << full.cov(e0, e0), full.cov(e0, e1), full.cov(e1, e0), full.cov(e1, e1);
      for (Index a = 0; a < ni; ++a) {
        k_ie(a, 0) = full.cov(fir_interior_[a], e0);
        k_ie(a, 1) = full.cov(fir_interior_[a], e1);
        for (Index b = 0; b < ni; ++b) k_ii(a, b) = full.cov(fir_interior_[a], fir_interior_[b]);
      }
      Matrix cond = k_ii - k_ie * k_ee.llt().solve(k_ie.transpose());
      cond = 0.5 * (cond + cond.transpose());
      Eigen::LLT<Matrix> llt(cond);
      if (llt.info() != Eigen::Success) {
        cond.diagonal().array() += 1e-10 * spec_.fir.kernel.variance;
        llt.compute(cond);
        if (llt.info() != Eigen::Success)
          throw NumericalError("fir: conditional prior covariance not positive definite");
      }
      fir_interior_chol_ = llt.matrixL();
      break;
    }
  }

  // priors for Q = [B; Gamma]
  const Index p = data_.n_nuisance();
  const Index j = data_.n_voxels();
  q0_ = Matrix::Zero(n_bold_ + p, j);
  if (spec_.b0_matrix) {
    if (spec_.b0_matrix->rows() != n_bold_ || spec_.b0_matrix->cols() != j)
      throw ShapeError("spec: B0 shape mismatch");
    q0_.topRows(n_bold_) = *spec_.b0_matrix;
  } else {
    q0_.topRows(n_bold_).setConstant(spec_.b0);
  }
  if (spec_.gamma0_matrix) {
    if (spec_.gamma0_matrix->rows() != p || spec_.gamma0_matrix->cols() != j)
      throw ShapeError("spec: Gamma0 shape mismatch");
    q0_.bottomRows(p) = *spec_.gamma0_matrix;
  } else {
    q0_.bottomRows(p).setConstant(spec_.gamma0);
    if (spec_.empirical_intercept_prior && p > 0)
      q0_.row(n_bold_) = data_.y_star.colwise().mean();
  }

  Matrix p_mat = spec_.p_matrix.value_or(Matrix::Identity(n_stimuli_, n_stimuli_));
  if (p_mat.rows() != n_stimuli_) throw ShapeError("spec: P must be M x M");
  if (kind_ == BoldModel::fixed_deriv) p_mat = kron_identity2(p_mat);
  pq_ = Matrix::Zero(n_bold_ + p, n_bold_ + p);
  pq_.topLeftCorner(n_bold_, n_bold_) = spec_.kappa * p_mat;
  pq_.bottomRightCorner(p, p) = spec_.tau * Matrix::Identity(p, p);

  c0_ = Vector::Constant(j, spec_.c0);
  d0_ = Vector::Constant(j, spec_.d0);

  if (spec_.ar_order > 0) {
    a0_inv_ = spec_.ar_prior.a0_inverse();
    a0_inv_rho0_ = a0_inv_ * spec_.ar_prior.rho0;
  }
}

Matrix ParcelModel::raw_bold(const ChainState& state) const {
  if (kind_ == BoldModel::fir) {
    Matrix pred(data_.t_star(), n_stimuli_);
    for (Index m = 0; m < n_stimuli_; ++m)
      pred.col(m) =
          x_fir_.middleCols(m * fir_taps_, fir_taps_) * state.h.segment(m * fir_taps_, fir_taps_);
    return pred;
  }
  return state.f;
}

Matrix ParcelModel::bold_design(const ChainState& state) const {
  switch (kind_) {
    case BoldModel::gp:
      return transform(state.f, f0_).transformed;
    case BoldModel::fixed:
    case BoldModel::fixed_deriv:
      return fixed_design_;
    case BoldModel::fir:
      return transform(raw_bold(state), f0_).transformed;
  }
  throw Error("unreachable");
}

Matrix ParcelModel::design_matrix(const ChainState& state) const {
  Matrix x(data_.t_star(), n_bold_ + data_.n_nuisance());
  x.leftCols(n_bold_) = bold_design(state);
  x.rightCols(data_.n_nuisance()) = data_.z_star;
  return x;
}

Matrix ParcelModel::stack_q(const ChainState& state) const {
  Matrix q(n_bold_ + data_.n_nuisance(), data_.n_voxels());
  q.topRows(n_bold_) = state.b;
  q.bottomRows(data_.n_nuisance()) = state.gamma;
  return q;
}

Vector ParcelModel::sample_rho(const ChainState& state, Rng& rng) const {
  const Index k = spec_.ar_order;
  if (k == 0) return Vector(0);
  const Index t = data_.t();
  const Index j = data_.n_voxels();

  const Matrix resid = data_.y_star - design_matrix(state) * stack_q(state);

  Matrix prec = a0_inv_;
  Vector lin = a0_inv_rho0_;
  Matrix d(t, k);
  for (Index v = 0; v < j; ++v) {
    const double w = 1.0 / state.sigma2[v];
    for (Index lag = 1; lag <= k; ++lag) d.col(lag - 1) = resid.col(v).segment(k - lag, t);
    const Vector u = resid.col(v).tail(t);
    prec.noalias() += w * d.transpose() * d;
    lin.noalias() += w * d.transpose() * u;
  }

  Eigen::LLT<Matrix> llt(prec);
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_rho: posterior precision not positive definite");
  const Vector mean = llt.solve(lin);
  const Matrix l = llt.matrixL();

  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Vector rho =
        mean + l.transpose().triangularView<Eigen::Upper>().solve(rng.normal_vector(k));
    if (is_stationary(rho)) return rho;
  }
  throw NumericalError("sample_rho: 10000 consecutive draws outside the stationary region");
}

Vector ParcelModel::sample_sigma2(const ChainState& state, Rng& rng) const {
  const Index t = data_.t();
  const Index j = data_.n_voxels();
  const Matrix x = design_matrix(state);
  const Matrix xt = prewhiten_columns(x, state.rho);
  const Matrix yt = prewhiten_columns(data_.y_star, state.rho);
  const Matrix resid = yt - xt * stack_q(state);

  Vector sigma2(j);
  for (Index v = 0; v < j; ++v) {
    const double c_n = c0_[v] + 0.5 * static_cast<double>(t);
    const double d_v = d0_[v] + 0.5 * resid.col(v).squaredNorm();
    if (d_v <= 0.0)
      throw NumericalError("sample_sigma2: zero residual with d0 = 0 gives an improper "
                           "conditional (voxel " + std::to_string(v) + ")");
    sigma2[v] = d_v / rng.gamma(c_n, 1.0);
  }
  return sigma2;
}

std::pair<Matrix, Matrix> ParcelModel::sample_coefficients(const ChainState& state,
                                                           Rng& rng) const {
  const Index j = data_.n_voxels();
  const Index q_dim = n_bold_ + data_.n_nuisance();
  const Matrix x = design_matrix(state);
  const Matrix xt = prewhiten_columns(x, state.rho);
  const Matrix yt = prewhiten_columns(data_.y_star, state.rho);

  Matrix a = pq_;
  a.noalias() += xt.transpose() * xt;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "sample_coefficients: P_Q + X'X is singular; consider a larger kappa or tau");
  const Matrix qbar = llt.solve(xt.transpose() * yt + pq_ * q0_);

  Matrix q(q_dim, j);
  const Matrix l = llt.matrixL();
  for (Index v = 0; v < j; ++v) {
    const Vector z = rng.normal_vector(q_dim);
    q.col(v) = qbar.col(v) +
               std::sqrt(state.sigma2[v]) *
                   l.transpose().triangularView<Eigen::Upper>().solve(z);
  }
  return {q.topRows(n_bold_), q.bottomRows(data_.n_nuisance())};
}

double ParcelModel::residual_loglik(const Matrix& bold, const ChainState& state,
                                    const Matrix& y_minus_z_gamma) const {
  const Matrix resid = prewhiten_columns(y_minus_z_gamma - bold * state.b, state.rho);
  double ll = 0.0;
  for (Index v = 0; v < data_.n_voxels(); ++v)
    ll -= 0.5 * resid.col(v).squaredNorm() / state.sigma2[v];
  return ll;
}

double ParcelModel::log_likelihood(const ChainState& state) const {
  const Matrix y_minus_z_gamma = data_.y_star - data_.z_star * state.gamma;
  return residual_loglik(bold_design(state), state, y_minus_z_gamma);
}

void ParcelModel::update_bold(ChainState& state, Rng& rng) const {
  if (kind_ == BoldModel::fixed || kind_ == BoldModel::fixed_deriv) return;

  const Matrix y_minus_z_gamma = data_.y_star - data_.z_star * state.gamma;

  if (kind_ == BoldModel::gp) {
    for (Index m = 0; m < n_stimuli_; ++m) {
      const GpPrior& prior = f_priors_[m];
      const Vector nu = prior.chol * rng.normal_vector(prior.mean.size());
      Vector column = state.f.col(m);
      Matrix work = state.f;
      auto loglik = [&](const Vector& candidate) {
        work.col(m) = candidate;
        return residual_loglik(transform(work, f0_).transformed, state, y_minus_z_gamma);
      };
      ess_step(column, prior.mean, nu, loglik, rng);
      state.f.col(m) = column;
    }
    return;
  }

  // fir: interior taps per stimulus, endpoints clamped to the prior mean
  const Index ni = static_cast<Index>(fir_interior_.size());
  Matrix pred = raw_bold(state);
  for (Index m = 0; m < n_stimuli_; ++m) {
    const Index offset = m * fir_taps_;
    Vector interior(ni);
    Vector interior_mean(ni);
    for (Index a = 0; a < ni; ++a) {
      interior[a] = state.h[offset + fir_interior_[a]];
      interior_mean[a] = h0_[offset + fir_interior_[a]];
    }
    const Vector nu = fir_interior_chol_ * rng.normal_vector(ni);
    Vector h_work = state.h.segment(offset, fir_taps_);
    auto loglik = [&](const Vector& candidate) {
      for (Index a = 0; a < ni; ++a) h_work[fir_interior_[a]] = candidate[a];
      pred.col(m) = x_fir_.middleCols(offset, fir_taps_) * h_work;
      return residual_loglik(transform(pred, f0_).transformed, state, y_minus_z_gamma);
    };
    ess_step(interior, interior_mean, nu, loglik, rng);
    for (Index a = 0; a < ni; ++a) {
      h_work[fir_interior_[a]] = interior[a];
      state.h[offset + fir_interior_[a]] = interior[a];
    }
    pred.col(m) = x_fir_.middleCols(offset, fir_taps_) * h_work;
  }
  state.f = pred;
}

namespace {

/// Ridge solution for all responses at one penalty, via the SVD of the
/// design. Returns coefficients and effective degrees of freedom.
struct RidgeFit {
  Matrix coef;
  double df = 0.0;
};

RidgeFit ridge_solve(const Eigen::BDCSVD<Matrix>& svd, const Matrix& uty, double lambda) {
  const Vector& d = svd.singularValues();
  Vector shrink(d.size());
  double df = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    shrink[i] = d[i] / (d[i] * d[i] + lambda);
    df += d[i] * d[i] / (d[i] * d[i] + lambda);
  }
  RidgeFit fit;
  fit.coef = svd.matrixV() * shrink.asDiagonal() * uty;
  fit.df = df;
  return fit;
}

}  // namespace

ChainState ParcelModel::initialize(InitDiagnostics* diag) const {
  const Index t = data_.t();
  const Index j = data_.n_voxels();
  const Index k = spec_.ar_order;

  ChainState state;
  state.f = kind_ == BoldModel::fir ? f0_ : mean_fn_;
  if (kind_ == BoldModel::fir) state.h = h0_;
  state.rho = Vector::Zero(k);
  state.sigma2 = Vector::Ones(j);
  state.b = Matrix::Zero(n_bold_, j);
  state.gamma = Matrix::Zero(data_.n_nuisance(), j);

  const Matrix x_star = design_matrix(state);

  InitDiagnostics local;
  double prev_mse = std::numeric_limits<double>::infinity();
  Matrix q = Matrix::Zero(x_star.cols(), j);
  constexpr int max_iters = 100;
  for (int iter = 1; iter <= max_iters; ++iter) {
    local.iterations = iter;
    const Matrix xt = prewhiten_columns(x_star, state.rho);
    const Matrix yt = prewhiten_columns(data_.y_star, state.rho);

    Eigen::BDCSVD<Matrix> svd(xt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix uty = svd.matrixU().transpose() * yt;
    double lambda;
    if (spec_.init_ridge_lambda) {
      lambda = *spec_.init_ridge_lambda;
      q = ridge_solve(svd, uty, lambda).coef;
    } else {
      // group-wise ridge with the penalty chosen by GCV
      double best_gcv = std::numeric_limits<double>::infinity();
      lambda = 1e-10;
      for (double cand = 1e-10; cand <= 1e4 * 1.001; cand *= 10.0) {
        const RidgeFit fit = ridge_solve(svd, uty, cand);
        const double rss = (yt - xt * fit.coef).squaredNorm();
        const double denom = 1.0 - fit.df / static_cast<double>(t);
        if (denom <= 0.0) continue;
        const double gcv = rss / (static_cast<double>(t) * denom * denom);
        if (gcv < best_gcv) {
          best_gcv = gcv;
          lambda = cand;
          q = fit.coef;
        }
      }
    }
    local.ridge_lambda = lambda;

    const Matrix resid_t = yt - xt * q;
    for (Index v = 0; v < j; ++v)
      state.sigma2[v] = std::max(resid_t.col(v).squaredNorm() / static_cast<double>(t), 1e-12);
    const double mse = resid_t.squaredNorm() / static_cast<double>(resid_t.size());
    local.final_mse = mse;

    if (std::abs(prev_mse - mse) < 0.01) {
      local.converged = true;
      break;
    }
    prev_mse = mse;
    local.converged = iter < max_iters;

    if (k > 0) {
      // regularized heteroscedastic regression of residuals on their lags
      const Matrix resid = data_.y_star - x_star * q;
      Matrix prec = a0_inv_;
      Vector lin = a0_inv_rho0_;
      Matrix d(t, k);
      for (Index v = 0; v < j; ++v) {
        const double w = 1.0 / state.sigma2[v];
        for (Index lag = 1; lag <= k; ++lag) d.col(lag - 1) = resid.col(v).segment(k - lag, t);
        prec.noalias() += w * d.transpose() * d;
        lin.noalias() += w * d.transpose() * resid.col(v).tail(t);
      }
      Vector rho = prec.llt().solve(lin);
      while (!is_stationary(rho)) rho *= 0.95;
      state.rho = rho;
    }
  }
  if (!local.converged)
    std::cerr << "gpbold: initialize: mean-squared-error loop did not converge within "
              << max_iters << " iterations; using the last iterate\n";

  state.b = q.topRows(n_bold_);
  state.gamma = q.bottomRows(data_.n_nuisance());
  if (diag) *diag = local;
  return state;
}

void ParcelModel::record(PosteriorDraws& draws, int row, const ChainState& state) const {
  const Matrix& raw = state.f;
  for (Index c = 0; c < raw.cols(); ++c)
    draws.f.block(row, c * raw.rows(), 1, raw.rows()) = raw.col(c).transpose();
  if (kind_ == BoldModel::fir) draws.h.row(row) = state.h.transpose();
  for (Index c = 0; c < state.b.cols(); ++c)
    draws.b.block(row, c * state.b.rows(), 1, state.b.rows()) = state.b.col(c).transpose();
  for (Index c = 0; c < state.gamma.cols(); ++c)
    draws.gamma.block(row, c * state.gamma.rows(), 1, state.gamma.rows()) =
        state.gamma.col(c).transpose();
  draws.sigma2.row(row) = state.sigma2.transpose();
  draws.rho.row(row) = state.rho.transpose();
}

PosteriorDraws ParcelModel::run_chain(const std::string& parcel_id) const {
  const auto t0 = std::chrono::steady_clock::now();
  const SamplerSettings& s = spec_.sampler;
  s.validate();

  PosteriorDraws draws;
  draws.model = to_string(kind_);
  draws.settings = s;
  draws.parcel_id = parcel_id;
  draws.t_star = data_.t_star();
  draws.n_bold = n_bold_;
  draws.n_voxels = data_.n_voxels();
  draws.n_nuisance = data_.n_nuisance();

  const int kept = s.retained();
  draws.f.resize(kept, data_.t_star() * n_stimuli_);
  draws.h.resize(kind_ == BoldModel::fir ? kept : 0, kind_ == BoldModel::fir ? fir_taps_ * n_stimuli_ : 0);
  draws.b.resize(kept, n_bold_ * data_.n_voxels());
  draws.gamma.resize(kept, data_.n_nuisance() * data_.n_voxels());
  draws.sigma2.resize(kept, data_.n_voxels());
  draws.rho.resize(kept, spec_.ar_order);

  ChainState state = initialize(&draws.init);
  Rng rng(s.seed);

  int row = 0;
  for (int sweep = 0; sweep < s.n_iter; ++sweep) {
    try {
      state.rho = sample_rho(state, rng);
      state.sigma2 = sample_sigma2(state, rng);
      std::tie(state.b, state.gamma) = sample_coefficients(state, rng);
      update_bold(state, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("sweep " + std::to_string(sweep) + ": " + e.what());
    }
    if (sweep >= s.burn_in && (sweep - s.burn_in) % s.thin == s.thin - 1) {
      record(draws, row, state);
      ++row;
    }
  }

  draws.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return draws;
}

PosteriorDraws run_chain(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                         BoldModel kind, const std::string& parcel_id) {
  return ParcelModel(data, paradigm, spec, kind).run_chain(parcel_id);
}

}  // namespace gpbold
