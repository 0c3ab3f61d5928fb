#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gpbold/ess.hpp"
#include "gpbold/identify.hpp"
#include "gpbold/model.hpp"

namespace gpbold {

/// One parcel's data bound to a model kind with all priors resolved.
/// Exposes the four Gibbs blocks, chain initialization and the full run.
class ParcelModel {
 public:
  ParcelModel(ParcelData data, Paradigm paradigm, ModelSpec spec, BoldModel kind);

  const ParcelData& data() const { return data_; }
  const ModelSpec& spec() const { return spec_; }
  const Paradigm& paradigm() const { return paradigm_; }
  BoldModel kind() const { return kind_; }

  Index n_stimuli() const { return n_stimuli_; }
  Index n_bold_cols() const { return n_bold_; }
  /// Reference matrix F0 the identifying transform is matched against.
  const Matrix& f0() const { return f0_; }
  /// GP prior mean functions (one column per stimulus).
  const Matrix& mean_function() const { return mean_fn_; }
  const GpPrior& f_prior(Index m) const { return f_priors_.at(m); }
  const Matrix& fir_design() const { return x_fir_; }
  const Vector& fir_prior_mean() const { return h0_; }
  Index fir_taps() const { return fir_taps_; }

  /// Predicted-BOLD design columns for the current state (T* x Mb).
  Matrix bold_design(const ChainState& state) const;

  /// Raw (untransformed) predicted BOLD; for fir this is X_FIR h per block.
  Matrix raw_bold(const ChainState& state) const;

  Vector sample_rho(const ChainState& state, Rng& rng) const;
  Vector sample_sigma2(const ChainState& state, Rng& rng) const;
  std::pair<Matrix, Matrix> sample_coefficients(const ChainState& state, Rng& rng) const;

  /// Elliptical slice update of the latent BOLD (F columns, or the FIR
  /// filter with clamped endpoints). No-op for the fixed designs.
  void update_bold(ChainState& state, Rng& rng) const;

  /// Conditional Gaussian log-likelihood (up to an additive constant) via
  /// per-voxel pre-whitened residuals.
  double log_likelihood(const ChainState& state) const;

  ChainState initialize(InitDiagnostics* diag = nullptr) const;

  PosteriorDraws run_chain(const std::string& parcel_id = "") const;

 private:
  Matrix design_matrix(const ChainState& state) const;  // [bold | Z*]
  Matrix stack_q(const ChainState& state) const;        // [B; Gamma]
  double residual_loglik(const Matrix& bold, const ChainState& state,
                         const Matrix& y_minus_z_gamma) const;
  void record(PosteriorDraws& draws, int row, const ChainState& state) const;

  ParcelData data_;
  Paradigm paradigm_;
  ModelSpec spec_;
  BoldModel kind_;

  Index n_stimuli_ = 0;
  Index n_bold_ = 0;
  Matrix mean_fn_;        // T* x M
  Matrix f0_;             // reference for H
  Matrix fixed_design_;   // fixed / fixed-deriv
  std::vector<GpPrior> f_priors_;

  Matrix x_fir_;          // T* x taps*M
  Vector h0_;             // taps*M
  Index fir_taps_ = 0;
  Matrix fir_interior_chol_;  // conditional prior given clamped endpoints
  std::vector<Index> fir_interior_;

  Matrix q0_;   // (Mb+P) x J
  Matrix pq_;   // (Mb+P) x (Mb+P)
  Vector c0_, d0_;
  Matrix a0_inv_;
  Vector a0_inv_rho0_;
};

/// Bind and run in one call.
PosteriorDraws run_chain(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                         BoldModel kind = BoldModel::gp, const std::string& parcel_id = "");

}  // namespace gpbold
