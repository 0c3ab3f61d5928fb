#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpbold/ar.hpp"
#include "gpbold/kernel.hpp"
#include "gpbold/paradigm.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Observed BOLD and nuisance regressors for one parcel, presample rows on
/// top (time runs -K+1..T down the rows).
struct ParcelData {
  Matrix y_star;  // (T+K) x J
  Matrix z_star;  // (T+K) x P
  int presample = 0;

  Index t_star() const { return y_star.rows(); }
  Index t() const { return y_star.rows() - presample; }
  Index n_voxels() const { return y_star.cols(); }
  Index n_nuisance() const { return z_star.cols(); }

  void validate() const {
    if (y_star.rows() < 1 || y_star.cols() < 1) throw ShapeError("parcel: empty Y");
    if (z_star.rows() != y_star.rows()) throw ShapeError("parcel: Y/Z row mismatch");
    if (presample < 0 || presample >= y_star.rows())
      throw ShapeError("parcel: presample out of range");
  }
};

struct SamplerSettings {
  int n_iter = 4000;
  int burn_in = 1000;
  int thin = 3;
  std::uint64_t seed = 0;

  int retained() const { return (n_iter - burn_in) / thin; }

  void validate() const {
    if (burn_in < 0 || n_iter <= burn_in)
      throw ParameterError("sampler: need n_iter > burn_in >= 0");
    if (thin < 1) throw ParameterError("sampler: thin must be >= 1");
  }
};

/// Smooth FIR baseline settings. Filter taps default to the sampled HRF
/// length; kernel lengthscale is in lag samples.
struct FirSettings {
  std::optional<int> filter_taps;  // default: sampled HRF tap count
  KernelHyper kernel{3.0, 0.5, 1e-6};
};

/// All prior hyperparameters and sampler settings for one model fit.
/// Matrix-valued priors are stored as scalars broadcast at bind time;
/// explicit matrices can be supplied for tests.
struct ModelSpec {
  HrfParams hrf;
  std::vector<KernelHyper> kernel = {KernelHyper{}};  // per stimulus; size 1 broadcasts
  bool standardize_mean = true;
  std::optional<Matrix> mean_override;  // replaces the HRF-convolution prior mean

  double b0 = 0.0;
  std::optional<Matrix> b0_matrix;
  std::optional<Matrix> p_matrix;  // default identity
  double kappa = 1e-10;

  double gamma0 = 0.0;
  std::optional<Matrix> gamma0_matrix;
  double tau = 0.0;
  bool empirical_intercept_prior = false;  // gamma0 row 0 <- voxel means of Y

  double c0 = 0.0;
  double d0 = 0.0;

  int ar_order = 3;
  ArPriorSpec ar_prior{Vector::Zero(3), 0.5, 5.0};

  SamplerSettings sampler;
  FirSettings fir;

  std::optional<double> init_ridge_lambda;  // default: chosen by GCV

  void validate() const;

  static ModelSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

/// Current draw of all chain parameters for one parcel.
struct ChainState {
  Matrix f;      // (T+K) x M latent predicted BOLD (gp); prior mean copy otherwise
  Vector h;      // FIR filter stack (fir model only)
  Matrix b;      // Mb x J
  Matrix gamma;  // P x J
  Vector sigma2; // J
  Vector rho;    // K
};

enum class BoldModel { gp, fixed, fixed_deriv, fir };

std::string to_string(BoldModel model);
BoldModel bold_model_from_string(const std::string& name);

struct InitDiagnostics {
  int iterations = 0;
  double ridge_lambda = 0.0;
  double final_mse = 0.0;
  bool converged = true;
};

/// Retained post-burn-in, thinned draws plus run metadata. Rows are draws,
/// columns are column-major flattenings of each parameter.
struct PosteriorDraws {
  Matrix f;       // retained x (T+K)*M  (gp/fixed: latent F; fir: predicted BOLD X h)
  Matrix h;       // retained x taps*M   (fir only, otherwise 0 x 0)
  Matrix b;       // retained x Mb*J
  Matrix gamma;   // retained x P*J
  Matrix sigma2;  // retained x J
  Matrix rho;     // retained x K

  std::string model;
  SamplerSettings settings;
  std::string parcel_id;
  Index t_star = 0, n_bold = 0, n_voxels = 0, n_nuisance = 0;
  InitDiagnostics init;
  double seconds = 0.0;

  int retained() const { return static_cast<int>(b.rows()); }

  /// Draws of one activation coefficient b[m, j].
  Vector b_draws(Index m, Index j) const { return b.col(m + n_bold * j); }
};

}  // namespace gpbold
