#pragma once

#include <string>
#include <vector>

#include "gpbold/model.hpp"
#include "gpbold/rng.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Ground truth behind one simulated parcel.
struct SimulationTruth {
  std::vector<bool> active_mask;  // J flags, 20 active
  Matrix true_b;                  // M x J, 1 for active else 0
  Vector true_rho;                // (0.4, 0.1, 0.05)
  Matrix true_bold;               // (T+K) x M design actually used (sup-norm 1)
  Matrix trend_coeffs;            // P x J
  double cnr = 5.0;

  std::string to_json_text() const;
  static SimulationTruth from_json_file(const std::string& path);
};

enum class MeanMode { correct, erroneous };

std::string to_string(MeanMode mode);
MeanMode mean_mode_from_string(const std::string& name);

/// Study grid and sampler settings for the simulation experiment.
struct StudyConfig {
  int n_datasets = 32;
  std::vector<double> cnr = {5.0};
  std::vector<double> lengthscale = {4.0};
  MeanMode mean_mode = MeanMode::erroneous;
  double target_corr = 0.615;
  std::uint64_t seed = 0;
  std::vector<std::string> models = {"gp", "fixed"};
  SamplerSettings sampler{4000, 1000, 3, 0};
  double gp_variance = 0.1;  // omega^2
  int jobs = 1;

  void validate() const {
    if (n_datasets < 1) throw ParameterError("study: n_datasets must be >= 1");
    if (cnr.empty() || lengthscale.empty()) throw ParameterError("study: empty parameter grid");
    sampler.validate();
  }
};

/// The block design behind the simulation: one stimulus, 15 s on / 15 s
/// off for 5 cycles, T = 150, TR = 1 s, 3 presample points.
Paradigm block_paradigm();

struct DatasetConfig {
  double cnr = 5.0;
  int n_active = 20;
  int n_voxels = 100;
};

/// Draw one parcel from the data generating process: Y = H(F_true) b +
/// Z Gamma + AR(3) noise with innovation sd 1/CNR; Z holds constant /
/// linear / quadratic / cubic trends with random per-voxel coefficients.
std::pair<ParcelData, SimulationTruth> generate_dataset(const DatasetConfig& config, Rng& rng);

/// A standardized mean function whose correlation with the true predicted
/// BOLD hits target_corr (within 0.005): blend of the true signal and a
/// mis-timed HRF convolution, the weight solved by bisection. The trace of
/// (weight, correlation) pairs visited is appended to *trace if given.
Vector make_erroneous_mean(const Vector& true_bold, double target_corr, const Paradigm& paradigm,
                           const HrfParams& hrf,
                           std::vector<std::pair<double, double>>* trace = nullptr);

/// One row per (dataset, model, voxel).
struct StudyRecord {
  int dataset_id = 0;
  std::string model;
  int voxel = 0;
  double t_value = 0.0;
  bool truth_active = false;
};

struct StudyResults {
  std::vector<StudyRecord> records;
  std::vector<std::string> models;
  int n_datasets = 0;
};

/// Fit every model to every simulated dataset at the study sampler
/// settings and collect voxel t-ratios (effect size c = 0). Results and
/// per-dataset files go under out_dir when non-empty.
StudyResults run_study(const StudyConfig& config, const std::string& out_dir = "");

}  // namespace gpbold
