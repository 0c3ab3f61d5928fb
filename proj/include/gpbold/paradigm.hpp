#pragma once

#include <string>
#include <vector>

#include "gpbold/types.hpp"

namespace gpbold {

struct StimulusEvent {
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds; 0 means a single-sample impulse
};

/// Experimental design: per-stimulus event lists on a TR-spaced grid of
/// T + K samples, sample i at time i*tr for i in {-K+1, ..., T}.
struct Paradigm {
  std::vector<std::vector<StimulusEvent>> stimuli;
  double tr = 1.0;
  int n_time = 0;    // T
  int presample = 0; // K

  int n_stimuli() const { return static_cast<int>(stimuli.size()); }
  int n_points() const { return n_time + presample; }
  int first_index() const { return -presample + 1; }

  void validate() const;

  /// Sample times i*tr for i = -K+1, ..., T.
  Vector time_grid() const;

  /// Boxcar indicator of stimulus m at integer sample index i (time i*tr).
  /// Overlapping events add up.
  double indicator_at(int m, int sample_index) const;

  /// Indicator of stimulus m evaluated on the full grid.
  Vector indicator(int m) const;

  static Paradigm from_json_file(const std::string& path);
  static Paradigm from_json_text(const std::string& text);
  std::string to_json_text() const;
};

/// Double-gamma HRF shape parameters (the GP prior mean is built from these).
struct HrfParams {
  double peak_delay = 6.0;
  double undershoot_delay = 16.0;
  double peak_dispersion = 1.0;
  double undershoot_dispersion = 1.0;
  double undershoot_ratio = 1.0 / 6.0;
  double kernel_length = 32.0;  // seconds

  void validate() const;
};

/// Canonical double-gamma HRF value at time t (seconds). Zero for t <= 0.
double double_gamma(double t, const HrfParams& params);

/// HRF sampled at lags 0, tr, 2*tr, ..., up to kernel_length inclusive.
Vector sample_hrf(const HrfParams& params, double tr);

/// GP prior mean functions, one column per stimulus, on the full T+K grid.
struct MeanFunction {
  Matrix values;  // (T+K) x M
  bool standardized = false;

  Vector column(int m) const { return values.col(m); }
};

/// Convolve each stimulus indicator with the sampled HRF on the TR grid.
/// Presample values come from the same convolution (no activity before the
/// first onset). If standardize is set, each column is rescaled to zero
/// mean and unit sample variance.
MeanFunction build_mean_function(const Paradigm& paradigm, const HrfParams& params,
                                 bool standardize);

}  // namespace gpbold
