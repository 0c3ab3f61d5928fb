#pragma once

#include "gpbold/sampler.hpp"

namespace gpbold {

/// Predicted BOLD fixed at the prior mean; the latent update is skipped.
PosteriorDraws fit_fixed(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                         const std::string& parcel_id = "");

/// Fixed two-column basis per stimulus: the prior mean and its temporal
/// first-difference derivative, both standardized. B gains a row per
/// stimulus; t-ratios use the first-basis coefficient.
PosteriorDraws fit_fixed_with_derivative(const ParcelData& data, const Paradigm& paradigm,
                                         const ModelSpec& spec, const std::string& parcel_id = "");

/// Smooth FIR predicted BOLD: latent filter sampled by elliptical slice
/// sampling with the endpoint taps clamped to their prior-mean values.
PosteriorDraws fit_smooth_fir(const ParcelData& data, const Paradigm& paradigm,
                              const ModelSpec& spec, const std::string& parcel_id = "");

/// Full GP model (Algorithm 1 with the ESS step).
PosteriorDraws fit_gp(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                      const std::string& parcel_id = "");

PosteriorDraws fit_model(BoldModel kind, const ParcelData& data, const Paradigm& paradigm,
                         const ModelSpec& spec, const std::string& parcel_id = "");

}  // namespace gpbold
