#include "gpbold/baselines.hpp"

namespace gpbold {

PosteriorDraws fit_fixed(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                         const std::string& parcel_id) {
  return run_chain(data, paradigm, spec, BoldModel::fixed, parcel_id);
}

PosteriorDraws fit_fixed_with_derivative(const ParcelData& data, const Paradigm& paradigm,
                                         const ModelSpec& spec, const std::string& parcel_id) {
  return run_chain(data, paradigm, spec, BoldModel::fixed_deriv, parcel_id);
}

PosteriorDraws fit_smooth_fir(const ParcelData& data, const Paradigm& paradigm,
                              const ModelSpec& spec, const std::string& parcel_id) {
  return run_chain(data, paradigm, spec, BoldModel::fir, parcel_id);
}

PosteriorDraws fit_gp(const ParcelData& data, const Paradigm& paradigm, const ModelSpec& spec,
                      const std::string& parcel_id) {
  return run_chain(data, paradigm, spec, BoldModel::gp, parcel_id);
}

PosteriorDraws fit_model(BoldModel kind, const ParcelData& data, const Paradigm& paradigm,
                         const ModelSpec& spec, const std::string& parcel_id) {
  return run_chain(data, paradigm, spec, kind, parcel_id);
}

}  // namespace gpbold
