#include "gpbold/model.hpp"

#include <fstream>

#include "gpbold/json_support.hpp"

namespace gpbold {

using nlohmann::json;

void ModelSpec::validate() const {
  hrf.validate();
  if (kernel.empty()) throw ParameterError("spec: at least one kernel entry required");
  for (const auto& k : kernel) k.validate();
  if (kappa < 0.0) throw ParameterError("spec: kappa must be >= 0");
  if (tau < 0.0) throw ParameterError("spec: tau must be >= 0");
  if (c0 < 0.0 || d0 < 0.0) throw ParameterError("spec: c0, d0 must be >= 0");
  if (ar_order < 0) throw ParameterError("spec: ar order must be >= 0");
  if (ar_prior.rho0.size() != ar_order)
    throw ParameterError("spec: rho0 length must equal the AR order");
  ar_prior.validate();
  sampler.validate();
  if (p_matrix && (p_matrix->rows() != p_matrix->cols()))
    throw ParameterError("spec: P must be square");
}

std::string to_string(BoldModel model) {
  switch (model) {
    case BoldModel::gp: return "gp";
    case BoldModel::fixed: return "fixed";
    case BoldModel::fixed_deriv: return "fixed-deriv";
    case BoldModel::fir: return "fir";
  }
  return "?";
}

BoldModel bold_model_from_string(const std::string& name) {
  if (name == "gp") return BoldModel::gp;
  if (name == "fixed") return BoldModel::fixed;
  if (name == "fixed-deriv") return BoldModel::fixed_deriv;
  if (name == "fir") return BoldModel::fir;
  throw UsageError("unknown model '" + name + "' (expected gp|fixed|fixed-deriv|fir)");
}

namespace {

KernelHyper kernel_from_json(const json& doc) {
  KernelHyper k;
  k.lengthscale = doc.at("lengthscale").get<double>();
  const bool has_var = doc.contains("variance");
  const bool has_sd = doc.contains("sd") || doc.contains("omega");
  if (has_var && has_sd)
    throw UsageError("kernel: give either 'variance' (omega^2) or 'sd'/'omega', not both");
  if (has_var) {
    k.variance = doc.at("variance").get<double>();
  } else if (has_sd) {
    const double sd = doc.contains("sd") ? doc.at("sd").get<double>() : doc.at("omega").get<double>();
    k.variance = sd * sd;
  }
  k.jitter = doc.value("jitter", 1e-6);
  return k;
}

json kernel_to_json(const KernelHyper& k) {
  return json{{"lengthscale", k.lengthscale}, {"variance", k.variance}, {"jitter", k.jitter}};
}

}  // namespace

ModelSpec model_spec_from_json(const json& doc) {
  ModelSpec spec;
  if (doc.contains("hrf")) {
    const auto& h = doc.at("hrf");
    spec.hrf.peak_delay = h.value("peak_delay", spec.hrf.peak_delay);
    spec.hrf.undershoot_delay = h.value("undershoot_delay", spec.hrf.undershoot_delay);
    spec.hrf.peak_dispersion = h.value("peak_dispersion", spec.hrf.peak_dispersion);
    spec.hrf.undershoot_dispersion = h.value("undershoot_dispersion", spec.hrf.undershoot_dispersion);
    spec.hrf.undershoot_ratio = h.value("undershoot_ratio", spec.hrf.undershoot_ratio);
    spec.hrf.kernel_length = h.value("kernel_length", spec.hrf.kernel_length);
  }
  if (doc.contains("kernel")) {
    spec.kernel.clear();
    const auto& k = doc.at("kernel");
    if (k.is_array()) {
      for (const auto& item : k) spec.kernel.push_back(kernel_from_json(item));
    } else {
      spec.kernel.push_back(kernel_from_json(k));
    }
  }
  spec.standardize_mean = doc.value("standardize_mean", true);
  spec.b0 = doc.value("b0", 0.0);
  spec.kappa = doc.value("kappa", 1e-10);
  spec.gamma0 = doc.value("gamma0", 0.0);
  spec.tau = doc.value("tau", 0.0);
  spec.empirical_intercept_prior = doc.value("empirical_intercept_prior", false);
  spec.c0 = doc.value("c0", 0.0);
  spec.d0 = doc.value("d0", 0.0);
  if (doc.contains("ar")) {
    const auto& a = doc.at("ar");
    spec.ar_order = a.value("order", 3);
    spec.ar_prior.c2 = a.value("c2", 0.5);
    spec.ar_prior.zeta = a.value("zeta", 5.0);
    if (a.contains("rho0")) {
      const auto r = a.at("rho0").get<std::vector<double>>();
      spec.ar_prior.rho0 = Eigen::Map<const Vector>(r.data(), r.size());
    } else {
      spec.ar_prior.rho0 = Vector::Zero(spec.ar_order);
    }
  }
  if (doc.contains("sampler")) {
    const auto& s = doc.at("sampler");
    spec.sampler.n_iter = s.value("n_iter", 4000);
    spec.sampler.burn_in = s.value("burn_in", 1000);
    spec.sampler.thin = s.value("thin", 3);
    spec.sampler.seed = s.value("seed", std::uint64_t{0});
  }
  if (doc.contains("fir")) {
    const auto& f = doc.at("fir");
    if (f.contains("filter_taps")) spec.fir.filter_taps = f.at("filter_taps").get<int>();
    if (f.contains("lengthscale")) spec.fir.kernel.lengthscale = f.at("lengthscale").get<double>();
    if (f.contains("variance")) spec.fir.kernel.variance = f.at("variance").get<double>();
    if (f.contains("sd")) {
      if (f.contains("variance"))
        throw UsageError("fir kernel: give either 'variance' or 'sd', not both");
      const double sd = f.at("sd").get<double>();
      spec.fir.kernel.variance = sd * sd;
    }
    if (f.contains("jitter")) spec.fir.kernel.jitter = f.at("jitter").get<double>();
  }
  if (doc.contains("init_ridge_lambda")) spec.init_ridge_lambda = doc.at("init_ridge_lambda").get<double>();
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("model spec json: ") + e.what());
  }
  return model_spec_from_json(doc);
}

std::string ModelSpec::to_json_text() const {
  json doc;
  doc["hrf"] = {{"peak_delay", hrf.peak_delay},
                {"undershoot_delay", hrf.undershoot_delay},
                {"peak_dispersion", hrf.peak_dispersion},
                {"undershoot_dispersion", hrf.undershoot_dispersion},
                {"undershoot_ratio", hrf.undershoot_ratio},
                {"kernel_length", hrf.kernel_length}};
  json kernels = json::array();
  for (const auto& k : kernel) kernels.push_back(kernel_to_json(k));
  doc["kernel"] = kernels;
  doc["standardize_mean"] = standardize_mean;
  doc["b0"] = b0;
  doc["kappa"] = kappa;
  doc["gamma0"] = gamma0;
  doc["tau"] = tau;
  doc["empirical_intercept_prior"] = empirical_intercept_prior;
  doc["c0"] = c0;
  doc["d0"] = d0;
  std::vector<double> r(ar_prior.rho0.data(), ar_prior.rho0.data() + ar_prior.rho0.size());
  doc["ar"] = {{"order", ar_order}, {"rho0", r}, {"c2", ar_prior.c2}, {"zeta", ar_prior.zeta}};
  doc["sampler"] = {{"n_iter", sampler.n_iter},
                    {"burn_in", sampler.burn_in},
                    {"thin", sampler.thin},
                    {"seed", sampler.seed}};
  json fir_doc = {{"lengthscale", fir.kernel.lengthscale},
                  {"variance", fir.kernel.variance},
                  {"jitter", fir.kernel.jitter}};
  if (fir.filter_taps) fir_doc["filter_taps"] = *fir.filter_taps;
  doc["fir"] = fir_doc;
  if (init_ridge_lambda) doc["init_ridge_lambda"] = *init_ridge_lambda;
  return doc.dump(2);
}

}  // namespace gpbold
