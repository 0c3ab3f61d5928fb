#include "gpbold/simulation.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gpbold/ar.hpp"
#include "gpbold/baselines.hpp"
#include "gpbold/evaluate.hpp"
#include "gpbold/identify.hpp"
#include "gpbold/io.hpp"
#include "gpbold/json_support.hpp"
#include "gpbold/parallel.hpp"
#include "gpbold/stats.hpp"

namespace gpbold {

using nlohmann::json;

std::string to_string(MeanMode mode) {
  return mode == MeanMode::correct ? "correct" : "erroneous";
}

MeanMode mean_mode_from_string(const std::string& name) {
  if (name == "correct") return MeanMode::correct;
  if (name == "erroneous") return MeanMode::erroneous;
  throw UsageError("unknown mean mode '" + name + "' (expected correct|erroneous)");
}

Paradigm block_paradigm() {
  Paradigm p;
  p.tr = 1.0;
  p.n_time = 150;
  p.presample = 3;
  std::vector<StimulusEvent> events;
  for (int cycle = 0; cycle < 5; ++cycle) events.push_back({cycle * 30.0, 15.0});
  p.stimuli.push_back(events);
  p.validate();
  return p;
}

std::string SimulationTruth::to_json_text() const {
  json doc;
  json mask = json::array();
  for (bool a : active_mask) mask.push_back(a ? 1 : 0);
  doc["active_mask"] = mask;
  doc["true_b"] = matrix_to_json(true_b);
  doc["true_rho"] = vector_to_json(true_rho);
  doc["true_bold"] = matrix_to_json(true_bold);
  doc["trend_coeffs"] = matrix_to_json(trend_coeffs);
  doc["cnr"] = cnr;
  doc["innovation_sd"] = 1.0 / cnr;
  return doc.dump(2);
}

SimulationTruth SimulationTruth::from_json_file(const std::string& path) {
  const json doc = load_json_file(path);
  SimulationTruth truth;
  for (const auto& v : doc.at("active_mask")) truth.active_mask.push_back(v.get<int>() != 0);
  truth.true_b = matrix_from_json(doc.at("true_b"));
  truth.true_rho = vector_from_json(doc.at("true_rho"));
  truth.true_bold = matrix_from_json(doc.at("true_bold"));
  truth.trend_coeffs = matrix_from_json(doc.at("trend_coeffs"));
  truth.cnr = doc.at("cnr").get<double>();
  return truth;
}

namespace {

/// Nuisance design of the simulation: intercept plus standardized linear,
/// quadratic and cubic trends over the full grid.
Matrix trend_design(const Paradigm& paradigm) {
  const Index n = paradigm.n_points();
  const Vector t = paradigm.time_grid();
  Matrix z(n, 4);
  z.col(0).setOnes();
  for (int power = 1; power <= 3; ++power)
    z.col(power) = standardized(t.array().pow(power).matrix());
  return z;
}

}  // namespace

std::pair<ParcelData, SimulationTruth> generate_dataset(const DatasetConfig& config, Rng& rng) {
  if (config.n_active < 1 || config.n_active > config.n_voxels)
    throw ParameterError("generate_dataset: active count out of range");
  const Paradigm paradigm = block_paradigm();
  const Index t_star = paradigm.n_points();
  const Index j = config.n_voxels;

  const Matrix mean_std = build_mean_function(paradigm, HrfParams{}, true).values;
  const Vector design_true = normalize_column(mean_std.col(0), mean_std.col(0));

  SimulationTruth truth;
  truth.cnr = config.cnr;
  truth.true_rho = Vector(3);
  truth.true_rho << 0.4, 0.1, 0.05;
  truth.true_bold = design_true;

  // choose active voxels by partial Fisher-Yates
  std::vector<Index> order(j);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < config.n_active; ++i) {
    const Index pick = i + static_cast<Index>(rng.below(j - i));
    std::swap(order[i], order[pick]);
  }
  truth.active_mask.assign(j, false);
  for (int i = 0; i < config.n_active; ++i) truth.active_mask[order[i]] = true;
  truth.true_b = Matrix::Zero(1, j);
  for (Index v = 0; v < j; ++v) truth.true_b(0, v) = truth.active_mask[v] ? 1.0 : 0.0;

  const Matrix z_star = trend_design(paradigm);
  const double trend_sd[4] = {2.0, 1.0, 0.5, 0.25};
  truth.trend_coeffs.resize(4, j);
  for (Index v = 0; v < j; ++v)
    for (Index p = 0; p < 4; ++p) truth.trend_coeffs(p, v) = trend_sd[p] * rng.normal();

  const double sigma = 1.0 / config.cnr;
  Matrix noise(t_star, j);
  for (Index v = 0; v < j; ++v) noise.col(v) = simulate_ar(truth.true_rho, sigma, t_star, rng);

  ParcelData data;
  data.presample = paradigm.presample;
  data.z_star = z_star;
  data.y_star = design_true * truth.true_b + z_star * truth.trend_coeffs + noise;
  return {data, truth};
}

Vector make_erroneous_mean(const Vector& true_bold, double target_corr, const Paradigm& paradigm,
                           const HrfParams& hrf,
                           std::vector<std::pair<double, double>>* trace) {
  if (!(target_corr > 0.0) || target_corr > 1.0)
    throw ParameterError("make_erroneous_mean: target correlation must be in (0, 1]");
  const Vector b_std = standardized(true_bold);
  if (target_corr >= 1.0 - 1e-12) return b_std;

  HrfParams mistimed = hrf;
  mistimed.peak_delay = hrf.peak_delay + 6.0;  // late peak; corr ~ 0.34 for the block design
  Paradigm single = paradigm;
  const Vector g = build_mean_function(single, mistimed, true).values.col(0);

  auto corr_at = [&](double alpha) {
    const Vector blend = alpha * b_std + (1.0 - alpha) * g;
    return pearson_corr(blend, b_std);
  };

  const double corr_low = corr_at(0.0);
  if (corr_low > target_corr)
    throw NumericalError(
        "make_erroneous_mean: mistimed mean already correlates above the target (" +
        format_double(corr_low) + " > " + format_double(target_corr) + ")");

  double lo = 0.0, hi = 1.0;
  double alpha = 0.5, achieved = corr_at(alpha);
  for (int iter = 0; iter < 200 && std::abs(achieved - target_corr) > 1e-10; ++iter) {
    if (achieved < target_corr) lo = alpha;
    else hi = alpha;
    alpha = 0.5 * (lo + hi);
    achieved = corr_at(alpha);
    if (trace) trace->emplace_back(alpha, achieved);
  }
  if (std::abs(achieved - target_corr) > 0.005)
    throw NumericalError("make_erroneous_mean: bisection failed to reach the target");
  return standardized(alpha * b_std + (1.0 - alpha) * g);
}

StudyResults run_study(const StudyConfig& config, const std::string& out_dir) {
  config.validate();
  const Paradigm paradigm = block_paradigm();

  struct Cell {
    int dataset_id;
    double cnr;
    double lengthscale;
  };
  std::vector<Cell> cells;
  int dataset_id = 0;
  for (double cnr : config.cnr)
    for (double l : config.lengthscale)
      for (int d = 0; d < config.n_datasets; ++d) cells.push_back({dataset_id++, cnr, l});

  struct Fit {
    int dataset_id;
    std::string model;
    Vector t_values;
    std::vector<bool> truth;
  };
  const int n_models = static_cast<int>(config.models.size());
  std::vector<Fit> fits(cells.size() * n_models);

  if (!out_dir.empty()) ensure_directory(out_dir);

  parallel_for(static_cast<int>(cells.size()), config.jobs, [&](int ci) {
    const Cell& cell = cells[ci];
    Rng data_rng(config.seed, 1000 + static_cast<std::uint64_t>(cell.dataset_id));
    DatasetConfig dcfg;
    dcfg.cnr = cell.cnr;
    auto [data, truth] = generate_dataset(dcfg, data_rng);

    ModelSpec spec;
    spec.kernel = {KernelHyper{cell.lengthscale, config.gp_variance, 1e-6}};
    spec.sampler = config.sampler;
    spec.sampler.seed = config.seed + static_cast<std::uint64_t>(cell.dataset_id);
    if (config.mean_mode == MeanMode::erroneous) {
      Matrix mean(data.t_star(), 1);
      mean.col(0) =
          make_erroneous_mean(truth.true_bold.col(0), config.target_corr, paradigm, spec.hrf);
      spec.mean_override = mean;
    }

    for (int mi = 0; mi < n_models; ++mi) {
      const BoldModel kind = bold_model_from_string(config.models[mi]);
      const std::string parcel_id = "dataset_" + std::to_string(cell.dataset_id);
      const PosteriorDraws draws = fit_model(kind, data, paradigm, spec, parcel_id);
      const ActivityMap map = activity_map(draws, 0.0);

      Fit fit;
      fit.dataset_id = cell.dataset_id;
      fit.model = config.models[mi];
      fit.t_values = map.t_values.row(0).transpose();
      fit.truth = truth.active_mask;
      fits[ci * n_models + mi] = std::move(fit);
    }
  });

  StudyResults results;
  results.models = config.models;
  results.n_datasets = static_cast<int>(cells.size());
  for (const auto& fit : fits)
    for (Index v = 0; v < fit.t_values.size(); ++v)
      results.records.push_back(
          {fit.dataset_id, fit.model, static_cast<int>(v), fit.t_values[v], fit.truth[v]});

  if (!out_dir.empty()) {
    std::ofstream out(out_dir + "/study_results.csv", std::ios::binary);
    if (!out) throw IoError("cannot write study results");
    out << "dataset_id,model,voxel,t_value,truth_active\n";
    for (const auto& r : results.records)
      out << r.dataset_id << ',' << r.model << ',' << r.voxel << ',' << format_double(r.t_value)
          << ',' << (r.truth_active ? 1 : 0) << '\n';

    json meta;
    meta["n_datasets"] = config.n_datasets;
    meta["cnr"] = config.cnr;
    meta["lengthscale"] = config.lengthscale;
    meta["mean_mode"] = to_string(config.mean_mode);
    meta["target_corr"] = config.target_corr;
    meta["seed"] = config.seed;
    meta["models"] = config.models;
    meta["sampler"] = {{"n_iter", config.sampler.n_iter},
                       {"burn_in", config.sampler.burn_in},
                       {"thin", config.sampler.thin}};
    write_json_file(out_dir + "/study_config.json", meta);
  }
  return results;
}

}  // namespace gpbold
