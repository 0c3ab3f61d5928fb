#include "gpbold/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gpbold/baselines.hpp"
#include "gpbold/evaluate.hpp"
#include "gpbold/io.hpp"
#include "gpbold/json_support.hpp"
#include "gpbold/parallel.hpp"
#include "gpbold/simulation.hpp"

namespace gpbold {

namespace fs = std::filesystem;
using nlohmann::json;

int resolve_jobs(const std::optional<int>& flag, const std::optional<int>& config_value) {
  if (flag) return std::max(1, *flag);
  if (config_value) return std::max(1, *config_value);
  if (const char* env = std::getenv("GPBOLD_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

namespace {

json load_config(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("config not found: " + path);
  return load_json_file(path);
}

std::uint64_t require_seed(const json& config, const CliOverrides& overrides) {
  if (overrides.seed) return *overrides.seed;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  throw UsageError("a seed is required (config key 'seed' or --seed)");
}

std::string require_out(const json& config, const CliOverrides& overrides) {
  if (overrides.out) return *overrides.out;
  if (config.contains("out")) return config.at("out").get<std::string>();
  throw UsageError("an output directory is required (config key 'out' or --out)");
}

std::vector<double> number_list(const json& value) {
  std::vector<double> out;
  if (value.is_array()) {
    for (const auto& v : value) out.push_back(v.get<double>());
  } else {
    out.push_back(value.get<double>());
  }
  return out;
}

std::string dataset_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "dataset_%03d", index);
  return buf;
}

std::vector<std::string> list_dataset_dirs(const std::string& root) {
  std::vector<std::string> dirs;
  if (!fs::is_directory(root)) throw UsageError("data directory not found: " + root);
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "y.csv"))
      dirs.push_back(entry.path().string());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw UsageError("no dataset directories with y.csv under " + root);
  return dirs;
}

}  // namespace

void cmd_simulate(const std::string& config_path, const CliOverrides& overrides) {
  const json config = load_config(config_path);
  const std::uint64_t seed = require_seed(config, overrides);
  const std::string out = require_out(config, overrides);
  const int n_datasets = config.value("n_datasets", 1);
  if (n_datasets < 1) throw UsageError("n_datasets must be >= 1");
  const std::vector<double> cnr_grid =
      config.contains("cnr") ? number_list(config.at("cnr")) : std::vector<double>{5.0};

  ensure_directory(out);
  const Paradigm paradigm = block_paradigm();
  {
    std::ofstream p(out + "/paradigm.json", std::ios::binary);
    if (!p) throw IoError("cannot write paradigm.json");
    p << paradigm.to_json_text() << '\n';
  }

  int dataset_id = 0;
  for (double cnr : cnr_grid) {
    for (int d = 0; d < n_datasets; ++d, ++dataset_id) {
      Rng rng(seed, 1000 + static_cast<std::uint64_t>(dataset_id));
      DatasetConfig dcfg;
      dcfg.cnr = cnr;
      auto [data, truth] = generate_dataset(dcfg, rng);
      const std::string dir = out + "/" + dataset_name(dataset_id);
      ensure_directory(dir);
      write_csv(dir + "/y.csv", data.y_star);
      write_csv(dir + "/z.csv", data.z_star);
      std::ofstream t(dir + "/truth.json", std::ios::binary);
      if (!t) throw IoError("cannot write truth.json");
      t << truth.to_json_text() << '\n';
    }
  }

  json echo = config;
  echo["seed"] = seed;
  echo["out"] = out;
  echo["n_written"] = dataset_id;
  write_json_file(out + "/simulate_config.json", echo);
}

int cmd_fit(const std::string& config_path, const CliOverrides& overrides) {
  const json config = load_config(config_path);
  const std::uint64_t seed = require_seed(config, overrides);
  const std::string out = require_out(config, overrides);
  const std::string model_name =
      overrides.model ? *overrides.model : config.value("model", std::string("gp"));
  const BoldModel kind = bold_model_from_string(model_name);
  const int jobs = resolve_jobs(
      overrides.jobs,
      config.contains("jobs") ? std::optional<int>(config.at("jobs").get<int>()) : std::nullopt);

  std::vector<std::string> datasets;
  if (config.contains("datasets")) {
    for (const auto& d : config.at("datasets")) datasets.push_back(d.get<std::string>());
  } else if (config.contains("data_dir")) {
    datasets = list_dataset_dirs(config.at("data_dir").get<std::string>());
  } else {
    throw UsageError("fit config needs 'datasets' or 'data_dir'");
  }
  for (const auto& d : datasets)
    if (!fs::exists(d + "/y.csv")) throw UsageError("missing y.csv under " + d);

  std::string paradigm_path;
  if (config.contains("paradigm")) {
    paradigm_path = config.at("paradigm").get<std::string>();
  } else if (config.contains("data_dir") &&
             fs::exists(config.at("data_dir").get<std::string>() + "/paradigm.json")) {
    paradigm_path = config.at("data_dir").get<std::string>() + "/paradigm.json";
  } else {
    throw UsageError("fit config needs 'paradigm' (or a data_dir with paradigm.json)");
  }
  const Paradigm paradigm = Paradigm::from_json_file(paradigm_path);

  ModelSpec base_spec =
      config.contains("spec") ? model_spec_from_json(config.at("spec")) : ModelSpec{};
  const bool scale_gm = config.value("scale_global_mean", false);
  const std::string mean_mode = config.value("mean_mode", std::string("correct"));
  const double target_corr = config.value("target_corr", 0.615);

  ensure_directory(out);
  std::vector<std::string> failures(datasets.size());

  parallel_for(static_cast<int>(datasets.size()), jobs, [&](int i) {
    const std::string& dir = datasets[i];
    const std::string name = fs::path(dir).filename().string();
    const std::string parcel_out = out + "/" + name + "/" + model_name;
    try {
      ParcelData data;
      data.y_star = read_csv(dir + "/y.csv");
      data.z_star = read_csv(dir + "/z.csv");
      data.presample = paradigm.presample;
      if (scale_gm) data.y_star = scale_global_mean(data.y_star);

      ModelSpec spec = base_spec;
      spec.sampler.seed = seed + static_cast<std::uint64_t>(i);
      if (mean_mode == "erroneous") {
        if (!fs::exists(dir + "/truth.json"))
          throw UsageError("mean_mode erroneous needs truth.json in " + dir);
        const SimulationTruth truth = SimulationTruth::from_json_file(dir + "/truth.json");
        Matrix mean(data.t_star(), 1);
        mean.col(0) =
            make_erroneous_mean(truth.true_bold.col(0), target_corr, paradigm, spec.hrf);
        spec.mean_override = mean;
      } else if (mean_mode != "correct") {
        throw UsageError("unknown mean_mode '" + mean_mode + "'");
      }

      const PosteriorDraws draws = fit_model(kind, data, paradigm, spec, name);
      save_draws(parcel_out, draws);
    } catch (const std::exception& e) {
      failures[i] = e.what();
      ensure_directory(parcel_out);
      write_json_file(parcel_out + "/error.json",
                      json{{"parcel", name}, {"error", e.what()}});
    }
  });

  int n_failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      ++n_failed;
      std::fprintf(stderr, "gpbold: fit failed for %s: %s\n", datasets[i].c_str(),
                   failures[i].c_str());
    }
  }
  return n_failed;
}

void cmd_evaluate(const std::string& config_path, const CliOverrides& overrides) {
  const json config = load_config(config_path);
  const std::string out = require_out(config, overrides);
  const double c = config.value("c", 0.0);
  const bool want_roc = config.value("roc", false);

  struct Run {
    std::string name;
    std::vector<std::string> draw_dirs;
  };
  std::vector<Run> runs;
  if (config.contains("runs")) {
    for (const auto& r : config.at("runs")) {
      Run run;
      run.name = r.at("name").get<std::string>();
      for (const auto& d : r.at("draws")) run.draw_dirs.push_back(d.get<std::string>());
      runs.push_back(run);
    }
  } else if (config.contains("fits_dir") && config.contains("models")) {
    const std::string fits_dir = config.at("fits_dir").get<std::string>();
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(fits_dir))
      if (entry.is_directory()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& model : config.at("models")) {
      Run run;
      run.name = model.get<std::string>();
      for (const auto& n : names) {
        const std::string d = fits_dir + "/" + n + "/" + run.name;
        if (fs::exists(d + "/meta.json")) run.draw_dirs.push_back(d);
      }
      runs.push_back(run);
    }
  } else {
    throw UsageError("evaluate config needs 'runs' or ('fits_dir' and 'models')");
  }
  if (runs.empty()) throw UsageError("evaluate: no runs given");

  std::vector<std::string> truth_paths;
  if (config.contains("truth")) {
    for (const auto& t : config.at("truth")) truth_paths.push_back(t.get<std::string>());
  } else if (config.contains("data_dir")) {
    for (const auto& d : list_dataset_dirs(config.at("data_dir").get<std::string>()))
      if (fs::exists(d + "/truth.json")) truth_paths.push_back(d + "/truth.json");
  }
  if (want_roc && truth_paths.empty())
    throw UsageError("evaluate: ROC requested but no ground truth available");

  Vector thresholds = default_thresholds();
  if (config.contains("thresholds")) {
    const auto& th = config.at("thresholds");
    const int count = th.value("count", 60);
    const double t_min = th.value("min", 1.0);
    const double t_max = th.value("max", 4.0);
    if (count < 2 || !(t_max > t_min)) throw UsageError("evaluate: bad threshold grid");
    thresholds.resize(count);
    for (int i = 0; i < count; ++i)
      thresholds[i] = t_min + (t_max - t_min) * static_cast<double>(i) / (count - 1);
  }

  ensure_directory(out);
  json summary;
  summary["c"] = c;

  for (const auto& run : runs) {
    std::vector<RocCurve> curves;
    for (std::size_t i = 0; i < run.draw_dirs.size(); ++i) {
      const PosteriorDraws draws = load_draws(run.draw_dirs[i]);
      const ActivityMap map = activity_map(draws, c);

      // t-map CSV: voxel, stimulus, t, ppm
      Matrix tmap(map.t_values.rows() * map.t_values.cols(), 4);
      Index row = 0;
      for (Index j = 0; j < map.t_values.cols(); ++j)
        for (Index m = 0; m < map.t_values.rows(); ++m, ++row) {
          tmap(row, 0) = static_cast<double>(j);
          tmap(row, 1) = static_cast<double>(m);
          tmap(row, 2) = map.t_values(m, j);
          tmap(row, 3) = map.ppm(m, j);
        }
      write_csv(out + "/tmap_" + run.name + "_" + draws.parcel_id + ".csv", tmap,
                {"voxel", "stimulus", "t", "ppm"});

      if (want_roc) {
        if (i >= truth_paths.size())
          throw UsageError("evaluate: fewer truth files than draw directories");
        const SimulationTruth truth = SimulationTruth::from_json_file(truth_paths[i]);
        const Vector t_values = map.t_values.row(0).transpose();
        curves.push_back(roc_curve(t_values, truth.active_mask, thresholds));
      }
    }
    if (want_roc) {
      const RocCurve avg = average_roc(curves);
      Matrix roc(thresholds.size(), 3);
      roc.col(0) = avg.thresholds;
      roc.col(1) = avg.fpr;
      roc.col(2) = avg.tpr;
      write_csv(out + "/roc_" + run.name + ".csv", roc, {"threshold", "fpr", "tpr"});
      summary["auc"][run.name] = avg.auc;
    }
  }

  if (want_roc && runs.size() == 2) {
    const double a0 = summary["auc"][runs[0].name].get<double>();
    const double a1 = summary["auc"][runs[1].name].get<double>();
    summary["auc_diff"] = {{"first", runs[0].name},
                           {"second", runs[1].name},
                           {"first_minus_second", a0 - a1}};
  }
  write_json_file(out + "/summary.json", summary);
}

}  // namespace gpbold
