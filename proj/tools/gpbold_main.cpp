#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "gpbold/pipeline.hpp"
#include "gpbold/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian joint detection-estimation for task fMRI with a GP prior on the "
               "predicted BOLD"};
  app.require_subcommand(1);

  std::string config_path;
  gpbold::CliOverrides overrides;
  std::string model;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;

  auto add_common = [&](CLI::App* cmd, bool with_model) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--jobs", jobs, "parallel parcels (default: config, then GPBOLD_JOBS)");
    cmd->add_option("--out", out, "override the output directory");
    if (with_model)
      cmd->add_option("--model", model, "gp | fixed | fixed-deriv | fir");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate synthetic parcel datasets");
  add_common(sim, false);
  CLI::App* fit = app.add_subcommand("fit", "fit a model to every dataset (parcel)");
  add_common(fit, true);
  CLI::App* eval = app.add_subcommand("evaluate", "t-maps, PPMs and ROC curves from draws");
  add_common(eval, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  auto fill = [&](CLI::App* cmd) {
    if (cmd->count("--seed")) overrides.seed = seed;
    if (cmd->count("--jobs")) overrides.jobs = jobs;
    if (cmd->count("--out")) overrides.out = out;
    if (cmd->count("--model")) overrides.model = model;
  };

  try {
    if (sim->parsed()) {
      fill(sim);
      gpbold::cmd_simulate(config_path, overrides);
    } else if (fit->parsed()) {
      fill(fit);
      if (gpbold::cmd_fit(config_path, overrides) > 0) return 2;
    } else if (eval->parsed()) {
      fill(eval);
      gpbold::cmd_evaluate(config_path, overrides);
    }
  } catch (const gpbold::UsageError& e) {
    std::fprintf(stderr, "gpbold: %s\n", e.what());
    return 1;
  } catch (const gpbold::IoError& e) {
    std::fprintf(stderr, "gpbold: %s\n", e.what());
    return 1;
  } catch (const gpbold::Error& e) {
    std::fprintf(stderr, "gpbold: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gpbold: %s\n", e.what());
    return 2;
  }
  return 0;
}
