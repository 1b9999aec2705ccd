#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "lesskit/harness.hpp"
#include "lesskit/leverage.hpp"
#include "lesskit/rng.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--seed", args.seed, "override the master seed");
  cmd->add_option("--trials", args.trials, "override the trial count per cell");
  cmd->add_option("--out", args.out, "override the output directory");
}

lesskit::ExperimentConfig resolve(const CommonArgs& args, lesskit::RunMode mode) {
  lesskit::ExperimentConfig cfg = lesskit::load_config_file(args.config_path);
  cfg.mode = mode;
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.out) cfg.output_dir = *args.out;
  return cfg;
}

int run_leverage_report(const CommonArgs& args) {
  lesskit::ExperimentConfig cfg = resolve(args, lesskit::RunMode::Diagnostics);
  if (cfg.output_dir.empty()) throw lesskit::ConfigError("missing required key 'out'");
  const lesskit::Dataset ds = lesskit::load_dataset(cfg);

  const lesskit::LeverageProfile exact = lesskit::exact_leverage_scores(ds.a);
  const lesskit::LeverageProfile approx = lesskit::approx_leverage_scores(
      ds.a, 8, lesskit::derive_seed(cfg.master_seed, 0x6C6576ULL));

  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream csv(std::filesystem::path(cfg.output_dir) / "leverage.csv",
                    std::ios::binary);
  if (!csv) throw lesskit::IoError("cannot open leverage.csv");
  csv << "row,score,approx_score,prob\n";
  char buf[128];
  for (std::size_t i = 0; i < exact.scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", i, exact.scores[i],
                  approx.scores[i], exact.probs[i]);
    csv << buf;
  }
  std::ofstream meta(std::filesystem::path(cfg.output_dir) / "meta.txt", std::ios::binary);
  lesskit::write_meta(cfg, ds, meta);

  double sum = 0.0;
  for (double l : exact.scores) sum += l;
  std::cout << "rows " << ds.a.rows() << " cols " << ds.a.cols() << " coherence "
            << exact.coherence << " score-sum " << sum << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized sketching benchmark harness"};
  app.require_subcommand(1);

  CommonArgs ols, lasso, svd, diag, lev;
  auto* cmd_ols = app.add_subcommand("sweep-ols", "Monte Carlo error sweep for sketched OLS");
  attach_common(cmd_ols, ols);
  auto* cmd_lasso =
      app.add_subcommand("sweep-lasso", "sweep for the l1-constrained sketched solver");
  attach_common(cmd_lasso, lasso);
  auto* cmd_svd = app.add_subcommand("sweep-svd", "low-rank projection error sweep");
  attach_common(cmd_svd, svd);
  auto* cmd_diag = app.add_subcommand("diagnose", "gaussianization diagnostics");
  attach_common(cmd_diag, diag);
  auto* cmd_lev = app.add_subcommand("leverage", "leverage score report for a dataset");
  attach_common(cmd_lev, lev);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (cmd_ols->parsed())
      lesskit::run_experiment(resolve(ols, lesskit::RunMode::OlsSweep));
    else if (cmd_lasso->parsed())
      lesskit::run_experiment(resolve(lasso, lesskit::RunMode::LassoSweep));
    else if (cmd_svd->parsed())
      lesskit::run_experiment(resolve(svd, lesskit::RunMode::SvdSweep));
    else if (cmd_diag->parsed())
      lesskit::run_experiment(resolve(diag, lesskit::RunMode::Diagnostics));
    else if (cmd_lev->parsed())
      return run_leverage_report(lev);
  } catch (const lesskit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lesskit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
