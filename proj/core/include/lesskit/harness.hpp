#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lesskit/data_io.hpp"
#include "lesskit/diagnostics.hpp"
#include "lesskit/sketch.hpp"

namespace lesskit {

enum class RunMode { OlsSweep, LassoSweep, SvdSweep, Diagnostics };

const char* mode_name(RunMode mode);

// One configured operator: family plus the nonzeros-per-row policy for the
// sparse families. The label is the config token and names the CSV rows.
struct OperatorSpec {
  SketchFamily family = SketchFamily::Gaussian;
  std::size_t k = 0;        // 0 = default (d nonzeros per row)
  bool dense_rows = false;  // ceil(d·log(nd/δ)) nonzeros instead
  std::string label;
};

struct ExperimentConfig {
  RunMode mode = RunMode::OlsSweep;
  std::string dataset;  // "synthetic:low:<N>:<d>:<noise>[:<seed>]" or a libsvm path
  std::vector<OperatorSpec> operators;
  std::vector<std::size_t> n_grid;  // empty = 8 log-spaced sizes in [2d, 50d]
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  std::string output_dir;
  bool standardize = true;       // file datasets only
  bool approx_leverage = false;  // sketch-estimated scores for the LESS family
  double lasso_radius = 0.0;     // required in lasso mode
  double solver_tol = 1e-8;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are
// ConfigError. See the config grammar section of the README.
ExperimentConfig parse_config_text(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

Dataset load_dataset(const ExperimentConfig& cfg);

// Per (operator, sketch size) cell: cfg.trials independent sketch-solve runs
// with trial seeds derived from (master_seed, operator, grid index, trial).
// Degenerate trials are excluded from the mean and counted.
std::vector<SweepResult> run_ols_sweep(const ExperimentConfig& cfg, const Dataset& ds);

// Same sweep shape for the ℓ1-constrained solver; the statistic is the
// full-data excess loss relative to the full-data constrained optimum.
std::vector<SweepResult> run_lasso_sweep(const ExperimentConfig& cfg, const Dataset& ds);

// Low-rank approximation sweep; the statistic is the squared projection
// residual relative to ‖A‖_F², next to the spectrum-implied reference value.
std::vector<SweepResult> run_svd_sweep(const ExperimentConfig& cfg, const Dataset& ds);

// Gaussianization diagnostics per operator: quadratic-form tails against the
// Gaussian baseline, sketch leverage uniformity, subspace distortion, and the
// hat-matrix expectation deviation. Returns the tail reports and writes a
// text report when sink is given.
std::vector<TailReport> run_diagnostics(const ExperimentConfig& cfg, const Dataset& ds,
                                        std::ostream* sink = nullptr);

// Standalone SVG: log-scale mean error vs sketch size per operator with ±1
// stderr bands and the dashed reference curve. Deterministic bytes.
void emit_svg_plot(std::span<const SweepResult> results, std::ostream& out);

void write_meta(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out);

// Loads the dataset, runs cfg.mode, and writes results.csv / plot.svg /
// diagnostics.txt plus meta.txt under cfg.output_dir.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace lesskit
