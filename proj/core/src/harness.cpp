#include "lesskit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lesskit/estimators.hpp"
#include "lesskit/parallel.hpp"
#include "lesskit/rng.hpp"

namespace lesskit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

std::size_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t consumed = 0;
    const long long v = std::stoll(s, &consumed);
    if (consumed != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": expected a nonnegative integer, got '" + s + "'");
  }
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    if (consumed != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": expected a number, got '" + s + "'");
  }
}

OperatorSpec parse_operator(const std::string& token) {
  OperatorSpec op;
  op.label = token;
  const auto parts = split(token, ':');
  const std::string& name = parts[0];
  if (name == "gaussian")
    op.family = SketchFamily::Gaussian;
  else if (name == "less")
    op.family = SketchFamily::Less;
  else if (name == "less-uniform")
    op.family = SketchFamily::LessUniform;
  else if (name == "srht")
    op.family = SketchFamily::Srht;
  else if (name == "uniform-rows")
    op.family = SketchFamily::UniformRows;
  else
    throw ConfigError("operators: unknown family '" + name + "'");

  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& opt = parts[i];
    if (op.family != SketchFamily::Less && op.family != SketchFamily::LessUniform)
      throw ConfigError("operators: '" + name + "' takes no options");
    if (opt.rfind("k=", 0) != 0)
      throw ConfigError("operators: unknown option '" + opt + "'");
    const std::string val = opt.substr(2);
    if (val == "dense")
      op.dense_rows = true;
    else
      op.k = parse_count(val, "operators k");
  }
  return op;
}

}  // namespace

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::OlsSweep: return "sweep-ols";
    case RunMode::LassoSweep: return "sweep-lasso";
    case RunMode::SvdSweep: return "sweep-svd";
    case RunMode::Diagnostics: return "diagnose";
  }
  return "?";
}

ExperimentConfig parse_config_text(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  bool saw_dataset = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "mode") {
      if (value == "sweep-ols")
        cfg.mode = RunMode::OlsSweep;
      else if (value == "sweep-lasso")
        cfg.mode = RunMode::LassoSweep;
      else if (value == "sweep-svd")
        cfg.mode = RunMode::SvdSweep;
      else if (value == "diagnose")
        cfg.mode = RunMode::Diagnostics;
      else
        throw ConfigError("mode: unknown value '" + value + "'");
    } else if (key == "dataset") {
      cfg.dataset = value;
      saw_dataset = true;
    } else if (key == "operators") {
      cfg.operators.clear();
      for (const auto& tok : split(value, ','))
        if (!tok.empty()) cfg.operators.push_back(parse_operator(tok));
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (const auto& tok : split(value, ','))
        if (!tok.empty()) cfg.n_grid.push_back(parse_count(tok, "n_grid"));
    } else if (key == "trials") {
      cfg.trials = parse_count(value, "trials");
    } else if (key == "seed") {
      cfg.master_seed = static_cast<std::uint64_t>(parse_count(value, "seed"));
    } else if (key == "out") {
      cfg.output_dir = value;
    } else if (key == "standardize") {
      if (value == "true")
        cfg.standardize = true;
      else if (value == "false")
        cfg.standardize = false;
      else
        throw ConfigError("standardize: expected true or false");
    } else if (key == "leverage") {
      if (value == "exact")
        cfg.approx_leverage = false;
      else if (value == "approx")
        cfg.approx_leverage = true;
      else
        throw ConfigError("leverage: expected exact or approx");
    } else if (key == "lasso_radius") {
      cfg.lasso_radius = parse_real(value, "lasso_radius");
    } else if (key == "tol") {
      cfg.solver_tol = parse_real(value, "tol");
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (!saw_dataset) throw ConfigError("missing required key 'dataset'");
  if (cfg.operators.empty()) throw ConfigError("missing required key 'operators'");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config_text(in);
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset.rfind("synthetic:", 0) == 0) {
    const auto parts = split(cfg.dataset, ':');
    if (parts.size() < 5 || parts.size() > 6)
      throw ConfigError("dataset: expected synthetic:<low|high>:<N>:<d>:<noise>[:<seed>]");
    CoherenceLevel level;
    if (parts[1] == "low")
      level = CoherenceLevel::Low;
    else if (parts[1] == "high")
      level = CoherenceLevel::High;
    else
      throw ConfigError("dataset: coherence must be low or high");
    const std::size_t n = parse_count(parts[2], "dataset N");
    const std::size_t d = parse_count(parts[3], "dataset d");
    const double noise = parse_real(parts[4], "dataset noise");
    const std::uint64_t seed =
        parts.size() == 6 ? parse_count(parts[5], "dataset seed") : 12345;
    return gen_synthetic(n, d, level, noise, seed);
  }

  std::ifstream in(cfg.dataset);
  if (!in) throw IoError("cannot open dataset file '" + cfg.dataset + "'");
  Dataset ds = parse_libsvm(in);
  ds.name = std::filesystem::path(cfg.dataset).filename().string();
  if (cfg.standardize) standardize_columns(ds);
  return ds;
}

namespace {

std::vector<std::size_t> default_grid(std::size_t d) {
  // 8 log-spaced sketch sizes in [2d, 50d].
  std::vector<std::size_t> grid;
  const double lo = std::log(2.0 * static_cast<double>(d));
  const double hi = std::log(50.0 * static_cast<double>(d));
  for (int i = 0; i < 8; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / 7.0;
    const std::size_t n = static_cast<std::size_t>(std::lround(std::exp(t)));
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  return grid;
}

LeverageProfile profile_for(const ExperimentConfig& cfg, const RegressionProblem& problem) {
  if (!cfg.approx_leverage) return problem.leverage;
  return approx_leverage_scores(problem.a, 8, derive_seed(cfg.master_seed, 0x6C6576ULL));
}

struct CellStats {
  std::vector<double> values;
  std::size_t degenerate = 0;
};

SweepResult summarize(const OperatorSpec& op, std::size_t n, const CellStats& cell,
                      double formula) {
  SweepResult r;
  r.operator_name = op.label;
  r.n = n;
  r.trials = cell.values.size();
  r.degenerate_count = cell.degenerate;
  const MeanStderr ms = mean_and_stderr(cell.values);
  r.mean_norm_err = ms.mean;
  r.stderr_of_mean = ms.stderr_of_mean;
  r.variance_defined = ms.variance_defined;
  r.gaussian_formula = formula;
  return r;
}

// Shared sweep loop: one value per trial, NaN marking a degenerate trial.
template <typename TrialFn>
std::vector<SweepResult> sweep_cells(const ExperimentConfig& cfg,
                                     const TrialFn& trial_value,
                                     const std::function<double(std::size_t)>& formula) {
  std::vector<SweepResult> results;
  for (std::size_t oi = 0; oi < cfg.operators.size(); ++oi) {
    const OperatorSpec& op = cfg.operators[oi];
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
      const std::size_t n = cfg.n_grid[ni];
      std::vector<double> raw(cfg.trials);
      parallel_for(cfg.trials, [&](std::size_t t) {
        SketchSpec spec;
        spec.family = op.family;
        spec.n = n;
        spec.k = op.k;
        spec.dense_rows = op.dense_rows;
        spec.seed = derive_seed(cfg.master_seed, oi, ni, t);
        raw[t] = trial_value(spec);
      });
      CellStats cell;
      cell.values.reserve(cfg.trials);
      for (double v : raw) {
        if (std::isnan(v))
          ++cell.degenerate;
        else
          cell.values.push_back(v);
      }
      results.push_back(summarize(op, n, cell, formula(n)));
    }
  }
  return results;
}

constexpr double kDegenerate = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<SweepResult> run_ols_sweep(const ExperimentConfig& cfg, const Dataset& ds) {
  const RegressionProblem problem = RegressionProblem::from(ds.a, ds.b);
  const std::size_t d = problem.dim();
  if (ds.degenerate || problem.loss_star <= 1e-24 * problem.b.squared_norm())
    throw DegenerateDatasetError("run_ols_sweep: optimal loss is zero");

  ExperimentConfig run = cfg;
  if (run.n_grid.empty()) run.n_grid = default_grid(d);
  for (std::size_t n : run.n_grid)
    if (n < d + 2)
      throw ConfigError("n_grid: sketch sizes must be at least d + 2 for the error law");

  const LeverageProfile profile = profile_for(run, problem);
  return sweep_cells(
      run,
      [&](const SketchSpec& spec) -> double {
        try {
          const OlsSolveResult r = sketch_and_solve_ols(problem, spec, &profile);
          return r.degenerate_loss ? kDegenerate : r.normalized_error;
        } catch (const RankDeficientSketchError&) {
          return kDegenerate;
        }
      },
      [&](std::size_t n) { return ols_error_law(d, n); });
}

std::vector<SweepResult> run_lasso_sweep(const ExperimentConfig& cfg, const Dataset& ds) {
  if (!(cfg.lasso_radius > 0.0))
    throw ConfigError("lasso_radius must be positive in sweep-lasso mode");
  const RegressionProblem problem = RegressionProblem::from(ds.a, ds.b);
  const std::size_t d = problem.dim();

  ExperimentConfig run = cfg;
  if (run.n_grid.empty()) run.n_grid = default_grid(d);

  const DenseVector w_full =
      l1_constrained_lstsq(problem.a, problem.b, run.lasso_radius, run.solver_tol);
  const double loss_full = problem.loss(w_full);
  if (loss_full <= 1e-24 * problem.b.squared_norm())
    throw DegenerateDatasetError("run_lasso_sweep: constrained optimum has zero loss");

  const LeverageProfile profile = profile_for(run, problem);
  return sweep_cells(
      run,
      [&](const SketchSpec& spec) -> double {
        try {
          const SketchedPair pair = sketch_pair(problem.a, problem.b, spec, &profile);
          const DenseVector w =
              l1_constrained_lstsq(pair.sa, pair.sb, run.lasso_radius, run.solver_tol);
          return (problem.loss(w) - loss_full) / loss_full;
        } catch (const NoConvergenceError&) {
          return kDegenerate;
        }
      },
      [&](std::size_t n) {
        return n >= d + 2 ? ols_error_law(d, n) : 0.0;
      });
}

std::vector<SweepResult> run_svd_sweep(const ExperimentConfig& cfg, const Dataset& ds) {
  ExperimentConfig run = cfg;
  if (run.n_grid.empty()) run.n_grid = default_grid(1);  // small-n regime: [2, 50]

  double fro2 = 0.0;
  for (double x : ds.a.data()) fro2 += x * x;
  if (fro2 == 0.0) throw DegenerateDatasetError("run_svd_sweep: zero data matrix");

  // LESS sampling still targets the rows of A.
  const ThinQR qr = qr_thin(ds.a);
  const LeverageProfile exact = leverage_profile_from_qr(qr);
  const LeverageProfile profile =
      run.approx_leverage
          ? approx_leverage_scores(ds.a, 8, derive_seed(run.master_seed, 0x6C6576ULL))
          : exact;

  const double full_rank = statdim(ds.a, 0.0);
  const auto formula = [&](std::size_t n) {
    if (static_cast<double>(n) >= full_rank) return 0.0;
    return static_cast<double>(n) * statdim_inverse(ds.a, static_cast<double>(n)) / fro2;
  };

  return sweep_cells(
      run,
      [&](const SketchSpec& spec) -> double {
        const DenseMatrix sa = sketch_apply(spec, ds.a, &profile);
        return randomized_svd_error(ds.a, sa) / fro2;
      },
      formula);
}

std::vector<TailReport> run_diagnostics(const ExperimentConfig& cfg, const Dataset& ds,
                                        std::ostream* sink) {
  const RegressionProblem problem = RegressionProblem::from(ds.a, ds.b);
  const std::size_t d = problem.dim();

  ExperimentConfig run = cfg;
  if (run.n_grid.empty()) run.n_grid = {std::max(4 * d, d + 2)};
  const std::size_t n_diag = run.n_grid.front();
  if (n_diag <= d + 1)
    throw ConfigError("diagnose: first n_grid entry must exceed d + 1");
  const std::size_t hw_trials = std::max<std::size_t>(run.trials, 1000);

  const LeverageProfile profile = profile_for(run, problem);
  const DenseMatrix whitener = symmetric_inverse_sqrt(gram(problem.a));
  const DenseMatrix bmat = DenseMatrix::identity(d);

  std::vector<TailReport> reports;
  if (sink) *sink << "dataset " << ds.name << " rows " << ds.a.rows() << " cols " << d << "\n";

  for (std::size_t oi = 0; oi < run.operators.size(); ++oi) {
    const OperatorSpec& op = run.operators[oi];
    SketchSpec row_spec;
    row_spec.family = op.family;
    row_spec.n = 1;
    row_spec.k = op.k;
    row_spec.dense_rows = op.dense_rows;

    const auto row_sampler = [&](std::uint64_t s) {
      SketchSpec spec = row_spec;
      spec.seed = s;
      const DenseMatrix one = sketch_apply(spec, problem.a, &profile);
      return one.row_copy(0);
    };
    TailReport report = hw_tail_compare(row_sampler, whitener, bmat, hw_trials,
                                        derive_seed(run.master_seed, oi, 0));
    report.statistic_name = op.label;
    reports.push_back(report);

    // Per-seed sketch geometry at the first grid size.
    const std::size_t seeds = std::min<std::size_t>(run.trials, 100);
    std::vector<double> uniformity(seeds);
    std::vector<double> distortion(seeds);
    parallel_for(seeds, [&](std::size_t s) {
      SketchSpec spec = row_spec;
      spec.n = n_diag;
      spec.seed = derive_seed(run.master_seed, oi, 1, s);
      const DenseMatrix sa = sketch_apply(spec, problem.a, &profile);
      uniformity[s] = sketch_leverage_uniformity(sa);
      distortion[s] = subspace_distortion(sa, problem.a);
    });
    std::sort(uniformity.begin(), uniformity.end());
    std::sort(distortion.begin(), distortion.end());
    const std::size_t p95 = seeds - 1 - (seeds - 1) / 20;

    SketchSpec hat_spec = row_spec;
    hat_spec.n = n_diag;
    hat_spec.seed = 0;
    const double hat_dev = hat_matrix_expectation_check(
        problem, hat_spec, hw_trials, derive_seed(run.master_seed, oi, 2));

    if (sink) {
      *sink << "operator " << op.label << "\n";
      *sink << "  hw-quantiles";
      for (const auto& [level, value] : reports.back().quantiles)
        *sink << ' ' << level << ':' << value;
      *sink << "\n  hw-gaussian-baseline";
      for (const auto& [level, value] : reports.back().reference_quantiles)
        *sink << ' ' << level << ':' << value;
      *sink << "\n  leverage-uniformity-p95 " << uniformity[p95] << " (n=" << n_diag << ")";
      *sink << "\n  subspace-distortion-p95 " << distortion[p95] << " (n=" << n_diag << ")";
      *sink << "\n  hat-matrix-deviation " << hat_dev << " (n=" << n_diag
            << ", trials=" << hw_trials << ")\n";
    }
  }
  return reports;
}

void write_meta(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out) {
  out << "version = lesskit 0.1.0\n";
  out << "mode = " << mode_name(cfg.mode) << "\n";
  out << "dataset = " << cfg.dataset << "\n";
  out << "dataset_name = " << ds.name << "\n";
  out << "rows = " << ds.a.rows() << "\n";
  out << "cols = " << ds.a.cols() << "\n";
  out << "operators =";
  for (const auto& op : cfg.operators) out << ' ' << op.label;
  out << "\n";
  out << "n_grid =";
  for (std::size_t n : cfg.n_grid) out << ' ' << n;
  out << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "seed = " << cfg.master_seed << "\n";
  out << "standardize = " << (cfg.standardize ? "true" : "false") << "\n";
  out << "leverage = " << (cfg.approx_leverage ? "approx" : "exact") << "\n";
  if (cfg.mode == RunMode::LassoSweep) {
    out << "lasso_radius = " << cfg.lasso_radius << "\n";
    out << "tol = " << cfg.solver_tol << "\n";
  }
}

void run_experiment(const ExperimentConfig& cfg) {
  if (cfg.output_dir.empty()) throw ConfigError("missing required key 'out'");
  Dataset ds = load_dataset(cfg);

  ExperimentConfig run = cfg;
  if (run.n_grid.empty()) {
    const std::size_t d = ds.a.cols();
    run.n_grid = cfg.mode == RunMode::Diagnostics
                     ? std::vector<std::size_t>{std::max(4 * d, d + 2)}
                     : default_grid(d);
  }

  std::filesystem::create_directories(run.output_dir);
  const auto open = [&](const char* name) {
    std::ofstream f(std::filesystem::path(run.output_dir) / name, std::ios::binary);
    if (!f) throw IoError(std::string("cannot open output file ") + name);
    return f;
  };

  if (run.mode == RunMode::Diagnostics) {
    auto diag = open("diagnostics.txt");
    run_diagnostics(run, ds, &diag);
  } else {
    std::vector<SweepResult> results;
    switch (run.mode) {
      case RunMode::OlsSweep: results = run_ols_sweep(run, ds); break;
      case RunMode::LassoSweep: results = run_lasso_sweep(run, ds); break;
      case RunMode::SvdSweep: results = run_svd_sweep(run, ds); break;
      case RunMode::Diagnostics: break;
    }
    auto csv = open("results.csv");
    write_csv(results, csv);
    auto svg = open("plot.svg");
    emit_svg_plot(results, svg);
  }

  auto meta = open("meta.txt");
  write_meta(run, ds, meta);
}

}  // namespace lesskit
