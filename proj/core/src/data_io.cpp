#include "lesskit/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lesskit/leverage.hpp"
#include "lesskit/rng.hpp"

namespace lesskit {

const char* const kCsvHeader =
    "operator,n,trials,mean_norm_err,stderr,gaussian_formula,degenerate_count";

namespace {

double parse_double(const std::string& tok, std::size_t line) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &consumed);
  } catch (const std::exception&) {
    throw ParseError(line, "malformed number '" + tok + "'");
  }
  if (consumed != tok.size()) throw ParseError(line, "trailing characters in '" + tok + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + tok + "'");
  return v;
}

std::string format_g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::vector<double> labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    labels.push_back(parse_double(tok, line_no));
    rows.emplace_back();
    std::size_t prev_index = 0;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError(line_no, "expected index:value, got '" + tok + "'");
      long idx = 0;
      try {
        std::size_t consumed = 0;
        idx = std::stol(tok.substr(0, colon), &consumed);
        if (consumed != colon) throw ParseError(line_no, "malformed index in '" + tok + "'");
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError(line_no, "malformed index in '" + tok + "'");
      }
      if (idx <= 0) throw IndexError(line_no, "nonpositive feature index");
      const std::size_t index = static_cast<std::size_t>(idx);
      if (index <= prev_index)
        throw IndexError(line_no, "feature indices must be strictly increasing");
      if (expected_dim && index > *expected_dim)
        throw IndexError(line_no, "feature index exceeds the expected dimension");
      prev_index = index;
      max_index = std::max(max_index, index);
      rows.back().emplace_back(index - 1, parse_double(tok.substr(colon + 1), line_no));
    }
  }

  const std::size_t dim = expected_dim.value_or(max_index);
  if (dim == 0) throw ParseError(line_no, "no features found and no expected dimension");
  if (rows.empty()) throw ParseError(line_no, "no data rows");

  Dataset ds;
  ds.source = DatasetSource::File;
  ds.a = DenseMatrix(rows.size(), dim);
  ds.b = DenseVector(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.b[i] = labels[i];
    for (const auto& [j, v] : rows[i]) ds.a(i, j) = v;
  }
  return ds;
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[48];
  for (std::size_t i = 0; i < ds.a.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ds.b[i]);
    out << buf;
    for (std::size_t j = 0; j < ds.a.cols(); ++j) {
      const double v = ds.a(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof(buf), " %zu:%.17g", j + 1, v);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write_libsvm: output stream failed");
}

Dataset gen_synthetic(std::size_t n_rows, std::size_t d, CoherenceLevel coherence,
                      double noise, std::uint64_t seed) {
  if (n_rows < d || d == 0)
    throw DimensionMismatchError("gen_synthetic: need n_rows >= d >= 1");

  Dataset ds;
  ds.source = DatasetSource::Synthetic;
  ds.a = DenseMatrix(n_rows, d);
  SplitMix64 entry_rng(derive_seed(seed, 0));
  for (std::size_t i = 0; i < n_rows; ++i)
    for (std::size_t j = 0; j < d; ++j) ds.a(i, j) = entry_rng.next_normal();

  if (coherence == CoherenceLevel::High) {
    const std::size_t planted = (d + 1) / 2;
    // A heavy row of squared norm c²N against ~N unit-scale rows has
    // leverage about c²/(1 + c²); c = 3 targets 0.9 and the check below
    // escalates if the random bulk pushes it lower.
    double magnitude = 3.0 * std::sqrt(static_cast<double>(n_rows));
    for (int attempt = 0; attempt < 10; ++attempt) {
      for (std::size_t t = 0; t < planted; ++t) {
        for (std::size_t j = 0; j < d; ++j) ds.a(t, j) = 0.0;
        ds.a(t, t) = magnitude;
      }
      if (exact_leverage_scores(ds.a).coherence >= 0.9) break;
      magnitude *= 2.0;
    }
    if (exact_leverage_scores(ds.a).coherence < 0.9)
      throw Error("gen_synthetic: failed to reach coherence 0.9");
  }

  SplitMix64 w_rng(derive_seed(seed, 1));
  DenseVector w0(d);
  for (std::size_t j = 0; j < d; ++j) w0[j] = w_rng.next_normal();
  ds.b = matvec(ds.a, w0);
  SplitMix64 noise_rng(derive_seed(seed, 2));
  for (std::size_t i = 0; i < n_rows; ++i) ds.b[i] += noise * noise_rng.next_normal();

  ds.degenerate = noise == 0.0;
  const char* level = coherence == CoherenceLevel::High ? "high" : "low";
  ds.name = "synthetic-" + std::string(level) + "-" + std::to_string(n_rows) + "x" +
            std::to_string(d);
  return ds;
}

void standardize_columns(Dataset& ds) {
  const std::size_t n = ds.a.rows();
  for (std::size_t j = 0; j < ds.a.cols(); ++j) {
    auto col = ds.a.col(j);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n > 1 ? n - 1 : 1);
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * (1.0 + std::abs(mean))) continue;  // constant column
    for (double& v : col) v = (v - mean) / sd;
  }
}

void write_csv(std::span<const SweepResult> results, std::ostream& out) {
  std::vector<const SweepResult*> order;
  order.reserve(results.size());
  for (const SweepResult& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const SweepResult* x, const SweepResult* y) {
    if (x->operator_name != y->operator_name) return x->operator_name < y->operator_name;
    return x->n < y->n;
  });

  out << kCsvHeader << '\n';
  for (const SweepResult* r : order) {
    out << r->operator_name << ',' << r->n << ',' << r->trials << ','
        << format_g10(r->mean_norm_err) << ',' << format_g10(r->stderr_of_mean) << ','
        << format_g10(r->gaussian_formula) << ',' << r->degenerate_count << '\n';
  }
  if (!out) throw IoError("write_csv: output stream failed");
}

}  // namespace lesskit
