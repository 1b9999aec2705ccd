#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "lesskit/matrix.hpp"

namespace lesskit {

enum class DatasetSource { File, Synthetic };
enum class CoherenceLevel { Low, High };

struct Dataset {
  DenseMatrix a;
  DenseVector b;
  std::string name;
  DatasetSource source = DatasetSource::Synthetic;
  bool degenerate = false;  // responses lie in the column span, L(w*) = 0
};

// Parses "<label> <index>:<value> ..." lines with 1-based strictly increasing
// indices. Absent indices are zeros; the dimension is expected_dim when given
// (indices beyond it are IndexError), otherwise the largest index seen.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim = {});

// Text form of the dataset in the same format, zeros omitted.
void write_libsvm(const Dataset& ds, std::ostream& out);

// Low: i.i.d. standard normal rows. High: normal rows plus ⌈d/2⌉ heavy
// axis-aligned rows scaled until the max leverage score reaches 0.9 (checked
// at generation). Responses are A·w₀ + noise·ξ for a seed-fixed w₀.
Dataset gen_synthetic(std::size_t n_rows, std::size_t d, CoherenceLevel coherence,
                      double noise, std::uint64_t seed);

// Centers and scales every non-constant column to zero mean and unit
// variance; constant columns are left untouched.
void standardize_columns(Dataset& ds);

// Monte Carlo summary of one (operator, sketch size) sweep cell.
struct SweepResult {
  std::string operator_name;
  std::size_t n = 0;
  std::size_t trials = 0;           // trials included in the statistics
  double mean_norm_err = 0.0;
  double stderr_of_mean = 0.0;
  double gaussian_formula = 0.0;    // d/(n−d−1) reference (mode-specific)
  std::size_t degenerate_count = 0; // redrawn-out or otherwise excluded trials
  bool variance_defined = true;     // false when fewer than 2 trials
};

// Deterministic CSV: fixed header, 10 significant digits, rows ordered by
// operator name then sketch size.
void write_csv(std::span<const SweepResult> results, std::ostream& out);

extern const char* const kCsvHeader;

}  // namespace lesskit
