#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lesskit/data_io.hpp"
#include "lesskit/leverage.hpp"
#include "lesskit/rng.hpp"

using namespace lesskit;

TEST_CASE("parse_libsvm: format definition") {
  std::istringstream in("1.5 1:2 3:-1\n");
  const Dataset ds = parse_libsvm(in);
  CHECK(ds.a.rows() == 1);
  CHECK(ds.a.cols() == 3);
  CHECK(ds.b[0] == 1.5);
  CHECK(ds.a(0, 0) == 2.0);
  CHECK(ds.a(0, 1) == 0.0);
  CHECK(ds.a(0, 2) == -1.0);
  CHECK(ds.source == DatasetSource::File);
}

TEST_CASE("parse_libsvm: all-sparse row with an expected dimension") {
  std::istringstream in("2.0\n");
  const Dataset ds = parse_libsvm(in, 2);
  CHECK(ds.a.rows() == 1);
  CHECK(ds.a.cols() == 2);
  CHECK(ds.b[0] == 2.0);
  CHECK(ds.a(0, 0) == 0.0);
  CHECK(ds.a(0, 1) == 0.0);
}

TEST_CASE("parse_libsvm: blank lines are skipped") {
  std::istringstream in("\n1.0 1:1\n\n2.0 2:1\n");
  const Dataset ds = parse_libsvm(in);
  CHECK(ds.a.rows() == 2);
  CHECK(ds.a.cols() == 2);
}

TEST_CASE("parse_libsvm: errors carry line numbers") {
  SUBCASE("malformed label") {
    std::istringstream in("1.0 1:1\nbogus 1:1\n");
    CHECK_THROWS_WITH_AS(parse_libsvm(in), doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("malformed pair") {
    std::istringstream in("1.0 oops\n");
    CHECK_THROWS_AS(parse_libsvm(in), ParseError);
  }
  SUBCASE("nonpositive index") {
    std::istringstream in("1.0 0:2\n");
    CHECK_THROWS_AS(parse_libsvm(in), IndexError);
  }
  SUBCASE("nonincreasing index") {
    std::istringstream in("1.0 2:1 2:3\n");
    CHECK_THROWS_AS(parse_libsvm(in), IndexError);
  }
  SUBCASE("decreasing index") {
    std::istringstream in("1.0 3:1 2:3\n");
    CHECK_THROWS_AS(parse_libsvm(in), IndexError);
  }
  SUBCASE("index beyond the expected dimension") {
    std::istringstream in("1.0 5:1\n");
    CHECK_THROWS_AS(parse_libsvm(in, 3), IndexError);
  }
  SUBCASE("non-finite value") {
    std::istringstream in("1.0 1:inf\n");
    CHECK_THROWS_AS(parse_libsvm(in), ParseError);
  }
}

TEST_CASE("libsvm round trip") {
  SplitMix64 rng(7);
  Dataset ds;
  ds.a = DenseMatrix(12, 4);
  ds.b = DenseVector(12);
  for (std::size_t i = 0; i < 12; ++i) {
    ds.b[i] = rng.next_normal();
    for (std::size_t j = 0; j < 4; ++j)
      ds.a(i, j) = rng.next_unit() < 0.3 ? 0.0 : rng.next_normal();
  }
  std::ostringstream out;
  write_libsvm(ds, out);
  std::istringstream in(out.str());
  const Dataset back = parse_libsvm(in, 4);
  REQUIRE(back.a.rows() == 12);
  REQUIRE(back.a.cols() == 4);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(std::abs(back.b[i] - ds.b[i]) <= 1e-12);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(back.a(i, j) - ds.a(i, j)) <= 1e-12);
  }
}

TEST_CASE("gen_synthetic: low coherence stays near uniform leverage") {
  const std::size_t d = 5, n_rows = 100 * d;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = gen_synthetic(n_rows, d, CoherenceLevel::Low, 1.0, seed);
    const LeverageProfile p = exact_leverage_scores(ds.a);
    CHECK(p.coherence <= 5.0 * static_cast<double>(d) / static_cast<double>(n_rows));
  }
}

TEST_CASE("gen_synthetic: high coherence reaches 0.9") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = gen_synthetic(400, 8, CoherenceLevel::High, 1.0, seed);
    const LeverageProfile p = exact_leverage_scores(ds.a);
    CHECK(p.coherence >= 0.9);
  }
}

TEST_CASE("gen_synthetic: zero noise flags a degenerate dataset") {
  const Dataset ds = gen_synthetic(50, 3, CoherenceLevel::Low, 0.0, 1);
  CHECK(ds.degenerate);
  const Dataset noisy = gen_synthetic(50, 3, CoherenceLevel::Low, 0.5, 1);
  CHECK(!noisy.degenerate);
}

TEST_CASE("gen_synthetic is deterministic per seed") {
  const Dataset a = gen_synthetic(40, 4, CoherenceLevel::Low, 1.0, 9);
  const Dataset b = gen_synthetic(40, 4, CoherenceLevel::Low, 1.0, 9);
  CHECK(a.a.data().size() == b.a.data().size());
  for (std::size_t i = 0; i < a.a.data().size(); ++i)
    CHECK(a.a.data()[i] == b.a.data()[i]);
  for (std::size_t i = 0; i < a.b.len(); ++i) CHECK(a.b[i] == b.b[i]);
}

TEST_CASE("standardize_columns centers and scales, skipping constants") {
  Dataset ds;
  ds.a = DenseMatrix(50, 3);
  ds.b = DenseVector(50);
  SplitMix64 rng(13);
  for (std::size_t i = 0; i < 50; ++i) {
    ds.a(i, 0) = 5.0 + 2.0 * rng.next_normal();
    ds.a(i, 1) = 1.0;  // constant
    ds.a(i, 2) = -3.0 * rng.next_normal();
  }
  standardize_columns(ds);
  for (std::size_t j : {std::size_t{0}, std::size_t{2}}) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < 50; ++i) mean += ds.a(i, j);
    mean /= 50.0;
    for (std::size_t i = 0; i < 50; ++i) var += (ds.a(i, j) - mean) * (ds.a(i, j) - mean);
    var /= 49.0;
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < 50; ++i) CHECK(ds.a(i, 1) == 1.0);
}

TEST_CASE("write_csv: header-only file for an empty list") {
  std::ostringstream out;
  write_csv({}, out);
  CHECK(out.str() == std::string(kCsvHeader) + "\n");
}

TEST_CASE("write_csv: one result, two lines, pinned order and digits") {
  SweepResult r;
  r.operator_name = "gaussian";
  r.n = 40;
  r.trials = 2000;
  r.mean_norm_err = 1.0 / 3.0;
  r.stderr_of_mean = 0.0123456789012;
  r.gaussian_formula = 10.0 / 29.0;
  r.degenerate_count = 1;
  std::ostringstream out;
  write_csv(std::vector<SweepResult>{r}, out);
  const std::string text = out.str();
  CHECK(text ==
        "operator,n,trials,mean_norm_err,stderr,gaussian_formula,degenerate_count\n"
        "gaussian,40,2000,0.3333333333,0.0123456789,0.3448275862,1\n");
}

TEST_CASE("write_csv: deterministic ordering by operator then n") {
  std::vector<SweepResult> rs(4);
  rs[0] = {"srht", 80, 10, 0.1, 0.01, 0.2, 0};
  rs[1] = {"gaussian", 80, 10, 0.1, 0.01, 0.2, 0};
  rs[2] = {"srht", 25, 10, 0.1, 0.01, 0.2, 0};
  rs[3] = {"gaussian", 25, 10, 0.1, 0.01, 0.2, 0};
  std::ostringstream a, b;
  write_csv(rs, a);
  std::reverse(rs.begin(), rs.end());
  write_csv(rs, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("gaussian,25") < a.str().find("gaussian,80"));
  CHECK(a.str().find("gaussian,80") < a.str().find("srht,25"));
}

TEST_CASE("csv write-then-parse round trip") {
  std::vector<SweepResult> rs(2);
  rs[0] = {"less", 25, 500, 0.71428571428, 0.02, 10.0 / 14.0, 3};
  rs[1] = {"less", 40, 500, 0.3448, 0.011, 10.0 / 29.0, 0};
  std::ostringstream out;
  write_csv(rs, out);

  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == kCsvHeader);
  for (const auto& expected : rs) {
    std::string line;
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string op, n, trials, mean, se, formula, degenerate;
    std::getline(row, op, ',');
    std::getline(row, n, ',');
    std::getline(row, trials, ',');
    std::getline(row, mean, ',');
    std::getline(row, se, ',');
    std::getline(row, formula, ',');
    std::getline(row, degenerate, ',');
    CHECK(op == expected.operator_name);
    CHECK(std::stoul(n) == expected.n);
    CHECK(std::stoul(trials) == expected.trials);
    CHECK(std::stod(mean) == doctest::Approx(expected.mean_norm_err).epsilon(1e-9));
    CHECK(std::stod(se) == doctest::Approx(expected.stderr_of_mean).epsilon(1e-9));
    CHECK(std::stod(formula) == doctest::Approx(expected.gaussian_formula).epsilon(1e-9));
    CHECK(std::stoul(degenerate) == expected.degenerate_count);
  }
}
