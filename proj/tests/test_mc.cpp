#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "whitelasso/csv.hpp"
#include "whitelasso/mc.hpp"

using namespace whitelasso;
using Type = EstimatorKind::Type;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.n_values = {40, 60};
  sc.p_values = {20};
  sc.rho_values = {0.0, 0.9};
  sc.estimators = {Type::Lasso, Type::GlsKnownRho, Type::Fgls};
  sc.replications = 4;
  sc.base_seed = 11;
  sc.tuning.grid_length = 8;
  return sc;
}

std::string results_csv(const ScenarioResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.rows);
  return out.str();
}

}  // namespace

TEST_CASE("percentile examples") {
  CHECK(percentile({5.0}, 0.0) == 5.0);
  CHECK(percentile({5.0}, 0.7) == 5.0);
  CHECK(percentile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
  std::vector<double> hundred;
  for (int i = 100; i >= 1; --i) hundred.push_back(i);
  CHECK(percentile(hundred, 0.975) == doctest::Approx(97.525));
  CHECK(percentile(hundred, 0.0) == 1.0);
  CHECK(percentile(hundred, 1.0) == 100.0);
  CHECK_THROWS_AS(percentile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(percentile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("a single replication summarizes to itself") {
  Scenario sc = small_scenario();
  sc.n_values = {40};
  sc.rho_values = {0.5};
  sc.replications = 1;
  const auto res = run_scenario(sc);
  REQUIRE(res.rows.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    const auto& row = res.rows[e];
    const auto& rec = res.records[e];
    REQUIRE(rec.ok);
    CHECK(row.reps == 1);
    CHECK(row.mean_l1 == rec.errors.l1);
    CHECK(row.mean_l2_scaled == rec.errors.l2_scaled);
    CHECK(row.ci_lo_l2 == rec.errors.l2_scaled);
    CHECK(row.ci_hi_l2 == rec.errors.l2_scaled);
    CHECK(row.sign_rate == (rec.sign ? 1.0 : 0.0));
  }
}

TEST_CASE("zero signal with an all-zero fit is always sign-recovered") {
  Scenario sc = small_scenario();
  sc.dgp.s = 0;
  sc.tuning.mode = TuningMode::Fixed;
  sc.tuning.lambda = 1e6;
  const auto res = run_scenario(sc);
  for (const auto& row : res.rows) {
    CHECK(row.sign_rate == 1.0);
    CHECK(row.mean_l1 == 0.0);
  }
}

TEST_CASE("rows follow the grid product in estimator, p, rho, n order") {
  Scenario sc = small_scenario();
  sc.replications = 2;
  const auto res = run_scenario(sc);
  REQUIRE(res.rows.size() == 3 * 2 * 1 * 2);
  CHECK(res.records.size() == res.rows.size() * 2);
  std::size_t k = 0;
  for (auto e : sc.estimators)
    for (int p : sc.p_values)
      for (double rho : sc.rho_values)
        for (int n : sc.n_values) {
          const auto& c = res.rows[k++].cell;
          CHECK(c.estimator == e);
          CHECK(c.p == p);
          CHECK(c.rho == rho);
          CHECK(c.n == n);
        }
}

TEST_CASE("summaries agree with the replication records") {
  const auto res = run_scenario(small_scenario());
  std::ostringstream dump;
  write_reps_csv(dump, res.records);
  std::istringstream in(dump.str());
  const auto table = read_csv(in);
  CHECK(table.header.size() == 10);
  const auto l1 = table.numeric("l1");
  const auto l2 = table.numeric("l2_scaled");
  const auto sign = table.numeric("sign");
  const auto rho_hat = table.numeric("rho_hat");
  const auto rho = table.numeric("rho");
  const int reps = 4;
  REQUIRE(table.rows.size() == res.rows.size() * reps);
  for (std::size_t r = 0; r < res.rows.size(); ++r) {
    const auto& row = res.rows[r];
    double s1 = 0, s2 = 0, ss = 0, sr = 0, se = 0;
    std::vector<double> band;
    for (int k = 0; k < reps; ++k) {
      const std::size_t i = r * reps + static_cast<std::size_t>(k);
      CHECK(table.rows[i][0] == estimator_name(row.cell.estimator));
      s1 += l1[i];
      s2 += l2[i];
      ss += sign[i];
      sr += rho_hat[i];
      se += std::abs(rho_hat[i] - rho[i]);
      band.push_back(l2[i]);
    }
    CHECK(std::abs(row.mean_l1 - s1 / reps) <= 1e-12 * std::max(1.0, row.mean_l1));
    CHECK(std::abs(row.mean_l2_scaled - s2 / reps) <= 1e-12);
    CHECK(row.sign_rate == ss / reps);
    CHECK(std::abs(row.ci_lo_l2 - percentile(band, 0.025)) <= 1e-12);
    CHECK(std::abs(row.ci_hi_l2 - percentile(band, 0.975)) <= 1e-12);
    CHECK(row.ci_lo_l2 <= row.ci_hi_l2);
    CHECK(row.sign_rate >= 0.0);
    CHECK(row.sign_rate <= 1.0);
    if (row.cell.estimator == Type::Fgls) {
      CHECK(std::abs(row.mean_rho_hat - sr / reps) <= 1e-12);
      CHECK(std::abs(row.mean_abs_rho_err - se / reps) <= 1e-12);
    } else {
      CHECK(std::isnan(row.mean_rho_hat));
      CHECK(std::isnan(row.mean_abs_rho_err));
    }
  }
}

TEST_CASE("lasso and gls with rho zero give identical records") {
  const auto res = run_scenario(small_scenario());
  for (const auto& a : res.records) {
    if (a.cell.estimator != Type::Lasso || a.cell.rho != 0.0) continue;
    for (const auto& b : res.records) {
      if (b.cell.estimator != Type::GlsKnownRho || b.cell.rho != 0.0 || b.cell.n != a.cell.n || b.rep != a.rep)
        continue;
      CHECK(a.errors.l1 == b.errors.l1);
      CHECK(a.errors.l2 == b.errors.l2);
      CHECK(a.sign == b.sign);
      CHECK(a.lambda == b.lambda);
    }
  }
  Scenario sc = small_scenario();
  const Cell lasso{Type::Lasso, 40, 20, 0.0}, gls{Type::GlsKnownRho, 40, 20, 0.0};
  const auto a = run_replication(lasso, sc, 123);
  const auto b = run_replication(gls, sc, 123);
  CHECK(a.errors.l2 == b.errors.l2);
  const auto again = run_replication(lasso, sc, 123);
  CHECK(a.errors.l2 == again.errors.l2);
  CHECK(a.lambda == again.lambda);
}

TEST_CASE("scenario results do not depend on the thread count") {
  Scenario sc = small_scenario();
  sc.threads = 1;
  const auto one = run_scenario(sc);
  const std::string base = results_csv(one);
  for (int t : {2, 4, 8}) {
    sc.threads = t;
    CHECK(results_csv(run_scenario(sc)) == base);
  }
  sc.common_random_numbers = false;
  sc.threads = 1;
  const std::string ind = results_csv(run_scenario(sc));
  sc.threads = 5;
  CHECK(results_csv(run_scenario(sc)) == ind);
  CHECK(ind != base);
}

TEST_CASE("progress reports every cell once") {
  Scenario sc = small_scenario();
  sc.replications = 2;
  sc.threads = 3;
  std::vector<int> seen;
  run_scenario(sc, [&](int done, int total) {
    CHECK(total == 4);
    seen.push_back(done);
  });
  CHECK(seen == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("independent streams do not collide") {
  std::set<std::uint64_t> seeds;
  std::size_t count = 0;
  for (int n : {50, 100, 150})
    for (int p : {128, 256, 512})
      for (int ri = 0; ri < 4; ++ri)
        for (int e = 0; e < 3; ++e)
          for (int rep = 0; rep < 50; ++rep) {
            seeds.insert(independent_seed(1, n, p, ri, e, rep));
            ++count;
          }
  CHECK(seeds.size() == count);
  std::set<std::uint64_t> shared;
  for (int n : {50, 100})
    for (int rep = 0; rep < 500; ++rep) shared.insert(replication_seed(1, n, 128, rep));
  CHECK(shared.size() == 1000);
  CHECK(replication_seed(1, 50, 128, 0) != replication_seed(2, 50, 128, 0));
}

TEST_CASE("failed replications are excluded from summaries") {
  const Cell cell{Type::Fgls, 50, 10, 0.5};
  std::vector<ReplicationRecord> recs(3);
  for (int i = 0; i < 3; ++i) {
    recs[i].cell = cell;
    recs[i].rep = i;
    recs[i].ok = true;
    recs[i].errors.l2_scaled = i + 1.0;
    recs[i].errors.l1 = 2.0 * (i + 1);
    recs[i].rho_hat = 0.4;
  }
  recs[2].ok = false;
  recs[2].error = "boom";
  const auto s = summarize_cell(cell, recs);
  CHECK(s.reps == 2);
  CHECK(s.mean_l2_scaled == doctest::Approx(1.5));
  CHECK(s.mean_l1 == doctest::Approx(3.0));
  CHECK(s.mean_abs_rho_err == doctest::Approx(0.1));

  for (auto& r : recs) r.ok = false;
  const auto none = summarize_cell(cell, recs);
  CHECK(none.reps == 0);
  CHECK(std::isnan(none.mean_l2_scaled));

  std::ostringstream out;
  write_reps_csv(out, recs);
  CHECK(out.str() == std::string(kRepsHeader) + "\n");
}

TEST_CASE("scenario validation") {
  Scenario sc = small_scenario();
  CHECK_NOTHROW(sc.validate());
  auto bad = sc;
  bad.n_values.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sc;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sc;
  bad.rho_values = {0.5, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sc;
  bad.dgp.s = 21;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sc;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("results csv header and formatting") {
  CellSummary s;
  s.cell = Cell{Type::GlsKnownRho, 100, 128, 0.9};
  s.mean_l1 = 0.1;
  s.mean_l2_scaled = 1.0 / 3.0;
  s.mean_rho_hat = std::nan("");
  s.mean_abs_rho_err = std::nan("");
  s.reps = 200;
  std::ostringstream out;
  write_results_csv(out, {s});
  std::istringstream in(out.str());
  const auto t = read_csv(in);
  CHECK(out.str().rfind(std::string(kResultsHeader) + "\n", 0) == 0);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "gls");
  CHECK(t.rows[0][3] == "0.9");
  CHECK(t.numeric("mean_l2_scaled")[0] == 1.0 / 3.0);
  CHECK(t.rows[0][10] == "NA");
  CHECK(t.rows[0][12] == "200");
}

TEST_CASE("csv number round trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::nan("")) == "NA");
  CHECK(std::isnan(parse_double("NA")));
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("csv reader") {
  std::istringstream in("a,b\r\n1,2\n\n3,NA\n");
  const auto t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.column("b") == 1);
  CHECK(t.column("z") == -1);
  CHECK(t.numeric("a") == std::vector<double>{1, 3});
  CHECK(std::isnan(t.numeric("b")[1]));
  CHECK_THROWS_AS(t.numeric("z"), std::invalid_argument);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), std::invalid_argument);
  CHECK_THROWS(read_csv_file("/nonexistent/file.csv"));
}
