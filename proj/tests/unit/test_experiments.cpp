#include "doctest.h"

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

#include "shocklab/errors.hpp"
#include "shocklab/experiments.hpp"
#include "shocklab/stats.hpp"

using namespace shocklab;

namespace {

ExperimentConfig small(Scenario sc) {
  ExperimentConfig c;
  c.scenario = sc;
  c.alpha = sc == Scenario::F2F2 ? 1.0 : 0.5;
  c.beta_param = sc == Scenario::F2F2 ? 1.0 : 0.0;
  c.t_list = {40, 80};
  c.samples = 200;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("configuration") {
  SUBCASE("round trip through JSON") {
    ExperimentConfig c = small(Scenario::F2F1);
    c.gamma = {0.1, 0.5};
    c.drop_minus = true;
    c.output = "x.json";
    const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
    CHECK(d.to_json() == c.to_json());
    CHECK(d.scenario == Scenario::F2F1);
    CHECK(d.gamma.size() == 2);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"samples": 500, "bogus": 1})"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"samples": 99})"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"t_list": [100, 50]})"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"alpha": "half"})"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_json("[1, 2]"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ParameterError);
    CHECK_NOTHROW(ExperimentConfig::from_json("{}"));
  }
}

TEST_CASE("parallel harness") {
  std::vector<int> out(1000, 0);
  parallel_for(out.size(), 3, [&](std::size_t k) { out[k] = static_cast<int>(k * k % 17); });
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == static_cast<int>(k * k % 17));
  // the lowest failing index wins
  std::atomic<int> ran{0};
  try {
    parallel_for(200, 4, [&](std::size_t k) {
      ++ran;
      if (k == 37 || k == 150) throw std::runtime_error("fail " + std::to_string(k));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 37");
  }
  CHECK(resolve_threads(0) >= 1);
  CHECK(resolve_threads(3) == 3);
  std::set<std::uint64_t> seeds;
  for (std::size_t ti = 0; ti < 3; ++ti)
    for (std::size_t k = 0; k < 300; ++k) seeds.insert(sample_seed(9, ti, k));
  CHECK(seeds.size() == 900);
}

TEST_CASE("product law report") {
  SUBCASE("bytes do not depend on the thread count") {
    ExperimentConfig c = small(Scenario::F2F2);
    c.threads = 1;
    const auto a = run_product_law(c);
    c.threads = 3;
    const auto b = run_product_law(c);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(b.to_json() == run_product_law(c).to_json());
    CHECK(a.rows.size() == 2);
    CHECK(a.rows[1].dkw95 == doctest::Approx(dkw_epsilon(200, 0.95)));
  }
  SUBCASE("removing the minus half leaves the single first factor") {
    ExperimentConfig c = small(Scenario::F1F1);
    c.t_list = {150};
    c.samples = 1500;
    c.drop_minus = true;
    const auto r = run_product_law(c);
    const auto& s = r.rescaled[0];
    const ShockLaw L = config_law(c);
    const double ks_single = ks_distance(EmpiricalCDF(s), [&](double x) { return predicted_side_cdf(L, 1, 0, x); });
    const double ks_product = ks_distance(EmpiricalCDF(s), [&](double x) { return predicted_product_cdf(L, 0, x); });
    CHECK(r.rows[0].ks == doctest::Approx(ks_single));
    CHECK(ks_single < r.rows[0].dkw95 + 0.06);
    CHECK(ks_single < ks_product);
    CHECK(r.rows[0].correlation == 0.0);
  }
  SUBCASE("comparison table") {
    const auto r = run_product_law(small(Scenario::F1F1));
    const std::string csv = r.cdf_csv(1, {-2.0, 0.0, 2.0});
    CHECK(csv.rfind("s,empirical,model,gap\n", 0) == 0);
    CHECK_THROWS_AS(r.cdf_csv(5, {0.0}), ParameterError);
  }
}

TEST_CASE("F2F1 start segment sits in the rate-one region") {
  const RegionSpec r = scenario_region(Scenario::F2F1, 0.5);
  CHECK(r.rate(-3, 0) == 1.0);
  CHECK(r.rate(0, 0) == 0.5);
  CHECK(r.rate(4, -2) == 0.5);
  CHECK(r.rate(4, 1) == 1.0);
  CHECK(scenario_region(Scenario::F1F1, 0.5).rate(-3, 0) == 0.5);
  CHECK(scenario_region(Scenario::F2F2, 1.0).rate(-3, -3) == 1.0);
}

TEST_CASE("slow decorrelation report") {
  ExperimentConfig c = small(Scenario::F1F1);
  const auto huge = run_slow_decorrelation(c, 1e6);
  for (const auto& row : huge.rows) CHECK(row.exceed_fraction == 0.0);
  const auto r = run_slow_decorrelation(c, 3.0);
  CHECK(r.rows[0].increment == static_cast<Index>(std::ceil(std::pow(40.0, 0.6))));
  CHECK(r.to_json() == run_slow_decorrelation(c, 3.0).to_json());
  CHECK_THROWS_AS(run_slow_decorrelation(c, 0.0), ParameterError);
  // an increment of nearly t pushes E+ out of the quadrant for eta0 < 1
  c.nu = 0.99;
  CHECK_THROWS(run_slow_decorrelation(c, 3.0));
}

TEST_CASE("no-crossing report") {
  ExperimentConfig c = small(Scenario::F1F1);
  SUBCASE("a probe at the end point is always hit") {
    c.gamma = {0.999, 1.0};
    const auto r = run_no_crossing(c, false);
    for (const auto& row : r.rows) {
      CHECK(row.plus_fraction == 1.0);
      CHECK(row.minus_fraction == 1.0);
    }
    CHECK_THROWS_AS(run_no_crossing(c, true), ParameterError);
  }
  SUBCASE("exponent guard") {
    c.beta_exponent = 1.0 / 3.0;
    CHECK_THROWS_AS(run_no_crossing(c), ParameterError);
  }
  SUBCASE("default grid has one probe per row") {
    const auto r = run_no_crossing(c);
    CHECK(r.rows[0].probes == CrossingProbe::row_grid(40, 0.9).size());
    CHECK(r.rows[0].plus_fraction >= 0.0);
    CHECK(r.rows[0].plus_fraction <= 1.0);
  }
}

TEST_CASE("one-sided report") {
  const auto r = run_one_sided(60, 0.5, 0.5, 300, 3, 1);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].kind == OneSidedKind::PointToPoint);
  CHECK(r.rows[0].mu == doctest::Approx(mu_point_to_point(0.5)));
  CHECK(r.rows[2].mu == doctest::Approx(mu_line_minus(0.5, 0.5)));
  for (const auto& row : r.rows) CHECK(row.ks < 0.2);
  CHECK(r.to_csv() == run_one_sided(60, 0.5, 0.5, 300, 3, 2).to_csv());
}

TEST_CASE("shock profile guards") {
  CHECK_THROWS_AS(run_shock_profile(Scenario::F1F1, 0.5, 0.0, 100, 0, 1), ParameterError);
  CHECK_THROWS_AS(run_shock_profile(Scenario::F2F2, 1.0, 1.5, 100, 1, 1), ParameterError);
  CHECK_THROWS_AS(run_shock_profile(Scenario::F1F1, 0.5, 0.0, 100, 1, 1, 1, 10, 30, 100, 20), ParameterError);
}
