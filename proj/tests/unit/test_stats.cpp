#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "shocklab/errors.hpp"
#include "shocklab/stats.hpp"

using namespace shocklab;

namespace {

std::vector<double> uniforms(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(g);
  return x;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TEST_CASE("empirical CDF is a right-continuous step function") {
  const EmpiricalCDF e({3.0, 1.0, 2.0, 2.0});
  CHECK(e.count() == 4);
  CHECK(e.sorted().front() == 1.0);
  CHECK(e(0.5) == 0.0);
  CHECK(e(1.0) == 0.25);
  CHECK(e(2.0) == 0.75);
  CHECK(e(2.5) == 0.75);
  CHECK(e(3.0) == 1.0);
  CHECK_THROWS_AS(EmpiricalCDF({1.0, NAN}), ParameterError);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  SUBCASE("single sample at the median") {
    CHECK(ks_distance(EmpiricalCDF({0.5}), uniform_cdf) == doctest::Approx(0.5));
  }
  SUBCASE("samples from the model stay inside the DKW band") {
    for (unsigned seed : {1u, 2u, 3u}) {
      const std::size_t n = 10000;
      CHECK(ks_distance(EmpiricalCDF(uniforms(n, seed)), uniform_cdf) < dkw_epsilon(n, 0.99));
    }
  }
  SUBCASE("shifted model") {
    const auto x = uniforms(200000, 5);
    const double d = ks_distance(EmpiricalCDF(x), [](double s) { return uniform_cdf(s - 0.1); });
    CHECK(std::abs(d - 0.1) < 0.01);
  }
  SUBCASE("ties are handled on both sides of the jump") {
    // all mass at 0.3: the gaps are 0.3 below and 0.7 above
    CHECK(ks_distance(EmpiricalCDF({0.3, 0.3, 0.3}), uniform_cdf) == doctest::Approx(0.7));
  }
  SUBCASE("invariant under a common increasing transform") {
    const auto x = uniforms(5000, 9);
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::exp(3 * x[k]) - 2;
    const auto model = [](double s) { return uniform_cdf(s * s); };
    const double a = ks_distance(EmpiricalCDF(x), model);
    const double b = ks_distance(EmpiricalCDF(y), [&](double v) { return model(std::log(v + 2) / 3); });
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ks_distance(EmpiricalCDF({}), uniform_cdf), ParameterError);
}

TEST_CASE("DKW band") {
  CHECK(dkw_epsilon(10000, 0.95) == doctest::Approx(0.01358).epsilon(1e-3));
  CHECK(dkw_epsilon(40000, 0.95) == doctest::Approx(dkw_epsilon(10000, 0.95) / 2).epsilon(1e-14));
  CHECK(dkw_epsilon(1, 0.5) == doctest::Approx(std::sqrt(std::log(4.0) / 2)));
  CHECK_THROWS_AS(dkw_epsilon(100, 0.0), GuardError);
  CHECK_THROWS_AS(dkw_epsilon(100, 1.0), GuardError);
  CHECK_THROWS_AS(dkw_epsilon(0, 0.95), ParameterError);
}

TEST_CASE("moments and correlation") {
  CHECK(mean({1.0, 2.0, 6.0}) == 3.0);
  CHECK(std::isnan(mean({})));
  CHECK(pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson_correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(pearson_correlation({1, 1, 1}, {3, 2, 1}) == 0.0);
  const auto a = uniforms(20000, 11), b = uniforms(20000, 12);
  CHECK(std::abs(pearson_correlation(a, b)) < 4 / std::sqrt(20000.0));
  CHECK_THROWS_AS(pearson_correlation({1.0}, {1.0}), ParameterError);
}

TEST_CASE("comparison table") {
  const std::string csv = cdf_comparison_csv(EmpiricalCDF({0.2, 0.4}), uniform_cdf, {0.0, 0.3, 1.0});
  CHECK(csv == "s,empirical,model,gap\n0,0,0,0\n0.3,0.5,0.3,0.2\n1,1,1,0\n");
}
