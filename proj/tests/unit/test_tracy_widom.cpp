#include "doctest.h"

#include <cmath>

#include "shocklab/errors.hpp"
#include "shocklab/tracy_widom.hpp"

using namespace shocklab;

namespace {

// mean and variance from CDF increments on [-12, 8] (midpoint per cell)
std::pair<double, double> moments(TWLaw law) {
  const double a = -12, b = 8;
  const int n = 4000;
  const double h = (b - a) / n;
  double m1 = 0, m2 = 0;
  double prev = tw_cdf(law, a);
  for (int k = 0; k < n; ++k) {
    const double x1 = a + (k + 1) * h, xm = a + (k + 0.5) * h;
    const double cur = tw_cdf(law, x1);
    const double p = cur - prev;
    m1 += xm * p;
    m2 += xm * xm * p;
    prev = cur;
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace

TEST_CASE("frozen values at zero") {
  CHECK(std::abs(f2(0.0) - kF2AtZero) < 1e-9);
  CHECK(std::abs(f1(0.0) - kF1AtZero) < 1e-9);
  TWQuadrature hi;
  hi.nodes = 400;
  CHECK(std::abs(f2(0.0, hi) - kF2AtZero) < 1e-12);
  CHECK(std::abs(f1(0.0, hi) - kF1AtZero) < 1e-12);
}

TEST_CASE("tails and monotonicity") {
  CHECK(1.0 - f2(8.0) < 1e-10);
  // the GOE tail at 8 is about 8e-9 in exact arithmetic; only the 1e-8 limit holds
  CHECK(1.0 - f1(8.0) < 1e-8);
  CHECK(f2(-8.0) < 1e-8);
  CHECK(f1(-8.0) < 1e-8);
  CHECK(f2(-1.0) < f2(0.0));
  CHECK(f2(0.0) < f2(1.0));
  for (TWLaw law : {TWLaw::F1, TWLaw::F2}) {
    double prev = -1;
    for (double s = -8; s <= 8; s += 0.25) {
      const double v = tw_cdf(law, s);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("refinement stability") {
  for (double s : {-6.0, -3.0, -1.0, 0.0, 2.0, 5.0}) {
    CHECK(f2_refinement_gap(s) < 1e-8);
    CHECK(f1_refinement_gap(s) < 1e-8);
  }
}

TEST_CASE("moments match the tabulated Tracy-Widom values") {
  // published: GUE mean -1.7710868, variance 0.8131947; GOE mean -1.2065335, variance 1.6077810
  const auto [m2, v2] = moments(TWLaw::F2);
  CHECK(m2 == doctest::Approx(-1.7710868).epsilon(1e-5));
  CHECK(v2 == doctest::Approx(0.8131947).epsilon(1e-4));
  const auto [m1, v1] = moments(TWLaw::F1);
  CHECK(m1 == doctest::Approx(-1.2065335).epsilon(1e-5));
  CHECK(v1 == doctest::Approx(1.6077810).epsilon(1e-4));
}

TEST_CASE("tabulated evaluator follows the determinant") {
  for (TWLaw law : {TWLaw::F1, TWLaw::F2}) {
    for (double s = -9.7; s < 9.7; s += 0.37) CHECK(std::abs(tw_cdf_fast(law, s) - tw_cdf(law, s)) < 1e-8);
    CHECK(tw_cdf_fast(law, -30) < 1e-20);
    CHECK(tw_cdf_fast(law, 30) > 1 - 1e-15);
  }
}

TEST_CASE("argument guards") {
  CHECK_THROWS_AS(f2(NAN), ParameterError);
  TWQuadrature q;
  q.nodes = 16;
  CHECK_THROWS_AS(f1(0.0, q), ParameterError);
  CHECK(std::string(tw_law_name(TWLaw::F1)) == "F1");
}
