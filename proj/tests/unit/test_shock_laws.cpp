#include "doctest.h"

#include <cmath>
#include <nlohmann/json.hpp>

#include "shocklab/errors.hpp"
#include "shocklab/shock_laws.hpp"

using namespace shocklab;

namespace {

const double cbrt2 = std::cbrt(2.0);

}  // namespace

TEST_CASE("constants at the example parameters") {
  const ShockLaw a = law_constants(Scenario::F1F1, 0.5);
  CHECK(a.mu == doctest::Approx(8.0 / 3).epsilon(1e-15));
  CHECK(a.eta0 == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(a.sigma1 == doctest::Approx(cbrt2 * cbrt2 / std::cbrt(1.5)).epsilon(1e-15));
  CHECK(a.rho2 == doctest::Approx(0.75));
  CHECK(a.tasep_sigma1 == 0.5);
  CHECK(a.nu == doctest::Approx(0.375));
  CHECK(a.v == doctest::Approx(-0.25));

  const ShockLaw b = law_constants(Scenario::F2F1, 0.5);
  CHECK(b.eta0 == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(b.beta0 == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(b.mu == 4.0);
  CHECK(b.sigma1 == doctest::Approx(std::pow(2.0, 4.0 / 3.0)));
  CHECK(b.g1_kind == TWLaw::F2);
  CHECK(b.g2_kind == TWLaw::F1);
  CHECK(b.v == doctest::Approx(-1.0 / 12));
  CHECK(b.tasep_sigma1 == doctest::Approx(1 / cbrt2));

  const ShockLaw c = law_constants(Scenario::F2F2, 1.0, 0.0);
  CHECK(c.mu == 4.0);
  CHECK(c.sigma1 == doctest::Approx(std::pow(2.0, 4.0 / 3.0)));
  CHECK(c.rho1 == 0.5);
  CHECK(c.rho2 == 0.5);
  const ShockLaw d = law_constants(Scenario::F2F2, 1.0, 3.0);
  CHECK(d.mu == doctest::Approx(9.0));
  CHECK(d.sigma2 == doctest::Approx(std::pow(3.0, 4.0 / 3.0) / std::pow(4.0, 1.0 / 6.0)));
  CHECK(d.tasep_beta == doctest::Approx(1.0 / 3));
  CHECK(f2f2_lpp_beta(d.tasep_beta) == doctest::Approx(3.0).epsilon(1e-14));

  const auto j = nlohmann::json::parse(a.to_json());
  CHECK(j["mu"].get<double>() == a.mu);
  CHECK(j["g2_kind"].get<std::string>() == "F1");
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(law_constants(Scenario::F1F1, 1.0), ParameterError);
  CHECK_THROWS_AS(law_constants(Scenario::F2F1, 0.0), ParameterError);
  CHECK_THROWS_AS(law_constants(Scenario::F2F2, 0.5, 1.0), ParameterError);
  CHECK_THROWS_AS(law_constants(Scenario::F2F2, 1.0, -0.1), ParameterError);
  CHECK_THROWS_AS(law_constants(Scenario::Custom, 0.5), ParameterError);
  CHECK_THROWS_AS(law_constants(Scenario::F1F1, NAN), ParameterError);
}

TEST_CASE("the two leading orders meet at the shock") {
  for (double a : {0.2, 0.5, 0.8}) {
    const ShockLaw L = law_constants(Scenario::F1F1, a);
    CHECK(std::abs(mu_line_plus(L.eta0) - L.mu) < 1e-12);
    CHECK(std::abs(mu_line_minus(L.eta0, a) - L.mu) < 1e-12);
    const ShockLaw M = law_constants(Scenario::F2F1, a);
    // point-to-point side: horizontal extent beta0 + eta0 = 1
    CHECK(std::abs(mu_point_to_point(M.eta0 + M.beta0) - M.mu) < 1e-12);
    CHECK(std::abs(mu_line_minus(M.eta0, a) - M.mu) < 1e-12);
  }
  for (double b : {0.5, 1.0, 3.0}) {
    const ShockLaw L = law_constants(Scenario::F2F2, 1.0, b);
    CHECK(std::abs(mu_point_to_point(1 + b) - L.mu) < 1e-12);
  }
}

TEST_CASE("one-sided scales") {
  CHECK(mu_point_to_point(1.0) == 4.0);
  CHECK(sigma_point_to_point(1.0) == doctest::Approx(std::pow(2.0, 4.0 / 3.0)));
  // at alpha = 1 the minus half-line has the plus law
  CHECK(mu_line_minus(0.7, 1.0) == doctest::Approx(mu_line_plus(0.7)));
  CHECK(sigma_line_minus(0.7, 1.0) == doctest::Approx(sigma_line_plus(0.7)));
  CHECK_THROWS_AS(mu_point_to_point(0.0), ParameterError);
}

TEST_CASE("product law limits and degenerations") {
  const ShockLaw L = law_constants(Scenario::F1F1, 0.5);
  CHECK(predicted_product_cdf(L, 0.0, 40.0) > 1 - 1e-12);
  CHECK(predicted_product_cdf(L, 0.0, -12.0) < 1e-12);
  for (double s : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double far = 40;
    const double right = predicted_tasep_cdf(L, far, s + far / L.rho1);
    CHECK(std::abs(right - tw_cdf(TWLaw::F1, s / L.tasep_sigma1)) < 1e-6);
    const double left = predicted_tasep_cdf(L, -far, s - far / L.rho2);
    CHECK(std::abs(left - tw_cdf(TWLaw::F1, s / L.tasep_sigma2)) < 1e-6);
  }
  // F2F2 sides are GUE on both ends
  const ShockLaw Q = law_constants(Scenario::F2F2, 1.0, 1.0);
  CHECK(std::abs(predicted_tasep_cdf(Q, 40, 0.3 + 40 / Q.rho1) - tw_cdf(TWLaw::F2, 0.3 / Q.tasep_sigma1)) < 1e-6);
  CHECK(std::abs(predicted_tasep_cdf(Q, -40, 0.3 - 40 / Q.rho2) - tw_cdf(TWLaw::F2, 0.3 / Q.tasep_sigma2)) < 1e-6);
  // side factors multiply to the product
  const ShockLaw M = law_constants(Scenario::F2F1, 0.5, 0.4);
  for (double s : {-2.0, 0.0, 1.5})
    CHECK(predicted_product_cdf(M, 0.3, s) ==
          doctest::Approx(predicted_side_cdf(M, 1, 0.3, s) * predicted_side_cdf(M, 2, 0.3, s)));
  // the offset b shifts the point-to-point factor by 2b
  CHECK(predicted_side_cdf(M, 1, 0.0, 0.8) == doctest::Approx(tw_cdf_fast(TWLaw::F2, 0.0)));
  CHECK_THROWS_AS(predicted_side_cdf(M, 3, 0.0, 0.0), ParameterError);
}

TEST_CASE("rescaling maps") {
  const ShockLaw L = law_constants(Scenario::F1F1, 0.5);
  const double t = 1000;
  CHECK(rescale_lpp(L, t, 0, L.mu * t) == 0.0);
  CHECK(rescale_particle(L, t, 0, L.v * t - 3 * std::cbrt(t)) == doctest::Approx(3.0).epsilon(1e-14));
  for (double raw : {2660.1, 2700.0, 2500.5}) {
    const double back = unscale_lpp(L, t, 0, rescale_lpp(L, t, 0, raw));
    CHECK(std::abs(back - raw) <= std::nextafter(raw, 1e9) - raw);
  }
  for (double x : {-250.0, -300.5, -190.0}) {
    const double back = unscale_particle(L, t, 0, rescale_particle(L, t, 0, x));
    CHECK(std::abs(back - x) <= 2 * (std::nextafter(std::abs(x), 1e9) - std::abs(x)));
  }
  CHECK_THROWS_AS(rescale_lpp(L, 0.0, 0, 1.0), ParameterError);
}

TEST_CASE("fixed-time particle queries in LPP coordinates") {
  const ShockLaw L = law_constants(Scenario::F1F1, 0.5);
  const SpatialTransform z = spatial_transform(L, 0.0, 1.7);
  CHECK(z.eta0 == doctest::Approx(L.eta0).epsilon(1e-14));
  CHECK(z.u == doctest::Approx(-1.7 * std::pow(L.nu, -1.0 / 3.0)));
  CHECK(z.s_tilde == 0.0);
  // F1F1 speed and label fraction satisfy the shock-locating condition for every alpha
  for (double a : {0.1, 0.3, 0.6, 0.9}) CHECK_NOTHROW(spatial_transform(law_constants(Scenario::F1F1, a), 1.0, 0.0));
  ShockLaw bad = L;
  bad.nu *= 1.01;
  CHECK_THROWS_AS(spatial_transform(bad, 0.0, 0.0), ParameterError);
}

TEST_CASE("TASEP constants regenerate from the LPP constants") {
  std::vector<ShockLaw> laws;
  for (double a : {0.25, 0.5, 0.75}) {
    laws.push_back(law_constants(Scenario::F1F1, a));
    laws.push_back(law_constants(Scenario::F2F1, a));
  }
  for (double b : {0.2, 0.5, 0.8}) laws.push_back(law_constants(Scenario::F2F2, 1.0, f2f2_lpp_beta(b)));
  for (const auto& L : laws) {
    const TasepConstants c = regenerate_tasep_constants(L);
    CHECK(std::abs(c.rho1 - L.rho1) < 1e-12);
    CHECK(std::abs(c.rho2 - L.rho2) < 1e-12);
    CHECK(std::abs(c.sigma1 - L.tasep_sigma1) < 1e-12);
    CHECK(std::abs(c.sigma2 - L.tasep_sigma2) < 1e-12);
  }
}

TEST_CASE("slow decorrelation point") {
  const SlowDecorrSpec sp = slow_decorrelation_spec({333, 1000}, 1000, 0.6);
  CHECK(sp.increment == static_cast<Index>(std::ceil(std::pow(1000.0, 0.6))));
  CHECK(sp.e_plus.i == 333 - sp.increment);
  CHECK(sp.e_plus.j == 1000 - sp.increment);
  CHECK(sp.mu0 == 4.0);
  CHECK_THROWS_AS(slow_decorrelation_spec({10, 10}, 10, 1.0 / 3), ParameterError);
  CHECK_THROWS_AS(slow_decorrelation_spec({10, 10}, 10, 1.0), ParameterError);
}
