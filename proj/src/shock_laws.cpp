#include "shocklab/shock_laws.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "shocklab/errors.hpp"

namespace shocklab {

double mu_point_to_point(double eta) {
  if (!(eta > 0)) throw ParameterError("eta must be positive");
  double r = 1.0 + std::sqrt(eta);
  return r * r;
}

double sigma_point_to_point(double eta) {
  if (!(eta > 0)) throw ParameterError("eta must be positive");
  return std::pow(eta, -1.0 / 6.0) * std::pow(1.0 + std::sqrt(eta), 4.0 / 3.0);
}

double mu_line_plus(double eta) { return 2.0 * (1.0 + eta); }

double sigma_line_plus(double eta) { return std::pow(2.0, 4.0 / 3.0) * std::cbrt(1.0 + eta); }

double mu_line_minus(double eta, double alpha) {
  return 2.0 * (eta / alpha + 1.0 / (2.0 - alpha));
}

double sigma_line_minus(double eta, double alpha) {
  const double a3 = alpha * alpha * alpha / std::pow(2.0 - alpha, 3.0);
  return std::pow(2.0, 4.0 / 3.0) / alpha * std::cbrt(eta + a3);
}

double f2f2_lpp_beta(double tb) {
  if (!(tb >= 0.0 && tb < 1.0)) throw ParameterError("TASEP offset must lie in [0,1)");
  return 4.0 * tb / ((1.0 - tb) * (1.0 - tb));
}

double f2f2_tasep_beta(double lb) {
  if (!(lb >= 0.0)) throw ParameterError("LPP offset must be >= 0");
  double r = std::sqrt(1.0 + lb);
  return (r - 1.0) / (r + 1.0);
}

ShockLaw law_constants(Scenario sc, double alpha, double beta_param) {
  ShockLaw L;
  L.scenario = sc;
  L.alpha = alpha;
  L.beta_param = beta_param;
  if (!std::isfinite(alpha) || !std::isfinite(beta_param))
    throw ParameterError("law parameters must be finite");
  switch (sc) {
    case Scenario::F1F1: {
      if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("F1F1 needs alpha in (0,1)");
      const double a = alpha;
      L.eta0 = a / (2 - a);
      L.mu = 4 / (2 - a);
      L.sigma1 = std::pow(2.0, 2.0 / 3.0) / std::cbrt(2 - a);
      L.sigma2 = std::pow(2.0, 2.0 / 3.0) * std::cbrt(2 - 2 * a + a * a) /
                 (std::pow(a, 2.0 / 3.0) * (2 - a));
      L.shift1 = 2;
      L.shift2 = 2 / a;
      L.g1_kind = L.g2_kind = TWLaw::F1;
      L.nu = (2 - a) / 4;
      L.v = -(1 - a) / 2;
      L.tasep_beta = 0;
      L.rho1 = 0.5;
      L.rho2 = (2 - a) / 2;
      L.tasep_sigma1 = 0.5;
      L.tasep_sigma2 = std::cbrt(a) * std::cbrt(2 - 2 * a + a * a) / (2 * std::pow(2 - a, 2.0 / 3.0));
      break;
    }
    case Scenario::F2F1: {
      if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("F2F1 needs alpha in (0,1)");
      const double a = alpha;
      L.eta0 = a * (3 - 2 * a) / (2 - a);
      L.beta0 = 1 - L.eta0;
      L.mu = 4;
      L.sigma1 = std::pow(2.0, 4.0 / 3.0);
      L.sigma2 = std::pow(2.0, 2.0 / 3.0) * std::cbrt(6 - 10 * a + 6 * a * a - a * a * a) /
                 (std::pow(a, 2.0 / 3.0) * (2 - a));
      L.shift1 = 2;
      L.shift2 = 2 / a;
      L.offset1 = 2 * beta_param;
      L.g1_kind = TWLaw::F2;
      L.g2_kind = TWLaw::F1;
      L.nu = 0.25;
      L.v = -(1 - a) * (1 - a) / (2 * (2 - a));
      L.tasep_beta = -L.v;
      L.rho1 = 0.5;
      L.rho2 = (2 - a) / 2;
      L.tasep_sigma1 = std::pow(2.0, -1.0 / 3.0);
      L.tasep_sigma2 = std::cbrt(a) * std::cbrt(6 - 10 * a + 6 * a * a - a * a * a) / (2 * (2 - a));
      break;
    }
    case Scenario::F2F2: {
      if (alpha != 1.0) throw ParameterError("F2F2 needs alpha = 1");
      if (!(beta_param >= 0.0)) throw ParameterError("F2F2 needs beta >= 0");
      const double r = std::sqrt(1 + beta_param);
      L.eta0 = 1;
      L.beta0 = beta_param;
      L.mu = (1 + r) * (1 + r);
      L.sigma1 = L.sigma2 = std::pow(1 + r, 4.0 / 3.0) / std::pow(1 + beta_param, 1.0 / 6.0);
      L.shift1 = 1 + 1 / r;
      L.shift2 = 1 + r;
      L.g1_kind = L.g2_kind = TWLaw::F2;
      const double b = f2f2_tasep_beta(beta_param);
      L.tasep_beta = b;
      L.nu = (1 - b) * (1 - b) / 4;
      L.v = 0;
      L.rho1 = (1 - b) / 2;
      L.rho2 = (1 + b) / 2;
      L.tasep_sigma1 = std::pow(1 + b, 2.0 / 3.0) / (std::cbrt(2.0) * std::cbrt(1 - b));
      L.tasep_sigma2 = std::pow(1 - b, 2.0 / 3.0) / (std::cbrt(2.0) * std::cbrt(1 + b));
      break;
    }
    case Scenario::Custom:
      throw ParameterError("no limit law for custom geometries");
  }
  return L;
}

std::string ShockLaw::to_json() const {
  // ordered_json keeps insertion order, so output is stable
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(scenario);
  j["alpha"] = alpha;
  j["beta_param"] = beta_param;
  j["mu"] = mu;
  j["eta0"] = eta0;
  j["beta0"] = beta0;
  j["sigma1"] = sigma1;
  j["sigma2"] = sigma2;
  j["shift1"] = shift1;
  j["shift2"] = shift2;
  j["offset1"] = offset1;
  j["g1_kind"] = tw_law_name(g1_kind);
  j["g2_kind"] = tw_law_name(g2_kind);
  j["nu"] = nu;
  j["v"] = v;
  j["tasep_beta"] = tasep_beta;
  j["rho1"] = rho1;
  j["rho2"] = rho2;
  j["tasep_sigma1"] = tasep_sigma1;
  j["tasep_sigma2"] = tasep_sigma2;
  return j.dump(2);
}

double predicted_side_cdf(const ShockLaw& law, int side, double u, double s) {
  if (side == 1) return tw_cdf_fast(law.g1_kind, (s - law.shift1 * u - law.offset1) / law.sigma1);
  if (side == 2) return tw_cdf_fast(law.g2_kind, (s - law.shift2 * u) / law.sigma2);
  throw ParameterError("side must be 1 or 2");
}

double predicted_product_cdf(const ShockLaw& law, double u, double s) {
  return predicted_side_cdf(law, 1, u, s) * predicted_side_cdf(law, 2, u, s);
}

double predicted_tasep_cdf(const ShockLaw& law, double xi, double s) {
  return tw_cdf_fast(law.g1_kind, (s - xi / law.rho1) / law.tasep_sigma1) *
         tw_cdf_fast(law.g2_kind, (s - xi / law.rho2) / law.tasep_sigma2);
}

double rescale_lpp(const ShockLaw& law, double t, double, double L_raw) {
  if (!(t > 0)) throw ParameterError("t must be positive");
  return (L_raw - law.mu * t) / std::cbrt(t);
}

double unscale_lpp(const ShockLaw& law, double t, double, double s) {
  if (!(t > 0)) throw ParameterError("t must be positive");
  return law.mu * t + s * std::cbrt(t);
}

double rescale_particle(const ShockLaw& law, double t, double, double x_raw) {
  if (!(t > 0)) throw ParameterError("t must be positive");
  return (law.v * t - x_raw) / std::cbrt(t);
}

double unscale_particle(const ShockLaw& law, double t, double, double s) {
  if (!(t > 0)) throw ParameterError("t must be positive");
  return law.v * t - s * std::cbrt(t);
}

namespace {

// leading order of the scenario as a function of its LPP start offset, at eta0
double mu_of_offset(const ShockLaw& law, double b) {
  switch (law.scenario) {
    case Scenario::F1F1: return 4 / (2 - law.alpha);
    case Scenario::F2F1: return 4;  // the offset enters through the explicit shift 2(u + b)
    case Scenario::F2F2: return mu_point_to_point(1 + b);
    default: break;
  }
  throw ParameterError("no limit law for custom geometries");
}

double dmu_of_offset(const ShockLaw& law, double b) {
  if (law.scenario == Scenario::F2F2) {
    double r = std::sqrt(1 + b);
    return (1 + r) / r;
  }
  return 0.0;
}

}  // namespace

SpatialTransform spatial_transform(const ShockLaw& law, double xi, double s) {
  const double nu = law.nu, beta = law.tasep_beta;
  const double B = beta / nu;
  if (std::abs(mu_of_offset(law, B) - 1 / nu) > 1e-9)
    throw ParameterError("shock-locating condition mu(beta/nu) = 1/nu fails");
  SpatialTransform tr;
  tr.eta0 = 1 + law.v / nu;
  tr.u = -(s + xi * law.v / nu) * std::pow(nu, -1.0 / 3.0);
  tr.s_tilde = xi * (beta * dmu_of_offset(law, B) - 1) * std::pow(nu, -4.0 / 3.0);
  tr.b_tilde = -xi * beta * std::pow(nu, -4.0 / 3.0);
  return tr;
}

TasepConstants regenerate_tasep_constants(const ShockLaw& law) {
  // the LPP law argument of each side is linear in (xi, s): A s + B xi
  const ShockLaw& lpp = law;
  auto arg = [&](int side, double xi, double s) {
    SpatialTransform tr = spatial_transform(law, xi, s);
    if (side == 1) {
      double off = law.scenario == Scenario::F2F1 ? 2 * tr.b_tilde : 0.0;
      return (tr.s_tilde - lpp.shift1 * tr.u - off) / lpp.sigma1;
    }
    return (tr.s_tilde - lpp.shift2 * tr.u) / lpp.sigma2;
  };
  TasepConstants c{};
  for (int side = 1; side <= 2; ++side) {
    double base = arg(side, 0, 0);
    double A = arg(side, 0, 1) - base;
    double Bx = arg(side, 1, 0) - base;
    double sig = 1 / A, rho = -A / Bx;
    if (side == 1) {
      c.sigma1 = sig;
      c.rho1 = rho;
    } else {
      c.sigma2 = sig;
      c.rho2 = rho;
    }
  }
  return c;
}

SlowDecorrSpec slow_decorrelation_spec(Point end, double t, double nu_exp) {
  if (!(nu_exp > 1.0 / 3.0 && nu_exp < 1.0)) throw ParameterError("nu must lie in (1/3, 1)");
  SlowDecorrSpec sp;
  sp.nu_exp = nu_exp;
  sp.increment = static_cast<Index>(std::ceil(std::pow(t, nu_exp)));
  sp.e_plus = {end.i - sp.increment, end.j - sp.increment};
  sp.mu0 = mu_point_to_point(1.0);
  return sp;
}

}  // namespace shocklab
