#pragma once

#include <string>

#include "shocklab/lattice_lpp.hpp"
#include "shocklab/tracy_widom.hpp"

namespace shocklab {

// Leading orders and fluctuation scales of the one-sided problems.
double mu_point_to_point(double eta);          // (1 + sqrt eta)^2
double sigma_point_to_point(double eta);       // law F2(s / sigma)
double mu_line_plus(double eta);               // 2(1 + eta)
double sigma_line_plus(double eta);            // law F1(2 s / sigma)
double mu_line_minus(double eta, double alpha);
double sigma_line_minus(double eta, double alpha);

struct ShockLaw {
  Scenario scenario = Scenario::F1F1;
  double alpha = 0.5;
  // F2F2: the start offset of both point-to-point pieces (in units of t)
  // F2F1: the offset b of beta = beta0 + b t^{-2/3}
  double beta_param = 0.0;

  // LPP side
  double mu = 0, eta0 = 0, beta0 = 0;
  double sigma1 = 0, sigma2 = 0;
  double shift1 = 0, shift2 = 0;  // coefficients of u in the two arguments
  double offset1 = 0;             // extra constant shift of the first argument (2b for F2F1)
  TWLaw g1_kind = TWLaw::F1, g2_kind = TWLaw::F1;

  // TASEP side
  double nu = 0, v = 0;
  double tasep_beta = 0;  // start offset of the TASEP initial condition in units of its time
  double rho1 = 0, rho2 = 0;
  double tasep_sigma1 = 0, tasep_sigma2 = 0;

  std::string to_json() const;
};

ShockLaw law_constants(Scenario sc, double alpha, double beta_param = 0.0);

// F2F2: the LPP offset corresponding to a TASEP offset beta in (0,1), and back.
double f2f2_lpp_beta(double tasep_beta);
double f2f2_tasep_beta(double lpp_beta);

// limit of P((L - mu t)/t^{1/3} <= s) at endpoint slope eta0 + u t^{-2/3}
double predicted_product_cdf(const ShockLaw& law, double u, double s);
// only one of the two factors (side 1 or 2)
double predicted_side_cdf(const ShockLaw& law, int side, double u, double s);
// limit of P(x_{nu t + xi t^{1/3}}(t) >= v t - s t^{1/3}) from the TASEP-side constants
double predicted_tasep_cdf(const ShockLaw& law, double xi, double s);

double rescale_lpp(const ShockLaw& law, double t, double u, double L_raw);
double unscale_lpp(const ShockLaw& law, double t, double u, double s);
double rescale_particle(const ShockLaw& law, double t, double xi, double x_raw);
double unscale_particle(const ShockLaw& law, double t, double xi, double s);

struct SpatialTransform {
  double eta0 = 0, u = 0, s_tilde = 0;
  // first-order change of the rescaled start offset, -xi beta nu^{-4/3}; it enters laws whose
  // statement keeps the offset explicit (F2F1) instead of folding it into mu
  double b_tilde = 0;
};

// Maps a fixed-time particle query (xi, s) to the LPP query. Checks mu(beta/nu) = 1/nu.
SpatialTransform spatial_transform(const ShockLaw& law, double xi, double s);

struct TasepConstants {
  double rho1, rho2, sigma1, sigma2;
};

// TASEP densities and scales recomputed from the LPP-side law through spatial_transform
TasepConstants regenerate_tasep_constants(const ShockLaw& law);

struct SlowDecorrSpec {
  double nu_exp = 0.6;
  Point e_plus;
  Index increment = 0;  // ceil(t^nu) along both axes
  double mu0 = 0;       // point-to-point constant of the increment direction
};

SlowDecorrSpec slow_decorrelation_spec(Point end, double t, double nu_exp);

}  // namespace shocklab
