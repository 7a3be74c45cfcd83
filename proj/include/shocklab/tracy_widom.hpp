#pragma once

namespace shocklab {

// Nystrom discretization on a truncated interval with Gauss-Legendre nodes.
struct TWQuadrature {
  int nodes = 96;
  // the operator is cut where the Airy factors fall below ~1e-16
  double cut = 16.0;
};

// GUE law: det(1 - K_Airy) on L^2(s, inf)
double f2(double s, const TWQuadrature& q = {});
// GOE law F1(s) = det(1 - Ai(x+y)) on L^2(s/2, inf)
double f1(double s, const TWQuadrature& q = {});

// |value(nodes) - value(2 nodes)|
double f2_refinement_gap(double s, const TWQuadrature& q = {});
double f1_refinement_gap(double s, const TWQuadrature& q = {});

// From a 400-node run, kept as regression constants.
inline constexpr double kF2AtZero = 0.969372828355263;
inline constexpr double kF1AtZero = 0.831908066202954;

enum class TWLaw { F1, F2 };

const char* tw_law_name(TWLaw law);
double tw_cdf(TWLaw law, double s, const TWQuadrature& q = {});

// Tabulated CDF on [-10, 10] (step 1/256, cubic Hermite with finite-difference slopes), built
// once per law on first use; arguments outside go to the determinant. Used in KS loops.
double tw_cdf_fast(TWLaw law, double s);

}  // namespace shocklab
