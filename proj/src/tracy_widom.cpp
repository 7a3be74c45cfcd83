#include "shocklab/tracy_widom.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <mutex>
#include <vector>

#include "shocklab/airy.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/quadrature.hpp"

namespace shocklab {

namespace {

double clamp_probability(double d) {
  if (!std::isfinite(d) || d < -1e-8 || d > 1.0 + 1e-8)
    throw NumericalError("Tracy-Widom determinant left [0,1]");
  return std::min(1.0, std::max(0.0, d));
}

void check(const TWQuadrature& q) {
  if (q.nodes < 32) throw ParameterError("Tracy-Widom quadrature needs >= 32 nodes");
  if (!(q.cut > 4.0)) throw ParameterError("Tracy-Widom cut too small");
}

}  // namespace

double f2(double s, const TWQuadrature& q) {
  check(q);
  if (!std::isfinite(s)) throw ParameterError("s must be finite");
  const double b = std::max(s, 0.0) + q.cut;
  if (s >= b) return 1.0;
  QuadRule r = gauss_legendre(q.nodes, s, b);
  const int n = q.nodes;
  std::vector<AiryPair> a(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) a[k] = airy(r.x[k]);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double k;
      if (i == j)
        k = a[i].aip * a[i].aip - r.x[i] * a[i].ai * a[i].ai;
      else
        k = (a[i].ai * a[j].aip - a[i].aip * a[j].ai) / (r.x[i] - r.x[j]);
      m(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(r.w[i]) * k * std::sqrt(r.w[j]);
    }
  }
  return clamp_probability(m.partialPivLu().determinant());
}

double f1(double s, const TWQuadrature& q) {
  check(q);
  if (!std::isfinite(s)) throw ParameterError("s must be finite");
  // shift to L^2(0, inf) with kernel Ai(x + y + s)
  const double b = std::max(q.cut - s, 4.0);
  QuadRule r = gauss_legendre(q.nodes, 0.0, b);
  const int n = q.nodes;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = (i == j ? 1.0 : 0.0) -
                std::sqrt(r.w[i]) * airy_ai(r.x[i] + r.x[j] + s) * std::sqrt(r.w[j]);
  return clamp_probability(m.partialPivLu().determinant());
}

double f2_refinement_gap(double s, const TWQuadrature& q) {
  TWQuadrature q2 = q;
  q2.nodes *= 2;
  return std::abs(f2(s, q) - f2(s, q2));
}

double f1_refinement_gap(double s, const TWQuadrature& q) {
  TWQuadrature q2 = q;
  q2.nodes *= 2;
  return std::abs(f1(s, q) - f1(s, q2));
}

const char* tw_law_name(TWLaw law) { return law == TWLaw::F1 ? "F1" : "F2"; }

double tw_cdf(TWLaw law, double s, const TWQuadrature& q) {
  return law == TWLaw::F1 ? f1(s, q) : f2(s, q);
}

namespace {

struct Table {
  static constexpr double lo = -10.0, hi = 10.0, h = 1.0 / 256.0;
  TWLaw law;
  TWQuadrature q;
  std::vector<double> f, d;

  explicit Table(TWLaw which) : law(which) {
    q.nodes = 64;
    const int n = static_cast<int>(std::lround((hi - lo) / h)) + 1;
    f.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) f[k] = tw_cdf(law, lo + k * h, q);
    d.resize(f.size());
    for (int k = 0; k < n; ++k) {
      int a = std::max(k - 1, 0), b = std::min(k + 1, n - 1);
      d[k] = (f[b] - f[a]) / ((b - a) * h);
    }
  }

  double operator()(double s) const {
    // rare far arguments go to the determinant itself
    if (s <= lo || s >= hi) return tw_cdf(law, s, q);
    double u = (s - lo) / h;
    std::size_t k = static_cast<std::size_t>(u);
    if (k + 1 >= f.size()) return f.back();
    double x = u - static_cast<double>(k);
    double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x);
    double h01 = x * x * (3 - 2 * x), h11 = x * x * (x - 1);
    double v = h00 * f[k] + h10 * h * d[k] + h01 * f[k + 1] + h11 * h * d[k + 1];
    return std::min(1.0, std::max(0.0, v));
  }
};

}  // namespace

double tw_cdf_fast(TWLaw law, double s) {
  static std::once_flag f1once, f2once;
  static const Table* t1 = nullptr;
  static const Table* t2 = nullptr;
  if (law == TWLaw::F1) {
    std::call_once(f1once, [] { t1 = new Table(TWLaw::F1); });
    return (*t1)(s);
  }
  std::call_once(f2once, [] { t2 = new Table(TWLaw::F2); });
  return (*t2)(s);
}

}  // namespace shocklab
