#include "shocklab/airy.hpp"

#include <cmath>
#include <numbers>

namespace shocklab {

namespace {

// Ai(0) = 1/(3^{2/3} Gamma(2/3)), -Ai'(0) = 1/(3^{1/3} Gamma(1/3))
constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = 0.258819403792806798405183560189203963L;

AiryPair maclaurin(double xd) {
  const long double x = xd, x3 = x * x * x;
  long double f = 1.0L, g = x, fp = 0.0L, gp = 1.0L;
  long double a = 1.0L, b = x, e = x * x / 2.0L, c = 1.0L;
  if (xd != 0.0) fp = e;
  for (int k = 1; k < 200; ++k) {
    const long double kk = k;
    a *= x3 / ((3 * kk - 1) * (3 * kk));
    b *= x3 / ((3 * kk) * (3 * kk + 1));
    c *= x3 / ((3 * kk) * (3 * kk - 2));
    f += a;
    g += b;
    gp += c;
    if (k >= 2) {
      e *= x3 / ((3 * kk - 1) * (3 * kk - 3));
      fp += e;
    }
    long double mag = std::fabs(a) + std::fabs(b) + std::fabs(c) + std::fabs(e);
    if (mag < 1e-22L * (std::fabs(f) + std::fabs(g) + 1.0L) && k > 3) break;
  }
  return {static_cast<double>(kAi0 * f - kAip0 * g), static_cast<double>(kAi0 * fp - kAip0 * gp)};
}

// Ai(x) = sqrt(x/3)/pi K_{1/3}(z), Ai'(x) = -x/(pi sqrt 3) K_{2/3}(z), z = 2/3 x^{3/2},
// with K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du by the trapezoid rule.
AiryPair bessel_k_form(double x) {
  const double z = 2.0 / 3.0 * x * std::sqrt(x);
  const double h = 0.04;
  double k13 = 0.5, k23 = 0.5;  // u = 0 terms, exp(-z) factored out
  for (int m = 1; m < 2000; ++m) {
    const double u = m * h;
    const double damp = std::exp(-z * (std::cosh(u) - 1.0));
    k13 += damp * std::cosh(u / 3.0);
    k23 += damp * std::cosh(2.0 * u / 3.0);
    if (damp < 1e-20) break;
  }
  const double ez = std::exp(-z) * h;
  return {std::sqrt(x / 3.0) / std::numbers::pi * k13 * ez,
          -x / (std::numbers::pi * std::sqrt(3.0)) * k23 * ez};
}

AiryPair oscillatory_asymptotic(double x) {
  const double r = -x;
  const double z = 2.0 / 3.0 * r * std::sqrt(r);
  // u_k and v_k coefficients, series in 1/z truncated at the smallest term
  double uk = 1.0, vk = 1.0;
  double pc = 1.0, ps = 0.0, qc = 1.0, qs = 0.0;
  double zk = 1.0, last = 1.0;
  for (int k = 1; k < 60; ++k) {
    uk *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    vk = -(6.0 * k + 1) / (6.0 * k - 1) * uk;
    zk /= z;
    const double term = std::abs(uk * zk);
    if (term > last) break;
    last = term;
    const double sg = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      pc += sg * uk * zk;
      qc += sg * vk * zk;
    } else {
      ps += sg * uk * zk;
      qs += sg * vk * zk;
    }
    if (term < 1e-17) break;
  }
  const double th = z - std::numbers::pi / 4.0;
  const double pre = 1.0 / std::sqrt(std::numbers::pi);
  const double q = std::pow(r, 0.25);
  const double ai = pre / q * (std::cos(th) * pc + std::sin(th) * ps);
  const double aip = pre * q * (std::sin(th) * qc - std::cos(th) * qs);
  return {ai, aip};
}

}  // namespace

AiryPair airy(double x) {
  if (std::isnan(x)) return {x, x};
  if (x > 4.0) {
    if (x > 150.0) return {0.0, -0.0};
    return bessel_k_form(x);
  }
  if (x < -8.0) return oscillatory_asymptotic(x);
  return maclaurin(x);
}

double airy_ai(double x) { return airy(x).ai; }
double airy_ai_prime(double x) { return airy(x).aip; }

}  // namespace shocklab
