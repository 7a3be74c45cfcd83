#include "shocklab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "shocklab/errors.hpp"

namespace shocklab {

namespace {

QuadRule build_rule(int n) {
  QuadRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int k = 0; k < m; ++k) {
    // Tricomi's initial guess
    double z = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[static_cast<std::size_t>(k)] = -z;
    r.x[static_cast<std::size_t>(n - 1 - k)] = z;
    r.w[static_cast<std::size_t>(k)] = w;
    r.w[static_cast<std::size_t>(n - 1 - k)] = w;
  }
  if (n % 2 == 1) r.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("quadrature needs at least one node");
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule r = gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    r.x[k] = c + h * r.x[k];
    r.w[k] *= h;
  }
  return r;
}

}  // namespace shocklab
