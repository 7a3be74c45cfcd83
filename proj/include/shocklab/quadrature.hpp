#pragma once

#include <vector>

namespace shocklab {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre on [-1,1] by Newton iteration on the three-term recurrence. Cached per n.
const QuadRule& gauss_legendre(int n);

// n-point rule mapped to [a,b]
QuadRule gauss_legendre(int n, double a, double b);

}  // namespace shocklab
