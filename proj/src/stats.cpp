#include "shocklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "shocklab/errors.hpp"

namespace shocklab {

EmpiricalCDF::EmpiricalCDF(std::vector<double> samples) : sorted_(std::move(samples)) {
  for (double x : sorted_)
    if (std::isnan(x)) throw ParameterError("NaN sample in empirical CDF");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& model) {
  const auto& s = ecdf.sorted();
  if (s.empty()) throw ParameterError("empirical CDF has no samples");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t k = 0;
  while (k < s.size()) {
    std::size_t k2 = k;
    while (k2 + 1 < s.size() && s[k2 + 1] == s[k]) ++k2;
    double f = model(s[k]);
    double below = static_cast<double>(k) / n;
    double above = static_cast<double>(k2 + 1) / n;
    d = std::max({d, std::abs(above - f), std::abs(f - below)});
    k = k2 + 1;
  }
  return d;
}

double dkw_epsilon(std::size_t n, double confidence) {
  if (n == 0) throw ParameterError("DKW needs n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw GuardError("DKW confidence must lie in (0,1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("correlation needs paired samples");
  double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string cdf_comparison_csv(const EmpiricalCDF& ecdf, const std::function<double(double)>& model,
                               const std::vector<double>& grid) {
  std::string out = "s,empirical,model,gap\n";
  char buf[160];
  for (double s : grid) {
    double e = ecdf(s), m = model(s);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", s, e, m, e - m);
    out += buf;
  }
  return out;
}

}  // namespace shocklab
