#pragma once

#include <functional>
#include <string>
#include <vector>

namespace shocklab {

class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> samples);

  // fraction of samples <= x
  double operator()(double x) const;
  std::size_t count() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// sup |F_hat - F| checked on both sides of every jump
double ks_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& model);

// sqrt(ln(2/(1-confidence)) / (2n))
double dkw_epsilon(std::size_t n, double confidence);

double mean(const std::vector<double>& x);
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

// s,empirical,model,gap rows on the given grid
std::string cdf_comparison_csv(const EmpiricalCDF& ecdf, const std::function<double(double)>& model,
                               const std::vector<double>& grid);

}  // namespace shocklab
