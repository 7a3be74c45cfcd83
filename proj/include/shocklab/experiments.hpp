#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shocklab/kernels.hpp"
#include "shocklab/lattice_lpp.hpp"
#include "shocklab/shock_laws.hpp"
#include "shocklab/tasep.hpp"

namespace shocklab {

struct ExperimentConfig {
  Scenario scenario = Scenario::F1F1;
  double alpha = 0.5;
  double beta_param = 0.0;  // as in law_constants
  double u = 0.0;
  std::vector<double> t_list{250, 1000};
  int samples = 1000;
  std::uint64_t seed = 7;
  double nu = 0.6;             // slow-decorrelation exponent
  double beta_exponent = 0.9;  // no-crossing exponent
  std::vector<double> gamma;   // empty: one probe per row
  int threads = 0;             // <= 0: available parallelism
  std::string output;
  bool drop_minus = false;     // product law with the minus half removed

  void validate() const;
  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
};

int resolve_threads(int requested);

// Runs fn(k) for k in [0, count) on `threads` workers. Results must be written by index;
// the first exception (lowest k) is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// Per-sample seed: independent of the thread count and of the other t values.
std::uint64_t sample_seed(std::uint64_t base, std::size_t t_index, std::size_t sample);

ShockLaw config_law(const ExperimentConfig& cfg);
// beta offset of the LPP start sets at time t: beta0 + b t^{-2/3} for F2F1, beta for F2F2
double geometry_beta(const ShockLaw& law, double t);
Geometry config_geometry(const ExperimentConfig& cfg, double t);
RegionSpec scenario_region(Scenario sc, double alpha);

struct ProductLawRow {
  double t = 0;
  int samples = 0;
  double ks = 0;          // max{L1, L2} (or L1 alone with drop_minus) against the predicted law
  double dkw95 = 0;
  double ks_side1 = 0;    // L1 alone against G1
  double ks_side2 = 0;    // L2 alone against G2 (0 with drop_minus)
  double correlation = 0; // of the rescaled pair (0 with drop_minus)
  double mean = 0;        // of the rescaled maximum
};

struct ProductLawReport {
  ExperimentConfig cfg;
  std::vector<ProductLawRow> rows;
  std::vector<std::vector<double>> rescaled;  // per t, the rescaled observable of each sample
  std::string to_json() const;
  std::string to_csv() const;
  // s,empirical,model,gap for one t
  std::string cdf_csv(std::size_t t_index, const std::vector<double>& grid) const;
};

ProductLawReport run_product_law(const ExperimentConfig& cfg);

struct SlowDecorrRow {
  double t = 0;
  int samples = 0;
  Index increment = 0;
  double threshold = 0;  // M t^{1/3}
  double exceed_fraction = 0;
  double mean_residual = 0;  // mean of (L_full - L_to_E+ - mu0 increment) / t^{1/3}
};

struct SlowDecorrReport {
  ExperimentConfig cfg;
  double M_const = 0;
  std::vector<SlowDecorrRow> rows;
  std::string to_json() const;
  std::string to_csv() const;
};

SlowDecorrReport run_slow_decorrelation(const ExperimentConfig& cfg, double M_const);

struct NoCrossingRow {
  double t = 0;
  int samples = 0;
  std::size_t probes = 0;
  double gamma_max = 0;
  double plus_fraction = 0;   // maximizers from the plus start set hitting some probe
  double minus_fraction = 0;
};

struct NoCrossingReport {
  ExperimentConfig cfg;
  std::vector<NoCrossingRow> rows;
  std::string to_json() const;
  std::string to_csv() const;
};

// With enforce_range false the gamma grid may reach past 1 - t^{beta-1}.
NoCrossingReport run_no_crossing(const ExperimentConfig& cfg, bool enforce_range = true);

enum class OneSidedKind { PointToPoint, LinePlus, LineMinus };
const char* one_sided_name(OneSidedKind k);

struct OneSidedRow {
  OneSidedKind kind = OneSidedKind::PointToPoint;
  double mu = 0, sigma = 0;
  double ks = 0;
  double dkw95 = 0;
};

struct OneSidedReport {
  double t = 0, eta = 0, alpha = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<OneSidedRow> rows;
  std::vector<std::vector<double>> rescaled;  // per row
  std::string to_json() const;
  std::string to_csv() const;
};

// Point-to-point from the origin and both half-lines to (floor(eta t), floor(t)); the minus
// half-line uses rate alpha on rows j <= 0, the other two rate 1 everywhere.
OneSidedReport run_one_sided(double t, double eta, double alpha, int samples, std::uint64_t seed,
                             int threads = 0);
double one_sided_model_cdf(OneSidedKind kind, double eta, double alpha, double s);

struct TaggedRow {
  int s = 0;
  double fredholm = 0;
  double empirical = 0;
  double std_error = 0;  // binomial, from the Fredholm value
  double z = 0;
};

struct TaggedReport {
  KernelKind kind = KernelKind::Khat;
  int n = 0;
  double t = 0, alpha = 1;
  int runs = 0;
  std::vector<TaggedRow> rows;
  std::string to_json() const;
  std::string to_csv() const;
};

// P(x_n(t) > s) by simulation against the Fredholm determinant. Khat_n is the law of the
// particle started at -2n behind n-1 particles at -2, ..., -2(n-1) (for n = 0 a free particle at 0);
// it is simulated as the half-flat particle n-1 shifted by -2. Ktilde the start -n (n >= 1), -2n (n <= 0) with split rates, FiniteM the system with M slow
// particles (the tracked label is n + M). An empty s_list selects 7 thresholds straddling the median.
TaggedReport run_tagged_particle(KernelKind kind, int n, double t, double alpha, std::vector<int> s_list,
                                 int runs, std::uint64_t seed, int threads = 0, int M = 0);

struct ShockProfileReport {
  Scenario scenario = Scenario::F1F1;
  double alpha = 0, tasep_beta = 0, t = 0;
  int runs = 0;
  Index gap = 0, width = 0;
  double rho1 = 0, rho2 = 0, vt = 0;
  double left_density = 0, right_density = 0;  // mean over runs
  double left_se = 0, right_se = 0;            // standard error over runs
  // least-squares line through the occupations of [c - gap - fit_width, c - gap) (and the mirror
  // range on the right), evaluated at the step; removes the slope of a rarefaction side
  Index fit_width = 0;
  double left_edge = 0, right_edge = 0;
  double left_edge_se = 0, right_edge_se = 0;
  double mean_location = 0;
  double max_location_offset = 0;  // max over runs of |location - vt|
  std::vector<DensityBin> mean_profile;  // averaged over runs, centered on vt
  std::string to_json() const;
  std::string to_csv() const;  // the mean profile
};

// Per run: simulate the scenario's initial condition to time t (the start offsets use ell = t),
// locate the step through (rho1 + rho2)/2 on a window of +-`half_range` sites around vt, then
// average single-site occupations over [c - gap - width, c - gap) and [c + gap, c + gap + width).
// For F2F2 the parameter is the TASEP offset beta in (0,1).
ShockProfileReport run_shock_profile(Scenario sc, double alpha, double beta, double t, int runs,
                                     std::uint64_t seed, int threads = 0, Index gap = 10,
                                     Index width = 40, Index fit_width = 100, Index half_range = 250);

}  // namespace shocklab
