#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shocklab/lattice_lpp.hpp"

namespace shocklab {

// Particles are labelled right to left: x_{n+1} < x_n.
struct InitialCondition {
  enum class Kind { HalfFlat, ShockF1F1, ShockF2F1, ShockF2F2, FiniteM, Step };

  Kind kind = Kind::ShockF1F1;
  double ell = 0;   // F2F1, F2F2
  double v = 0;     // F2F1: particles n >= 1 start packed left of floor(v ell)
  double beta = 0;  // F2F2
  int M = 0;        // FiniteM

  static InitialCondition half_flat();                     // -2n, n >= 0
  static InitialCondition shock_f1f1();                    // -2n, all n
  static InitialCondition shock_f2f1(double v, double ell);  // floor(v ell) - n (n >= 1), -2n (n <= 0)
  static InitialCondition shock_f2f2(double beta, double ell);
  static InitialCondition finite_m(int M);                 // 2(M-j) (j <= M), M - j (j > M)
  static InitialCondition step();                          // -n, n >= 1

  static constexpr Index kNone = std::numeric_limits<Index>::min();
  // smallest label present, or kNone when labels extend to -infinity
  Index first_label() const;
  bool has_label(Index n) const { return first_label() == kNone || n >= first_label(); }
  Index position(Index n) const;
  void validate() const;
  std::string name() const;
};

InitialCondition::Kind parse_ic_kind(const std::string& name);

struct RateProfile {
  enum class Rule { Split, FiniteM, Uniform };
  Rule rule = Rule::Split;
  double alpha = 1.0;
  int M = 0;

  // 1 for n >= 1, alpha for n <= 0
  static RateProfile split(double alpha);
  // alpha for 1 <= n <= M, 1 otherwise
  static RateProfile finite_m(double alpha, int M);
  static RateProfile uniform(double rate = 1.0);

  double rate(Index n) const {
    switch (rule) {
      case Rule::Split: return n >= 1 ? 1.0 : alpha;
      case Rule::FiniteM: return (n >= 1 && n <= M) ? alpha : 1.0;
      case Rule::Uniform: return alpha;
    }
    return 1.0;
  }
  double max_rate() const { return std::max(1.0, alpha); }
  void validate() const;
  // the same rates as a row rule for weight fields (row j = particle j)
  RegionSpec as_region() const;
};

struct Trajectory {
  Index first = 0;  // label of the first entry; entries are consecutive labels
  std::vector<Index> x0;
  std::vector<std::vector<double>> jumps;  // increasing jump times per particle
  double horizon = 0;
  Index window_first = 0;  // leading label actually simulated

  Index last() const { return first + static_cast<Index>(x0.size()) - 1; }
  bool tracks(Index n) const { return n >= first && n <= last(); }
  Index position(Index n, double t) const;
  // time,particle,position rows, one per jump plus the initial positions at time 0
  std::string to_csv() const;
};

struct SimOptions {
  Index window = -1;          // labels simulated ahead of the tracked ones; < 0 selects ceil(4 T max_rate)
  Index max_window = 1 << 22;
};

// Exact continuous-time TASEP with exponential clocks. Clock k of particle n is drawn from
// (seed, n, k), so enlarging the window leaves uncontaminated particles unchanged.
// Labels first..last must exist in the initial condition.
Trajectory simulate(const InitialCondition& ic, const RateProfile& rates, double horizon, Index first,
                    Index last, std::uint64_t seed, const SimOptions& opt = {});

// Last-passage arrival table G(m, n): the time particle n jumps into site m - n.
// Particles ahead of `first` are left out; the table is exact for the full system when
// m <= exact_cap().
struct ArrivalTable {
  Index first = 0, last = 0;  // labels
  Index m_max = 0;
  std::vector<Index> m_start;            // per label, n + x_n(0); G = 0 there and below
  std::vector<std::vector<double>> g;    // g[k][m - m_start[k] - 1]
  Index cap = std::numeric_limits<Index>::max();

  double at(Index m, Index n) const;
  Index exact_cap() const { return cap; }
};

ArrivalTable arrival_times_from_field(const WeightField& field, const InitialCondition& ic, Index first,
                                      Index last, Index m_max);

// Event-driven TASEP whose waiting times are read from the field: particle j waits w(i, j) for
// its jump into site i - j, counted from the moment that jump becomes possible.
Trajectory simulate_from_field(const WeightField& field, const InitialCondition& ic, Index first,
                               Index last, double horizon);

// Throws if two tracked neighbours ever share a site or swap.
void check_exclusion(const Trajectory& traj);

struct DensityBin {
  double center = 0;
  double density = 0;
};

// Occupation fraction of sites in [lo, hi) at time t, in bins of bin_width sites. The
// trajectory must hold every particle that can be in the range.
std::vector<DensityBin> density_profile(const Trajectory& traj, double t, Index lo, Index hi,
                                        Index bin_width);
std::string density_csv(const std::vector<DensityBin>& bins);

// Bin center where the profile first crosses `level` going left to right (linear interpolation),
// after a centered moving average over `smooth` bins.
std::optional<double> density_crossing(const std::vector<DensityBin>& bins, double level, int smooth = 1);

// Location of an upward density step through `level`: the boundary minimizing the running sum
// of (density - level) from the left. Far less noise-sensitive than a first crossing.
double density_step_location(const std::vector<DensityBin>& bins, double level);

}  // namespace shocklab
