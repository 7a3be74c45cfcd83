#include "shocklab/tasep.hpp"

#include <cmath>
#include <cstdio>
#include <queue>

#include "shocklab/errors.hpp"

namespace shocklab {

InitialCondition InitialCondition::half_flat() { return {Kind::HalfFlat}; }
InitialCondition InitialCondition::shock_f1f1() { return {Kind::ShockF1F1}; }

InitialCondition InitialCondition::shock_f2f1(double v, double ell) {
  InitialCondition ic{Kind::ShockF2F1};
  ic.v = v;
  ic.ell = ell;
  ic.validate();
  return ic;
}

InitialCondition InitialCondition::shock_f2f2(double beta, double ell) {
  InitialCondition ic{Kind::ShockF2F2};
  ic.beta = beta;
  ic.ell = ell;
  ic.validate();
  return ic;
}

InitialCondition InitialCondition::finite_m(int M) {
  InitialCondition ic{Kind::FiniteM};
  ic.M = M;
  ic.validate();
  return ic;
}

InitialCondition InitialCondition::step() { return {Kind::Step}; }

Index InitialCondition::first_label() const {
  switch (kind) {
    case Kind::HalfFlat: return 0;
    case Kind::ShockF1F1:
    case Kind::ShockF2F1: return kNone;
    case Kind::ShockF2F2: return -static_cast<Index>(std::floor(beta * ell));
    case Kind::FiniteM:
    case Kind::Step: return 1;
  }
  return kNone;
}

Index InitialCondition::position(Index n) const {
  if (!has_label(n)) throw GeometryError("label " + std::to_string(n) + " is not in " + name());
  switch (kind) {
    case Kind::HalfFlat:
    case Kind::ShockF1F1: return -2 * n;
    case Kind::ShockF2F1: return n >= 1 ? static_cast<Index>(std::floor(v * ell)) - n : -2 * n;
    case Kind::ShockF2F2: return n >= 1 ? -n - static_cast<Index>(std::floor(beta * ell)) : -n;
    case Kind::FiniteM: return n <= M ? 2 * (M - n) : M - n;
    case Kind::Step: return -n;
  }
  return 0;
}

void InitialCondition::validate() const {
  switch (kind) {
    case Kind::ShockF2F1:
      if (!(ell >= 0) || !std::isfinite(v * ell)) throw ParameterError("F2F1 needs ell >= 0");
      if (std::floor(v * ell) > 0) throw ParameterError("F2F1 needs floor(v ell) <= 0 for exclusion");
      break;
    case Kind::ShockF2F2:
      if (!(beta >= 0 && ell >= 0)) throw ParameterError("F2F2 needs beta, ell >= 0");
      break;
    case Kind::FiniteM:
      if (M < 0) throw ParameterError("FiniteM needs M >= 0");
      break;
    default: break;
  }
}

std::string InitialCondition::name() const {
  switch (kind) {
    case Kind::HalfFlat: return "half_flat";
    case Kind::ShockF1F1: return "shock_f1f1";
    case Kind::ShockF2F1: return "shock_f2f1";
    case Kind::ShockF2F2: return "shock_f2f2";
    case Kind::FiniteM: return "finite_m";
    case Kind::Step: return "step";
  }
  return "?";
}

InitialCondition::Kind parse_ic_kind(const std::string& name) {
  using K = InitialCondition::Kind;
  if (name == "half_flat") return K::HalfFlat;
  if (name == "shock_f1f1" || name == "f1f1") return K::ShockF1F1;
  if (name == "shock_f2f1" || name == "f2f1") return K::ShockF2F1;
  if (name == "shock_f2f2" || name == "f2f2") return K::ShockF2F2;
  if (name == "finite_m") return K::FiniteM;
  if (name == "step") return K::Step;
  throw ParameterError("unknown initial condition '" + name + "'");
}

RateProfile RateProfile::split(double alpha) {
  RateProfile r;
  r.alpha = alpha;
  r.validate();
  return r;
}

RateProfile RateProfile::finite_m(double alpha, int M) {
  RateProfile r;
  r.rule = Rule::FiniteM;
  r.alpha = alpha;
  r.M = M;
  r.validate();
  return r;
}

RateProfile RateProfile::uniform(double rate) {
  RateProfile r;
  r.rule = Rule::Uniform;
  r.alpha = rate;
  r.validate();
  return r;
}

void RateProfile::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ParameterError("jump rates must be positive");
  if (M < 0) throw ParameterError("M must be >= 0");
}

RegionSpec RateProfile::as_region() const {
  switch (rule) {
    case Rule::Split: return RegionSpec::row_split(alpha);
    case Rule::Uniform: return RegionSpec::uniform(alpha);
    case Rule::FiniteM: {
      RateProfile copy = *this;
      return RegionSpec::with_rule([copy](Index, Index j) { return copy.rate(j); });
    }
  }
  return RegionSpec::uniform(1.0);
}

Index Trajectory::position(Index n, double t) const {
  if (!tracks(n)) throw ParameterError("label " + std::to_string(n) + " is not tracked");
  const auto k = static_cast<std::size_t>(n - first);
  const auto& jt = jumps[k];
  return x0[k] + static_cast<Index>(std::upper_bound(jt.begin(), jt.end(), t) - jt.begin());
}

std::string Trajectory::to_csv() const {
  std::string out = "time,particle,position\n";
  char buf[96];
  for (std::size_t k = 0; k < x0.size(); ++k) {
    const Index n = first + static_cast<Index>(k);
    std::snprintf(buf, sizeof buf, "0,%lld,%lld\n", static_cast<long long>(n), static_cast<long long>(x0[k]));
    out += buf;
    for (std::size_t e = 0; e < jumps[k].size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.17g,%lld,%lld\n", jumps[k][e], static_cast<long long>(n),
                    static_cast<long long>(x0[k] + static_cast<Index>(e) + 1));
      out += buf;
    }
  }
  return out;
}

namespace {

struct Clock {
  double time;
  std::size_t k;
  bool operator>(const Clock& o) const { return time > o.time || (time == o.time && k > o.k); }
};

using ClockQueue = std::priority_queue<Clock, std::vector<Clock>, std::greater<>>;

// One run on labels [wfirst, last]. Returns false if a tracked particle was contaminated by the
// missing particles ahead of the window.
bool run_window(const InitialCondition& ic, const RateProfile& rates, double horizon, Index wfirst,
                Index first, Index last, std::uint64_t seed, Trajectory& out) {
  const auto count = static_cast<std::size_t>(last - wfirst + 1);
  std::vector<Index> x(count), cpos(count);
  std::vector<double> rate(count);
  std::vector<std::uint64_t> attempt(count, 0);
  std::vector<char> dirty(count, 0);
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = wfirst + static_cast<Index>(k);
    x[k] = ic.position(n);
    rate[k] = rates.rate(n);
  }
  // the real particle ahead of the window never stands left of its start
  const bool ghost = ic.has_label(wfirst - 1);
  const Index ghost_start = ghost ? ic.position(wfirst - 1) : 0;

  const auto off = static_cast<std::size_t>(first - wfirst);
  out.first = first;
  out.window_first = wfirst;
  out.horizon = horizon;
  out.x0.assign(x.begin() + static_cast<std::ptrdiff_t>(off), x.end());
  out.jumps.assign(out.x0.size(), {});

  auto draw = [&](std::size_t k) {
    const Index n = wfirst + static_cast<Index>(k);
    return exp_by_inverse_cdf(open_unit(cell_hash(seed, n, static_cast<Index>(attempt[k]++))), rate[k]);
  };
  ClockQueue q;
  for (std::size_t k = 0; k < count; ++k) {
    double t = draw(k);
    if (t <= horizon) q.push({t, k});
  }
  while (!q.empty()) {
    const Clock c = q.top();
    q.pop();
    const std::size_t k = c.k;
    const Index target = x[k] + 1;
    bool free = true;
    if (k == 0) {
      if (ghost && target >= ghost_start && !dirty[0]) {
        dirty[0] = 1;
        cpos[0] = x[0];
      }
    } else {
      if (dirty[k - 1] && target >= cpos[k - 1] && !dirty[k]) {
        dirty[k] = 1;
        cpos[k] = x[k];
      }
      free = x[k - 1] != target;
    }
    if (free) {
      x[k] = target;
      if (k >= off) out.jumps[k - off].push_back(c.time);
#ifndef NDEBUG
      if (k + 1 < count && x[k + 1] >= x[k]) throw NumericalError("exclusion violated");
#endif
    }
    const double next = c.time + draw(k);
    if (next <= horizon) q.push({next, k});
  }
  for (std::size_t k = off; k < count; ++k)
    if (dirty[k]) return false;
  return true;
}

}  // namespace

Trajectory simulate(const InitialCondition& ic, const RateProfile& rates, double horizon, Index first,
                    Index last, std::uint64_t seed, const SimOptions& opt) {
  ic.validate();
  rates.validate();
  if (!(horizon > 0) || !std::isfinite(horizon)) throw ParameterError("horizon must be positive");
  if (last < first) throw ParameterError("empty label range");
  if (!ic.has_label(first)) throw GeometryError("label range starts before the first particle");
  Index window = opt.window >= 0 ? opt.window
                                 : static_cast<Index>(std::ceil(4.0 * horizon * rates.max_rate()));
  for (;;) {
    Index wfirst = first - window;
    if (ic.first_label() != InitialCondition::kNone) wfirst = std::max(wfirst, ic.first_label());
    Trajectory traj;
    if (run_window(ic, rates, horizon, wfirst, first, last, seed, traj)) return traj;
    if (window >= opt.max_window)
      throw GuardError("simulation window cap reached before the tracked particles decoupled");
    window = std::min(opt.max_window, std::max<Index>(1, window * 2));
  }
}

double ArrivalTable::at(Index m, Index n) const {
  if (n < first || n > last) throw ParameterError("label outside the arrival table");
  const auto k = static_cast<std::size_t>(n - first);
  if (m <= m_start[k]) return 0.0;
  if (m > m_max) throw ParameterError("m beyond the arrival table");
  return g[k][static_cast<std::size_t>(m - m_start[k] - 1)];
}

ArrivalTable arrival_times_from_field(const WeightField& field, const InitialCondition& ic, Index first,
                                      Index last, Index m_max) {
  ic.validate();
  if (last < first) throw ParameterError("empty label range");
  if (!ic.has_label(first)) throw GeometryError("label range starts before the first particle");
  ArrivalTable tab;
  tab.first = first;
  tab.last = last;
  tab.m_max = m_max;
  if (ic.has_label(first - 1)) tab.cap = (first - 1) + ic.position(first - 1);
  const auto rows = static_cast<std::size_t>(last - first + 1);
  tab.m_start.resize(rows);
  tab.g.resize(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    const Index n = first + static_cast<Index>(k);
    tab.m_start[k] = n + ic.position(n);
    // S_A must be a staircase: consecutive starts never move right going up
    if (k > 0 && tab.m_start[k] > tab.m_start[k - 1])
      throw GeometryError("initial condition is not representable as a start staircase");
    const Index m0 = tab.m_start[k];
    if (m_max <= m0) continue;
    auto& row = tab.g[k];
    row.resize(static_cast<std::size_t>(m_max - m0));
    for (Index m = m0 + 1; m <= m_max; ++m) {
      if (!field.bbox().contains({m, n})) throw GeometryError("field does not cover the arrival table");
      double left = m - 1 == m0 ? 0.0 : row[static_cast<std::size_t>(m - 1 - m0 - 1)];
      double down = 0.0;
      // the particle ahead vacates site m - n at time G(m, n-1); already empty if it started beyond
      if (k > 0 && m > tab.m_start[k - 1]) down = tab.g[k - 1][static_cast<std::size_t>(m - tab.m_start[k - 1] - 1)];
      row[static_cast<std::size_t>(m - m0 - 1)] = field.at(m, n) + std::max(left, down);
    }
  }
  return tab;
}

Trajectory simulate_from_field(const WeightField& field, const InitialCondition& ic, Index first, Index last,
                               double horizon) {
  ic.validate();
  if (last < first) throw ParameterError("empty label range");
  if (!ic.has_label(first)) throw GeometryError("label range starts before the first particle");
  const auto count = static_cast<std::size_t>(last - first + 1);
  Trajectory out;
  out.first = first;
  out.window_first = first;
  out.horizon = horizon;
  out.x0.resize(count);
  out.jumps.assign(count, {});
  std::vector<Index> x(count);
  std::vector<char> pending(count, 0);
  for (std::size_t k = 0; k < count; ++k) x[k] = out.x0[k] = ic.position(first + static_cast<Index>(k));

  ClockQueue q;
  auto enable = [&](std::size_t k, double now) {
    if (pending[k]) return;
    if (k > 0 && x[k - 1] == x[k] + 1) return;
    const Index n = first + static_cast<Index>(k);
    const Index i = x[k] + 1 + n;
    if (!field.bbox().contains({i, n})) return;  // beyond the field: the particle stops
    pending[k] = 1;
    q.push({now + field.at(i, n), k});
  };
  for (std::size_t k = 0; k < count; ++k) enable(k, 0.0);
  while (!q.empty()) {
    const Clock c = q.top();
    if (c.time > horizon) break;
    q.pop();
    const std::size_t k = c.k;
    pending[k] = 0;
    x[k] += 1;
    out.jumps[k].push_back(c.time);
    enable(k, c.time);
    if (k + 1 < count) enable(k + 1, c.time);
  }
  return out;
}

void check_exclusion(const Trajectory& traj) {
  // merge the jump times of each neighbour pair and replay
  for (std::size_t k = 0; k + 1 < traj.x0.size(); ++k) {
    const auto& a = traj.jumps[k];
    const auto& b = traj.jumps[k + 1];
    Index xa = traj.x0[k], xb = traj.x0[k + 1];
    if (xb >= xa) throw NumericalError("initial positions are not strictly decreasing");
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
      // at equal times the leader moves first
      if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) {
        ++xa;
        ++ia;
      } else {
        ++xb;
        ++ib;
        if (xb >= xa) throw NumericalError("exclusion violated between labels " +
                                           std::to_string(traj.first + static_cast<Index>(k)) + " and " +
                                           std::to_string(traj.first + static_cast<Index>(k) + 1));
      }
    }
  }
}

std::vector<DensityBin> density_profile(const Trajectory& traj, double t, Index lo, Index hi, Index bin_width) {
  if (bin_width < 1 || hi <= lo) throw ParameterError("need bin_width >= 1 and lo < hi");
  if (t > traj.horizon) throw ParameterError("t beyond the trajectory horizon");
  const Index nb = (hi - lo) / bin_width;
  if (nb < 1) throw ParameterError("range shorter than one bin");
  // the front-most and back-most tracked particles must bracket the range
  if (traj.position(traj.first, t) < hi - 1 && traj.first != traj.window_first)
    throw ParameterError("trajectory does not cover the right end of the range");
  if (traj.position(traj.last(), t) >= lo) throw ParameterError("trajectory does not cover the left end");
  std::vector<Index> count(static_cast<std::size_t>(nb), 0);
  for (Index n = traj.first; n <= traj.last(); ++n) {
    const Index p = traj.position(n, t);
    if (p < lo || p >= lo + nb * bin_width) continue;
    ++count[static_cast<std::size_t>((p - lo) / bin_width)];
  }
  std::vector<DensityBin> out(static_cast<std::size_t>(nb));
  for (Index b = 0; b < nb; ++b) {
    out[b].center = static_cast<double>(lo + b * bin_width) + 0.5 * static_cast<double>(bin_width - 1);
    out[b].density = static_cast<double>(count[b]) / static_cast<double>(bin_width);
  }
  return out;
}

std::string density_csv(const std::vector<DensityBin>& bins) {
  std::string out = "bin_center,density\n";
  char buf[64];
  for (const auto& b : bins) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", b.center, b.density);
    out += buf;
  }
  return out;
}

std::optional<double> density_crossing(const std::vector<DensityBin>& bins, double level, int smooth) {
  if (smooth < 1) throw ParameterError("smooth must be >= 1");
  const auto nb = static_cast<int>(bins.size());
  std::vector<double> d(bins.size());
  for (int b = 0; b < nb; ++b) {
    int lo = std::max(0, b - smooth / 2), hi = std::min(nb - 1, b + smooth / 2);
    double acc = 0;
    for (int k = lo; k <= hi; ++k) acc += bins[k].density;
    d[b] = acc / (hi - lo + 1);
  }
  for (int b = 0; b + 1 < nb; ++b) {
    const double a = d[b] - level, c = d[b + 1] - level;
    if (a == 0) return bins[b].center;
    if ((a < 0) != (c < 0)) {
      const double f = a / (a - c);
      return bins[b].center + f * (bins[b + 1].center - bins[b].center);
    }
  }
  return std::nullopt;
}

double density_step_location(const std::vector<DensityBin>& bins, double level) {
  if (bins.size() < 2) throw ParameterError("need at least two bins");
  // S(k) = sum over bins before k of (density - level); an upward step sits at the minimum
  double acc = 0, best = 0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    acc += bins[k].density - level;
    if (acc < best) {
      best = acc;
      arg = k + 1;
    }
  }
  if (arg == 0) return bins.front().center - 0.5 * (bins[1].center - bins[0].center);
  if (arg == bins.size()) return bins.back().center + 0.5 * (bins[1].center - bins[0].center);
  return 0.5 * (bins[arg - 1].center + bins[arg].center);
}

}  // namespace shocklab
