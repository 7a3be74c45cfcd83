#include "shocklab/lattice_lpp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "shocklab/errors.hpp"

namespace shocklab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Index parse_index(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParameterError("bad integer in bbox: '" + s + "'");
  }
  if (pos != s.size()) throw ParameterError("bad integer in bbox: '" + s + "'");
  return static_cast<Index>(v);
}

std::pair<Index, Index> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParameterError("bbox range needs 'a:b', got '" + s + "'");
  return {parse_index(s.substr(0, colon)), parse_index(s.substr(colon + 1))};
}

}  // namespace

Bbox Bbox::parse(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("bbox must look like i0:i1,j0:j1");
  auto [i0, i1] = parse_range(text.substr(0, comma));
  auto [j0, j1] = parse_range(text.substr(comma + 1));
  Bbox b{i0, i1, j0, j1};
  if (b.empty()) throw ParameterError("bbox is empty: " + text);
  return b;
}

std::string Bbox::str() const {
  std::ostringstream os;
  os << i0 << ':' << i1 << ',' << j0 << ':' << j1;
  return os.str();
}

RegionSpec RegionSpec::row_split(double alpha) {
  RegionSpec r;
  r.alpha = alpha;
  r.rule = Rule::RowSplit;
  r.validate();
  return r;
}

RegionSpec RegionSpec::lower_right(double alpha) {
  RegionSpec r;
  r.alpha = alpha;
  r.rule = Rule::LowerRight;
  r.validate();
  return r;
}

RegionSpec RegionSpec::uniform(double rate) {
  RegionSpec r;
  r.alpha = rate;
  r.rule = Rule::Uniform;
  r.validate();
  return r;
}

RegionSpec RegionSpec::with_rule(std::function<double(Index, Index)> rule) {
  RegionSpec r;
  r.rule = Rule::Custom;
  r.custom = std::move(rule);
  r.validate();
  return r;
}

void RegionSpec::validate() const {
  if (rule == Rule::Custom) {
    if (!custom) throw ParameterError("custom region rule is empty");
    return;
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("rate must be positive");
}

WeightField WeightField::sample(const RegionSpec& region, const Bbox& bbox, std::uint64_t seed) {
  region.validate();
  if (bbox.empty()) throw ParameterError("weight field bbox is empty");
  WeightField f;
  f.bbox_ = bbox;
  f.seed_ = seed;
  f.region_ = region;
  if (region.rule == RegionSpec::Rule::Custom) {
    // check the rule on the box once so lazy reads never see a bad rate
    for (Index j = bbox.j0; j <= bbox.j1; ++j)
      for (Index i = bbox.i0; i <= bbox.i1; ++i)
        if (!(region.custom(i, j) > 0.0))
          throw ParameterError("region rule gives a non-positive rate");
  }
  return f;
}

WeightField WeightField::from_values(const Bbox& bbox, std::vector<double> values) {
  if (bbox.empty()) throw ParameterError("weight field bbox is empty");
  if (values.size() != static_cast<std::size_t>(bbox.width() * bbox.height()))
    throw ParameterError("value count does not match bbox");
  for (double w : values)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and >= 0");
  WeightField f;
  f.bbox_ = bbox;
  f.values_ = std::move(values);
  return f;
}

WeightField WeightField::materialized() const {
  if (is_materialized()) return *this;
  WeightField f = *this;
  f.values_.resize(static_cast<std::size_t>(bbox_.width() * bbox_.height()));
  for (Index j = bbox_.j0; j <= bbox_.j1; ++j)
    for (Index i = bbox_.i0; i <= bbox_.i1; ++i) f.values_[offset(i, j)] = at(i, j);
  return f;
}

void WeightField::fill_row(Index j, Index i0, Index i1, double* out) const {
  if (!values_.empty()) {
    const double* src = values_.data() + offset(i0, j);
    std::copy(src, src + (i1 - i0 + 1), out);
    return;
  }
  if (region_.rule == RegionSpec::Rule::Custom || (region_.rule == RegionSpec::Rule::LowerRight && j <= 0)) {
    for (Index i = i0; i <= i1; ++i) out[i - i0] = at(i, j);
    return;
  }
  const double rate = region_.rate(i0, j);
  const std::uint64_t key = row_key(seed_, j);
  for (Index i = i0; i <= i1; ++i) out[i - i0] = exp_by_inverse_cdf(open_unit(cell_hash_keyed(key, i)), rate);
}

void WeightField::set(Index i, Index j, double w) {
  if (!bbox_.contains({i, j})) throw ParameterError("cell outside field");
  if (!(w >= 0.0)) throw ParameterError("weights must be >= 0");
  if (!is_materialized()) *this = materialized();
  values_[offset(i, j)] = w;
}

std::string WeightField::to_csv() const {
  std::string out = "i,j,weight\n";
  char buf[96];
  for (Index j = bbox_.j0; j <= bbox_.j1; ++j)
    for (Index i = bbox_.i0; i <= bbox_.i1; ++i) {
      std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n", static_cast<long long>(i),
                    static_cast<long long>(j), at(i, j));
      out += buf;
    }
  return out;
}

std::string PassageResult::to_csv() const {
  std::string out = "k,i,j\n";
  char buf[96];
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%lld,%lld\n", k, static_cast<long long>(path[k].i),
                  static_cast<long long>(path[k].j));
    out += buf;
  }
  return out;
}

namespace {

struct StartRows {
  Index ilo = 0, jlo = 0;
  std::vector<std::vector<Index>> cols;  // per row, sorted start columns
  std::vector<std::vector<int>> ids;     // index into the caller's start list
};

StartRows group_starts(const WeightField& field, const std::vector<Point>& starts, Point end) {
  if (!field.bbox().contains(end)) throw GeometryError("end point outside weight field");
  StartRows sr;
  sr.ilo = std::numeric_limits<Index>::max();
  sr.jlo = std::numeric_limits<Index>::max();
  bool any = false;
  for (const Point& p : starts) {
    if (p.i > end.i || p.j > end.j) continue;
    if (!field.bbox().contains(p)) throw GeometryError("start point outside weight field");
    any = true;
    sr.ilo = std::min(sr.ilo, p.i);
    sr.jlo = std::min(sr.jlo, p.j);
  }
  if (!any) throw GeometryError("no start point weakly south-west of the end point");
  std::size_t rows = static_cast<std::size_t>(end.j - sr.jlo + 1);
  sr.cols.resize(rows);
  sr.ids.resize(rows);
  std::vector<std::vector<std::pair<Index, int>>> tmp(rows);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const Point& p = starts[k];
    if (p.i > end.i || p.j > end.j) continue;
    tmp[static_cast<std::size_t>(p.j - sr.jlo)].push_back({p.i, static_cast<int>(k)});
  }
  for (std::size_t r = 0; r < rows; ++r) {
    auto& v = tmp[r];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            v.end());
    for (auto& [c, id] : v) {
      sr.cols[r].push_back(c);
      sr.ids[r].push_back(id);
    }
  }
  return sr;
}

}  // namespace

PassageResult last_passage(const WeightField& field, const std::vector<Point>& starts, Point end,
                           bool keep_path) {
  StartRows sr = group_starts(field, starts, end);
  const Index ilo = sr.ilo, jlo = sr.jlo;
  const std::size_t width = static_cast<std::size_t>(end.i - ilo + 1);

  std::vector<double> prev(width, kNegInf), cur(width, kNegInf);
  std::vector<int> prev_org(width, -1), cur_org(width, -1);
  // decisions: 0 start, 1 from the left, 2 from below
  std::vector<std::vector<std::uint8_t>> dec;
  std::vector<Index> row_lo;
  if (keep_path) {
    dec.resize(static_cast<std::size_t>(end.j - jlo + 1));
    row_lo.resize(dec.size());
  }

  std::vector<double> w(width);
  Index prev_reach = end.i + 1;  // leftmost finite column of the previous row
  for (Index j = jlo; j <= end.j; ++j) {
    const std::size_t r = static_cast<std::size_t>(j - jlo);
    const auto& scols = sr.cols[r];
    Index reach = prev_reach;
    if (!scols.empty()) reach = std::min(reach, scols.front());
    if (reach > end.i) {
      prev_reach = reach;
      std::swap(prev, cur);
      std::swap(prev_org, cur_org);
      continue;
    }
    std::uint8_t* drow = nullptr;
    if (keep_path) {
      dec[r].assign(static_cast<std::size_t>(end.i - reach + 1), 0);
      row_lo[r] = reach;
      drow = dec[r].data() - reach;
    }
    field.fill_row(j, reach, end.i, w.data());
    const double* wr = w.data() - reach;
    double* cr = cur.data() - ilo;
    const double* pr = prev.data() - ilo;
    int* co = cur_org.data() - ilo;
    const int* po = prev_org.data() - ilo;
    std::size_t sk = 0;
    // next start column in this row, or past the end
    Index next_start = scols.empty() ? end.i + 1 : scols[0];
    double left = kNegInf;
    int left_org = -1;
    for (Index i = reach; i <= end.i; ++i) {
      const double down = i >= prev_reach ? pr[i] : kNegInf;
      const bool from_down = down >= left;
      double via = (from_down ? down : left) + wr[i];
      int org = from_down ? po[i] : left_org;
      std::uint8_t d = from_down ? 2 : 1;
      if (i == next_start) [[unlikely]] {
        if (!(via > 0.0)) {
          via = 0.0;
          org = sr.ids[r][sk];
          d = 0;
        }
        ++sk;
        next_start = sk < scols.size() ? scols[sk] : end.i + 1;
      }
      cr[i] = via;
      co[i] = org;
      if (drow) drow[i] = d;
      left = via;
      left_org = org;
    }
    prev_reach = reach;
    std::swap(prev, cur);
    std::swap(prev_org, cur_org);
  }

  const std::size_t ce = static_cast<std::size_t>(end.i - ilo);
  if (prev_reach > end.i || prev[ce] == kNegInf)
    throw GeometryError("end point not reachable from the start set");

  PassageResult res;
  res.value = prev[ce];
  res.origin = starts[static_cast<std::size_t>(prev_org[ce])];
  if (keep_path) {
    Point p = end;
    for (;;) {
      res.path.push_back(p);
      const std::size_t r = static_cast<std::size_t>(p.j - jlo);
      std::uint8_t d = dec[r][static_cast<std::size_t>(p.i - row_lo[r])];
      if (d == 0) break;
      if (d == 1)
        --p.i;
      else
        --p.j;
    }
    std::reverse(res.path.begin(), res.path.end());
  }
  return res;
}

double last_passage_value(const WeightField& field, const std::vector<Point>& starts, Point end) {
  return last_passage(field, starts, end, false).value;
}

namespace {

void enumerate_rec(const WeightField& f, Index i, Index j, Point end, double acc, double& best) {
  if (i == end.i && j == end.j) {
    best = std::max(best, acc);
    return;
  }
  if (j < end.j) enumerate_rec(f, i, j + 1, end, acc + f.at(i, j + 1), best);
  if (i < end.i) enumerate_rec(f, i + 1, j, end, acc + f.at(i + 1, j), best);
}

}  // namespace

double enumerate_oracle(const WeightField& field, Point start, Point end) {
  if (start.i > end.i || start.j > end.j)
    throw GeometryError("start is not weakly south-west of end");
  if (end.i - start.i > 12 || end.j - start.j > 12)
    throw GuardError("enumeration span exceeds 12 in some direction");
  if (!field.bbox().contains(start) || !field.bbox().contains(end))
    throw GeometryError("points outside weight field");
  double best = kNegInf;
  enumerate_rec(field, start.i, start.j, end, 0.0, best);
  return best;
}

Scenario parse_scenario(const std::string& name) {
  std::string s;
  for (char ch : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "f1f1") return Scenario::F1F1;
  if (s == "f2f1") return Scenario::F2F1;
  if (s == "f2f2") return Scenario::F2F2;
  if (s == "custom") return Scenario::Custom;
  throw ParameterError("unknown scenario '" + name + "' (f1f1|f2f1|f2f2)");
}

std::string scenario_name(Scenario sc) {
  switch (sc) {
    case Scenario::F1F1: return "f1f1";
    case Scenario::F2F1: return "f2f1";
    case Scenario::F2F2: return "f2f2";
    case Scenario::Custom: return "custom";
  }
  return "custom";
}

Point endpoint(double t, double eta0, double u) {
  if (!(t > 0.0)) throw ParameterError("t must be positive");
  double eta = eta0 + u * std::pow(t, -2.0 / 3.0);
  return {static_cast<Index>(std::floor(eta * t)), static_cast<Index>(std::floor(t))};
}

Bbox Geometry::bbox() const {
  Bbox b{end.i, end.i, end.j, end.j};
  for (const auto* set : {&start_plus, &start_minus})
    for (const Point& p : *set) {
      b.i0 = std::min(b.i0, p.i);
      b.j0 = std::min(b.j0, p.j);
    }
  return b;
}

namespace {

// Points base + k*dir, k = k0.., kept while weakly south-west of E and k <= kproj + trunc.
void add_half_line(std::vector<Point>& out, Point base, Point dir, Index k0, Point E, Index trunc) {
  double dot = static_cast<double>((E.i - base.i) * dir.i + (E.j - base.j) * dir.j);
  double norm = static_cast<double>(dir.i * dir.i + dir.j * dir.j);
  Index kproj = std::max<Index>(0, static_cast<Index>(std::llround(dot / norm)));
  for (Index k = k0; k <= kproj + trunc; ++k) {
    Point p{base.i + k * dir.i, base.j + k * dir.j};
    if (p.i > E.i || p.j > E.j) {
      // moving further along dir never comes back into the quadrant
      if ((dir.i >= 0 && p.i > E.i) || (dir.j >= 0 && p.j > E.j)) break;
      continue;
    }
    out.push_back(p);
  }
}

}  // namespace

Geometry make_geometry(Scenario sc, double t, double eta0, double u, double beta_param,
                       Index truncation_len) {
  if (!(t > 0.0)) throw ParameterError("t must be positive");
  Geometry g;
  g.scenario = sc;
  g.eta0 = eta0;
  g.u = u;
  g.beta_param = beta_param;
  g.t = t;
  g.truncation_len =
      truncation_len < 0 ? static_cast<Index>(std::ceil(2.0 * t)) : truncation_len;
  g.end = endpoint(t, eta0, u);
  if (g.end.i < 0 || g.end.j < 0) throw GeometryError("end point must lie in the first quadrant");
  const Point E = g.end;
  const Index T = g.truncation_len;
  const Index B = static_cast<Index>(std::floor(beta_param * t));
  switch (sc) {
    case Scenario::F1F1:
      add_half_line(g.start_plus, {0, 0}, {-1, 1}, 0, E, T);
      add_half_line(g.start_minus, {0, 0}, {1, -1}, 0, E, T);
      break;
    case Scenario::F2F1:
      if (B < 0) throw ParameterError("beta must be >= 0");
      for (Index i = -B; i <= 0; ++i) g.start_plus.push_back({i, 0});
      add_half_line(g.start_plus, {-B, 0}, {0, 1}, 1, E, T);
      add_half_line(g.start_minus, {0, 0}, {1, -1}, 0, E, T);
      break;
    case Scenario::F2F2:
      if (B < 0) throw ParameterError("beta must be >= 0");
      for (Index i = -B; i <= 0; ++i) g.start_plus.push_back({i, 0});
      add_half_line(g.start_plus, {-B, 0}, {0, 1}, 1, E, T);
      for (Index j = -B; j <= 0; ++j) g.start_minus.push_back({0, j});
      add_half_line(g.start_minus, {0, -B}, {1, 0}, 1, E, T);
      break;
    case Scenario::Custom:
      throw ParameterError("custom geometries are assembled by the caller");
  }
  return g;
}

CrossingProbe CrossingProbe::make(double t, double eta, double beta_exponent,
                                  std::vector<double> gamma, bool enforce_range) {
  if (!(beta_exponent > 1.0 / 3.0 && beta_exponent <= 1.0))
    throw ParameterError("crossing exponent must lie in (1/3, 1]");
  if (!(t > 0.0)) throw ParameterError("t must be positive");
  const double gmax = 1.0 - std::pow(t, beta_exponent - 1.0);
  CrossingProbe p;
  p.beta_exponent = beta_exponent;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    double g = gamma[k];
    if (k > 0 && !(g > gamma[k - 1])) throw ParameterError("gamma grid must be strictly increasing");
    if (g < 0.0 || g > 1.0) throw ParameterError("gamma must lie in [0,1]");
    if (enforce_range && g > gmax + 1e-12)
      throw ParameterError("gamma beyond 1 - t^(beta-1)");
    p.points.push_back({static_cast<Index>(std::floor(g * eta * t)),
                        static_cast<Index>(std::floor(g * t))});
  }
  p.gamma = std::move(gamma);
  return p;
}

std::vector<double> CrossingProbe::row_grid(double t, double beta_exponent) {
  const double gmax = 1.0 - std::pow(t, beta_exponent - 1.0);
  std::vector<double> g;
  for (Index k = 0;; ++k) {
    double gk = (static_cast<double>(k) + 0.5) / t;
    if (gk > gmax) break;
    g.push_back(gk);
  }
  return g;
}

std::vector<bool> path_hits(const PassageResult& result, const CrossingProbe& probe) {
  std::vector<bool> hits(probe.points.size(), false);
  if (result.path.empty()) return hits;
  const Index s0 = result.path.front().i + result.path.front().j;
  const Index n = static_cast<Index>(result.path.size());
  for (std::size_t k = 0; k < probe.points.size(); ++k) {
    const Point& d = probe.points[k];
    Index idx = d.i + d.j - s0;  // monotone paths visit each antidiagonal once
    if (idx >= 0 && idx < n && result.path[static_cast<std::size_t>(idx)] == d) hits[k] = true;
  }
  return hits;
}

}  // namespace shocklab
