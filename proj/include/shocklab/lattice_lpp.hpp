#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shocklab/rng.hpp"

namespace shocklab {

using Index = std::int64_t;

struct Point {
  Index i = 0;
  Index j = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

// Inclusive integer rectangle [i0,i1] x [j0,j1].
struct Bbox {
  Index i0 = 0, i1 = -1, j0 = 0, j1 = -1;

  bool empty() const { return i1 < i0 || j1 < j0; }
  bool contains(Point p) const { return p.i >= i0 && p.i <= i1 && p.j >= j0 && p.j <= j1; }
  Index width() const { return i1 - i0 + 1; }
  Index height() const { return j1 - j0 + 1; }

  // "i0:i1,j0:j1"
  static Bbox parse(const std::string& text);
  std::string str() const;
};

// Rate of the exponential weight at each cell.
struct RegionSpec {
  enum class Rule { RowSplit, LowerRight, Uniform, Custom };

  double alpha = 1.0;
  Rule rule = Rule::RowSplit;
  std::function<double(Index, Index)> custom;

  // rate 1 for j >= 1, alpha for j <= 0
  static RegionSpec row_split(double alpha);
  // alpha only for j <= 0 and i >= 0: the row-0 cells left of the origin stay at rate 1
  static RegionSpec lower_right(double alpha);
  static RegionSpec uniform(double rate = 1.0);
  static RegionSpec with_rule(std::function<double(Index, Index)> rule);

  double rate(Index i, Index j) const {
    switch (rule) {
      case Rule::RowSplit: return j >= 1 ? 1.0 : alpha;
      case Rule::LowerRight: return (j >= 1 || i < 0) ? 1.0 : alpha;
      case Rule::Uniform: return alpha;
      case Rule::Custom: return custom(i, j);
    }
    return alpha;
  }
  void validate() const;
};

// Exponential weights on a box. Lazy fields hash (seed, i, j) on every access,
// materialized fields hold an explicit array (row-major, rows are j).
class WeightField {
 public:
  static WeightField sample(const RegionSpec& region, const Bbox& bbox, std::uint64_t seed);
  static WeightField from_values(const Bbox& bbox, std::vector<double> values);

  double at(Index i, Index j) const {
    if (!values_.empty()) return values_[offset(i, j)];
    return exp_by_inverse_cdf(open_unit(cell_hash(seed_, i, j)), region_.rate(i, j));
  }
  double at(Point p) const { return at(p.i, p.j); }
  // weights of row j, columns i0..i1, into out[0..i1-i0]; bit-identical to at()
  void fill_row(Index j, Index i0, Index i1, double* out) const;

  // Overwrites one weight; materializes a lazy field first.
  void set(Index i, Index j, double w);
  WeightField materialized() const;

  const Bbox& bbox() const { return bbox_; }
  std::uint64_t seed() const { return seed_; }
  const RegionSpec& region() const { return region_; }
  bool is_materialized() const { return !values_.empty(); }

  // i,j,weight rows
  std::string to_csv() const;

 private:
  std::size_t offset(Index i, Index j) const {
    return static_cast<std::size_t>((j - bbox_.j0) * bbox_.width() + (i - bbox_.i0));
  }

  Bbox bbox_;
  std::uint64_t seed_ = 0;
  RegionSpec region_;
  std::vector<double> values_;
};

struct PassageResult {
  double value = 0.0;
  std::vector<Point> path;  // origin first, end last; empty for value-only queries
  Point origin;

  // k,i,j rows
  std::string to_csv() const;
};

// Last passage time; the start vertex weight is not counted.
// Ties between predecessors go to the cell below (the path arrives by an up step).
PassageResult last_passage(const WeightField& field, const std::vector<Point>& starts, Point end,
                           bool keep_path = true);
double last_passage_value(const WeightField& field, const std::vector<Point>& starts, Point end);

// Brute force over all up-right paths; span at most 12 in each direction.
double enumerate_oracle(const WeightField& field, Point start, Point end);

enum class Scenario { F1F1, F2F1, F2F2, Custom };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario sc);

struct Geometry {
  Scenario scenario = Scenario::Custom;
  std::vector<Point> start_plus;
  std::vector<Point> start_minus;
  double eta0 = 0.0;
  double u = 0.0;
  double beta_param = 0.0;
  Index truncation_len = 0;
  double t = 0.0;
  Point end;

  // smallest box holding both start sets and the end point
  Bbox bbox() const;
};

// E(t) = (floor(eta t), floor(t)) with eta = eta0 + u t^{-2/3}
Point endpoint(double t, double eta0, double u);

// Truncated start sets for one of the three shock scenarios at time t.
// beta_param is the boundary position of the point-to-point pieces (unused for F1F1).
// truncation_len < 0 selects ceil(2t).
Geometry make_geometry(Scenario sc, double t, double eta0, double u, double beta_param,
                       Index truncation_len = -1);

struct CrossingProbe {
  std::vector<double> gamma;
  double beta_exponent = 1.0;
  std::vector<Point> points;

  // D_gamma = (floor(gamma eta t), floor(gamma t)). With enforce_range the grid must lie in
  // [0, 1 - t^{beta-1}].
  static CrossingProbe make(double t, double eta, double beta_exponent, std::vector<double> gamma,
                            bool enforce_range = true);
  // gamma_k = (k + 1/2)/t for all k with gamma_k <= 1 - t^{beta-1}: one probe per row,
  // so a monotone path crossing the segment from 0 to E must hit one of them.
  static std::vector<double> row_grid(double t, double beta_exponent);
};

std::vector<bool> path_hits(const PassageResult& result, const CrossingProbe& probe);

}  // namespace shocklab
