#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shocklab/errors.hpp"
#include "shocklab/experiments.hpp"
#include "shocklab/kernels.hpp"
#include "shocklab/lattice_lpp.hpp"
#include "shocklab/shock_laws.hpp"
#include "shocklab/stats.hpp"
#include "shocklab/tracy_widom.hpp"

namespace py = pybind11;
using namespace shocklab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// rows are j, columns are i; (i0, j0) is the lower-left cell
WeightField field_of(const Array& w, Index i0, Index j0) {
  if (w.ndim() != 2) throw ParameterError("weights must be a 2-d array");
  const auto rows = static_cast<Index>(w.shape(0)), cols = static_cast<Index>(w.shape(1));
  std::vector<double> v(w.data(), w.data() + w.size());
  return WeightField::from_values(Bbox{i0, i0 + cols - 1, j0, j0 + rows - 1}, std::move(v));
}

RegionSpec region_of(const std::string& rule, double alpha) {
  if (rule == "split") return RegionSpec::row_split(alpha);
  if (rule == "uniform") return RegionSpec::uniform(alpha);
  if (rule == "lower_right") return RegionSpec::lower_right(alpha);
  throw ParameterError("rule must be split, uniform or lower_right");
}

TWLaw tw_law_of(const std::string& name) {
  if (name == "f1" || name == "F1") return TWLaw::F1;
  if (name == "f2" || name == "F2") return TWLaw::F2;
  throw ParameterError("law must be f1 or f2");
}

KernelSpec spec_of(const std::string& kind, int n, double t, double alpha, int M) {
  KernelSpec s;
  s.kind = parse_kernel_kind(kind);
  s.n = n;
  s.t = t;
  s.alpha = alpha;
  s.M = M;
  return s;
}

}  // namespace

PYBIND11_MODULE(_impl, m) {
  m.doc() = "last passage percolation, TASEP kernels and shock limit laws";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<GuardError>(m, "GuardError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "sample_field",
      [](const std::string& rule, double alpha, Index i0, Index i1, Index j0, Index j1, std::uint64_t seed) {
        const WeightField f = WeightField::sample(region_of(rule, alpha), Bbox{i0, i1, j0, j1}, seed);
        Array out({j1 - j0 + 1, i1 - i0 + 1});
        auto a = out.mutable_unchecked<2>();
        for (Index j = j0; j <= j1; ++j) f.fill_row(j, i0, i1, &a(j - j0, 0));
        return out;
      },
      py::arg("rule"), py::arg("alpha"), py::arg("i0"), py::arg("i1"), py::arg("j0"), py::arg("j1"), py::arg("seed"));

  m.def(
      "last_passage",
      [](const Array& w, Index i0, Index j0, const std::vector<std::pair<Index, Index>>& starts,
         std::pair<Index, Index> end) {
        const WeightField f = field_of(w, i0, j0);
        std::vector<Point> st;
        for (auto [i, j] : starts) st.push_back({i, j});
        const PassageResult r = last_passage(f, st, {end.first, end.second}, true);
        std::vector<std::pair<Index, Index>> path;
        for (const Point& p : r.path) path.emplace_back(p.i, p.j);
        return py::make_tuple(r.value, path);
      },
      py::arg("weights"), py::arg("i0"), py::arg("j0"), py::arg("starts"), py::arg("end"));

  m.def(
      "enumerate_oracle",
      [](const Array& w, Index i0, Index j0, std::pair<Index, Index> start, std::pair<Index, Index> end) {
        return enumerate_oracle(field_of(w, i0, j0), {start.first, start.second}, {end.first, end.second});
      },
      py::arg("weights"), py::arg("i0"), py::arg("j0"), py::arg("start"), py::arg("end"));

  m.def(
      "tw_cdf", [](const std::string& law, double s, int nodes) {
        TWQuadrature q;
        q.nodes = nodes;
        return tw_cdf(tw_law_of(law), s, q);
      },
      py::arg("law"), py::arg("s"), py::arg("nodes") = 96);

  m.def(
      "law_json",
      [](const std::string& scenario, double alpha, double beta) {
        return law_constants(parse_scenario(scenario), alpha, beta).to_json();
      },
      py::arg("scenario"), py::arg("alpha"), py::arg("beta") = 0.0);

  m.def(
      "kernel_matrix",
      [](const std::string& kind, int n, double t, double alpha, int lo, int hi, int M) {
        return kernel_matrix(spec_of(kind, n, t, alpha, M), lo, hi);
      },
      py::arg("kind"), py::arg("n"), py::arg("t"), py::arg("alpha"), py::arg("lo"), py::arg("hi"), py::arg("M") = 0);

  m.def(
      "fredholm_cdf",
      [](const std::string& kind, int n, double t, double alpha, int s, int M) {
        return fredholm_cdf(spec_of(kind, n, t, alpha, M), s);
      },
      py::arg("kind"), py::arg("n"), py::arg("t"), py::arg("alpha"), py::arg("s"), py::arg("M") = 0);

  m.def(
      "ks_distance",
      [](std::vector<double> samples, const std::string& law, double scale, double shift) {
        const TWLaw L = tw_law_of(law);
        return ks_distance(EmpiricalCDF(std::move(samples)), [&](double s) { return tw_cdf_fast(L, (s - shift) / scale); });
      },
      py::arg("samples"), py::arg("law"), py::arg("scale") = 1.0, py::arg("shift") = 0.0);

  m.def("dkw_epsilon", &dkw_epsilon, py::arg("n"), py::arg("confidence"));

  m.def(
      "product_law_json",
      [](const std::string& config) {
        const ExperimentConfig cfg = ExperimentConfig::from_json(config);
        py::gil_scoped_release unlock;
        return run_product_law(cfg).to_json();
      },
      py::arg("config"));

  m.def(
      "tagged_particle_json",
      [](const std::string& kind, int n, double t, double alpha, int runs, std::uint64_t seed, int M) {
        py::gil_scoped_release unlock;
        return run_tagged_particle(parse_kernel_kind(kind), n, t, alpha, {}, runs, seed, 0, M).to_json();
      },
      py::arg("kind"), py::arg("n"), py::arg("t"), py::arg("alpha"), py::arg("runs"), py::arg("seed") = 7,
      py::arg("M") = 0);
}
