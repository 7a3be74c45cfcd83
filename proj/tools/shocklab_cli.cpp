// shocklab command line: lpp, tasep, kernel, tw, law and verify subcommands.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "shocklab/errors.hpp"
#include "shocklab/experiments.hpp"
#include "shocklab/kernels.hpp"
#include "shocklab/lattice_lpp.hpp"
#include "shocklab/shock_laws.hpp"
#include "shocklab/stats.hpp"
#include "shocklab/tasep.hpp"
#include "shocklab/tracy_widom.hpp"

using namespace shocklab;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 7;

std::string g_command_line;

RegionSpec region_rule(const std::string& rule, double alpha) {
  if (rule == "split") return RegionSpec::row_split(alpha);
  if (rule == "lower_right") return RegionSpec::lower_right(alpha);
  return RegionSpec::uniform(alpha);
}

struct Common {
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, bool with_format = false) {
  app->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0: available parallelism)")->capture_default_str();
  app->add_option("--out", c.out, "output file (default stdout; relative paths go under $SHOCKLAB_OUT_DIR if set)");
  if (with_format) app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

// Writes the primary output; run metadata (timestamp, command) goes to a sidecar so the primary
// file stays byte-identical across reruns.
void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::path p(c.out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("SHOCKLAB_OUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file " + p.string());
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
  }
  ojson meta;
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["created"] = buf;
  meta["command"] = g_command_line;
  meta["seed"] = c.seed;
  std::ofstream m(p.string() + ".meta.json");
  m << meta.dump(2) << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
  // a:b:step
  std::vector<double> v;
  double a, b, h;
  char c1, c2;
  std::istringstream is(text);
  if (!(is >> a >> c1 >> b >> c2 >> h) || !(is >> std::ws).eof() || c1 != ':' || c2 != ':' || !(h > 0) || b < a)
    throw ParameterError("grid must look like a:b:step with step > 0 and a <= b");
  const long n = std::lround(std::floor((b - a) / h + 1e-9));
  for (long k = 0; k <= n; ++k) v.push_back(a + static_cast<double>(k) * h);
  return v;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  const int v = std::stoi(text, &used);
  if (used != text.size()) throw std::invalid_argument(text);
  return v;
}

std::vector<int> parse_int_range(const std::string& text) {
  // a:b, a single integer, or a comma list
  std::vector<int> v;
  auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      std::istringstream is(text);
      for (std::string item; std::getline(is, item, ',');) v.push_back(parse_int(item));
      if (v.empty() || text.back() == ',') throw std::invalid_argument(text);
    } else {
      int a = parse_int(text.substr(0, colon)), b = parse_int(text.substr(colon + 1));
      if (b < a) throw ParameterError("range a:b needs a <= b");
      for (int k = a; k <= b; ++k) v.push_back(k);
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ParameterError*>(&e)) throw;
    throw ParameterError("bad integer range: " + text);
  }
  return v;
}

Point parse_point(const std::string& text) {
  Index i, j;
  char c;
  std::istringstream is(text);
  if (!(is >> i >> c >> j) || !(is >> std::ws).eof() || c != ',') throw ParameterError("point must look like i,j");
  return {i, j};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string path_json(const PassageResult& r) {
  ojson j;
  j["value"] = r.value;
  j["origin"] = {r.origin.i, r.origin.j};
  j["path_length"] = r.path.size();
  return j.dump(2);
}

int check_exit(bool ok) {
  std::cerr << (ok ? "checks: pass\n" : "checks: FAIL\n");
  return ok ? 0 : 1;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  for (int k = 0; k < argc; ++k) g_command_line += (k ? " " : "") + std::string(argv[k]);

  CLI::App app{"shocklab: last passage percolation, TASEP shocks and their limit laws"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ------------------------------------------------------------------ lpp
  auto* lpp = app.add_subcommand("lpp", "last passage percolation");
  lpp->require_subcommand(1);

  Common lf_c;
  double lf_alpha = 0.5;
  std::string lf_bbox = "0:9,0:9", lf_rule = "split";
  auto* lpp_field = lpp->add_subcommand("field", "sample a weight field as CSV (i,j,weight)");
  add_common(lpp_field, lf_c);
  lpp_field->add_option("--alpha", lf_alpha, "rate on rows j <= 0")->capture_default_str();
  lpp_field->add_option("--bbox", lf_bbox, "i0:i1,j0:j1")->capture_default_str();
  lpp_field->add_option("--rule", lf_rule, "split, uniform or lower_right")->check(CLI::IsMember({"split", "uniform", "lower_right"}))->capture_default_str();
  lpp_field->callback([&] {
    RegionSpec r = region_rule(lf_rule, lf_alpha);
    emit(lf_c, WeightField::sample(r, Bbox::parse(lf_bbox), lf_c.seed).to_csv());
  });

  Common lp_c;
  std::string lp_start = "0,0", lp_end = "5,5", lp_rule = "uniform";
  double lp_alpha = 1.0;
  auto* lpp_point = lpp->add_subcommand("point", "point-to-point passage time with its maximizer");
  add_common(lpp_point, lp_c, true);
  lpp_point->add_option("--start", lp_start, "i,j")->capture_default_str();
  lpp_point->add_option("--end", lp_end, "i,j")->capture_default_str();
  lpp_point->add_option("--alpha", lp_alpha, "rate (uniform), rate on rows j <= 0 (split) or on the cells i >= 0, j <= 0 (lower_right)")->capture_default_str();
  lpp_point->add_option("--rule", lp_rule, "split, uniform or lower_right")->check(CLI::IsMember({"split", "uniform", "lower_right"}))->capture_default_str();
  lpp_point->callback([&] {
    const Point s = parse_point(lp_start), e = parse_point(lp_end);
    RegionSpec r = region_rule(lp_rule, lp_alpha);
    const WeightField f = WeightField::sample(r, Bbox{std::min(s.i, e.i), std::max(s.i, e.i), std::min(s.j, e.j), std::max(s.j, e.j)}, lp_c.seed);
    const PassageResult res = last_passage(f, {s}, e, true);
    if (lp_c.format == "csv") {
      emit(lp_c, res.to_csv());
    } else {
      ojson j = ojson::parse(path_json(res));
      if (e.i - s.i <= 12 && e.j - s.j <= 12) j["oracle"] = enumerate_oracle(f, s, e);
      emit(lp_c, j.dump(2));
    }
  });

  Common lg_c;
  std::string lg_scenario = "f1f1", lg_side = "both";
  double lg_alpha = 0.5, lg_beta = 0.0, lg_t = 100, lg_u = 0;
  auto* lpp_shock = lpp->add_subcommand("shock", "passage times from the two start sets of a shock scenario");
  add_common(lpp_shock, lg_c, true);
  lpp_shock->add_option("--scenario", lg_scenario, "f1f1, f2f1 or f2f2")->capture_default_str();
  lpp_shock->add_option("--alpha", lg_alpha, "slow rate (1 for f2f2)")->capture_default_str();
  lpp_shock->add_option("--beta", lg_beta, "f2f1: offset b; f2f2: beta")->capture_default_str();
  lpp_shock->add_option("--t", lg_t, "time scale")->capture_default_str();
  lpp_shock->add_option("--u", lg_u, "endpoint shift")->capture_default_str();
  lpp_shock->add_option("--side", lg_side, "plus, minus or both (csv path output needs one side)")
      ->check(CLI::IsMember({"plus", "minus", "both"}))->capture_default_str();
  lpp_shock->callback([&] {
    ExperimentConfig cfg;
    cfg.scenario = parse_scenario(lg_scenario);
    cfg.alpha = cfg.scenario == Scenario::F2F2 ? 1.0 : lg_alpha;
    cfg.beta_param = lg_beta;
    cfg.u = lg_u;
    const ShockLaw law = config_law(cfg);
    const Geometry g = config_geometry(cfg, lg_t);
    const WeightField f = WeightField::sample(scenario_region(cfg.scenario, cfg.alpha), g.bbox(), lg_c.seed);
    if (lg_c.format == "csv") {
      if (lg_side == "both") throw ParameterError("--format csv needs --side plus or minus");
      emit(lg_c, last_passage(f, lg_side == "plus" ? g.start_plus : g.start_minus, g.end, true).to_csv());
      return;
    }
    ojson j;
    j["scenario"] = scenario_name(cfg.scenario);
    j["t"] = lg_t;
    j["end"] = {g.end.i, g.end.j};
    j["mu"] = law.mu;
    auto side = [&](const char* name, const std::vector<Point>& st) {
      PassageResult r = last_passage(f, st, g.end, false);
      j[name] = {{"value", r.value}, {"rescaled", rescale_lpp(law, lg_t, lg_u, r.value)}, {"origin", {r.origin.i, r.origin.j}}};
    };
    if (lg_side != "minus") side("plus", g.start_plus);
    if (lg_side != "plus") side("minus", g.start_minus);
    emit(lg_c, j.dump(2));
  });

  // ------------------------------------------------------------------ tasep
  auto* tasep = app.add_subcommand("tasep", "continuous-time TASEP");
  tasep->require_subcommand(1);

  struct IcFlags {
    std::string ic = "f1f1", rates = "auto";
    double alpha = 0.5, v = 0.0, ell = 0.0, beta = 0.0, t = 10.0;
    int M = 0;
    Index first = 0, last = 10;
  };
  auto add_ic = [](CLI::App* a, IcFlags& f) {
    a->add_option("--ic", f.ic, "half_flat, f1f1, f2f1, f2f2, finite_m or step")->capture_default_str();
    a->add_option("--rates", f.rates, "auto, split, finite_m or uniform")->capture_default_str();
    a->add_option("--alpha", f.alpha, "slow rate")->capture_default_str();
    a->add_option("--v", f.v, "f2f1 block offset per unit ell")->capture_default_str();
    a->add_option("--ell", f.ell, "f2f1/f2f2 length scale")->capture_default_str();
    a->add_option("--beta", f.beta, "f2f2 offset")->capture_default_str();
    a->add_option("--M", f.M, "finite_m slow particle count")->capture_default_str();
    a->add_option("--t", f.t, "horizon")->capture_default_str();
    a->add_option("--first", f.first, "first tracked label")->capture_default_str();
    a->add_option("--last", f.last, "last tracked label")->capture_default_str();
  };
  auto build_ic = [](const IcFlags& f, InitialCondition& ic, RateProfile& rp) {
    switch (parse_ic_kind(f.ic)) {
      case InitialCondition::Kind::HalfFlat: ic = InitialCondition::half_flat(); break;
      case InitialCondition::Kind::ShockF1F1: ic = InitialCondition::shock_f1f1(); break;
      case InitialCondition::Kind::ShockF2F1: ic = InitialCondition::shock_f2f1(f.v, f.ell); break;
      case InitialCondition::Kind::ShockF2F2: ic = InitialCondition::shock_f2f2(f.beta, f.ell); break;
      case InitialCondition::Kind::FiniteM: ic = InitialCondition::finite_m(f.M); break;
      case InitialCondition::Kind::Step: ic = InitialCondition::step(); break;
    }
    std::string r = f.rates;
    if (r == "auto") {
      if (ic.kind == InitialCondition::Kind::FiniteM) r = "finite_m";
      else if (ic.kind == InitialCondition::Kind::ShockF1F1 || ic.kind == InitialCondition::Kind::ShockF2F1) r = "split";
      else r = "uniform1";
    }
    if (r == "split") rp = RateProfile::split(f.alpha);
    else if (r == "finite_m") rp = RateProfile::finite_m(f.alpha, f.M);
    else if (r == "uniform") rp = RateProfile::uniform(f.alpha);
    else if (r == "uniform1") rp = RateProfile::uniform(1.0);
    else throw ParameterError("unknown rate profile " + r);
  };

  Common ts_c;
  IcFlags ts_f;
  auto* tasep_sim = tasep->add_subcommand("simulate", "trajectory CSV (time,particle,position)");
  add_common(tasep_sim, ts_c);
  add_ic(tasep_sim, ts_f);
  tasep_sim->callback([&] {
    InitialCondition ic;
    RateProfile rp;
    build_ic(ts_f, ic, rp);
    emit(ts_c, simulate(ic, rp, ts_f.t, ts_f.first, ts_f.last, ts_c.seed).to_csv());
  });

  Common tp_c;
  IcFlags tp_f;
  Index tp_lo = -10, tp_hi = 10, tp_bin = 5;
  auto* tasep_prof = tasep->add_subcommand("profile", "density profile CSV (bin_center,density) at the horizon");
  add_common(tasep_prof, tp_c);
  add_ic(tasep_prof, tp_f);
  tasep_prof->add_option("--lo", tp_lo, "left end (inclusive)")->capture_default_str();
  tasep_prof->add_option("--hi", tp_hi, "right end (exclusive)")->capture_default_str();
  tasep_prof->add_option("--bin", tp_bin, "bin width in sites")->capture_default_str();
  tasep_prof->callback([&] {
    InitialCondition ic;
    RateProfile rp;
    build_ic(tp_f, ic, rp);
    const Trajectory tr = simulate(ic, rp, tp_f.t, tp_f.first, tp_f.last, tp_c.seed);
    emit(tp_c, density_csv(density_profile(tr, tp_f.t, tp_lo, tp_hi, tp_bin)));
  });

  Common tk_c;
  std::string tk_scenario = "f1f1";
  double tk_alpha = 0.5, tk_beta = 0.5, tk_t = 1000;
  int tk_runs = 20;
  auto* tasep_shock = tasep->add_subcommand("shock", "shock densities and location averaged over runs");
  add_common(tasep_shock, tk_c, true);
  tasep_shock->add_option("--scenario", tk_scenario, "f1f1, f2f1 or f2f2")->capture_default_str();
  tasep_shock->add_option("--alpha", tk_alpha, "slow rate")->capture_default_str();
  tasep_shock->add_option("--beta", tk_beta, "f2f2 TASEP offset in (0,1)")->capture_default_str();
  tasep_shock->add_option("--t", tk_t, "time")->capture_default_str();
  tasep_shock->add_option("--runs", tk_runs, "independent runs")->capture_default_str();
  tasep_shock->callback([&] {
    auto r = run_shock_profile(parse_scenario(tk_scenario), tk_alpha, tk_beta, tk_t, tk_runs, tk_c.seed, tk_c.threads);
    emit(tk_c, tk_c.format == "csv" ? r.to_csv() : r.to_json());
  });

  // ------------------------------------------------------------------ kernel
  auto* kernel = app.add_subcommand("kernel", "finite-time kernels and Fredholm determinants");
  kernel->require_subcommand(1);

  struct KFlags {
    std::string kind = "ktilde";
    int n = 1, M = 0, nodes = 64;
    double t = 1.0, alpha = 0.5;
  };
  auto add_kernel = [](CLI::App* a, KFlags& f) {
    a->add_option("--kind", f.kind, "khat, ktilde, k0, k1, k2, finite_m or biorth")->capture_default_str();
    a->add_option("--n", f.n, "particle index")->capture_default_str();
    a->add_option("--M", f.M, "slow particle count (k0, finite_m, biorth)")->capture_default_str();
    a->add_option("--t", f.t, "time")->capture_default_str();
    a->add_option("--alpha", f.alpha, "slow rate")->capture_default_str();
    a->add_option("--nodes", f.nodes, "starting nodes per circle")->capture_default_str();
  };
  auto spec_of = [](const KFlags& f) {
    KernelSpec s;
    s.kind = parse_kernel_kind(f.kind);
    s.n = f.n;
    s.M = f.M;
    s.t = f.t;
    s.alpha = s.kind == KernelKind::Khat ? 1.0 : f.alpha;
    return s;
  };

  Common km_c;
  KFlags km_f;
  int km_lo = 0, km_hi = 0;
  bool km_lo_set = false;
  auto* kmat = kernel->add_subcommand("matrix", "kernel entries on [lo, hi]^2 as CSV; quadrature report on stderr");
  add_common(kmat, km_c);
  add_kernel(kmat, km_f);
  auto* lo_opt = kmat->add_option("--lo", km_lo, "first index (default: section start)");
  kmat->add_option("--hi", km_hi, "last index")->capture_default_str();
  kmat->callback([&] {
    km_lo_set = lo_opt->count() > 0;
    const KernelSpec s = spec_of(km_f);
    const int lo = km_lo_set ? km_lo : section_lo(s);
    ContourSet c;
    c.nodes = km_f.nodes;
    QuadratureReport rep;
    const auto k = kernel_matrix(s, lo, km_hi, c, &rep);
    std::cerr << rep.to_json() << '\n';
    emit(km_c, kernel_matrix_csv(k, lo));
  });

  Common kc_c;
  KFlags kc_f;
  std::string kc_s = "-2:4";
  auto* kcdf = kernel->add_subcommand("cdf", "P(x_n(t) > s) as CSV (s,probability)");
  add_common(kcdf, kc_c);
  add_kernel(kcdf, kc_f);
  kcdf->add_option("--s", kc_s, "thresholds a:b or a,b,c")->capture_default_str();
  kcdf->callback([&] {
    const KernelSpec s = spec_of(kc_f);
    const auto sl = parse_int_range(kc_s);
    ContourSet c;
    c.nodes = kc_f.nodes;
    const auto p = fredholm_cdf_grid(s, sl, c);
    std::string out = "s,probability\n";
    for (std::size_t k = 0; k < sl.size(); ++k) out += std::to_string(sl[k]) + "," + fmt(p[k]) + "\n";
    emit(kc_c, out);
  });

  Common kb_c;
  int kb_n = 5, kb_M = 2;
  double kb_t = 1.0, kb_alpha = 0.5;
  auto* kbio = kernel->add_subcommand("biorth", "pairing matrix of the biorthogonal functions");
  add_common(kbio, kb_c);
  kbio->add_option("--n", kb_n, "particle count N")->capture_default_str();
  kbio->add_option("--M", kb_M, "slow particles")->capture_default_str();
  kbio->add_option("--t", kb_t, "time")->capture_default_str();
  kbio->add_option("--alpha", kb_alpha, "slow rate")->capture_default_str();
  kbio->callback([&] {
    ojson j;
    double worst = 0;
    j["pairing"] = ojson::array();
    for (int a = 1; a <= kb_n; ++a) {
      ojson row = ojson::array();
      for (int b = 1; b <= kb_n; ++b) {
        const double v = biorthogonal_pairing(kb_n, kb_M, kb_t, kb_alpha, a, b);
        worst = std::max(worst, std::abs(v - (a == b ? 1.0 : 0.0)));
        row.push_back(v);
      }
      j["pairing"].push_back(row);
    }
    j["max_error"] = worst;
    emit(kb_c, j.dump(2));
  });

  Common kf_c;
  int kf_n = 2, kf_s = 2;
  double kf_t = 1.0, kf_alpha = 0.5;
  std::string kf_M = "1:8";
  auto* kfm = kernel->add_subcommand("finite-m", "determinant gaps between the M-slow-particle and limit kernels");
  add_common(kfm, kf_c);
  kfm->add_option("--n", kf_n, "particle index")->capture_default_str();
  kfm->add_option("--t", kf_t, "time")->capture_default_str();
  kfm->add_option("--alpha", kf_alpha, "slow rate")->capture_default_str();
  kfm->add_option("--s", kf_s, "threshold")->capture_default_str();
  kfm->add_option("--M", kf_M, "range a:b")->capture_default_str();
  kfm->callback([&] {
    const auto r = finite_m_convergence(kf_n, kf_t, kf_alpha, kf_s, parse_int_range(kf_M));
    ojson j;
    j["M"] = r.M_list;
    j["gaps"] = r.gaps;
    j["k0_max"] = r.k0_max;
    j["fitted_ratio"] = r.fitted_ratio;
    emit(kf_c, j.dump(2));
  });

  Common ka_c;
  double ka_alpha = 0.5, ka_kappa = 0.5, ka_s1 = 0, ka_s2 = 0;
  std::vector<double> ka_t{50, 200, 800};
  auto* kai = kernel->add_subcommand("airy1", "rescaled kernel against its Airy limit");
  add_common(kai, ka_c);
  kai->add_option("--alpha", ka_alpha, "slow rate in (0,1)")->capture_default_str();
  kai->add_option("--kappa", ka_kappa, "index fraction in (0, 2-alpha)")->capture_default_str();
  kai->add_option("--t", ka_t, "times (comma separated)")->delimiter(',')->capture_default_str();
  kai->add_option("--s1", ka_s1, "first rescaled position")->capture_default_str();
  kai->add_option("--s2", ka_s2, "second rescaled position")->capture_default_str();
  kai->callback([&] {
    const auto r = airy1_limit_check(ka_alpha, ka_kappa, ka_t, ka_s1, ka_s2);
    ojson j;
    j["t"] = r.t_list;
    j["sigma"] = r.sigma;
    j["limit"] = r.limit;
    j["rescaled"] = r.rescaled;
    j["deviation"] = r.deviation;
    j["lattice_rescaled"] = r.lattice_rescaled;
    j["lattice_deviation"] = r.lattice_deviation;
    emit(ka_c, j.dump(2));
  });

  // ------------------------------------------------------------------ tw
  auto* tw = app.add_subcommand("tw", "Tracy-Widom distribution functions");
  tw->require_subcommand(1);
  Common tw_c;
  std::string tw_law = "f2", tw_grid = "-5:5:0.5";
  int tw_nodes = 96;
  auto* tw_eval = tw->add_subcommand("eval", "CSV (s,F) on a grid");
  add_common(tw_eval, tw_c);
  tw_eval->add_option("--law", tw_law, "f1 or f2")->check(CLI::IsMember({"f1", "f2"}))->capture_default_str();
  tw_eval->add_option("--grid", tw_grid, "a:b:step")->capture_default_str();
  tw_eval->add_option("--nodes", tw_nodes, "quadrature nodes")->capture_default_str();
  tw_eval->callback([&] {
    TWQuadrature q;
    q.nodes = tw_nodes;
    const TWLaw law = tw_law == "f1" ? TWLaw::F1 : TWLaw::F2;
    std::string out = "s,F\n";
    for (double s : parse_grid(tw_grid)) out += fmt(s) + "," + fmt(tw_cdf(law, s, q)) + "\n";
    emit(tw_c, out);
  });

  // ------------------------------------------------------------------ law
  auto* lawc = app.add_subcommand("law", "limit-law constants");
  lawc->require_subcommand(1);
  Common ls_c;
  std::string ls_scenario = "f1f1";
  double ls_alpha = 0.5, ls_beta = 0.0;
  auto* law_show = lawc->add_subcommand("show", "all constants as JSON");
  add_common(law_show, ls_c);
  law_show->add_option("--scenario", ls_scenario, "f1f1, f2f1 or f2f2")->capture_default_str();
  law_show->add_option("--alpha", ls_alpha, "slow rate (ignored for f2f2)")->capture_default_str();
  law_show->add_option("--beta", ls_beta, "f2f1: offset b; f2f2: beta")->capture_default_str();
  law_show->callback([&] {
    const Scenario sc = parse_scenario(ls_scenario);
    emit(ls_c, law_constants(sc, sc == Scenario::F2F2 ? 1.0 : ls_alpha, ls_beta).to_json());
  });

  Common lc_c;
  std::string lc_scenario = "f1f1", lc_grid = "-6:6:0.5";
  double lc_alpha = 0.5, lc_beta = 0.0, lc_u = 0.0;
  auto* law_cdf = lawc->add_subcommand("cdf", "predicted CDFs as CSV (s,g1,g2,product)");
  add_common(law_cdf, lc_c);
  law_cdf->add_option("--scenario", lc_scenario, "f1f1, f2f1 or f2f2")->capture_default_str();
  law_cdf->add_option("--alpha", lc_alpha, "slow rate (ignored for f2f2)")->capture_default_str();
  law_cdf->add_option("--beta", lc_beta, "f2f1: offset b; f2f2: beta")->capture_default_str();
  law_cdf->add_option("--u", lc_u, "endpoint shift")->capture_default_str();
  law_cdf->add_option("--grid", lc_grid, "a:b:step")->capture_default_str();
  law_cdf->callback([&] {
    const Scenario sc = parse_scenario(lc_scenario);
    const ShockLaw law = law_constants(sc, sc == Scenario::F2F2 ? 1.0 : lc_alpha, lc_beta);
    std::string out = "s,g1,g2,product\n";
    for (double s : parse_grid(lc_grid))
      out += fmt(s) + "," + fmt(predicted_side_cdf(law, 1, lc_u, s)) + "," + fmt(predicted_side_cdf(law, 2, lc_u, s)) +
             "," + fmt(predicted_product_cdf(law, lc_u, s)) + "\n";
    emit(lc_c, out);
  });

  // ------------------------------------------------------------------ verify
  auto* verify = app.add_subcommand("verify", "Monte Carlo experiments with pass/fail checks (exit 1 on failure)");
  verify->require_subcommand(1);

  struct VFlags {
    Common c;
    std::string config, scenario = "f1f1";
    double alpha = 0.5, beta = 0.0, u = 0.0, nu = 0.6, beta_exponent = 0.9, M = 3.0, band = 0.06;
    std::vector<double> t{250, 1000};
    int samples = 1000;
    bool drop_minus = false, no_check = false;
    std::vector<CLI::Option*> opts;
  };
  auto add_verify = [](CLI::App* a, VFlags& f) {
    add_common(a, f.c, true);
    a->add_option("--config", f.config, "JSON experiment config; explicit flags override it");
    f.opts.push_back(a->add_option("--scenario", f.scenario, "f1f1, f2f1 or f2f2")->capture_default_str());
    f.opts.push_back(a->add_option("--alpha", f.alpha, "slow rate (ignored for f2f2)")->capture_default_str());
    f.opts.push_back(a->add_option("--beta", f.beta, "f2f1: offset b; f2f2: beta")->capture_default_str());
    f.opts.push_back(a->add_option("--u", f.u, "endpoint shift")->capture_default_str());
    f.opts.push_back(a->add_option("--t", f.t, "times (comma separated)")->delimiter(',')->capture_default_str());
    f.opts.push_back(a->add_option("--samples", f.samples, "samples per t")->capture_default_str());
    a->add_flag("--no-check", f.no_check, "report only");
  };
  auto config_of = [](const VFlags& f) {
    ExperimentConfig cfg;
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) throw ParameterError("cannot read config " + f.config);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = ExperimentConfig::from_json(ss.str());
    }
    const bool from_file = !f.config.empty();
    auto given = [&](std::size_t k) { return !from_file || f.opts[k]->count() > 0; };
    if (given(0)) cfg.scenario = parse_scenario(f.scenario);
    if (given(1)) cfg.alpha = f.alpha;
    if (cfg.scenario == Scenario::F2F2) cfg.alpha = 1.0;
    if (given(2)) cfg.beta_param = f.beta;
    if (given(3)) cfg.u = f.u;
    if (given(4)) cfg.t_list = f.t;
    if (given(5)) cfg.samples = f.samples;
    if (!from_file || f.c.seed != kDefaultSeed) cfg.seed = f.c.seed;
    if (!from_file || f.c.threads != 0) cfg.threads = f.c.threads;
    cfg.drop_minus = cfg.drop_minus || f.drop_minus;
    cfg.validate();
    return cfg;
  };

  VFlags vp;
  auto* v_prod = verify->add_subcommand("product", "max of the two one-sided passage times against the product law");
  add_verify(v_prod, vp);
  v_prod->add_flag("--drop-minus", vp.drop_minus, "use the plus side only (single-factor law)");
  v_prod->add_option("--band", vp.band, "KS bound at the last t")->capture_default_str();
  v_prod->callback([&] {
    const ExperimentConfig cfg = config_of(vp);
    std::cerr << "seed " << cfg.seed << '\n';
    const auto r = run_product_law(cfg);
    emit(vp.c, vp.c.format == "csv" ? r.to_csv() : r.to_json());
    std::vector<double> ks;
    for (const auto& row : r.rows) ks.push_back(row.ks);
    if (!vp.no_check) exit_code = check_exit(decreasing(ks) && ks.back() < vp.band);
  });

  VFlags vs;
  auto* v_slow = verify->add_subcommand("slow", "slow decorrelation exceedance fractions");
  add_verify(v_slow, vs);
  v_slow->add_option("--nu", vs.nu, "increment exponent in (1/3, 1)")->capture_default_str();
  v_slow->add_option("--M", vs.M, "threshold constant")->capture_default_str();
  v_slow->callback([&] {
    ExperimentConfig cfg = config_of(vs);
    cfg.nu = vs.nu;
    std::cerr << "seed " << cfg.seed << '\n';
    const auto r = run_slow_decorrelation(cfg, vs.M);
    emit(vs.c, vs.c.format == "csv" ? r.to_csv() : r.to_json());
    std::vector<double> fr;
    for (const auto& row : r.rows) fr.push_back(row.exceed_fraction);
    if (!vs.no_check) exit_code = check_exit(decreasing(fr));
  });

  VFlags vc;
  auto* v_cross = verify->add_subcommand("crossing", "maximizer crossing fractions");
  add_verify(v_cross, vc);
  v_cross->add_option("--beta-exponent", vc.beta_exponent, "distance exponent in (1/3, 1]")->capture_default_str();
  v_cross->callback([&] {
    ExperimentConfig cfg = config_of(vc);
    cfg.beta_exponent = vc.beta_exponent;
    std::cerr << "seed " << cfg.seed << '\n';
    const auto r = run_no_crossing(cfg);
    emit(vc.c, vc.c.format == "csv" ? r.to_csv() : r.to_json());
    std::vector<double> p, m;
    for (const auto& row : r.rows) {
      p.push_back(row.plus_fraction);
      m.push_back(row.minus_fraction);
    }
    if (!vc.no_check) exit_code = check_exit(decreasing(p) && decreasing(m));
  });

  Common vo_c;
  double vo_t = 500, vo_eta = 1.0 / 3.0, vo_alpha = 0.5, vo_allow = 0.03;
  int vo_samples = 1000;
  bool vo_no_check = false;
  auto* v_one = verify->add_subcommand("one-sided", "point-to-point and half-line passage times against F2 and F1");
  add_common(v_one, vo_c, true);
  v_one->add_option("--t", vo_t, "time scale")->capture_default_str();
  v_one->add_option("--eta", vo_eta, "endpoint slope in (0,1)")->capture_default_str();
  v_one->add_option("--alpha", vo_alpha, "slow rate for the minus half-line")->capture_default_str();
  v_one->add_option("--samples", vo_samples, "samples")->capture_default_str();
  v_one->add_option("--allowance", vo_allow, "added to the 95% DKW band")->capture_default_str();
  v_one->add_flag("--no-check", vo_no_check, "report only");
  v_one->callback([&] {
    std::cerr << "seed " << vo_c.seed << '\n';
    const auto r = run_one_sided(vo_t, vo_eta, vo_alpha, vo_samples, vo_c.seed, vo_c.threads);
    emit(vo_c, vo_c.format == "csv" ? r.to_csv() : r.to_json());
    bool ok = true;
    for (const auto& row : r.rows) ok = ok && row.ks < row.dkw95 + vo_allow;
    if (!vo_no_check) exit_code = check_exit(ok);
  });

  Common vt_c;
  std::string vt_kind = "khat", vt_s;
  int vt_n = 2, vt_runs = 10000, vt_M = 0;
  double vt_t = 2.0, vt_alpha = 0.5;
  bool vt_no_check = false;
  auto* v_tag = verify->add_subcommand("tagged", "tagged-particle simulation against the Fredholm determinant");
  add_common(v_tag, vt_c, true);
  v_tag->add_option("--kind", vt_kind, "khat, ktilde or finite_m")->capture_default_str();
  v_tag->add_option("--n", vt_n, "particle index")->capture_default_str();
  v_tag->add_option("--M", vt_M, "slow particles for finite_m")->capture_default_str();
  v_tag->add_option("--t", vt_t, "time")->capture_default_str();
  v_tag->add_option("--alpha", vt_alpha, "slow rate")->capture_default_str();
  v_tag->add_option("--s", vt_s, "thresholds a:b or a,b,c (default: 7 around the median)");
  v_tag->add_option("--runs", vt_runs, "simulation runs")->capture_default_str();
  v_tag->add_flag("--no-check", vt_no_check, "report only");
  v_tag->callback([&] {
    std::cerr << "seed " << vt_c.seed << '\n';
    std::vector<int> sl = vt_s.empty() ? std::vector<int>{} : parse_int_range(vt_s);
    const auto r = run_tagged_particle(parse_kernel_kind(vt_kind), vt_n, vt_t, vt_alpha, sl, vt_runs, vt_c.seed,
                                       vt_c.threads, vt_M);
    emit(vt_c, vt_c.format == "csv" ? r.to_csv() : r.to_json());
    bool ok = true;
    for (const auto& row : r.rows) ok = ok && std::abs(row.z) <= 3.0;
    if (!vt_no_check) exit_code = check_exit(ok);
  });

  Common vk_c;
  std::string vk_scenario = "f1f1";
  double vk_alpha = 0.5, vk_beta = 0.5, vk_t = 1000, vk_tol = 0.03;
  int vk_runs = 150;
  bool vk_no_check = false;
  auto* v_shock = verify->add_subcommand("shock", "shock densities and location");
  add_common(v_shock, vk_c, true);
  v_shock->add_option("--scenario", vk_scenario, "f1f1, f2f1 or f2f2")->capture_default_str();
  v_shock->add_option("--alpha", vk_alpha, "slow rate")->capture_default_str();
  v_shock->add_option("--beta", vk_beta, "f2f2 TASEP offset in (0,1)")->capture_default_str();
  v_shock->add_option("--t", vk_t, "time")->capture_default_str();
  v_shock->add_option("--runs", vk_runs, "independent runs")->capture_default_str();
  v_shock->add_option("--tol", vk_tol, "density tolerance")->capture_default_str();
  v_shock->add_flag("--no-check", vk_no_check, "report only");
  v_shock->callback([&] {
    std::cerr << "seed " << vk_c.seed << '\n';
    const auto r = run_shock_profile(parse_scenario(vk_scenario), vk_alpha, vk_beta, vk_t, vk_runs, vk_c.seed, vk_c.threads);
    emit(vk_c, vk_c.format == "csv" ? r.to_csv() : r.to_json());
    const bool ok = std::abs(r.left_edge - r.rho1) < vk_tol && std::abs(r.right_edge - r.rho2) < vk_tol &&
                    r.max_location_offset < 5 * std::pow(vk_t, 2.0 / 3.0);
    if (!vk_no_check) exit_code = check_exit(ok);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << "usage: shocklab {lpp|tasep|kernel|tw|law|verify} <command> [options]  (--help for details)\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
