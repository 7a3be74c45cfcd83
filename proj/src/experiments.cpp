#include "shocklab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "shocklab/errors.hpp"
#include "shocklab/stats.hpp"
#include "shocklab/tasep.hpp"

namespace shocklab {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double std_dev(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double acc = 0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["scenario"] = scenario_name(c.scenario);
  j["alpha"] = c.alpha;
  j["beta_param"] = c.beta_param;
  j["u"] = c.u;
  j["t_list"] = c.t_list;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["nu"] = c.nu;
  j["beta_exponent"] = c.beta_exponent;
  j["gamma"] = c.gamma;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["drop_minus"] = c.drop_minus;
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (t_list.empty()) throw ParameterError("t_list must not be empty");
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    if (!(t_list[k] > 0) || !std::isfinite(t_list[k])) throw ParameterError("t values must be positive");
    if (k > 0 && !(t_list[k] > t_list[k - 1])) throw ParameterError("t_list must be increasing");
  }
  if (samples < 100) throw ParameterError("samples must be >= 100");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  if (!std::isfinite(u) || !std::isfinite(beta_param)) throw ParameterError("u and beta must be finite");
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "scenario") c.scenario = parse_scenario(v.get<std::string>());
      else if (k == "alpha") c.alpha = v.get<double>();
      else if (k == "beta_param") c.beta_param = v.get<double>();
      else if (k == "u") c.u = v.get<double>();
      else if (k == "t_list") c.t_list = v.get<std::vector<double>>();
      else if (k == "samples") c.samples = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "nu") c.nu = v.get<double>();
      else if (k == "beta_exponent") c.beta_exponent = v.get<double>();
      else if (k == "gamma") c.gamma = v.get<std::vector<double>>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "output") c.output = v.get<std::string>();
      else if (k == "drop_minus") c.drop_minus = v.get<bool>();
      else throw ParameterError("unknown config key: " + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const { return config_json(*this).dump(2); }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int nt = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(count, 1))));
  if (nt == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t err_k = count;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || failed.load()) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (k < err_k) {
          err_k = k;
          err = std::current_exception();
        }
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::uint64_t sample_seed(std::uint64_t base, std::size_t t_index, std::size_t sample) {
  return derive_seed(derive_seed(base, t_index), sample);
}

ShockLaw config_law(const ExperimentConfig& cfg) {
  return law_constants(cfg.scenario, cfg.alpha, cfg.beta_param);
}

double geometry_beta(const ShockLaw& law, double t) {
  switch (law.scenario) {
    case Scenario::F1F1: return 0.0;
    case Scenario::F2F1: return law.beta0 + law.beta_param * std::pow(t, -2.0 / 3.0);
    case Scenario::F2F2: return law.beta_param;
    default: break;
  }
  throw ParameterError("no geometry for custom scenarios");
}

Geometry config_geometry(const ExperimentConfig& cfg, double t) {
  const ShockLaw law = config_law(cfg);
  return make_geometry(cfg.scenario, t, law.eta0, cfg.u, geometry_beta(law, t));
}

RegionSpec scenario_region(Scenario sc, double alpha) {
  if (sc == Scenario::F2F2) return RegionSpec::uniform(1.0);
  // the F2F1 start segment lies on row 0 left of the origin; at rate alpha that row is
  // critical (alpha = 1/2) or dominant (alpha < 1/2) for the point-to-point side
  if (sc == Scenario::F2F1) return RegionSpec::lower_right(alpha);
  return RegionSpec::row_split(alpha);
}

// ---------------------------------------------------------------- product law

ProductLawReport run_product_law(const ExperimentConfig& cfg) {
  cfg.validate();
  const ShockLaw law = config_law(cfg);
  const RegionSpec region = scenario_region(cfg.scenario, cfg.alpha);
  ProductLawReport rep;
  rep.cfg = cfg;
  for (std::size_t ti = 0; ti < cfg.t_list.size(); ++ti) {
    const double t = cfg.t_list[ti];
    const Geometry g = config_geometry(cfg, t);
    const Bbox box = g.bbox();
    const auto n = static_cast<std::size_t>(cfg.samples);
    std::vector<double> s1(n), s2(n, 0.0);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
      const WeightField f = WeightField::sample(region, box, sample_seed(cfg.seed, ti, k));
      s1[k] = rescale_lpp(law, t, cfg.u, last_passage_value(f, g.start_plus, g.end));
      if (!cfg.drop_minus) s2[k] = rescale_lpp(law, t, cfg.u, last_passage_value(f, g.start_minus, g.end));
    });
    std::vector<double> smax(n);
    for (std::size_t k = 0; k < n; ++k) smax[k] = cfg.drop_minus ? s1[k] : std::max(s1[k], s2[k]);

    ProductLawRow row;
    row.t = t;
    row.samples = cfg.samples;
    row.dkw95 = dkw_epsilon(n, 0.95);
    auto side = [&](int sd) { return [&law, &cfg, sd](double s) { return predicted_side_cdf(law, sd, cfg.u, s); }; };
    row.ks_side1 = ks_distance(EmpiricalCDF(s1), side(1));
    if (cfg.drop_minus) {
      row.ks = row.ks_side1;
    } else {
      row.ks = ks_distance(EmpiricalCDF(smax), [&](double s) { return predicted_product_cdf(law, cfg.u, s); });
      row.ks_side2 = ks_distance(EmpiricalCDF(s2), side(2));
      row.correlation = pearson_correlation(s1, s2);
    }
    row.mean = mean(smax);
    rep.rows.push_back(row);
    rep.rescaled.push_back(std::move(smax));
  }
  return rep;
}

std::string ProductLawReport::to_json() const {
  ojson j;
  j["experiment"] = "product_law";
  j["config"] = config_json(cfg);
  j["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["t"] = r.t;
    o["samples"] = r.samples;
    o["ks"] = r.ks;
    o["dkw95"] = r.dkw95;
    o["ks_side1"] = r.ks_side1;
    o["ks_side2"] = r.ks_side2;
    o["correlation"] = r.correlation;
    o["mean"] = r.mean;
    j["rows"].push_back(o);
  }
  return j.dump(2);
}

std::string ProductLawReport::to_csv() const {
  std::string out = "t,samples,ks,dkw95,ks_side1,ks_side2,correlation,mean\n";
  for (const auto& r : rows)
    out += fmt(r.t) + "," + std::to_string(r.samples) + "," + fmt(r.ks) + "," + fmt(r.dkw95) + "," +
           fmt(r.ks_side1) + "," + fmt(r.ks_side2) + "," + fmt(r.correlation) + "," + fmt(r.mean) + "\n";
  return out;
}

std::string ProductLawReport::cdf_csv(std::size_t t_index, const std::vector<double>& grid) const {
  if (t_index >= rescaled.size()) throw ParameterError("t index out of range");
  const ShockLaw law = config_law(cfg);
  const double u = cfg.u;
  if (cfg.drop_minus)
    return cdf_comparison_csv(EmpiricalCDF(rescaled[t_index]),
                              [&](double s) { return predicted_side_cdf(law, 1, u, s); }, grid);
  return cdf_comparison_csv(EmpiricalCDF(rescaled[t_index]),
                            [&](double s) { return predicted_product_cdf(law, u, s); }, grid);
}

// ---------------------------------------------------------------- slow decorrelation

SlowDecorrReport run_slow_decorrelation(const ExperimentConfig& cfg, double M_const) {
  cfg.validate();
  if (!(M_const > 0)) throw ParameterError("M must be positive");
  const RegionSpec region = scenario_region(cfg.scenario, cfg.alpha);
  SlowDecorrReport rep;
  rep.cfg = cfg;
  rep.M_const = M_const;
  for (std::size_t ti = 0; ti < cfg.t_list.size(); ++ti) {
    const double t = cfg.t_list[ti];
    const Geometry g = config_geometry(cfg, t);
    const SlowDecorrSpec sp = slow_decorrelation_spec(g.end, t, cfg.nu);
    const auto n = static_cast<std::size_t>(cfg.samples);
    const double scale = std::cbrt(t);
    std::vector<double> resid(n);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
      const WeightField f = WeightField::sample(region, g.bbox(), sample_seed(cfg.seed, ti, k));
      const double full = last_passage_value(f, g.start_plus, g.end);
      const double part = last_passage_value(f, g.start_plus, sp.e_plus);
      resid[k] = (full - part - sp.mu0 * static_cast<double>(sp.increment)) / scale;
    });
    SlowDecorrRow row;
    row.t = t;
    row.samples = cfg.samples;
    row.increment = sp.increment;
    row.threshold = M_const * scale;
    std::size_t exceed = 0;
    for (double r : resid)
      if (std::abs(r) >= M_const) ++exceed;
    row.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(n);
    row.mean_residual = mean(resid);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string SlowDecorrReport::to_json() const {
  ojson j;
  j["experiment"] = "slow_decorrelation";
  j["config"] = config_json(cfg);
  j["M"] = M_const;
  j["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["t"] = r.t;
    o["samples"] = r.samples;
    o["increment"] = r.increment;
    o["threshold"] = r.threshold;
    o["exceed_fraction"] = r.exceed_fraction;
    o["mean_residual"] = r.mean_residual;
    j["rows"].push_back(o);
  }
  return j.dump(2);
}

std::string SlowDecorrReport::to_csv() const {
  std::string out = "t,samples,increment,threshold,exceed_fraction,mean_residual\n";
  for (const auto& r : rows)
    out += fmt(r.t) + "," + std::to_string(r.samples) + "," + std::to_string(r.increment) + "," +
           fmt(r.threshold) + "," + fmt(r.exceed_fraction) + "," + fmt(r.mean_residual) + "\n";
  return out;
}

// ---------------------------------------------------------------- no crossing

NoCrossingReport run_no_crossing(const ExperimentConfig& cfg, bool enforce_range) {
  cfg.validate();
  const ShockLaw law = config_law(cfg);
  const RegionSpec region = scenario_region(cfg.scenario, cfg.alpha);
  NoCrossingReport rep;
  rep.cfg = cfg;
  for (std::size_t ti = 0; ti < cfg.t_list.size(); ++ti) {
    const double t = cfg.t_list[ti];
    const Geometry g = config_geometry(cfg, t);
    const double eta = law.eta0 + cfg.u * std::pow(t, -2.0 / 3.0);
    std::vector<double> grid = cfg.gamma.empty() ? CrossingProbe::row_grid(t, cfg.beta_exponent) : cfg.gamma;
    const CrossingProbe probe = CrossingProbe::make(t, eta, cfg.beta_exponent, grid, enforce_range);
    const auto n = static_cast<std::size_t>(cfg.samples);
    std::vector<char> hp(n, 0), hm(n, 0);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
      const WeightField f = WeightField::sample(region, g.bbox(), sample_seed(cfg.seed, ti, k));
      auto any = [](const std::vector<bool>& h) { return std::any_of(h.begin(), h.end(), [](bool b) { return b; }); };
      hp[k] = any(path_hits(last_passage(f, g.start_plus, g.end, true), probe));
      hm[k] = any(path_hits(last_passage(f, g.start_minus, g.end, true), probe));
    });
    NoCrossingRow row;
    row.t = t;
    row.samples = cfg.samples;
    row.probes = probe.points.size();
    row.gamma_max = 1.0 - std::pow(t, cfg.beta_exponent - 1.0);
    row.plus_fraction = static_cast<double>(std::count(hp.begin(), hp.end(), 1)) / static_cast<double>(n);
    row.minus_fraction = static_cast<double>(std::count(hm.begin(), hm.end(), 1)) / static_cast<double>(n);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string NoCrossingReport::to_json() const {
  ojson j;
  j["experiment"] = "no_crossing";
  j["config"] = config_json(cfg);
  j["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["t"] = r.t;
    o["samples"] = r.samples;
    o["probes"] = r.probes;
    o["gamma_max"] = r.gamma_max;
    o["plus_fraction"] = r.plus_fraction;
    o["minus_fraction"] = r.minus_fraction;
    j["rows"].push_back(o);
  }
  return j.dump(2);
}

std::string NoCrossingReport::to_csv() const {
  std::string out = "t,samples,probes,gamma_max,plus_fraction,minus_fraction\n";
  for (const auto& r : rows)
    out += fmt(r.t) + "," + std::to_string(r.samples) + "," + std::to_string(r.probes) + "," +
           fmt(r.gamma_max) + "," + fmt(r.plus_fraction) + "," + fmt(r.minus_fraction) + "\n";
  return out;
}

// ---------------------------------------------------------------- one-sided laws

const char* one_sided_name(OneSidedKind k) {
  switch (k) {
    case OneSidedKind::PointToPoint: return "point_to_point";
    case OneSidedKind::LinePlus: return "line_plus";
    case OneSidedKind::LineMinus: return "line_minus";
  }
  return "?";
}

double one_sided_model_cdf(OneSidedKind kind, double eta, double alpha, double s) {
  switch (kind) {
    case OneSidedKind::PointToPoint: return tw_cdf_fast(TWLaw::F2, s / sigma_point_to_point(eta));
    case OneSidedKind::LinePlus: return tw_cdf_fast(TWLaw::F1, 2 * s / sigma_line_plus(eta));
    case OneSidedKind::LineMinus: return tw_cdf_fast(TWLaw::F1, 2 * s / sigma_line_minus(eta, alpha));
  }
  return 0.0;
}

OneSidedReport run_one_sided(double t, double eta, double alpha, int samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw ParameterError("samples must be >= 1");
  if (!(eta > 0 && eta < 1)) throw ParameterError("eta must lie in (0,1)");
  if (!(alpha > 0 && alpha < 2)) throw ParameterError("alpha must lie in (0,2)");
  const double a3 = std::pow(alpha / (2 - alpha), 2.0);
  if (!(eta > a3)) throw ParameterError("eta must exceed (alpha/(2-alpha))^2 for the minus half-line");
  // the F1F1 start sets are exactly the two half-lines through the origin
  const Geometry g = make_geometry(Scenario::F1F1, t, eta, 0.0, 0.0);
  const Bbox box = g.bbox();
  const std::vector<Point> origin{{0, 0}};
  const auto n = static_cast<std::size_t>(samples);
  std::vector<std::vector<double>> raw(3, std::vector<double>(n));
  const double mus[3] = {mu_point_to_point(eta), mu_line_plus(eta), mu_line_minus(eta, alpha)};
  const double scale = std::cbrt(t);
  parallel_for(n, threads, [&](std::size_t k) {
    const std::uint64_t sd = sample_seed(seed, 0, k);
    const WeightField flat = WeightField::sample(RegionSpec::uniform(1.0), box, sd);
    const WeightField split = WeightField::sample(RegionSpec::row_split(alpha), box, sd);
    raw[0][k] = (last_passage_value(flat, origin, g.end) - mus[0] * t) / scale;
    raw[1][k] = (last_passage_value(flat, g.start_plus, g.end) - mus[1] * t) / scale;
    raw[2][k] = (last_passage_value(split, g.start_minus, g.end) - mus[2] * t) / scale;
  });
  OneSidedReport rep;
  rep.t = t;
  rep.eta = eta;
  rep.alpha = alpha;
  rep.samples = samples;
  rep.seed = seed;
  const OneSidedKind kinds[3] = {OneSidedKind::PointToPoint, OneSidedKind::LinePlus, OneSidedKind::LineMinus};
  const double sig[3] = {sigma_point_to_point(eta), sigma_line_plus(eta), sigma_line_minus(eta, alpha)};
  for (int r = 0; r < 3; ++r) {
    OneSidedRow row;
    row.kind = kinds[r];
    row.mu = mus[r];
    row.sigma = sig[r];
    row.ks = ks_distance(EmpiricalCDF(raw[r]), [&](double s) { return one_sided_model_cdf(kinds[r], eta, alpha, s); });
    row.dkw95 = dkw_epsilon(n, 0.95);
    rep.rows.push_back(row);
  }
  rep.rescaled = std::move(raw);
  return rep;
}

std::string OneSidedReport::to_json() const {
  ojson j;
  j["experiment"] = "one_sided";
  j["t"] = t;
  j["eta"] = eta;
  j["alpha"] = alpha;
  j["samples"] = samples;
  j["seed"] = seed;
  j["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["kind"] = one_sided_name(r.kind);
    o["mu"] = r.mu;
    o["sigma"] = r.sigma;
    o["ks"] = r.ks;
    o["dkw95"] = r.dkw95;
    j["rows"].push_back(o);
  }
  return j.dump(2);
}

std::string OneSidedReport::to_csv() const {
  std::string out = "kind,mu,sigma,ks,dkw95\n";
  for (const auto& r : rows)
    out += std::string(one_sided_name(r.kind)) + "," + fmt(r.mu) + "," + fmt(r.sigma) + "," + fmt(r.ks) + "," +
           fmt(r.dkw95) + "\n";
  return out;
}

// ---------------------------------------------------------------- tagged particle

TaggedReport run_tagged_particle(KernelKind kind, int n, double t, double alpha, std::vector<int> s_list, int runs,
                                 std::uint64_t seed, int threads, int M) {
  if (runs < 1) throw ParameterError("runs must be >= 1");
  InitialCondition ic;
  RateProfile rates;
  KernelSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.t = t;
  spec.alpha = alpha;
  Index label = n;
  Index offset = 0;
  switch (kind) {
    case KernelKind::Khat:
      // the kernel describes the particle at -2n with exactly n-1 particles ahead of it, which
      // is the half-flat particle n-1 moved back by two sites
      ic = InitialCondition::half_flat();
      rates = RateProfile::uniform(1.0);
      spec.alpha = 1.0;
      if (n >= 1) {
        label = n - 1;
        offset = -2;
      }
      break;
    case KernelKind::Ktilde:
      ic = InitialCondition::shock_f2f1(0.0, 0.0);
      rates = RateProfile::split(alpha);
      break;
    case KernelKind::FiniteM:
      ic = InitialCondition::finite_m(M);
      rates = RateProfile::finite_m(alpha, M);
      spec.M = M;
      label = n + M;
      break;
    default:
      throw ParameterError("tagged-particle runs support khat, ktilde and finite_m");
  }
  if (s_list.empty()) {
    // thresholds around the median of the Fredholm law
    const int lo = section_lo(spec);
    int c = lo;
    while (c < lo + 200 && fredholm_cdf(spec, c) > 0.5) ++c;
    const int first = std::max(c - 3, lo - 1);
    for (int k = 0; k < 7; ++k) s_list.push_back(first + k);
  }
  const std::vector<double> pf = fredholm_cdf_grid(spec, s_list);
  const auto nr = static_cast<std::size_t>(runs);
  std::vector<Index> pos(nr);
  parallel_for(nr, threads, [&](std::size_t k) {
    pos[k] = simulate(ic, rates, t, label, label, sample_seed(seed, 0, k)).position(label, t) + offset;
  });
  TaggedReport rep;
  rep.kind = kind;
  rep.n = n;
  rep.t = t;
  rep.alpha = spec.alpha;
  rep.runs = runs;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    TaggedRow row;
    row.s = s_list[i];
    row.fredholm = pf[i];
    std::size_t above = 0;
    for (Index x : pos)
      if (x > s_list[i]) ++above;
    row.empirical = static_cast<double>(above) / static_cast<double>(nr);
    row.std_error = std::sqrt(pf[i] * (1 - pf[i]) / static_cast<double>(nr));
    const double se = std::max(row.std_error, 1.0 / static_cast<double>(nr));
    row.z = (row.empirical - row.fredholm) / se;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string TaggedReport::to_json() const {
  ojson j;
  j["experiment"] = "tagged_particle";
  j["kernel"] = kernel_kind_name(kind);
  j["n"] = n;
  j["t"] = t;
  j["alpha"] = alpha;
  j["runs"] = runs;
  j["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["s"] = r.s;
    o["fredholm"] = r.fredholm;
    o["empirical"] = r.empirical;
    o["std_error"] = r.std_error;
    o["z"] = r.z;
    j["rows"].push_back(o);
  }
  return j.dump(2);
}

std::string TaggedReport::to_csv() const {
  std::string out = "s,fredholm,empirical,std_error,z\n";
  for (const auto& r : rows)
    out += std::to_string(r.s) + "," + fmt(r.fredholm) + "," + fmt(r.empirical) + "," + fmt(r.std_error) + "," +
           fmt(r.z) + "\n";
  return out;
}

// ---------------------------------------------------------------- shock profile

ShockProfileReport run_shock_profile(Scenario sc, double alpha, double beta, double t, int runs,
                                     std::uint64_t seed, int threads, Index gap, Index width, Index fit_width,
                                     Index half_range) {
  if (runs < 1) throw ParameterError("runs must be >= 1");
  if (gap < 0 || width < 1 || fit_width < 2 || half_range < gap + std::max(width, fit_width) + 1)
    throw ParameterError("bad profile window");
  ShockLaw law;
  InitialCondition ic;
  RateProfile rates;
  switch (sc) {
    case Scenario::F1F1:
      law = law_constants(sc, alpha);
      ic = InitialCondition::shock_f1f1();
      rates = RateProfile::split(alpha);
      break;
    case Scenario::F2F1:
      law = law_constants(sc, alpha);
      ic = InitialCondition::shock_f2f1(law.v, t);
      rates = RateProfile::split(alpha);
      break;
    case Scenario::F2F2:
      if (!(beta > 0 && beta < 1)) throw ParameterError("TASEP offset must lie in (0,1)");
      law = law_constants(sc, 1.0, f2f2_lpp_beta(beta));
      ic = InitialCondition::shock_f2f2(beta, t);
      rates = RateProfile::uniform(1.0);
      break;
    default:
      throw ParameterError("no shock profile for custom scenarios");
  }
  const double vt = law.v * t;
  const Index center = static_cast<Index>(std::floor(vt));
  const Index lo = center - half_range, hi = center + half_range + 1;
  const Index centre_label = static_cast<Index>(std::floor(law.nu * t));
  Index first = centre_label - half_range - 60, last = centre_label + half_range + 60;
  if (ic.first_label() != InitialCondition::kNone) first = std::max(first, ic.first_label());
  const double level = 0.5 * (law.rho1 + law.rho2);

  const auto nr = static_cast<std::size_t>(runs);
  std::vector<double> loc(nr), left(nr), right(nr), left_edge(nr), right_edge(nr);
  std::vector<std::vector<double>> occ(nr);
  parallel_for(nr, threads, [&](std::size_t k) {
    const Trajectory tr = simulate(ic, rates, t, first, last, sample_seed(seed, 0, k));
    const auto bins = density_profile(tr, t, lo, hi, 1);
    const double c = density_step_location(bins, level);
    const Index b = static_cast<Index>(std::llround(c + 0.5));  // first site right of the step
    const Index reach = gap + std::max(width, fit_width);
    if (b - reach < lo || b + reach > hi) throw NumericalError("shock left the profile window; enlarge half_range");
    auto occ_at = [&](Index x) { return bins[static_cast<std::size_t>(x - lo)].density; };
    auto avg = [&](Index a, Index e) {
      double s = 0;
      for (Index x = a; x < e; ++x) s += occ_at(x);
      return s / static_cast<double>(e - a);
    };
    // line through sites [a, e) evaluated at position x0
    auto edge = [&](Index a, Index e, double x0) {
      const double m = static_cast<double>(e - a);
      const double xm = 0.5 * static_cast<double>(a + e - 1);
      double sxy = 0, sxx = 0, sy = 0;
      for (Index x = a; x < e; ++x) {
        const double dx = static_cast<double>(x) - xm;
        sxy += dx * occ_at(x);
        sxx += dx * dx;
        sy += occ_at(x);
      }
      return sy / m + (sxy / sxx) * (x0 - xm);
    };
    const double step = static_cast<double>(b) - 0.5;
    loc[k] = c;
    left[k] = avg(b - gap - width, b - gap);
    right[k] = avg(b + gap, b + gap + width);
    left_edge[k] = edge(b - gap - fit_width, b - gap, step);
    right_edge[k] = edge(b + gap, b + gap + fit_width, step);
    occ[k].resize(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) occ[k][i] = bins[i].density;
  });

  ShockProfileReport rep;
  rep.scenario = sc;
  rep.alpha = sc == Scenario::F2F2 ? 1.0 : alpha;
  rep.tasep_beta = law.tasep_beta;
  rep.t = t;
  rep.runs = runs;
  rep.gap = gap;
  rep.width = width;
  rep.rho1 = law.rho1;
  rep.rho2 = law.rho2;
  rep.vt = vt;
  rep.left_density = mean(left);
  rep.right_density = mean(right);
  rep.left_se = std_dev(left) / std::sqrt(static_cast<double>(nr));
  rep.right_se = std_dev(right) / std::sqrt(static_cast<double>(nr));
  rep.fit_width = fit_width;
  rep.left_edge = mean(left_edge);
  rep.right_edge = mean(right_edge);
  rep.left_edge_se = std_dev(left_edge) / std::sqrt(static_cast<double>(nr));
  rep.right_edge_se = std_dev(right_edge) / std::sqrt(static_cast<double>(nr));
  rep.mean_location = mean(loc);
  for (double c : loc) rep.max_location_offset = std::max(rep.max_location_offset, std::abs(c - vt));
  const Index bw = 10;
  for (Index a = lo; a + bw <= hi; a += bw) {
    double s = 0;
    for (std::size_t k = 0; k < nr; ++k)
      for (Index x = a; x < a + bw; ++x) s += occ[k][static_cast<std::size_t>(x - lo)];
    DensityBin db;
    db.center = static_cast<double>(a) + 0.5 * static_cast<double>(bw - 1);
    db.density = s / static_cast<double>(bw * static_cast<Index>(nr));
    rep.mean_profile.push_back(db);
  }
  return rep;
}

std::string ShockProfileReport::to_json() const {
  ojson j;
  j["experiment"] = "shock_profile";
  j["scenario"] = scenario_name(scenario);
  j["alpha"] = alpha;
  j["tasep_beta"] = tasep_beta;
  j["t"] = t;
  j["runs"] = runs;
  j["gap"] = gap;
  j["width"] = width;
  j["rho1"] = rho1;
  j["rho2"] = rho2;
  j["vt"] = vt;
  j["left_density"] = left_density;
  j["right_density"] = right_density;
  j["left_se"] = left_se;
  j["right_se"] = right_se;
  j["fit_width"] = fit_width;
  j["left_edge"] = left_edge;
  j["right_edge"] = right_edge;
  j["left_edge_se"] = left_edge_se;
  j["right_edge_se"] = right_edge_se;
  j["mean_location"] = mean_location;
  j["max_location_offset"] = max_location_offset;
  return j.dump(2);
}

std::string ShockProfileReport::to_csv() const { return density_csv(mean_profile); }

}  // namespace shocklab
