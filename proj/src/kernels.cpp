#include "shocklab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "shocklab/airy.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/quadrature.hpp"

namespace shocklab {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;

KernelKind parse_kernel_kind(const std::string& name) {
  std::string s;
  for (char ch : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "khat") return KernelKind::Khat;
  if (s == "ktilde") return KernelKind::Ktilde;
  if (s == "k0") return KernelKind::K0;
  if (s == "k1") return KernelKind::K1;
  if (s == "k2") return KernelKind::K2;
  if (s == "finitem") return KernelKind::FiniteM;
  if (s == "biorth") return KernelKind::Biorth;
  throw ParameterError("unknown kernel '" + name + "' (khat|ktilde|k0|k1|k2|finitem|biorth)");
}

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Khat: return "khat";
    case KernelKind::Ktilde: return "ktilde";
    case KernelKind::K0: return "k0";
    case KernelKind::K1: return "k1";
    case KernelKind::K2: return "k2";
    case KernelKind::FiniteM: return "finitem";
    case KernelKind::Biorth: return "biorth";
  }
  return "?";
}

std::string QuadratureReport::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = nodes;
  j["last_change"] = last_change;
  j["imag_residual"] = imag_residual;
  return j.dump(2);
}

namespace {

struct Circle {
  cd center;
  double radius;
  int nodes;
};

// Trapezoid nodes on a circle with weights for (1/2 pi i) \oint f dz.
struct CircleNodes {
  std::vector<cd> z, w;
};

CircleNodes circle_nodes(const Circle& c) {
  CircleNodes out;
  out.z.resize(static_cast<std::size_t>(c.nodes));
  out.w.resize(out.z.size());
  for (int k = 0; k < c.nodes; ++k) {
    // half-step offset keeps nodes off the real axis
    double th = 2.0 * std::numbers::pi * (k + 0.5) / c.nodes;
    cd e(std::cos(th), std::sin(th));
    out.z[k] = c.center + c.radius * e;
    out.w[k] = c.radius * e / static_cast<double>(c.nodes);
  }
  return out;
}

struct Radii {
  double kv, kw, r1, r2, r3;
};

// Unset radii get per-part defaults chosen for conditioning: tiny circles around -1 amplify
// roundoff by r1^{-(x+n)}, so the circles are kept as wide as the nesting rules allow.
Radii resolve_radii(const KernelSpec& spec, const ContourSet& c) {
  const double a = spec.alpha;
  const double m = std::min(a, 2.0 - a), d = std::abs(a - 1.0);
  Radii r{};
  r.kv = c.khat_v > 0 ? c.khat_v : 0.25;
  r.kw = c.khat_w > 0 ? c.khat_w : 0.5;
  if (spec.kind == KernelKind::K0) {
    r.r1 = c.r1 > 0 ? c.r1 : m / 4.0;
    r.r2 = c.r2 > 0 ? c.r2 : m / 2.0;
    r.r3 = c.r3 > 0 ? c.r3 : d + 0.75 * m;
  } else {
    r.r1 = c.r1 > 0 ? c.r1 : 0.4 * m;
    r.r2 = c.r2 > 0 ? c.r2 : m / 2.0;
    r.r3 = c.r3 > 0 ? c.r3 : (d + 1.0) / 2.0;
  }
  return r;
}

void validate_spec(const KernelSpec& spec) {
  if (!(spec.t > 0.0) || !std::isfinite(spec.t)) throw ParameterError("kernel needs t > 0");
  if (spec.kind == KernelKind::Khat) {
    if (spec.n < 0) throw ParameterError("Khat needs n >= 0");
    return;
  }
  if (spec.n < 1) throw ParameterError("kernel needs n >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 2.0)) throw ParameterError("kernel needs alpha in (0,2)");
  if ((spec.kind == KernelKind::K0 || spec.kind == KernelKind::FiniteM ||
       spec.kind == KernelKind::Biorth) &&
      spec.M < 1)
    throw ParameterError("finite-M kernels need M >= 1");
}

// Nesting rules for the circles used by one part.
void check_contours(const KernelSpec& spec, const Radii& r) {
  const double a = spec.alpha, d = std::abs(a - 1.0);
  switch (spec.kind) {
    case KernelKind::Khat:
      // pole 1-v inside the w circle, pole v outside it
      if (!(r.kv < r.kw && r.kw < 1.0 - r.kv))
        throw GeometryError("Khat circles must satisfy rv < rw < 1 - rv");
      return;
    case KernelKind::K1:
      if (!(r.r3 > d + r.r1)) throw GeometryError("z circle must enclose the image alpha-2-w of the w circle");
      if (!(r.r1 < 1.0)) throw GeometryError("w circle must not enclose 0");
      return;
    case KernelKind::K2:
      if (!(r.r3 + r.r1 < 1.0)) throw GeometryError("z circle touches the w circle around -1");
      return;
    case KernelKind::K0:
      if (!(r.r1 < r.r2)) throw GeometryError("image of the w circle must lie inside the v circle");
      if (!(r.r1 + r.r2 < a)) throw GeometryError("v circle must not meet the w circle");
      if (!(r.r3 > d + r.r2)) throw GeometryError("z circle must enclose the v circle");
      return;
    default: return;
  }
}

double conj_factor(const KernelSpec& spec, Conjugation cj, int x1, int x2) {
  if (cj == Conjugation::Default)
    cj = spec.kind == KernelKind::Khat ? Conjugation::TwoPow : Conjugation::AlphaHalfPow;
  switch (cj) {
    case Conjugation::None: return 1.0;
    case Conjugation::TwoPow: return std::pow(2.0, x2 - x1);
    case Conjugation::AlphaHalfPow: return std::pow(spec.alpha / 2.0, x1 - x2);
    case Conjugation::Default: break;
  }
  return 1.0;
}

// Integer power through exp/log keeps large exponents finite where possible.
inline cd ipow(cd z, int k) { return std::pow(z, k); }

// Row factors: F(x, a) for each x in xs and node a; column factors G(b, x).
// Entry matrix = F * Mid * G.
struct Factored {
  CMat F, Mid, G;
};

CMat evaluate(const Factored& f) { return f.F * (f.Mid * f.G); }

std::vector<int> xs_range(int lo, int hi) {
  std::vector<int> xs;
  for (int x = lo; x <= hi; ++x) xs.push_back(x);
  return xs;
}

// w-side factor shared by K0, K1, K2: (1/(w+1)) e^{t(w+1)} w^n (w+1)^{-(x+n)}
CMat w_rows(const std::vector<int>& xs, const CircleNodes& W, int n, double t, int M = 0, double a = 0) {
  CMat F(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(W.z.size()));
  for (std::size_t k = 0; k < W.z.size(); ++k) {
    const cd w = W.z[k], u = w + 1.0;
    cd base = W.w[k] / u * std::exp(t * u) * ipow(w, n);
    if (M > 0) base *= ipow(u * (u - a), M);
    for (std::size_t r = 0; r < xs.size(); ++r) F(r, k) = base * ipow(u, -(xs[r] + n));
  }
  return F;
}

// z-side factor: (z+1)^{x+n} e^{-t(z+1)} z^{-n}
CMat z_cols(const std::vector<int>& xs, const CircleNodes& Z, int n, double t) {
  CMat G(static_cast<Eigen::Index>(Z.z.size()), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < Z.z.size(); ++k) {
    const cd z = Z.z[k], u = z + 1.0;
    cd base = Z.w[k] * std::exp(-t * u) * ipow(z, -n);
    for (std::size_t c = 0; c < xs.size(); ++c) G(k, c) = base * ipow(u, xs[c] + n);
  }
  return G;
}

CMat raw_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
                const std::vector<int>& xs);

CMat khat_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
                 const std::vector<int>& xs) {
  const int n = spec.n;
  const double t = spec.t;
  CircleNodes W = circle_nodes({0.0, r.kw, nodes[1]});
  if (n == 0) {
    // rank one: Psi_0(x1) * 1, Psi_0(x) = (1/2 pi i) \oint e^{t(w-1)} w^{-x-1} dw
    CMat out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
    for (std::size_t a = 0; a < xs.size(); ++a) {
      cd acc = 0;
      for (std::size_t k = 0; k < W.z.size(); ++k)
        acc += W.w[k] * std::exp(t * (W.z[k] - 1.0)) * ipow(W.z[k], -xs[a] - 1);
      for (std::size_t b = 0; b < xs.size(); ++b) out(a, b) = acc;
    }
    return out;
  }
  CircleNodes V = circle_nodes({1.0, r.kv, nodes[0]});
  Factored f;
  f.F.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(W.z.size()));
  for (std::size_t k = 0; k < W.z.size(); ++k) {
    const cd w = W.z[k];
    cd base = W.w[k] / w * std::exp(t * w) * ipow(w - 1.0, n);
    for (std::size_t a = 0; a < xs.size(); ++a) f.F(a, k) = base * ipow(w, -(xs[a] + n));
  }
  f.Mid.resize(static_cast<Eigen::Index>(W.z.size()), static_cast<Eigen::Index>(V.z.size()));
  for (std::size_t a = 0; a < W.z.size(); ++a)
    for (std::size_t b = 0; b < V.z.size(); ++b) {
      const cd w = W.z[a], v = V.z[b];
      f.Mid(a, b) = (2.0 * v - 1.0) / ((w + v - 1.0) * (w - v));
    }
  f.G.resize(static_cast<Eigen::Index>(V.z.size()), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < V.z.size(); ++k) {
    const cd v = V.z[k];
    cd base = V.w[k] * std::exp(-t * v) * ipow(v - 1.0, -n);
    for (std::size_t c = 0; c < xs.size(); ++c) f.G(k, c) = base * ipow(v, xs[c] + n);
  }
  return evaluate(f);
}

CMat k1_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
               const std::vector<int>& xs) {
  const double a = spec.alpha;
  CircleNodes W = circle_nodes({-1.0, r.r1, nodes[0]});
  CircleNodes Z = circle_nodes({0.0, r.r3, nodes[1]});
  Factored f;
  f.F = w_rows(xs, W, spec.n, spec.t);
  f.G = z_cols(xs, Z, spec.n, spec.t);
  f.Mid.resize(static_cast<Eigen::Index>(W.z.size()), static_cast<Eigen::Index>(Z.z.size()));
  for (std::size_t i = 0; i < W.z.size(); ++i)
    for (std::size_t j = 0; j < Z.z.size(); ++j) f.Mid(i, j) = 1.0 / (Z.z[j] - (a - 2.0 - W.z[i]));
  return evaluate(f);
}

CMat k2_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
               const std::vector<int>& xs) {
  CircleNodes W = circle_nodes({-1.0, r.r1, nodes[0]});
  CircleNodes Z = circle_nodes({0.0, r.r3, nodes[1]});
  Factored f;
  f.F = w_rows(xs, W, spec.n, spec.t);
  f.G = z_cols(xs, Z, spec.n, spec.t);
  f.Mid.resize(static_cast<Eigen::Index>(W.z.size()), static_cast<Eigen::Index>(Z.z.size()));
  for (std::size_t i = 0; i < W.z.size(); ++i)
    for (std::size_t j = 0; j < Z.z.size(); ++j) f.Mid(i, j) = 1.0 / (W.z[i] - Z.z[j]);
  return evaluate(f);
}

CMat k0_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
               const std::vector<int>& xs) {
  const double a = spec.alpha;
  const int M = spec.M;
  CircleNodes W = circle_nodes({-1.0, r.r1, nodes[0]});
  CircleNodes V = circle_nodes({a - 1.0, r.r2, nodes[1]});
  CircleNodes Z = circle_nodes({0.0, r.r3, nodes[2]});
  Factored f;
  f.F = w_rows(xs, W, spec.n, spec.t, M, a);
  f.G = z_cols(xs, Z, spec.n, spec.t);
  // D(w,z) = -sum_v wv (2v+2-a)/((v-w)(v+w+2-a)) q(v)^{-M} / (z - v)
  const auto nv = static_cast<Eigen::Index>(V.z.size());
  CMat P(static_cast<Eigen::Index>(W.z.size()), nv), R(nv, static_cast<Eigen::Index>(Z.z.size()));
  for (std::size_t b = 0; b < V.z.size(); ++b) {
    const cd v = V.z[b];
    const cd qv = (v + 1.0) * (v + 1.0 - a);
    const cd vb = -V.w[b] * (2.0 * v + 2.0 - a) * ipow(qv, -M);
    for (std::size_t i = 0; i < W.z.size(); ++i) {
      const cd w = W.z[i];
      P(i, b) = vb / ((v - w) * (v + w + 2.0 - a));
    }
    for (std::size_t j = 0; j < Z.z.size(); ++j) R(b, j) = 1.0 / (Z.z[j] - v);
  }
  f.Mid = P * R;
  CMat out = evaluate(f);
  // the w integrand is analytic at -1 once M >= x1 + n + 1, so those rows vanish exactly
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] + spec.n + 1 <= M) out.row(static_cast<Eigen::Index>(i)).setZero();
  return out;
}

CMat biorth_matrix(const KernelSpec& spec, const std::vector<int>& nodes, const std::vector<int>& xs) {
  const int N = spec.n + spec.M;
  CMat out = CMat::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
  for (int j = 1; j <= N; ++j) {
    Eigen::VectorXd ps(xs.size()), ph(xs.size());
    for (std::size_t a = 0; a < xs.size(); ++a) {
      ps[a] = psi(N, spec.M, spec.t, spec.alpha, j, xs[a], nodes[0]);
      ph[a] = phi(N, spec.M, spec.t, spec.alpha, j, xs[a], nodes[0]);
    }
    out += (ps * ph.transpose()).cast<cd>();
  }
  return out;
}

CMat raw_matrix(const KernelSpec& spec, const Radii& r, const std::vector<int>& nodes,
                const std::vector<int>& xs) {
  switch (spec.kind) {
    case KernelKind::Khat: return khat_matrix(spec, r, nodes, xs);
    case KernelKind::K1: return k1_matrix(spec, r, nodes, xs);
    case KernelKind::K2: return k2_matrix(spec, r, nodes, xs);
    case KernelKind::K0: return k0_matrix(spec, r, nodes, xs);
    case KernelKind::Biorth: return biorth_matrix(spec, nodes, xs);
    default: break;
  }
  throw ParameterError("composite kernel has no single quadrature");
}

int circle_count(KernelKind k) {
  switch (k) {
    case KernelKind::Khat: return 2;
    case KernelKind::K1:
    case KernelKind::K2: return 2;
    case KernelKind::K0: return 3;
    case KernelKind::Biorth: return 1;
    default: return 0;
  }
}

Eigen::MatrixXd conjugated_real(const KernelSpec& spec, const CMat& m, const std::vector<int>& xs,
                                double* imag_out) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  double scale = 1.0, imag = 0.0;
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      cd v = m(a, b) * conj_factor(spec, Conjugation::Default, xs[a], xs[b]);
      scale = std::max(scale, std::abs(v.real()));
      imag = std::max(imag, std::abs(v.imag()));
      out(a, b) = m(a, b).real() * conj_factor(spec, spec.conjugation, xs[a], xs[b]);
    }
  if (imag > 1e-10 * scale)
    throw NumericalError("kernel quadrature left an imaginary residual of " + std::to_string(imag));
  if (imag_out) *imag_out = std::max(*imag_out, imag / scale);
  return out;
}

// Osborne iteration: d with row and column norms of diag(d) A diag(d)^{-1} roughly equal.
Eigen::VectorXd balancing_scales(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool moved = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      double row = 0, col = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        row += a(k, j) * d[k] / d[j];
        col += a(j, k) * d[j] / d[k];
      }
      if (!(row > 0) || !(col > 0)) continue;
      const double f = std::sqrt(col / row);
      if (std::abs(std::log(f)) > 0.05) moved = true;
      d[k] *= f;
    }
    if (!moved) break;
  }
  return d;
}

Eigen::MatrixXd balanced(const Eigen::MatrixXd& a, const Eigen::VectorXd& d) {
  return d.asDiagonal() * a * d.cwiseInverse().asDiagonal();
}

// Single-quadrature kernel with coordinate-wise node doubling.
constexpr int kFloorNodes = 512;

Eigen::MatrixXd refined_matrix(const KernelSpec& spec, const Radii& r, const ContourSet& c,
                               const std::vector<int>& xs, QuadratureReport* rep) {
  const int nc = circle_count(spec.kind);
  std::vector<int> nodes(static_cast<std::size_t>(nc), std::max(64, c.nodes));
  if (c.nodes < 64) throw ParameterError("contours need at least 64 nodes");
  auto scaled = [&](const CMat& m) {
    // compare in the default conjugation where entries are O(1)
    CMat s = m;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
      for (Eigen::Index b = 0; b < m.cols(); ++b)
        s(a, b) *= conj_factor(spec, Conjugation::Default, xs[a], xs[b]);
    return s;
  };
  CMat cur = raw_matrix(spec, r, nodes, xs);
  double change = 0.0;
  if (c.auto_refine) {
    // A circle stops growing when doubling changes nothing beyond tol, or when the change has
    // hit the roundoff floor (no longer shrinking). Far-tail entries carry cancellation floors
    // well above tol; the reached level is returned in the report. Below kFloorNodes a stalled
    // change is still pre-asymptotic (circles close to each other) and refinement continues.
    std::vector<double> prev(nodes.size(), INFINITY);
    std::vector<bool> done(nodes.size(), false);
    for (;;) {
      CMat cs = scaled(cur);
      // Changes are judged after a diagonal balancing (which leaves determinants unchanged):
      // against the raw maximum, O(1) entries next to huge off-diagonal ones would stop early.
      const Eigen::VectorXd bal = balancing_scales(cs.cwiseAbs());
      const double sc = std::max(1.0, balanced(cs.cwiseAbs(), bal).maxCoeff());
      bool any = false;
      change = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (done[k]) continue;
        std::vector<int> trial = nodes;
        trial[k] *= 2;
        const double d = balanced((scaled(raw_matrix(spec, r, trial, xs)) - cs).cwiseAbs(), bal).maxCoeff() / sc;
        change = std::max(change, d);
        if (d <= c.tol || (nodes[k] >= kFloorNodes && d > 0.25 * prev[k])) {
          done[k] = true;
          continue;
        }
        prev[k] = d;
        if (trial[k] > c.max_nodes)
          throw NumericalError("kernel quadrature did not converge within the node cap");
        nodes[k] = trial[k];
        any = true;
      }
      if (!any) break;
      cur = raw_matrix(spec, r, nodes, xs);
    }
  }
  double imag = 0.0;
  Eigen::MatrixXd out = conjugated_real(spec, cur, xs, &imag);
  if (rep) {
    rep->nodes.insert(rep->nodes.end(), nodes.begin(), nodes.end());
    rep->last_change = std::max(rep->last_change, change);
    rep->imag_residual = std::max(rep->imag_residual, imag);
  }
  return out;
}

Eigen::MatrixXd matrix_on(const KernelSpec& spec, const std::vector<int>& xs, const ContourSet& c,
                          QuadratureReport* rep) {
  validate_spec(spec);
  auto part = [&](KernelKind k) {
    KernelSpec s = spec;
    s.kind = k;
    Radii r = resolve_radii(s, c);
    check_contours(s, r);
    return refined_matrix(s, r, c, xs, rep);
  };
  switch (spec.kind) {
    case KernelKind::Ktilde: return part(KernelKind::K1) + part(KernelKind::K2);
    case KernelKind::FiniteM:
      return part(KernelKind::K0) + part(KernelKind::K1) + part(KernelKind::K2);
    default: return part(spec.kind);
  }
}

}  // namespace

int section_lo(const KernelSpec& spec) {
  // Khat rows stay nonzero down to -2n (the rightmost particles start at 0, -2, ..., -2n)
  if (spec.kind == KernelKind::Khat) return -2 * spec.n;
  return -spec.n;
}

double kernel_entry(const KernelSpec& spec, int x1, int x2, const ContourSet& c) {
  if (x1 == x2) return matrix_on(spec, {x1}, c, nullptr)(0, 0);
  std::vector<int> xs{x1, x2};
  return matrix_on(spec, xs, c, nullptr)(0, 1);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, int lo, int hi, const ContourSet& c,
                              QuadratureReport* report) {
  if (hi < lo) throw ParameterError("empty kernel range");
  return matrix_on(spec, xs_range(lo, hi), c, report);
}

std::string kernel_matrix_csv(const Eigen::MatrixXd& k, int lo) {
  std::string out = "x1,x2,value\n";
  char buf[128];
  for (Eigen::Index a = 0; a < k.rows(); ++a)
    for (Eigen::Index b = 0; b < k.cols(); ++b) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", lo + static_cast<int>(a),
                    lo + static_cast<int>(b), k(a, b));
      out += buf;
    }
  return out;
}

namespace {

double checked_probability(double d) {
  if (!std::isfinite(d) || d < -1e-8 || d > 1.0 + 1e-8)
    throw NumericalError("Fredholm determinant " + std::to_string(d) + " is not a probability");
  return std::min(1.0, std::max(0.0, d));
}

}  // namespace

std::vector<double> fredholm_cdf_grid(const KernelSpec& spec, const std::vector<int>& s_list,
                                      const ContourSet& c, int section_floor) {
  validate_spec(spec);
  int lo = std::min(section_lo(spec), section_floor);
  std::vector<double> out(s_list.size(), 1.0);
  int smax = lo - 1;
  for (int s : s_list) smax = std::max(smax, s);
  if (smax < lo) return out;
  Eigen::MatrixXd K = kernel_matrix(spec, lo, smax, c);
  for (std::size_t k = 0; k < s_list.size(); ++k) {
    int s = s_list[k];
    if (s < lo) continue;
    int m = s - lo + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - K.topLeftCorner(m, m);
    out[k] = checked_probability(A.partialPivLu().determinant());
  }
  return out;
}

double fredholm_cdf(const KernelSpec& spec, int s, const ContourSet& c) {
  return fredholm_cdf_grid(spec, {s}, c)[0];
}

// ---------------------------------------------------------------------------------------------
// Biorthogonal functions

namespace {

void check_pair_args(int N, int M, double t, double alpha, int j) {
  if (M < 0 || N < M + 1) throw ParameterError("need N >= M + 1");
  if (j < 1 || j > N) throw ParameterError("need 1 <= j <= N");
  if (!(t > 0)) throw ParameterError("need t > 0");
  if (!(alpha > 0 && alpha < 2)) throw ParameterError("need alpha in (0,2)");
}

// (1/2 pi i) \oint_{|u| = rho} e^{t u} g(u) u^{-k-1} du for entire g
cd laurent(const std::function<cd(cd)>& g, double t, int k, int nodes) {
  // saddle radius of e^{tu} u^{-k}
  double rho = std::max(0.25, static_cast<double>(k) / t);
  CircleNodes U = circle_nodes({0.0, rho, nodes});
  cd acc = 0;
  for (std::size_t m = 0; m < U.z.size(); ++m) {
    cd u = U.z[m];
    acc += U.w[m] * std::exp(t * u - static_cast<double>(k + 1) * std::log(u)) * g(u);
  }
  return acc;
}

}  // namespace

double psi(int N, int M, double t, double alpha, int j, int x, int nodes) {
  check_pair_args(N, M, t, alpha, j);
  if (j > M) {
    // u = w+1: e^{tu} (u-1)^{N-j} u^{-(x-M+N)-1}
    int k = x - M + N;
    if (k < 0) return 0.0;
    int p = N - j;
    return laurent([p](cd u) { return std::pow(u - 1.0, p); }, t, k, nodes).real();
  }
  int k = x - 2 * M + N + j;
  if (k < 0) return 0.0;
  int p = N - M, q = M - j;
  return laurent([p, q, alpha](cd u) { return std::pow(u - 1.0, p) * std::pow(u - alpha, q); }, t, k,
                 nodes)
      .real();
}

double phi(int N, int M, double t, double alpha, int j, int x, int nodes) {
  check_pair_args(N, M, t, alpha, j);
  const int e = x - M + N;
  if (e < 0) throw ParameterError("phi is only used for x >= M - N");
  if (j > M) {
    CircleNodes Z = circle_nodes({0.0, 0.5, nodes});
    cd acc = 0;
    for (std::size_t m = 0; m < Z.z.size(); ++m) {
      cd z = Z.z[m];
      acc += Z.w[m] * std::pow(z + 1.0, e) * std::exp(-t * (z + 1.0)) * std::pow(z, -(N - j + 1));
    }
    return acc.real();
  }
  // v around alpha-1, z around 0 and the v circle
  const double rv = 0.5 * std::min(alpha, 2.0 - alpha) * 0.9;
  const double rz = std::abs(alpha - 1.0) + rv + 0.5;
  CircleNodes V = circle_nodes({alpha - 1.0, rv, nodes});
  CircleNodes Z = circle_nodes({0.0, rz, 2 * nodes});
  std::vector<cd> zf(Z.z.size());
  for (std::size_t m = 0; m < Z.z.size(); ++m) {
    cd z = Z.z[m];
    zf[m] = Z.w[m] * std::pow(z + 1.0, e) * std::exp(-t * (z + 1.0)) * std::pow(z, -(N - M));
  }
  cd acc = 0;
  for (std::size_t b = 0; b < V.z.size(); ++b) {
    cd v = V.z[b];
    cd vf = V.w[b] * (2.0 * v + 2.0 - alpha) * std::pow((v + 1.0) * (v + 1.0 - alpha), -(M - j + 1));
    cd inner = 0;
    for (std::size_t m = 0; m < Z.z.size(); ++m) inner += zf[m] / (Z.z[m] - v);
    acc += vf * inner;
  }
  return acc.real();
}

double biorthogonal_pairing(int N, int M, double t, double alpha, int j, int k) {
  check_pair_args(N, M, t, alpha, j);
  check_pair_args(N, M, t, alpha, k);
  double acc = 0.0, small_run = 0;
  for (int x = M - N; x < M - N + 400; ++x) {
    double term = psi(N, M, t, alpha, j, x) * phi(N, M, t, alpha, k, x);
    acc += term;
    // Psi decays factorially once x - M + N passes t
    if (std::abs(term) < 1e-18 && x - M + N > t + 4) {
      if (++small_run >= 4) break;
    } else {
      small_run = 0;
    }
  }
  return acc;
}

FiniteMReport finite_m_convergence(int n, double t, double alpha, int s, const std::vector<int>& M_list,
                                   const ContourSet& c) {
  for (std::size_t k = 1; k < M_list.size(); ++k)
    if (M_list[k] <= M_list[k - 1]) throw ParameterError("M_list must be increasing");
  FiniteMReport rep;
  rep.M_list = M_list;
  KernelSpec kt;
  kt.kind = KernelKind::Ktilde;
  kt.n = n;
  kt.t = t;
  kt.alpha = alpha;
  const int lo = section_lo(kt);
  if (s < lo) {
    rep.gaps.assign(M_list.size(), 0.0);
    rep.k0_max.assign(M_list.size(), 0.0);
    return rep;
  }
  Eigen::MatrixXd Kt = kernel_matrix(kt, lo, s, c);
  const int m = s - lo + 1;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  const double dt = (I - Kt).partialPivLu().determinant();
  for (int M : M_list) {
    KernelSpec k0 = kt;
    k0.kind = KernelKind::K0;
    k0.M = M;
    Eigen::MatrixXd K0 = kernel_matrix(k0, lo, s, c);
    double d = (I - Kt - K0).partialPivLu().determinant();
    rep.gaps.push_back(std::abs(d - dt));
    rep.k0_max.push_back(K0.cwiseAbs().maxCoeff());
  }
  // least squares slope of log gap against M
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t k = 0; k < M_list.size(); ++k) {
    if (!(rep.gaps[k] > 0)) continue;
    double X = M_list[k], Y = std::log(rep.gaps[k]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++cnt;
  }
  if (cnt >= 2) rep.fitted_ratio = std::exp((cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Wedge contours for large t

namespace {

// log of e^{t(w+1)} w^n (w+1)^{-(x+n)}; integer powers make the branch choice irrelevant after exp
cd log_a(cd w, int n, double t, int x) {
  return t * (w + 1.0) + static_cast<double>(n) * std::log(w) -
         static_cast<double>(x + n) * std::log(w + 1.0);
}

// log of (z+1)^{x+n} e^{-t(z+1)} z^{-n}
cd log_b(cd z, int n, double t, int x) {
  return static_cast<double>(x + n) * std::log(z + 1.0) - t * (z + 1.0) -
         static_cast<double>(n) * std::log(z);
}

// Nodes and weights for y in (0, Y] by composite Gauss-Legendre with panels of width h.
void half_line_rule(double h, double Y, std::vector<double>& y, std::vector<double>& wt) {
  const QuadRule& g = gauss_legendre(24);
  y.clear();
  wt.clear();
  for (double a = 0.0; a < Y; a += h) {
    double b = std::min(Y, a + h);
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      y.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.x[k]);
      wt.push_back(0.5 * (b - a) * g.w[k]);
    }
  }
}

}  // namespace

double k1b_continued(double n, double t, double alpha, double kappa, double x1, double x2) {
  if (!(alpha > 0 && alpha < 1)) throw ParameterError("wedge contours need alpha in (0,1)");
  if (!(kappa > 0 && kappa < 2 - alpha)) throw ParameterError("wedge contours need kappa in (0, 2-alpha)");
  const double wc = -1.0 + alpha / 2.0;
  const double h = std::min(0.05, 0.25 * std::pow(t, -1.0 / 3.0));
  const double Y = 8.0 * std::pow(t, -1.0 / 3.0) + 80.0 / t + 2.0;
  std::vector<double> ys, ws;
  half_line_rule(h, Y, ys, ws);
  // On the wedge w/(alpha-2-w) only meets the negative axis at infinity, and w+1, alpha-1-w
  // only cross it away from the real line, so principal logs are continuous along each ray.
  const double c = 2.0 / alpha;
  cd acc = 0;
  for (int sgn : {1, -1})
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const cd w(wc - ys[k], sgn * ys[k]);
      const cd dw = cd(-static_cast<double>(sgn), 1.0) * ws[k];
      const cd u = alpha - 2.0 - w;
      const cd lg = t * (w - u) + n * std::log(w / u) - (x1 + n) * std::log(c * (w + 1.0)) +
                    (x2 + n) * std::log(c * (u + 1.0));
      acc += dw * std::exp(lg) / (w + 1.0);
    }
  // lg already carries (alpha/2)^{x1-x2}; undo it so the result matches the lattice kernel
  return (acc / cd(0.0, 2.0 * std::numbers::pi)).real() * std::pow(alpha / 2.0, x2 - x1);
}

WedgeK1 k1_wedge(int n, double t, double alpha, double kappa, int x1, int x2) {
  if (!(alpha > 0 && alpha < 1)) throw ParameterError("wedge contours need alpha in (0,1)");
  if (!(kappa > 0 && kappa < 2 - alpha)) throw ParameterError("wedge contours need kappa in (0, 2-alpha)");
  if (x1 + n < 0 || x2 + n < 0) throw ParameterError("wedge form needs x + n >= 0");
  const double wc = -1.0 + alpha / 2.0, zc = -kappa / 2.0;
  const double h = std::min(0.05, 0.25 * std::pow(t, -1.0 / 3.0));
  // Both exponents decay at least linearly in y with slope ~ t, so Y ~ 60/t plus a few t^{-1/3}.
  const double Y = 8.0 * std::pow(t, -1.0 / 3.0) + 80.0 / t + 2.0;
  std::vector<double> ys, ws;
  half_line_rule(h, Y, ys, ws);

  // w(y) = wc - |y| + iy, dw = (i - sgn y) dy, y increasing
  std::vector<cd> wn, wd;
  for (int sgn : {1, -1})
    for (std::size_t k = 0; k < ys.size(); ++k) {
      double y = sgn * ys[k];
      wn.push_back(cd(wc - ys[k], y));
      wd.push_back(cd(-static_cast<double>(sgn), 1.0) * ws[k]);
    }
  // z(y) = zc + |y| + iy oriented with y decreasing: dz = -(i + sgn y) dy
  std::vector<cd> zn, zd;
  for (int sgn : {1, -1})
    for (std::size_t k = 0; k < ys.size(); ++k) {
      double y = sgn * ys[k];
      zn.push_back(cd(zc + ys[k], y));
      zd.push_back(-cd(static_cast<double>(sgn), 1.0) * ws[k]);
    }

  const cd two_pi_i(0.0, 2.0 * std::numbers::pi);
  WedgeK1 out;
  // (1,b): (1/2 pi i) \int dw/(w+1) A(w) B(alpha-2-w)
  {
    cd acc = 0;
    for (std::size_t k = 0; k < wn.size(); ++k) {
      cd w = wn[k];
      cd lg = log_a(w, n, t, x1) + log_b(alpha - 2.0 - w, n, t, x2);
      acc += wd[k] * std::exp(lg) / (w + 1.0);
    }
    out.part_b = (acc / two_pi_i).real();
  }
  // (1,a): (1/2 pi i)^2 \int dw/(w+1) A(w) \int dz B(z) / (z - (alpha-2-w))
  {
    const cd la0 = log_a(cd(wc, 0), n, t, x1), lb0 = log_b(cd(zc, 0), n, t, x2);
    const double scale_log = (la0 + lb0).real();
    std::vector<cd> fa(wn.size()), fb(zn.size());
    for (std::size_t k = 0; k < wn.size(); ++k)
      fa[k] = wd[k] * std::exp(log_a(wn[k], n, t, x1) - la0.real()) / (wn[k] + 1.0);
    for (std::size_t k = 0; k < zn.size(); ++k) fb[k] = zd[k] * std::exp(log_b(zn[k], n, t, x2) - lb0.real());
    cd acc = 0;
    for (std::size_t a = 0; a < wn.size(); ++a) {
      cd inner = 0;
      const cd img = alpha - 2.0 - wn[a];
      for (std::size_t b = 0; b < zn.size(); ++b) inner += fb[b] / (zn[b] - img);
      acc += fa[a] * inner;
    }
    out.part_a = (acc / (two_pi_i * two_pi_i)).real() * std::exp(scale_log);
  }
  return out;
}

AiryLimitReport airy1_limit_check(double alpha, double kappa, const std::vector<double>& t_list,
                                  double s1, double s2) {
  if (!(alpha > 0 && alpha < 1)) throw ParameterError("need alpha in (0,1)");
  if (!(kappa > 0 && kappa < 2 - alpha)) throw ParameterError("need kappa in (0, 2-alpha)");
  AiryLimitReport rep;
  const double Q =
      alpha * ((2 - alpha) * (2 - alpha) - 2 * (1 - alpha) * kappa) / ((2 - alpha) * (2 - alpha));
  rep.sigma = std::pow(Q, -1.0 / 3.0);
  rep.limit = rep.sigma * airy_ai(rep.sigma * (s1 + s2));
  rep.t_list = t_list;
  for (double t : t_list) {
    if (!(t > 0)) throw ParameterError("need t > 0");
    const double c = std::cbrt(t);
    const double nr = kappa * (2 - alpha) * t / 4;
    const double y1 = (alpha - kappa) * t / 2 - s1 * c, y2 = (alpha - kappa) * t / 2 - s2 * c;
    const double r = c * std::pow(alpha / 2, y1 - y2) * k1b_continued(nr, t, alpha, kappa, y1, y2);
    rep.rescaled.push_back(r);
    rep.deviation.push_back(std::abs(r - rep.limit));

    const int n = static_cast<int>(std::floor(nr));
    const int x1 = static_cast<int>(std::floor(y1)), x2 = static_cast<int>(std::floor(y2));
    WedgeK1 k = k1_wedge(n, t, alpha, kappa, x1, x2);
    const double rl = c * std::pow(alpha / 2, x1 - x2) * k.total();
    rep.lattice_rescaled.push_back(rl);
    rep.lattice_deviation.push_back(std::abs(rl - rep.limit));
  }
  return rep;
}

}  // namespace shocklab
