#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace shocklab {

enum class KernelKind {
  Khat,     // rate-1 TASEP from -2k, k = 1..n: the particle at -2n (n = 0: a free particle at 0)
  Ktilde,   // K1 + K2
  K0,
  K1,
  K2,
  FiniteM,  // K0 + K1 + K2, the kernel of particle n + M among M slow particles
  Biorth    // sum of Psi Phi products for the same system, computed term by term
};

enum class Conjugation { None, TwoPow, AlphaHalfPow, Default };

KernelKind parse_kernel_kind(const std::string& name);
std::string kernel_kind_name(KernelKind k);

struct KernelSpec {
  KernelKind kind = KernelKind::Ktilde;
  int n = 1;
  int M = 0;  // FiniteM, K0 and Biorth only
  double t = 1.0;
  double alpha = 0.5;
  Conjugation conjugation = Conjugation::Default;
};

// Circle radii and node counts. A radius <= 0 selects the default.
//   Khat: v around 1 (khat_v), w around 0 (khat_w)
//   others: w around -1 (r1), v around alpha-1 (r2), z around 0 (r3);
//   defaults (m = min(alpha, 2-alpha), d = |alpha-1|):
//     K0 r1 = m/4, r2 = m/2, r3 = d + 3m/4;  K1, K2 r1 = 0.4m, r2 = m/2, r3 = (d+1)/2
//   the textbook choice r1 = alpha^2/10 is admissible but loses digits for large x
struct ContourSet {
  double khat_v = 0.0, khat_w = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  int nodes = 64;          // starting count on every circle
  bool auto_refine = true;
  double tol = 1e-11;      // stop when a node doubling changes no entry by more than this
  int max_nodes = 8192;    // per circle
};

struct QuadratureReport {
  std::vector<int> nodes;  // final node count per circle
  double last_change = 0;  // largest entry change at the final doubling
  double imag_residual = 0;
  std::string to_json() const;
};

// Lowest index of the finite section: rows below vanish identically.
int section_lo(const KernelSpec& spec);

double kernel_entry(const KernelSpec& spec, int x1, int x2, const ContourSet& c = {});
// entries for x1 (rows) and x2 (columns) in [lo, hi]
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, int lo, int hi, const ContourSet& c = {},
                              QuadratureReport* report = nullptr);
std::string kernel_matrix_csv(const Eigen::MatrixXd& k, int lo);

// P(x_n(t) > s) = det(1 - K) on the section [section_lo, s]
double fredholm_cdf(const KernelSpec& spec, int s, const ContourSet& c = {});
// many thresholds from one matrix (the section for s is the leading block)
std::vector<double> fredholm_cdf_grid(const KernelSpec& spec, const std::vector<int>& s_list,
                                      const ContourSet& c = {}, int section_floor = 1 << 30);

// Biorthogonal pair for the system with M slow particles, particle count N >= M+1, 1 <= j <= N.
double psi(int N, int M, double t, double alpha, int j, int x, int nodes = 128);
double phi(int N, int M, double t, double alpha, int j, int x, int nodes = 128);
// <Psi_{N-j}, Phi_{N-k}> summed over x >= M - N until the terms are negligible
double biorthogonal_pairing(int N, int M, double t, double alpha, int j, int k);

struct FiniteMReport {
  std::vector<int> M_list;
  std::vector<double> gaps;
  std::vector<double> k0_max;  // max |K0 entry| on the section, conjugated
  double fitted_ratio = 0;     // exp of the least-squares slope of log gap vs M
};

FiniteMReport finite_m_convergence(int n, double t, double alpha, int s, const std::vector<int>& M_list,
                                   const ContourSet& c = {});

// K1 through open wedge contours, suited to large t: K1 = (1,a) double integral + (1,b) residue part
struct WedgeK1 {
  double part_a = 0, part_b = 0;
  double total() const { return part_a + part_b; }
};
WedgeK1 k1_wedge(int n, double t, double alpha, double kappa, int x1, int x2);
// The (1,b) part continued analytically to real n, x1, x2; equals k1_wedge().part_b at integers.
double k1b_continued(double n, double t, double alpha, double kappa, double x1, double x2);

// Two readings of the scaling n = kappa (2-alpha) t/4, x_i = (alpha-kappa) t/2 - s_i t^{1/3}:
// real-valued parameters in the (1,b) part (rescaled, deviation), and integer parts in the full
// lattice K1 (lattice_*). The lattice version carries an extra O(t^{-1/3}) rounding jitter.
struct AiryLimitReport {
  std::vector<double> t_list;
  std::vector<double> rescaled;   // t^{1/3} (alpha/2)^{x1-x2} K1b(x1,x2)
  std::vector<double> deviation;  // |rescaled - sigma Ai(sigma (s1+s2))|
  std::vector<double> lattice_rescaled;
  std::vector<double> lattice_deviation;
  double sigma = 0;
  double limit = 0;
};

AiryLimitReport airy1_limit_check(double alpha, double kappa, const std::vector<double>& t_list,
                                  double s1, double s2);

}  // namespace shocklab
