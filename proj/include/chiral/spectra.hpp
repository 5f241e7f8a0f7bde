#pragma once

// Closed-form spectra of H_eff and of the reduced Liouvillian, exceptional
// point location, parameter sweeps and Riemann-sheet sampling.

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chiral/linalg.hpp"
#include "chiral/model.hpp"

namespace chiral {

struct HeffEigenvalues {
  std::array<Complex, 4> xi;  // xi_1 (|00>), xi_2, xi_3, xi_4 (|11>)
  Complex eta0;
};

/// eta0 = i sqrt((Gt1 - Gt2 - 2 i delta)^2 - 16 g^2) on the principal branch,
/// then sign-fixed so that Re eta0 > 0 (or Re eta0 = 0 and Im eta0 >= 0).
/// With that choice xi_2 is the branch with the larger real part at gamma = 0.
HeffEigenvalues analytic_heff_eigs(const SystemConfig& cfg);

struct LiouvillianEigenvalues {
  std::array<Complex, 6> lambda;  // lambda_1 .. lambda_6
  Complex eta1;                   // eta_q^(1)
  Complex eta2;                   // eta_q^(2)
  Complex beta_q;
};

/// Eigenvalues of the reduced 6x6 Liouvillian at delta = 0:
///   lambda_{1,2} = (-Gamma +- eta1)/2, lambda_{3,4} = -Gamma/2,
///   lambda_{5,6} = (-Gamma +- eta2)/2,
///   eta^(1,2) = sqrt(-8 g^2 + sum_j [(g_j^- - g_j^+)^2 + 4 q^2 g_j^- g_j^+] +- 2 beta_q),
///   beta_q^2 = 16 g^4 + 8 g^2 [g1- g2- + g1+ g2+ - (g1+ g2- + g1- g2+)(1 - 2 q^2)]
///              + (Gamma_1^2 - 4 (1-q^2) g1- g1+)(Gamma_2^2 - 4 (1-q^2) g2- g2+).
/// Throws ValidationError for delta != 0.
LiouvillianEigenvalues analytic_liouvillian_eigs(const SystemConfig& cfg);

enum class EPBranch { Eta0, EtaQ1, EtaQ2 };

std::string to_string(EPBranch b);

struct EPResult {
  double q = 0.0;
  double gamma_ep = 0.0;
  EPBranch branch = EPBranch::Eta0;
  double residual_gap = 0.0;  // numerical separation of the coalescing pair
  double operator_norm = 0.0; // Frobenius norm of the operator checked
  int order = 0;              // largest Jordan block found at the EP
};

struct EPSearch {
  double gamma_max = 1.0;      // bracket is (0, gamma_max]
  std::size_t scan_points = 4000;
};

/// Finds gamma_EP for the template's rate structure (gamma free, delta taken
/// as 0) by scanning the branch discriminant for a sign change and bisecting:
///   q = 0:  (Gt1 - Gt2)^2 - 16 g^2          (the H_eff EP, eta0 = 0)
///   q > 0:  eta_q^(2)^2                      (reduced Liouvillian EP)
/// The result is confirmed numerically (H_eff for q = 0, the 6x6 Liouvillian
/// otherwise); throws NoRootError when no sign change exists and
/// NumericalError when the numerical gap exceeds 1e-6 times the operator norm.
EPResult locate_ep(double q, const SystemConfig& tmpl, const EPSearch& search = {});

/// Branch discriminant used by locate_ep at the given gamma.
double ep_discriminant(double q, const SystemConfig& tmpl, double gamma);

/// Numerical stand-ins for the discriminants, computed from eig_general only:
///   H_eff:  (xi_a - xi_b)^2 of the two eigenvalues nearest epsilon + delta/2,
///   6x6 L:  (1/2) sum (2 lambda + Gamma)^2 over the 4 eigenvalues nearest
///           -Gamma/2, which equals eta_q^(2)^2 (lambda_3,4 contribute 0).
Complex numerical_heff_discriminant(const SystemConfig& cfg);
Complex numerical_liouvillian_discriminant(const SystemConfig& cfg);

/// Size of the largest Jordan block of m at eigenvalue mu, from the ranks of
/// (m - mu)^k; singular values below rel_tol |m - mu|^k count as zero.
int jordan_order(const ComplexMatrix& m, Complex mu, double rel_tol = 1e-7);

enum class SweepVariable { G, Gamma };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

struct SweepPoint {
  double value = 0.0;
  std::vector<Complex> eigenvalues;  // continuity-ordered branches
  bool near_defective = false;
};

/// Full 16x16 Liouvillian spectrum along a monotone grid. Points are evaluated
/// independently (on up to `jobs` threads) and then reordered so that each
/// branch follows its nearest neighbour from the previous grid point.
std::vector<SweepPoint> spectrum_sweep(const SystemConfig& tmpl, SweepVariable variable,
                                       const std::vector<double>& grid, unsigned jobs = 1);

/// Greedy minimal-displacement assignment of `next` to the order of `prev`.
std::vector<Complex> continue_branches(const std::vector<Complex>& prev,
                                       std::vector<Complex> next);

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& sweep);

/// xi_2 and xi_3 over a (delta, gamma) grid, rows indexed by gamma and
/// columns by delta. Branches are continued along each row starting from the
/// canonical eta0 branch at the row's first delta.
struct RiemannSheets {
  std::vector<double> deltas;
  std::vector<double> gammas;
  std::vector<std::vector<Complex>> upper;  // xi_2 sheet
  std::vector<std::vector<Complex>> lower;  // xi_3 sheet
  /// true where the upper sheet is the more decaying one (more negative
  /// imaginary part).
  std::vector<std::vector<bool>> upper_more_decaying;
};

RiemannSheets riemann_sheets(const SystemConfig& tmpl, const std::vector<double>& deltas,
                             const std::vector<double>& gammas);

void write_sheets_csv(std::ostream& os, const RiemannSheets& sheets);

/// Follows the analytic pair (xi_2, xi_3) continuously along a path of
/// (delta, gamma) points; returns the tracked pair at every point.
std::vector<std::pair<Complex, Complex>> track_heff_pair(
    const SystemConfig& tmpl, const std::vector<std::pair<double, double>>& path);

}  // namespace chiral
