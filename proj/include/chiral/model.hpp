#pragma once

// Two dissipatively coupled qubits: Hamiltonians, rates, hybrid Liouvillian.
//
// Basis of the 4-dimensional Hilbert space is {|11>, |10>, |01>, |00>} with
// qubit 1 the left tensor factor; |1> is the excited state. Superoperators use
// column-stacking, so the matrix unit |i><j| sits at index i + 4 j.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "chiral/linalg.hpp"

namespace chiral {

inline constexpr Eigen::Index kHilbertDim = 4;
inline constexpr Eigen::Index kLiouvilleDim = 16;

struct SystemConfig {
  double epsilon = 1.0;  // qubit-1 transition energy
  double delta = 0.0;    // detuning, qubit 2 sits at epsilon + delta
  double g = 0.0;        // exchange coupling
  double gamma = 0.0;    // bath coupling of qubit 1
  double alpha = 1.0;    // gamma_2 / gamma_1
  double beta1 = 0.0;    // inverse temperatures, +/-inf allowed
  double beta2 = 0.0;
  double q = 1.0;        // quantum-jump weight, 1 = full Lindblad

  bool operator==(const SystemConfig&) const = default;
};

/// Throws ValidationError unless epsilon > 0, g >= 0, gamma >= 0, alpha > 0,
/// 0 <= q <= 1 and the finite fields are finite.
void validate(const SystemConfig& cfg);

/// Non-empty when the weak-coupling assumption max(g, gamma, alpha gamma,
/// |delta|) <= 0.1 epsilon is violated. Advisory only.
std::optional<std::string> markovian_warning(const SystemConfig& cfg);

/// Fermi occupation 1/(e^{beta e} + 1); beta = +inf gives 0 and beta = -inf
/// gives 1 regardless of the sign of e.
double fermi_occupation(double beta, double energy);

struct DerivedRates {
  double n1 = 0, n2 = 0;
  double gamma1_plus = 0, gamma1_minus = 0;
  double gamma2_plus = 0, gamma2_minus = 0;
  double Gamma_1 = 0, Gamma_2 = 0;
  double Gamma_plus = 0, Gamma_minus = 0, Gamma_total = 0;
  double Gamma_tilde_1 = 0, Gamma_tilde_2 = 0;
};

/// Rates at the config's own delta (n2 uses epsilon_2 = epsilon + delta).
DerivedRates derive_rates(const SystemConfig& cfg);

/// Single-qubit raising/lowering operators embedded in the two-qubit space.
ComplexMatrix sigma_plus(int qubit);
ComplexMatrix sigma_minus(int qubit);

ComplexMatrix build_hamiltonian(const SystemConfig& cfg);
ComplexMatrix build_effective_hamiltonian(const SystemConfig& cfg);

/// The four scaled jump operators sqrt(gamma_j^+-) sigma_+-^(j), in the order
/// (1,+), (1,-), (2,+), (2,-).
std::array<ComplexMatrix, 4> jump_operators(const SystemConfig& cfg);

enum class SuperBasis { Full16, Reduced6 };

struct Superoperator {
  ComplexMatrix matrix;
  SuperBasis basis = SuperBasis::Full16;
};

/// Matrix units (row, col) spanned by the basis, in order.
std::vector<std::pair<int, int>> basis_units(SuperBasis basis);

/// Column-stacked index of |i><j| in the 16-dimensional representation.
constexpr Eigen::Index unit_index(int i, int j) { return i + kHilbertDim * j; }

/// L_[q] rho = -i (H_eff rho - rho H_eff^dag) + q sum_j L_j rho L_j^dag.
Superoperator build_liouvillian(const SystemConfig& cfg);

/// Only the jump part sum_j L_j (.) L_j^dag, without the factor q.
ComplexMatrix jump_superoperator(const SystemConfig& cfg);

/// The 6x6 restriction onto {|11><11|, |10><10|, |10><01|, |01><10|,
/// |01><01|, |00><00|}, written out entry by entry.
Superoperator build_reduced_liouvillian(const SystemConfig& cfg);

/// Restricts a Full16 superoperator onto the Reduced6 units.
Superoperator restrict_to_reduced(const Superoperator& full);

/// Coherence order N(i) - N(j) of |i><j|, N = excitation number. The
/// Liouvillian never mixes different orders.
int coherence_order(int i, int j);

/// Index sets of the 16 column-stacked units grouped by coherence order
/// (-2..2), each in ascending index order.
const std::array<std::vector<Eigen::Index>, 5>& coherence_sectors();

/// |Psi+> and |Psi-> = (|10> +- |01>)/sqrt(2).
std::pair<ComplexVector, ComplexVector> bell_states();

/// A 4x4 two-qubit state.
class DensityMatrix {
 public:
  /// Checks Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-9.
  static DensityMatrix from_matrix(const ComplexMatrix& m);
  /// Divides by the trace without further checks. For propagated states.
  static DensityMatrix normalized(const ComplexMatrix& m);
  static DensityMatrix pure(const ComplexVector& ket);
  static DensityMatrix maximally_mixed();
  /// Product state |ab> with a, b in {0, 1}.
  static DensityMatrix basis(int a, int b);

  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Index of the product state |ab> in the declared basis.
constexpr Eigen::Index product_index(int a, int b) {
  return (1 - a) * 2 + (1 - b);
}

// JSON with infinities written as "+inf" / "-inf".
double json_to_extended_real(const nlohmann::json& j, const std::string& field);
nlohmann::json extended_real_to_json(double x);

void to_json(nlohmann::json& j, const SystemConfig& cfg);
void from_json(const nlohmann::json& j, SystemConfig& cfg);

}  // namespace chiral
