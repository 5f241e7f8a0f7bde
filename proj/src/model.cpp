#include "chiral/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("SystemConfig: " + message);
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// Single-qubit operators in the {|1>, |0>} basis.
ComplexMatrix raising_2x2() {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

ComplexMatrix embed(const ComplexMatrix& op, int qubit) {
  if (qubit == 1) return kron(op, identity(2));
  if (qubit == 2) return kron(identity(2), op);
  throw ValidationError("qubit index must be 1 or 2, got " + std::to_string(qubit));
}

// Excitation numbers of the basis {|11>, |10>, |01>, |00>}.
constexpr std::array<int, 4> kExcitations{2, 1, 1, 0};

}  // namespace

void validate(const SystemConfig& cfg) {
  require(std::isfinite(cfg.epsilon) && cfg.epsilon > 0.0, "epsilon must be > 0");
  require(std::isfinite(cfg.delta), "delta must be finite");
  require(std::isfinite(cfg.g) && cfg.g >= 0.0, "g must be >= 0");
  require(std::isfinite(cfg.gamma) && cfg.gamma >= 0.0, "gamma must be >= 0");
  require(std::isfinite(cfg.alpha) && cfg.alpha > 0.0, "alpha must be > 0");
  require(!std::isnan(cfg.beta1) && !std::isnan(cfg.beta2), "beta must not be NaN");
  require(std::isfinite(cfg.q) && cfg.q >= 0.0 && cfg.q <= 1.0, "q must lie in [0, 1]");
}

std::optional<std::string> markovian_warning(const SystemConfig& cfg) {
  const double largest = std::max({cfg.g, cfg.gamma, cfg.alpha * cfg.gamma,
                                   std::abs(cfg.delta)});
  if (largest <= 0.1 * cfg.epsilon) return std::nullopt;
  std::ostringstream os;
  os << "weak-coupling assumption violated: max(g, gamma, alpha*gamma, |delta|) = "
     << largest << " > 0.1*epsilon = " << 0.1 * cfg.epsilon;
  return os.str();
}

double fermi_occupation(double beta, double energy) {
  if (beta == kInf) return 0.0;
  if (beta == -kInf) return 1.0;
  const double x = beta * energy;
  // exp overflow gives inf and 1/inf = 0, which is the right limit.
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

DerivedRates derive_rates(const SystemConfig& cfg) {
  DerivedRates r;
  r.n1 = fermi_occupation(cfg.beta1, cfg.epsilon);
  r.n2 = fermi_occupation(cfg.beta2, cfg.epsilon + cfg.delta);
  const double gamma1 = cfg.gamma;
  const double gamma2 = cfg.alpha * cfg.gamma;
  r.gamma1_plus = gamma1 * r.n1;
  r.gamma1_minus = gamma1 * (1.0 - r.n1);
  r.gamma2_plus = gamma2 * r.n2;
  r.gamma2_minus = gamma2 * (1.0 - r.n2);
  r.Gamma_1 = r.gamma1_plus + r.gamma1_minus;
  r.Gamma_2 = r.gamma2_plus + r.gamma2_minus;
  r.Gamma_plus = r.gamma1_plus + r.gamma2_plus;
  r.Gamma_minus = r.gamma1_minus + r.gamma2_minus;
  r.Gamma_total = r.Gamma_plus + r.Gamma_minus;
  r.Gamma_tilde_1 = r.gamma1_minus - r.gamma1_plus;
  r.Gamma_tilde_2 = r.gamma2_minus - r.gamma2_plus;
  return r;
}

ComplexMatrix sigma_plus(int qubit) { return embed(raising_2x2(), qubit); }

ComplexMatrix sigma_minus(int qubit) {
  return embed(raising_2x2().transpose(), qubit);
}

ComplexMatrix build_hamiltonian(const SystemConfig& cfg) {
  const ComplexMatrix sp1 = sigma_plus(1), sm1 = sigma_minus(1);
  const ComplexMatrix sp2 = sigma_plus(2), sm2 = sigma_minus(2);
  return cfg.epsilon * sp1 * sm1 + (cfg.epsilon + cfg.delta) * sp2 * sm2 +
         cfg.g * (sp1 * sm2 + sm1 * sp2);
}

ComplexMatrix build_effective_hamiltonian(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const ComplexMatrix sp1 = sigma_plus(1), sm1 = sigma_minus(1);
  const ComplexMatrix sp2 = sigma_plus(2), sm2 = sigma_minus(2);
  const ComplexMatrix decay = r.gamma1_minus * sp1 * sm1 + r.gamma1_plus * sm1 * sp1 +
                              r.gamma2_minus * sp2 * sm2 + r.gamma2_plus * sm2 * sp2;
  return build_hamiltonian(cfg) - 0.5 * kI * decay;
}

std::array<ComplexMatrix, 4> jump_operators(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  return {std::sqrt(r.gamma1_plus) * sigma_plus(1),
          std::sqrt(r.gamma1_minus) * sigma_minus(1),
          std::sqrt(r.gamma2_plus) * sigma_plus(2),
          std::sqrt(r.gamma2_minus) * sigma_minus(2)};
}

std::vector<std::pair<int, int>> basis_units(SuperBasis basis) {
  if (basis == SuperBasis::Reduced6) {
    return {{0, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}};
  }
  std::vector<std::pair<int, int>> units;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) units.emplace_back(i, j);
  return units;
}

ComplexMatrix jump_superoperator(const SystemConfig& cfg) {
  // vec(A X B) = (B^T kron A) vec(X); here B = A^dag so B^T = conj(A).
  ComplexMatrix out = ComplexMatrix::Zero(kLiouvilleDim, kLiouvilleDim);
  for (const ComplexMatrix& jump : jump_operators(cfg)) {
    out += kron(jump.conjugate(), jump);
  }
  return out;
}

namespace {

// Constant pieces of the Liouvillian, stored as their (few) nonzero entries.
// Every operator involved is real, so a term c M of H_eff contributes
// -i (c I kron M - conj(c) M kron I).
struct Entry {
  Eigen::Index row, col;
  double value;
};
using Sparse = std::vector<Entry>;

Sparse nonzeros(const ComplexMatrix& m) {
  Sparse out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out.push_back({i, j, m(i, j).real()});
  return out;
}

struct LiouvillianTerms {
  std::array<Sparse, 5> left, right;  // I kron M, M kron I
  std::array<Sparse, 4> jumps;        // conj(s) kron s per jump
};

const LiouvillianTerms& liouvillian_terms() {
  static const LiouvillianTerms terms = [] {
    const ComplexMatrix sp1 = sigma_plus(1), sm1 = sigma_minus(1);
    const ComplexMatrix sp2 = sigma_plus(2), sm2 = sigma_minus(2);
    const std::array<ComplexMatrix, 5> ops{sp1 * sm1, sp2 * sm2, sm1 * sp1, sm2 * sp2,
                                           sp1 * sm2 + sm1 * sp2};
    const ComplexMatrix id = identity(kHilbertDim);
    LiouvillianTerms t;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      t.left[k] = nonzeros(kron(id, ops[k]));
      t.right[k] = nonzeros(kron(ops[k], id));
    }
    const std::array<ComplexMatrix, 4> s{sp1, sm1, sp2, sm2};
    for (std::size_t k = 0; k < s.size(); ++k) {
      t.jumps[k] = nonzeros(kron(s[k].conjugate(), s[k]));
    }
    return t;
  }();
  return terms;
}

void accumulate(ComplexMatrix& l, const Sparse& term, Complex c) {
  for (const Entry& e : term) l(e.row, e.col) += c * e.value;
}

}  // namespace

Superoperator build_liouvillian(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const LiouvillianTerms& t = liouvillian_terms();
  // Coefficients of n1, n2, (1 - n1), (1 - n2) and the exchange term in H_eff.
  const std::array<Complex, 5> c{
      Complex(cfg.epsilon, -0.5 * r.gamma1_minus),
      Complex(cfg.epsilon + cfg.delta, -0.5 * r.gamma2_minus),
      Complex(0.0, -0.5 * r.gamma1_plus), Complex(0.0, -0.5 * r.gamma2_plus),
      Complex(cfg.g, 0.0)};
  ComplexMatrix l = ComplexMatrix::Zero(kLiouvilleDim, kLiouvilleDim);
  for (std::size_t k = 0; k < c.size(); ++k) {
    // -i c and +i conj(c)
    accumulate(l, t.left[k], Complex(c[k].imag(), -c[k].real()));
    accumulate(l, t.right[k], Complex(c[k].imag(), c[k].real()));
  }
  const std::array<double, 4> rates{r.gamma1_plus, r.gamma1_minus, r.gamma2_plus,
                                    r.gamma2_minus};
  for (std::size_t k = 0; k < rates.size(); ++k) accumulate(l, t.jumps[k], cfg.q * rates[k]);
  return {std::move(l), SuperBasis::Full16};
}

Superoperator build_reduced_liouvillian(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const double q = cfg.q, g = cfg.g, d = cfg.delta, G = r.Gamma_total;
  const double g1p = r.gamma1_plus, g1m = r.gamma1_minus;
  const double g2p = r.gamma2_plus, g2m = r.gamma2_minus;
  const Complex ig = kI * g;

  ComplexMatrix m = ComplexMatrix::Zero(6, 6);
  m(0, 0) = -g1m - g2m;
  m(0, 1) = g2p * q;
  m(0, 4) = g1p * q;

  m(1, 0) = g2m * q;
  m(1, 1) = -g1m - g2p;
  m(1, 2) = ig;
  m(1, 3) = -ig;
  m(1, 5) = g1p * q;

  m(2, 1) = ig;
  m(2, 2) = 0.5 * (2.0 * kI * d - G);
  m(2, 4) = -ig;

  m(3, 1) = -ig;
  m(3, 3) = 0.5 * (-2.0 * kI * d - G);
  m(3, 4) = ig;

  m(4, 0) = g1m * q;
  m(4, 2) = -ig;
  m(4, 3) = ig;
  m(4, 4) = -g1p - g2m;
  m(4, 5) = g2p * q;

  m(5, 1) = g1m * q;
  m(5, 4) = g2m * q;
  m(5, 5) = -g1p - g2p;
  return {std::move(m), SuperBasis::Reduced6};
}

Superoperator restrict_to_reduced(const Superoperator& full) {
  if (full.basis != SuperBasis::Full16) {
    throw ValidationError("restrict_to_reduced: input is not in the Full16 basis");
  }
  const auto units = basis_units(SuperBasis::Reduced6);
  ComplexMatrix m(6, 6);
  for (std::size_t a = 0; a < units.size(); ++a)
    for (std::size_t b = 0; b < units.size(); ++b)
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          full.matrix(unit_index(units[a].first, units[a].second),
                      unit_index(units[b].first, units[b].second));
  return {std::move(m), SuperBasis::Reduced6};
}

int coherence_order(int i, int j) {
  return kExcitations.at(static_cast<std::size_t>(i)) -
         kExcitations.at(static_cast<std::size_t>(j));
}

const std::array<std::vector<Eigen::Index>, 5>& coherence_sectors() {
  static const auto sectors = [] {
    std::array<std::vector<Eigen::Index>, 5> s;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i)
        s[static_cast<std::size_t>(coherence_order(i, j) + 2)].push_back(unit_index(i, j));
    for (auto& v : s) std::sort(v.begin(), v.end());
    return s;
  }();
  return sectors;
}

std::pair<ComplexVector, ComplexVector> bell_states() {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector plus = ComplexVector::Zero(4), minus = ComplexVector::Zero(4);
  plus(product_index(1, 0)) = h;
  plus(product_index(0, 1)) = h;
  minus(product_index(1, 0)) = h;
  minus(product_index(0, 1)) = -h;
  return {plus, minus};
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  if (m.rows() != kHilbertDim || m.cols() != kHilbertDim) {
    throw ValidationError("density matrix must be 4x4");
  }
  if (!all_finite(m)) throw ValidationError("density matrix has non-finite entries");
  if ((m - m.adjoint()).norm() > 1e-10) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - 1.0) > 1e-10) {
    throw ValidationError("density matrix trace is not 1");
  }
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::normalized(const ComplexMatrix& m) {
  const Complex tr = m.trace();
  if (!all_finite(m) || !(std::abs(tr) > 0.0)) {
    throw NumericalError("cannot normalize state: trace " + std::to_string(tr.real()));
  }
  return DensityMatrix(m / tr);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& ket) {
  if (ket.size() != kHilbertDim) throw ValidationError("ket must have 4 entries");
  const double n = ket.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("ket has zero norm");
  const ComplexVector k = ket / n;
  return DensityMatrix(k * k.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(0.25 * identity(kHilbertDim));
}

DensityMatrix DensityMatrix::basis(int a, int b) {
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
    throw ValidationError("basis state labels must be 0 or 1");
  }
  ComplexVector k = ComplexVector::Zero(kHilbertDim);
  k(product_index(a, b)) = 1.0;
  return pure(k);
}

double json_to_extended_real(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError("field '" + field + "' must be a number, \"+inf\" or \"-inf\"");
}

nlohmann::json extended_real_to_json(double x) {
  if (x == kInf) return "+inf";
  if (x == -kInf) return "-inf";
  return x;
}

void to_json(nlohmann::json& j, const SystemConfig& cfg) {
  j = nlohmann::json{{"epsilon", cfg.epsilon},
                     {"delta", cfg.delta},
                     {"g", cfg.g},
                     {"gamma", cfg.gamma},
                     {"alpha", cfg.alpha},
                     {"beta1", extended_real_to_json(cfg.beta1)},
                     {"beta2", extended_real_to_json(cfg.beta2)},
                     {"q", cfg.q}};
}

void from_json(const nlohmann::json& j, SystemConfig& cfg) {
  static const std::set<std::string> kFields{"epsilon", "delta", "g",     "gamma",
                                             "alpha",   "beta1", "beta2", "q"};
  if (!j.is_object()) throw ValidationError("base_config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kFields.count(key)) throw ValidationError("base_config: unknown field '" + key + "'");
  }
  for (const auto& key : kFields) {
    if (!j.contains(key)) throw ValidationError("base_config: missing field '" + key + "'");
  }
  auto number = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError(std::string("base_config: '") + key + "' must be a number");
    return v.get<double>();
  };
  cfg.epsilon = number("epsilon");
  cfg.delta = number("delta");
  cfg.g = number("g");
  cfg.gamma = number("gamma");
  cfg.alpha = number("alpha");
  cfg.beta1 = json_to_extended_real(j.at("beta1"), "beta1");
  cfg.beta2 = json_to_extended_real(j.at("beta2"), "beta2");
  cfg.q = number("q");
  validate(cfg);
}

}  // namespace chiral
