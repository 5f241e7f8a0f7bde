#include "chiral/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace chiral {

namespace {

ComplexMatrix sigma_y_sigma_y() {
  ComplexMatrix sy = ComplexMatrix::Zero(2, 2);
  sy(0, 1) = -kI;
  sy(1, 0) = kI;
  return kron(sy, sy);
}

bool relatively_equal(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= 1e-12 * scale;
}

}  // namespace

double bell_fidelity(const DensityMatrix& rho, BellState which) {
  const auto [plus, minus] = bell_states();
  const ComplexVector& psi = which == BellState::Plus ? plus : minus;
  return (psi.adjoint() * rho.matrix() * psi)(0).real();
}

double concurrence(const DensityMatrix& rho) {
  // With rho = A A^dag, the square roots of the eigenvalues of
  // rho (sy sy) rho^* (sy sy) are the singular values of A^T (sy sy) A.
  // Eigenvalues at round-off level are dropped (clamped to 0) so that they do
  // not come back as sqrt(1e-17) ~ 3e-9 noise.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho.matrix() + rho.matrix().adjoint()));
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double cutoff = 1e-14 * std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd root(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    root(k) = lambda(k) > cutoff ? std::sqrt(lambda(k)) : 0.0;
  }
  const ComplexMatrix a = es.eigenvectors() * root.asDiagonal();
  const ComplexMatrix tau = a.transpose() * sigma_y_sigma_y() * a;
  const Eigen::VectorXd s = Eigen::JacobiSVD<ComplexMatrix>(tau).singularValues();
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const ComplexMatrix d = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (d + d.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

MetricSample measure(const DensityMatrix& rho) {
  return {bell_fidelity(rho, BellState::Plus), bell_fidelity(rho, BellState::Minus),
          concurrence(rho), purity(rho)};
}

PTReport pt_symmetry_check(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  PTReport report;
  report.occupation_sum = r.n1 + r.n2;
  if (!relatively_equal(cfg.delta, -2.0 * cfg.epsilon)) {
    report.violated_conditions.emplace_back("delta = -2 epsilon");
  }
  if (!relatively_equal(r.gamma1_plus, r.gamma2_minus)) {
    report.violated_conditions.emplace_back("rate matching gamma1+ = gamma2-");
  }
  if (!relatively_equal(r.gamma1_minus, r.gamma2_plus)) {
    report.violated_conditions.emplace_back("rate matching gamma1- = gamma2+");
  }
  report.is_pt_symmetric = report.violated_conditions.empty();
  return report;
}

}  // namespace chiral
