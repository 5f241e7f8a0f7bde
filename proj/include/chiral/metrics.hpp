#pragma once

#include <string>
#include <vector>

#include "chiral/model.hpp"

namespace chiral {

enum class BellState { Plus, Minus };

/// Tr{|Psi+-><Psi+-| rho}.
double bell_fidelity(const DensityMatrix& rho, BellState which);

/// Wootters concurrence max(0, sqrt(mu1) - sqrt(mu2) - sqrt(mu3) - sqrt(mu4)),
/// mu the decreasing eigenvalues of rho (sy sy) rho^* (sy sy).
double concurrence(const DensityMatrix& rho);

/// Tr rho^2.
double purity(const DensityMatrix& rho);

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct MetricSample {
  double fidelity_plus = 0;
  double fidelity_minus = 0;
  double concurrence = 0;
  double purity = 0;
};

MetricSample measure(const DensityMatrix& rho);

struct PTReport {
  bool is_pt_symmetric = false;
  std::vector<std::string> violated_conditions;
  double occupation_sum = 0;  // n1 + n2
};

/// Static classifier: delta = -2 epsilon, gamma_1^+ = gamma_2^- and
/// gamma_1^- = gamma_2^+, each to 1e-12 relative.
PTReport pt_symmetry_check(const SystemConfig& cfg);

}  // namespace chiral
