#pragma once

// Closed-loop driving of (delta, gamma) and time-ordered propagation.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "chiral/model.hpp"

namespace chiral {

enum class Orientation { CW, CCW };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// delta(t) = +-delta_amp sin(2 pi t / T)   (+ for CW, - for CCW)
/// gamma(t) = gamma0 + gamma_amp sin^2(pi t / T)
struct Trajectory {
  double delta_amp = 0.0;
  double gamma0 = 0.0;
  double gamma_amp = 0.0;
  double period = 1.0;
  Orientation orientation = Orientation::CCW;

  bool operator==(const Trajectory&) const = default;
};

void validate(const Trajectory& traj);

void to_json(nlohmann::json& j, const Trajectory& traj);
void from_json(const nlohmann::json& j, Trajectory& traj);

/// base with delta(t) and gamma(t) substituted. Throws ValidationError for t
/// outside [0, T].
SystemConfig params_at(const Trajectory& traj, const SystemConfig& base, double t);

/// Default step count 20 T epsilon, i.e. dt = 0.05 / epsilon.
std::size_t default_steps(const Trajectory& traj, const SystemConfig& base);

/// exp(L dt) for the 16x16 Liouvillian, evaluated sector by sector in
/// coherence order (sizes 1, 4, 6, 4, 1). Stored block-wise so products of
/// many steps stay cheap.
class SectorPropagator {
 public:
  /// Identity map.
  SectorPropagator();
  static SectorPropagator exponential(const Superoperator& l, double dt);

  ComplexVector apply(const ComplexVector& v) const;
  /// (*this) <- step * (*this)
  void left_multiply(const SectorPropagator& step);
  ComplexMatrix dense() const;

 private:
  std::array<ComplexMatrix, 5> blocks_;
};

struct PropagationRecord {
  std::vector<double> times;                // recorded times
  std::vector<DensityMatrix> states;        // normalized rho at each time
  std::vector<double> purity;               // Tr rho^2 at each time
  std::vector<double> trace_before_renorm;  // per integration step
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t record_stride = 1;
};

/// Midpoint exponential stepping: for each step k the Liouvillian is frozen at
/// t_k + dt/2, the vectorized state is multiplied by exp(L dt) and divided by
/// its trace. States are stored every record_stride steps (always including
/// t = 0 and t = T). Throws NumericalError if the state stops being finite or
/// its trace collapses.
PropagationRecord propagate(const Trajectory& traj, const SystemConfig& base,
                            const DensityMatrix& rho0, std::size_t steps,
                            std::size_t record_stride = 1);

/// Only the final state, without storing the history.
DensityMatrix propagate_final(const Trajectory& traj, const SystemConfig& base,
                              const DensityMatrix& rho0, std::size_t steps);

/// Time-ordered product of the per-step exponentials over one period with no
/// renormalization.
Superoperator one_cycle_propagator(const Trajectory& traj, const SystemConfig& base,
                                   std::size_t steps);

/// d Tr(rho)/dt = -(1 - q) sum_j Tr(L_j^dag L_j rho).
double trace_loss_rate(const SystemConfig& cfg, const DensityMatrix& rho);

/// d Tr(rho^2)/dt under the trace-renormalized hybrid equation, i.e. twice
/// sum_j q [Tr(L^dag rho L rho) - Tr(L^dag L rho) P] - Tr(L^dag L rho^2)
///          + Tr(L^dag L rho) P.
double purity_rate(const SystemConfig& cfg, const DensityMatrix& rho);

/// Largest |eigenvalue| of a superoperator.
double spectral_radius(const Superoperator& op);

/// Eigenmatrix of the eigenvalue closest to 1, Hermitized and normalized to
/// unit trace.
DensityMatrix fixed_point(const Superoperator& one_cycle);

/// Eigenmatrix of the eigenvalue closest to 0 of a Liouvillian, normalized.
DensityMatrix steady_state(const Superoperator& liouvillian);

/// Writes t, optional re/im of the 16 entries of rho (column-stacked),
/// fidelity_psi_plus, fidelity_psi_minus, concurrence, purity,
/// trace_before_renorm. The last column holds the trace of the step that ends
/// at t (1 at t = 0).
void write_csv(std::ostream& os, const PropagationRecord& rec, bool include_rho);

}  // namespace chiral
