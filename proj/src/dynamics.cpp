#include "chiral/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "chiral/csv.hpp"
#include "chiral/errors.hpp"
#include "chiral/metrics.hpp"

namespace chiral {

namespace {

Complex vec_trace(const ComplexVector& v) {
  Complex tr = 0.0;
  for (int i = 0; i < kHilbertDim; ++i) tr += v(unit_index(i, i));
  return tr;
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

DensityMatrix eigenmatrix_near(const Superoperator& op, Complex target) {
  const SpectrumResult s = eig_general(op.matrix);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
    if (std::abs(s.eigenvalues[k] - target) < std::abs(s.eigenvalues[best] - target)) best = k;
  }
  ComplexMatrix m = unvec(s.eigenvectors.col(static_cast<Eigen::Index>(best)), kHilbertDim);
  const Complex tr = m.trace();
  if (std::abs(tr) < 1e-12) {
    throw NumericalError("eigenmatrix is traceless and cannot be normalized to a state");
  }
  return DensityMatrix::normalized(hermitize(m / tr));
}

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::CW ? "CW" : "CCW"; }

Orientation orientation_from_string(const std::string& s) {
  if (s == "CW" || s == "cw") return Orientation::CW;
  if (s == "CCW" || s == "ccw") return Orientation::CCW;
  throw ValidationError("orientation must be \"CW\" or \"CCW\", got \"" + s + "\"");
}

void validate(const Trajectory& traj) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("Trajectory: ") + what);
  };
  require(std::isfinite(traj.delta_amp) && traj.delta_amp >= 0.0, "delta_amp must be >= 0");
  require(std::isfinite(traj.gamma0) && traj.gamma0 >= 0.0, "gamma0 must be >= 0");
  require(std::isfinite(traj.gamma_amp) && traj.gamma_amp >= 0.0, "gamma_amp must be >= 0");
  require(std::isfinite(traj.period) && traj.period > 0.0, "period must be > 0");
}

void to_json(nlohmann::json& j, const Trajectory& traj) {
  j = nlohmann::json{{"delta_amp", traj.delta_amp},
                     {"gamma0", traj.gamma0},
                     {"gamma_amp", traj.gamma_amp},
                     {"period", traj.period},
                     {"orientation", to_string(traj.orientation)}};
}

void from_json(const nlohmann::json& j, Trajectory& traj) {
  if (!j.is_object()) throw ValidationError("trajectory must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "delta_amp" && key != "gamma0" && key != "gamma_amp" && key != "period" &&
        key != "orientation") {
      throw ValidationError("trajectory: unknown field '" + key + "'");
    }
  }
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw ValidationError(std::string("trajectory: '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
  };
  traj.delta_amp = number("delta_amp");
  traj.gamma0 = number("gamma0");
  traj.gamma_amp = number("gamma_amp");
  traj.period = number("period");
  if (!j.contains("orientation") || !j.at("orientation").is_string()) {
    throw ValidationError("trajectory: 'orientation' must be \"CW\" or \"CCW\"");
  }
  traj.orientation = orientation_from_string(j.at("orientation").get<std::string>());
  validate(traj);
}

SystemConfig params_at(const Trajectory& traj, const SystemConfig& base, double t) {
  const double T = traj.period;
  const double slack = 1e-12 * T;
  if (!(t >= -slack && t <= T + slack)) {
    throw ValidationError("params_at: t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(T) + "]");
  }
  const double sign = traj.orientation == Orientation::CW ? 1.0 : -1.0;
  const double s = std::sin(std::numbers::pi * t / T);
  SystemConfig cfg = base;
  cfg.delta = sign * traj.delta_amp * std::sin(2.0 * std::numbers::pi * t / T);
  cfg.gamma = traj.gamma0 + traj.gamma_amp * s * s;
  return cfg;
}

std::size_t default_steps(const Trajectory& traj, const SystemConfig& base) {
  const double n = std::round(20.0 * traj.period * base.epsilon);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

SectorPropagator::SectorPropagator() {
  const auto& sectors = coherence_sectors();
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const auto n = static_cast<Eigen::Index>(sectors[s].size());
    blocks_[s] = ComplexMatrix::Identity(n, n);
  }
}

SectorPropagator SectorPropagator::exponential(const Superoperator& l, double dt) {
  if (l.basis != SuperBasis::Full16) {
    throw ValidationError("SectorPropagator needs the Full16 Liouvillian");
  }
  SectorPropagator out;
  const auto& sectors = coherence_sectors();
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const ComplexMatrix block = l.matrix(sectors[s], sectors[s]);
    out.blocks_[s] = expm(dt * block);
  }
  return out;
}

ComplexVector SectorPropagator::apply(const ComplexVector& v) const {
  ComplexVector out(v.size());
  const auto& sectors = coherence_sectors();
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const ComplexVector part = v(sectors[s]);
    out(sectors[s]) = blocks_[s] * part;
  }
  return out;
}

void SectorPropagator::left_multiply(const SectorPropagator& step) {
  for (std::size_t s = 0; s < blocks_.size(); ++s) blocks_[s] = step.blocks_[s] * blocks_[s];
}

ComplexMatrix SectorPropagator::dense() const {
  ComplexMatrix out = ComplexMatrix::Zero(kLiouvilleDim, kLiouvilleDim);
  const auto& sectors = coherence_sectors();
  for (std::size_t s = 0; s < sectors.size(); ++s) out(sectors[s], sectors[s]) = blocks_[s];
  return out;
}

namespace {

// Advances the vectorized state by one step and returns the pre-normalization
// trace.
double advance(const Trajectory& traj, const SystemConfig& base, double dt, std::size_t k,
               ComplexVector& v) {
  const double t_mid = (static_cast<double>(k) + 0.5) * dt;
  const Superoperator l = build_liouvillian(params_at(traj, base, t_mid));
  v = SectorPropagator::exponential(l, dt).apply(v);
  const Complex tr = vec_trace(v);
  if (!all_finite(v) || !std::isfinite(tr.real()) || !(tr.real() > 0.0)) {
    throw NumericalError("propagation broke down at step " + std::to_string(k) +
                         " (t = " + std::to_string(t_mid) + "); reduce the time step");
  }
  v /= tr;
  return tr.real();
}

void check_steps(std::size_t steps) {
  if (steps == 0) throw ValidationError("propagate: steps must be >= 1");
}

}  // namespace

PropagationRecord propagate(const Trajectory& traj, const SystemConfig& base,
                            const DensityMatrix& rho0, std::size_t steps,
                            std::size_t record_stride) {
  validate(base);
  validate(traj);
  check_steps(steps);
  if (record_stride == 0) throw ValidationError("propagate: record_stride must be >= 1");

  PropagationRecord rec;
  rec.steps = steps;
  rec.record_stride = record_stride;
  rec.dt = traj.period / static_cast<double>(steps);
  rec.trace_before_renorm.reserve(steps);

  auto store = [&](double t, const ComplexVector& v) {
    DensityMatrix rho = DensityMatrix::normalized(unvec(v, kHilbertDim));
    rec.times.push_back(t);
    rec.purity.push_back(purity(rho));
    rec.states.push_back(std::move(rho));
  };

  ComplexVector v = vec(rho0.matrix());
  store(0.0, v);
  for (std::size_t k = 0; k < steps; ++k) {
    rec.trace_before_renorm.push_back(advance(traj, base, rec.dt, k, v));
    if ((k + 1) % record_stride == 0 || k + 1 == steps) {
      const double t = k + 1 == steps ? traj.period : static_cast<double>(k + 1) * rec.dt;
      store(t, v);
    }
  }
  return rec;
}

DensityMatrix propagate_final(const Trajectory& traj, const SystemConfig& base,
                              const DensityMatrix& rho0, std::size_t steps) {
  validate(base);
  validate(traj);
  check_steps(steps);
  const double dt = traj.period / static_cast<double>(steps);
  ComplexVector v = vec(rho0.matrix());
  for (std::size_t k = 0; k < steps; ++k) advance(traj, base, dt, k, v);
  return DensityMatrix::normalized(unvec(v, kHilbertDim));
}

Superoperator one_cycle_propagator(const Trajectory& traj, const SystemConfig& base,
                                   std::size_t steps) {
  validate(base);
  validate(traj);
  check_steps(steps);
  const double dt = traj.period / static_cast<double>(steps);
  SectorPropagator total;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    total.left_multiply(
        SectorPropagator::exponential(build_liouvillian(params_at(traj, base, t_mid)), dt));
  }
  return {total.dense(), SuperBasis::Full16};
}

double trace_loss_rate(const SystemConfig& cfg, const DensityMatrix& rho) {
  double sum = 0.0;
  for (const ComplexMatrix& l : jump_operators(cfg)) {
    sum += (l.adjoint() * l * rho.matrix()).trace().real();
  }
  return -(1.0 - cfg.q) * sum;
}

double purity_rate(const SystemConfig& cfg, const DensityMatrix& rho) {
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix r2 = r * r;
  const double p = r2.trace().real();
  double half = 0.0;
  for (const ComplexMatrix& l : jump_operators(cfg)) {
    const ComplexMatrix ldl = l.adjoint() * l;
    const double loss = (ldl * r).trace().real();
    const double mixing = (l.adjoint() * r * l * r).trace().real();
    half += cfg.q * (mixing - loss * p) - (ldl * r2).trace().real() + loss * p;
  }
  return 2.0 * half;
}

double spectral_radius(const Superoperator& op) {
  double radius = 0.0;
  for (const Complex& z : eigenvalues(op.matrix)) radius = std::max(radius, std::abs(z));
  return radius;
}

DensityMatrix fixed_point(const Superoperator& one_cycle) {
  return eigenmatrix_near(one_cycle, 1.0);
}

DensityMatrix steady_state(const Superoperator& liouvillian) {
  return eigenmatrix_near(liouvillian, 0.0);
}

void write_csv(std::ostream& os, const PropagationRecord& rec, bool include_rho) {
  os << "t";
  if (include_rho) {
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        os << ",re_rho_" << i << j << ",im_rho_" << i << j;
      }
  }
  os << ",fidelity_psi_plus,fidelity_psi_minus,concurrence,purity,trace_before_renorm\n";
  for (std::size_t n = 0; n < rec.times.size(); ++n) {
    const DensityMatrix& rho = rec.states[n];
    os << csv_number(rec.times[n]);
    if (include_rho) {
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
          os << ',' << csv_number(rho(i, j).real()) << ',' << csv_number(rho(i, j).imag());
        }
    }
    double trace = 1.0;
    if (n > 0) {
      const std::size_t step = std::min(n * rec.record_stride, rec.steps);
      trace = rec.trace_before_renorm[step - 1];
    }
    const MetricSample m = measure(rho);
    os << ',' << csv_number(m.fidelity_plus) << ',' << csv_number(m.fidelity_minus) << ','
       << csv_number(m.concurrence) << ',' << csv_number(rec.purity[n]) << ','
       << csv_number(trace) << '\n';
  }
}

}  // namespace chiral
