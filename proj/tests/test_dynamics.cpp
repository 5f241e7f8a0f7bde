#include <numbers>
#include <random>
#include <sstream>

#include "chiral/dynamics.hpp"
#include "chiral/errors.hpp"
#include "chiral/experiments.hpp"
#include "chiral/metrics.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace chiral;

namespace {

DensityMatrix bell_plus() { return DensityMatrix::pure(oracle::bell(+1)); }

ComplexMatrix evolve(const SystemConfig& c, const ComplexMatrix& rho, double h) {
  const ComplexVector v = oracle::taylor_expm(oracle::liouvillian(c) * h) * vec(rho);
  return unvec(v, 4);
}

// Central differences of Tr rho and of the purity of the normalized state.
double trace_fd(const SystemConfig& c, const ComplexMatrix& rho, double h) {
  return (evolve(c, rho, h).trace() - evolve(c, rho, -h).trace()).real() / (2 * h);
}

double purity_fd(const SystemConfig& c, const ComplexMatrix& rho, double h) {
  auto p = [&](double s) {
    const ComplexMatrix r = evolve(c, rho, s);
    const ComplexMatrix n = r / r.trace();
    return (n * n).trace().real();
  };
  return (p(h) - p(-h)) / (2 * h);
}

Trajectory short_loop(Orientation o, double period = 200.0) {
  return Trajectory{0.04, 0.0, 0.008, period, o};
}

}  // namespace

TEST_CASE("trajectory parameters") {
  const SystemConfig base = fig2_config(1.0);
  const Trajectory ccw = fig2_trajectory(Orientation::CCW);
  const double T = ccw.period;

  SystemConfig p = params_at(ccw, base, 0.0);
  CHECK(p.delta == 0.0);
  CHECK(p.gamma == 0.0);
  p = params_at(ccw, base, T / 2);
  CHECK(std::abs(p.delta) < 1e-15);
  CHECK(p.gamma == doctest::Approx(0.008).epsilon(1e-15));
  p = params_at(ccw, base, T / 4);
  CHECK(p.delta == doctest::Approx(-0.04).epsilon(1e-15));
  CHECK(p.gamma == doctest::Approx(0.004).epsilon(1e-14));
  p = params_at(fig2_trajectory(Orientation::CW), base, T / 4);
  CHECK(p.delta == doctest::Approx(0.04).epsilon(1e-15));
  p = params_at(ccw, base, T);
  CHECK(std::abs(p.delta) < 1e-15);
  CHECK(std::abs(p.gamma) < 1e-15);
  CHECK(p.g == base.g);

  CHECK_THROWS_AS(params_at(ccw, base, -1.0), ValidationError);
  CHECK_THROWS_AS(params_at(ccw, base, T + 1.0), ValidationError);
  CHECK(default_steps(ccw, base) == 50000);

  Trajectory bad = ccw;
  bad.period = 0.0;
  CHECK_THROWS_AS(validate(bad), ValidationError);

  const nlohmann::json j = ccw;
  CHECK(j.at("orientation") == "CCW");
  CHECK(j.get<Trajectory>() == ccw);
}

TEST_CASE("sector exponential equals the full 16x16 exponential") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemConfig c = oracle::random_config(rng, trial % 3 / 2.0);
    const double dt = trial % 2 == 0 ? 0.05 : 3.0;
    const ComplexMatrix ref = oracle::taylor_expm(oracle::liouvillian(c) * dt);
    const SectorPropagator p = SectorPropagator::exponential(build_liouvillian(c), dt);
    CHECK((p.dense() - ref).norm() < 1e-12 * ref.norm());
    const ComplexVector v = vec(oracle::random_density(rng));
    CHECK((p.apply(v) - ref * v).norm() < 1e-12);
  }
}

TEST_CASE("q = 1 propagation preserves the trace at every step") {
  const auto rec = propagate(short_loop(Orientation::CCW), fig2_config(1.0),
                             DensityMatrix::basis(0, 0), 4000, 50);
  REQUIRE(rec.trace_before_renorm.size() == 4000);
  for (double t : rec.trace_before_renorm) CHECK(std::abs(t - 1.0) < 1e-8);
  CHECK(rec.times.size() == 81);
  CHECK(rec.times.back() == 200.0);
}

TEST_CASE("trace loss rate") {
  std::mt19937_64 rng(42);
  SystemConfig c = fig2_config(1.0);
  c.gamma = 0.008;
  const DensityMatrix rho = DensityMatrix::from_matrix(oracle::random_density(rng));
  CHECK(trace_loss_rate(c, rho) == 0.0);

  c.q = 0.0;
  CHECK(trace_loss_rate(c, DensityMatrix::basis(1, 1)) ==
        doctest::Approx(-c.alpha * c.gamma).epsilon(1e-14));

  for (int trial = 0; trial < 20; ++trial) {
    SystemConfig s = oracle::random_config(rng, trial % 4 / 3.0);
    if (s.gamma < 1e-3) s.gamma = 0.02;
    const DensityMatrix r = DensityMatrix::from_matrix(oracle::random_density(rng));
    const double rate = trace_loss_rate(s, r);
    const double fd = trace_fd(s, r.matrix(), 1e-3);
    CHECK(std::abs(rate - fd) <= 1e-6 * std::abs(rate) + 1e-12);
  }
}

TEST_CASE("purity rate") {
  SystemConfig c = fig2_config(0.0);
  c.gamma = 0.008;
  c.delta = 0.01;
  CHECK(std::abs(purity_rate(c, bell_plus())) < 1e-15);
  CHECK(std::abs(purity_rate(c, DensityMatrix::basis(1, 0))) < 1e-15);

  c.q = 1.0;
  CHECK(purity_rate(c, bell_plus()) < 0.0);
  // short-time propagation agrees on the sign
  const ComplexMatrix later = evolve(c, bell_plus().matrix(), 1e-2);
  CHECK((later * later).trace().real() / std::norm(later.trace()) < 1.0);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    SystemConfig s = oracle::random_config(rng, trial % 4 / 3.0);
    if (s.gamma < 1e-3) s.gamma = 0.02;
    const DensityMatrix r = DensityMatrix::from_matrix(oracle::random_density(rng, 2));
    const double rate = purity_rate(s, r);
    const double fd = purity_fd(s, r.matrix(), 1e-3);
    CHECK(std::abs(rate - fd) <= 1e-6 * std::abs(rate) + 1e-14);
  }
}

TEST_CASE("propagated states stay Hermitian, positive and entangled within [0, 1]") {
  const auto rec = propagate(short_loop(Orientation::CW), fig2_config(0.5), bell_plus(), 4000, 40);
  for (const DensityMatrix& rho : rec.states) {
    CHECK((rho.matrix() - rho.matrix().adjoint()).norm() < 1e-9);
    for (const Complex& z : eigenvalues(rho.matrix())) CHECK(z.real() >= -1e-7);
    const double c = concurrence(rho);
    CHECK(c >= -1e-9);
    CHECK(c <= 1.0 + 1e-9);
  }
}

TEST_CASE("q = 0 conserves the purity of pure states") {
  const auto rec = propagate(short_loop(Orientation::CCW), fig2_config(0.0), bell_plus(),
                             default_steps(short_loop(Orientation::CCW), fig2_config(0.0)));
  for (double p : rec.purity) CHECK(std::abs(p - 1.0) < 1e-6);
}

TEST_CASE("one-cycle propagator") {
  const Trajectory loop = short_loop(Orientation::CCW, 400.0);
  const Superoperator p = one_cycle_propagator(loop, fig2_config(1.0), 8000);
  CHECK(std::abs(spectral_radius(p) - 1.0) < 1e-8);
  bool has_one = false;
  for (const Complex& z : eigenvalues(p.matrix)) has_one = has_one || std::abs(z - 1.0) < 1e-8;
  CHECK(has_one);

  // P(T) applied to a state reproduces the renormalization-free propagation.
  const DensityMatrix rho0 = DensityMatrix::basis(1, 0);
  const DensityMatrix direct = propagate_final(loop, fig2_config(1.0), rho0, 8000);
  const DensityMatrix mapped =
      DensityMatrix::normalized(unvec(p.matrix * vec(rho0.matrix()), 4));
  CHECK(trace_distance(direct, mapped) < 1e-10);
}

TEST_CASE("static loop: fixed point of P(T) is the Liouvillian steady state") {
  SystemConfig base = fig2_config(1.0);
  base.beta1 = 0.5;
  const Trajectory still{0.0, 0.01, 0.0, 50.0, Orientation::CW};
  const Superoperator p = one_cycle_propagator(still, base, 1000);
  SystemConfig frozen = base;
  frozen.gamma = 0.01;
  const DensityMatrix a = fixed_point(p);
  const DensityMatrix b = steady_state(build_liouvillian(frozen));
  CHECK(trace_distance(a, b) < 1e-9);
  CHECK_NOTHROW(DensityMatrix::from_matrix(a.matrix()));
}

TEST_CASE("chirality at the Fig. 2 parameters, q = 1") {
  const SystemConfig base = fig2_config(1.0);
  const MetricSample cw =
      measure(propagate_final(fig2_trajectory(Orientation::CW), base, bell_plus(), 50000));
  const MetricSample ccw =
      measure(propagate_final(fig2_trajectory(Orientation::CCW), base, bell_plus(), 50000));
  CHECK(std::abs(cw.fidelity_plus - ccw.fidelity_minus) < 0.02);
  CHECK(std::abs(cw.fidelity_minus - ccw.fidelity_plus) < 0.02);

  // step doubling
  const MetricSample fine =
      measure(propagate_final(fig2_trajectory(Orientation::CCW), base, bell_plus(), 100000));
  CHECK(std::abs(fine.fidelity_minus - ccw.fidelity_minus) < 1e-4);
  CHECK(std::abs(fine.fidelity_plus - ccw.fidelity_plus) < 1e-4);
}

TEST_CASE("propagation input checks and CSV layout") {
  const Trajectory loop = short_loop(Orientation::CW, 10.0);
  CHECK_THROWS_AS(propagate(loop, fig2_config(1.0), bell_plus(), 0), ValidationError);
  CHECK_THROWS_AS(propagate(loop, fig2_config(1.0), bell_plus(), 10, 0), ValidationError);

  const auto rec = propagate(loop, fig2_config(1.0), bell_plus(), 10, 3);
  CHECK(rec.times == std::vector<double>{0.0, 3.0, 6.0, 9.0, 10.0});
  std::ostringstream os;
  write_csv(os, rec, true);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header.rfind("t,re_rho_00,im_rho_00,re_rho_10,", 0) == 0);
  CHECK(header.find(",fidelity_psi_plus,fidelity_psi_minus,concurrence,purity,"
                    "trace_before_renorm") != std::string::npos);
  CHECK(first.rfind("0,", 0) == 0);

  std::ostringstream brief;
  write_csv(brief, rec, false);
  CHECK(brief.str().rfind("t,fidelity_psi_plus,", 0) == 0);
}
