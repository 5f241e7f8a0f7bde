#include <numbers>
#include <random>
#include <sstream>

#include "chiral/errors.hpp"
#include "chiral/experiments.hpp"
#include "chiral/spectra.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace chiral;

namespace {

ComplexMatrix oracle_reduced(const SystemConfig& c) {
  const ComplexMatrix full = oracle::liouvillian(c);
  const auto units = basis_units(SuperBasis::Reduced6);
  ComplexMatrix m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      m(i, j) = full(units[i].first + 4 * units[i].second, units[j].first + 4 * units[j].second);
  return m;
}

double gamma_total(const SystemConfig& c) {
  const oracle::Rates r = oracle::rates(c);
  return r.g1p + r.g1m + r.g2p + r.g2m;
}

// Spread of the four eigenvalues nearest -Gamma/2, relative to Gamma.
double cluster_spread(const SystemConfig& c) {
  auto ev = eigenvalues(oracle_reduced(c));
  const Complex centre(-gamma_total(c) / 2, 0.0);
  std::sort(ev.begin(), ev.end(), [&](Complex a, Complex b) {
    return std::abs(a - centre) < std::abs(b - centre);
  });
  double spread = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) spread = std::max(spread, std::abs(ev[i] - ev[j]));
  return spread / gamma_total(c);
}

}  // namespace

TEST_CASE("analytic H_eff eigenvalues match the eigensolver") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const SystemConfig c = oracle::random_config(rng, 0.0);
    const HeffEigenvalues a = analytic_heff_eigs(c);
    const std::vector<Complex> analytic(a.xi.begin(), a.xi.end());
    CHECK(match_distance(analytic, eigenvalues(oracle::effective_hamiltonian(c))) < 1e-10);
    const bool canonical = a.eta0.real() > 0 || (a.eta0.real() == 0 && a.eta0.imag() >= 0);
    CHECK(canonical);
  }
}

TEST_CASE("H_eff branch at the Hermitian point and at the EP") {
  SystemConfig c = oracle::gain_loss(0.0, 0.0);
  HeffEigenvalues a = analytic_heff_eigs(c);
  CHECK(std::abs(a.xi[1] - 1.01) < 1e-15);
  CHECK(std::abs(a.xi[2] - 0.99) < 1e-15);
  CHECK(std::abs(std::abs(a.eta0) - 4 * c.g) < 1e-15);

  c.gamma = 4 * c.g / (1 + c.alpha);
  a = analytic_heff_eigs(c);
  CHECK(std::abs(a.eta0) < 1e-9);
  CHECK(std::abs(a.xi[1] - a.xi[2]) < 1e-9);
}

TEST_CASE("H_eff spectrum under delta -> -delta") {
  // With xi' = xi - epsilon - delta/2 the pair maps to -conj(xi') as a set.
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    SystemConfig c = oracle::random_config(rng, 0.0);
    SystemConfig m = c;
    m.delta = -c.delta;
    if (std::isfinite(c.beta2) && c.beta2 != 0.0) {
      c.beta2 = m.beta2 = oracle::kInf;  // keep rates independent of delta
    }
    const HeffEigenvalues a = analytic_heff_eigs(c), b = analytic_heff_eigs(m);
    const double shift_a = c.epsilon + c.delta / 2, shift_b = m.epsilon + m.delta / 2;
    std::vector<Complex> lhs{b.xi[1] - shift_b, b.xi[2] - shift_b};
    std::vector<Complex> rhs{-std::conj(a.xi[1] - shift_a), -std::conj(a.xi[2] - shift_a)};
    CHECK(match_distance(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("analytic reduced Liouvillian eigenvalues match the eigensolver") {
  std::mt19937_64 rng(33);
  for (double q : {0.0, 0.3, 0.7, 1.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const SystemConfig c = oracle::random_config(rng, q, true);
      const LiouvillianEigenvalues a = analytic_liouvillian_eigs(c);
      const std::vector<Complex> analytic(a.lambda.begin(), a.lambda.end());
      CHECK(match_distance(analytic, eigenvalues(oracle_reduced(c))) < 1e-9);
    }
  }
  SystemConfig c = oracle::gain_loss(1.0);
  c.delta = 0.01;
  CHECK_THROWS_AS(analytic_liouvillian_eigs(c), ValidationError);
}

TEST_CASE("reduced Liouvillian limits") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemConfig c1 = oracle::random_config(rng, 1.0, true);
    CHECK(std::abs(analytic_liouvillian_eigs(c1).lambda[0]) < 1e-12);

    SystemConfig c0 = c1;
    c0.q = 0.0;
    const oracle::Rates r = oracle::rates(c0);
    const double d = (r.g1m - r.g1p) - (r.g2m - r.g2p);
    const Complex eta_nhh2 = d * d - 16 * c0.g * c0.g;
    const LiouvillianEigenvalues a = analytic_liouvillian_eigs(c0);
    const double miss =
        std::min(std::abs(a.eta1 * a.eta1 - eta_nhh2), std::abs(a.eta2 * a.eta2 - eta_nhh2));
    CHECK(miss < 1e-12);
  }
}

TEST_CASE("EP positions for the gain/loss template") {
  const SystemConfig tmpl = fig2_config(0.0);
  const EPResult e0 = locate_ep(0.0, tmpl);
  CHECK(e0.gamma_ep == doctest::Approx(4 * 0.01 / 2.2).epsilon(1e-9));
  CHECK(e0.branch == EPBranch::Eta0);
  CHECK(e0.order == 2);

  const EPResult e1 = locate_ep(1.0, tmpl);
  CHECK(e1.gamma_ep == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(e1.branch == EPBranch::EtaQ2);
  CHECK(e1.order == 3);

  SystemConfig symmetric = tmpl;
  symmetric.alpha = 1.0;
  CHECK_THROWS_AS(locate_ep(1.0, symmetric), NoRootError);
}

TEST_CASE("q = 0 EP is a pair coalescence, isolated from the rest of the spectrum") {
  const EPResult e = locate_ep(0.0, fig2_config(0.0));
  SystemConfig c = fig2_config(0.0);
  c.gamma = e.gamma_ep;
  auto xi = eigenvalues(oracle::effective_hamiltonian(c));
  std::sort(xi.begin(), xi.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  const double gap = std::abs(xi[1] - xi[2]);
  CHECK(gap < 1e-6);
  CHECK(std::abs(xi[0] - xi[1]) > 10 * gap);
  CHECK(std::abs(xi[3] - xi[2]) > 10 * gap);
}

TEST_CASE("EP position interpolates monotonically in q") {
  const SystemConfig tmpl = fig2_config(0.0);
  double prev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double g = locate_ep(k / 10.0, tmpl).gamma_ep;
    CHECK(g > prev);
    prev = g;
  }

  // Oracle for q = 0.5: scan of the eigenvalue spread of the independent 6x6.
  const double located = locate_ep(0.5, tmpl).gamma_ep;
  double best = 0.0, best_spread = 1e9;
  for (int k = 1; k <= 3000; ++k) {
    SystemConfig c = fig2_config(0.5);
    c.gamma = 0.3 * k / 3000.0;
    const double s = cluster_spread(c);
    if (s < best_spread) {
      best_spread = s;
      best = c.gamma;
    }
  }
  CHECK(std::abs(best - located) <= 0.3 / 3000.0);
  CHECK(located == doctest::Approx(0.101232).epsilon(1e-5));
}

TEST_CASE("jordan_order") {
  ComplexMatrix j3 = ComplexMatrix::Identity(4, 4) * 2.0;
  j3(0, 1) = 1.0;
  j3(1, 2) = 1.0;
  CHECK(jordan_order(j3, 2.0) == 3);
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 1.0, 2.0;
  CHECK(jordan_order(d, 1.0) == 1);
}

TEST_CASE("spectrum sweep at the finite-temperature rates") {
  const std::vector<double> grid = figS1_g_grid();
  for (double q : {0.0, 0.5, 1.0}) {
    const auto sweep = spectrum_sweep(figS1_config(q), SweepVariable::G, grid, 2);
    REQUIRE(sweep.size() == grid.size());
    for (const SweepPoint& p : sweep) {
      REQUIRE(p.eigenvalues.size() == 16);
      for (const Complex& z : p.eigenvalues) CHECK(z.real() <= 1e-10);
      if (q == 1.0 && p.value > 0.0) {
        int zeros = 0;
        for (const Complex& z : p.eigenvalues) zeros += std::abs(z) < 1e-9;
        CHECK(zeros == 1);
      }
    }
  }

  const SystemConfig rates = figS1_config(1.0);
  const auto d = oracle::rates(rates);
  CHECK(d.g1m == doctest::Approx(0.02));
  CHECK(d.g1p == doctest::Approx(0.01));
  CHECK(d.g2m == doctest::Approx(0.01));
  CHECK(d.g2p == doctest::Approx(0.005));
}

TEST_CASE("q = 0 branches merge where eta0 vanishes") {
  // (Gt1 - Gt2)^2 = 16 g^2 with Gt1 = 0.01, Gt2 = 0.005.
  const double g_ep = 0.005 / 4;
  const std::vector<double> grid = figS1_g_grid();
  const auto sweep = spectrum_sweep(figS1_config(0.0), SweepVariable::G, grid);
  // -i (xi_2 - conj(xi_1)) and -i (xi_3 - conj(xi_1)) coalesce with xi_2, xi_3.
  std::size_t best = 0;
  double best_gap = 1e9;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    SystemConfig c = figS1_config(0.0);
    c.g = sweep[k].value;
    const HeffEigenvalues a = analytic_heff_eigs(c);
    const Complex p = Complex(0, -1) * (a.xi[1] - std::conj(a.xi[0]));
    const Complex m = Complex(0, -1) * (a.xi[2] - std::conj(a.xi[0]));
    auto nearest = [&](Complex target) {
      std::size_t idx = 0;
      for (std::size_t i = 1; i < 16; ++i)
        if (std::abs(sweep[k].eigenvalues[i] - target) <
            std::abs(sweep[k].eigenvalues[idx] - target))
          idx = i;
      return sweep[k].eigenvalues[idx];
    };
    const double gap = std::abs(nearest(p) - nearest(m));
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  CHECK(std::abs(grid[best] - g_ep) <= grid[1] - grid[0]);
}

TEST_CASE("branch continuation follows the nearest neighbour") {
  std::vector<Complex> prev{0.0, 1.0, Complex(0, 1)};
  std::vector<Complex> next{Complex(0.01, 1.0), 0.99, 0.01};
  const auto ordered = continue_branches(prev, next);
  CHECK(ordered[0] == Complex(0.01));
  CHECK(ordered[1] == Complex(0.99));
  CHECK(ordered[2] == Complex(0.01, 1.0));

  // Along a sweep, consecutive points move by no more than a few grid steps.
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(0.2 * k / 200.0);
  const auto sweep = spectrum_sweep(fig2_config(0.5), SweepVariable::Gamma, grid);
  for (std::size_t k = 1; k < sweep.size(); ++k)
    for (std::size_t b = 0; b < 16; ++b)
      CHECK(std::abs(sweep[k].eigenvalues[b] - sweep[k - 1].eigenvalues[b]) < 0.05);

  CHECK_THROWS_AS(spectrum_sweep(fig2_config(0.5), SweepVariable::G, {0.0, 0.02, 0.01}),
                  ValidationError);
}

TEST_CASE("sweep CSV layout") {
  const auto sweep = spectrum_sweep(figS1_config(1.0), SweepVariable::G, {0.0, 0.01});
  std::ostringstream os;
  write_sweep_csv(os, sweep);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("sweep_value,re_lambda_1,", 0) == 0);
  CHECK(header.find("im_lambda_16,near_defective") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("Riemann sheets: gap 2g at the origin and branch swap around the EP") {
  const SystemConfig tmpl = fig2_config(0.0);
  const RiemannSheets sheets = riemann_sheets(tmpl, {0.0, 0.01}, {0.0, 0.005});
  CHECK(std::abs(std::abs(sheets.upper[0][0] - sheets.lower[0][0]) - 2 * tmpl.g) < 1e-14);

  const double gamma_ep = 4 * tmpl.g / (1 + tmpl.alpha), r = 0.5 * gamma_ep;
  std::vector<std::pair<double, double>> loop;
  for (int k = 0; k <= 400; ++k) {
    const double phi = 2 * std::numbers::pi * k / 400.0;
    loop.emplace_back(r * std::sin(phi), gamma_ep + r * std::cos(phi));
  }
  const auto tracked = track_heff_pair(tmpl, loop);
  CHECK(std::abs(tracked.back().first - tracked.front().second) < 1e-9);
  CHECK(std::abs(tracked.back().second - tracked.front().first) < 1e-9);

  // A loop that misses the EP returns each branch to itself.
  std::vector<std::pair<double, double>> small;
  for (int k = 0; k <= 400; ++k) {
    const double phi = 2 * std::numbers::pi * k / 400.0;
    small.emplace_back(0.2 * r * std::sin(phi), 0.3 * gamma_ep + 0.2 * r * std::cos(phi));
  }
  const auto same = track_heff_pair(tmpl, small);
  CHECK(std::abs(same.back().first - same.front().first) < 1e-9);
}
