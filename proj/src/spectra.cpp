#include "chiral/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "chiral/csv.hpp"
#include "chiral/errors.hpp"
#include "chiral/parallel.hpp"

namespace chiral {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SystemConfig at_gamma(const SystemConfig& tmpl, double q, double gamma) {
  SystemConfig cfg = tmpl;
  cfg.q = q;
  cfg.gamma = gamma;
  cfg.delta = 0.0;
  return cfg;
}

// Indices of the k values closest to `center`.
std::vector<std::size_t> nearest(const std::vector<Complex>& values, Complex center,
                                 std::size_t k) {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a] - center) < std::abs(values[b] - center);
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

double beta_q_squared(const DerivedRates& r, double g, double q) {
  const double q2 = q * q;
  const double g1p = r.gamma1_plus, g1m = r.gamma1_minus;
  const double g2p = r.gamma2_plus, g2m = r.gamma2_minus;
  return 16.0 * std::pow(g, 4) +
         8.0 * g * g * (g1m * g2m + g1p * g2p - (g1p * g2m + g1m * g2p) * (1.0 - 2.0 * q2)) +
         (r.Gamma_1 * r.Gamma_1 - 4.0 * (1.0 - q2) * g1m * g1p) *
             (r.Gamma_2 * r.Gamma_2 - 4.0 * (1.0 - q2) * g2m * g2p);
}

double eta_sum_term(const DerivedRates& r, double g, double q) {
  const double q2 = q * q;
  const double d1 = r.gamma1_minus - r.gamma1_plus;
  const double d2 = r.gamma2_minus - r.gamma2_plus;
  return -8.0 * g * g + d1 * d1 + 4.0 * q2 * r.gamma1_minus * r.gamma1_plus + d2 * d2 +
         4.0 * q2 * r.gamma2_minus * r.gamma2_plus;
}

bool swap_is_closer(Complex prev_a, Complex prev_b, Complex a, Complex b) {
  return std::abs(b - prev_a) + std::abs(a - prev_b) <
         std::abs(a - prev_a) + std::abs(b - prev_b);
}

void require_monotone(const std::vector<double>& grid, const char* who) {
  if (grid.empty()) throw ValidationError(std::string(who) + ": empty grid");
  bool up = true, down = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    up = up && grid[i] > grid[i - 1];
    down = down && grid[i] < grid[i - 1];
  }
  if (!up && !down) throw ValidationError(std::string(who) + ": grid is not strictly monotone");
}

}  // namespace

HeffEigenvalues analytic_heff_eigs(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const double eps = cfg.epsilon, d = cfg.delta, g = cfg.g;
  const Complex x{r.Gamma_tilde_1 - r.Gamma_tilde_2, -2.0 * d};
  Complex eta0 = kI * std::sqrt(x * x - 16.0 * g * g);
  if (eta0.real() < 0.0 || (eta0.real() == 0.0 && eta0.imag() < 0.0)) eta0 = -eta0;

  HeffEigenvalues out;
  out.eta0 = eta0;
  const Complex base = -kI * r.Gamma_total + 4.0 * eps + 2.0 * d;
  out.xi[0] = -0.5 * kI * r.Gamma_plus;
  out.xi[1] = 0.25 * (base + eta0);
  out.xi[2] = 0.25 * (base - eta0);
  out.xi[3] = -0.5 * kI * r.Gamma_minus + 2.0 * eps + d;
  return out;
}

LiouvillianEigenvalues analytic_liouvillian_eigs(const SystemConfig& cfg) {
  if (cfg.delta != 0.0) {
    throw ValidationError("analytic_liouvillian_eigs: closed form only holds at delta = 0");
  }
  const DerivedRates r = derive_rates(cfg);
  const double G = r.Gamma_total;
  const Complex beta = std::sqrt(Complex(beta_q_squared(r, cfg.g, cfg.q), 0.0));
  const double sum = eta_sum_term(r, cfg.g, cfg.q);

  LiouvillianEigenvalues out;
  out.beta_q = beta;
  out.eta1 = std::sqrt(sum + 2.0 * beta);
  out.eta2 = std::sqrt(sum - 2.0 * beta);
  out.lambda = {0.5 * (-G + out.eta1), 0.5 * (-G - out.eta1), Complex(-0.5 * G),
                Complex(-0.5 * G),     0.5 * (-G + out.eta2), 0.5 * (-G - out.eta2)};
  return out;
}

std::string to_string(EPBranch b) {
  switch (b) {
    case EPBranch::Eta0: return "eta0";
    case EPBranch::EtaQ1: return "eta_q1";
    case EPBranch::EtaQ2: return "eta_q2";
  }
  return "?";
}

double ep_discriminant(double q, const SystemConfig& tmpl, double gamma) {
  const SystemConfig cfg = at_gamma(tmpl, q, gamma);
  const DerivedRates r = derive_rates(cfg);
  if (q == 0.0) {
    const double x = r.Gamma_tilde_1 - r.Gamma_tilde_2;
    return x * x - 16.0 * cfg.g * cfg.g;
  }
  const double b2 = beta_q_squared(r, cfg.g, q);
  if (b2 < 0.0) return kNaN;  // eta^(2) is genuinely complex here
  return eta_sum_term(r, cfg.g, q) - 2.0 * std::sqrt(b2);
}

Complex numerical_heff_discriminant(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const std::vector<Complex> xi = eigenvalues(build_effective_hamiltonian(cfg));
  const Complex center{cfg.epsilon + 0.5 * cfg.delta, -0.25 * r.Gamma_total};
  const auto pair = nearest(xi, center, 2);
  const Complex diff = xi[pair[0]] - xi[pair[1]];
  return diff * diff;
}

Complex numerical_liouvillian_discriminant(const SystemConfig& cfg) {
  const DerivedRates r = derive_rates(cfg);
  const std::vector<Complex> lambda = eigenvalues(build_reduced_liouvillian(cfg).matrix);
  const double G = r.Gamma_total;
  Complex sum = 0.0;
  for (std::size_t i : nearest(lambda, Complex(-0.5 * G), 4)) {
    const Complex e = 2.0 * lambda[i] + G;
    sum += e * e;
  }
  return 0.5 * sum;
}

int jordan_order(const ComplexMatrix& m, Complex mu, double rel_tol) {
  const Eigen::Index n = m.rows();
  const ComplexMatrix a = m - mu * ComplexMatrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  std::vector<Eigen::Index> nullity;
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    power = a * power;
    Eigen::JacobiSVD<ComplexMatrix> svd(power);
    const double tol = rel_tol * std::pow(scale, static_cast<double>(k));
    nullity.push_back((svd.singularValues().array() < tol).count());
  }
  const Eigen::Index multiplicity = nullity.back();
  if (multiplicity == 0) return 0;
  for (std::size_t k = 0; k < nullity.size(); ++k) {
    if (nullity[k] == multiplicity) return static_cast<int>(k + 1);
  }
  return static_cast<int>(n);
}

EPResult locate_ep(double q, const SystemConfig& tmpl, const EPSearch& search) {
  validate(at_gamma(tmpl, q, 0.0));
  if (!(search.gamma_max > 0.0) || search.scan_points < 2) {
    throw ValidationError("locate_ep: need gamma_max > 0 and at least 2 scan points");
  }

  auto disc = [&](double gamma) { return ep_discriminant(q, tmpl, gamma); };
  double lo = kNaN, hi = kNaN;
  double prev_x = 0.0, prev_d = disc(0.0);
  for (std::size_t i = 1; i <= search.scan_points; ++i) {
    const double x = search.gamma_max * static_cast<double>(i) /
                     static_cast<double>(search.scan_points);
    const double d = disc(x);
    if (std::isfinite(prev_d) && std::isfinite(d) &&
        ((prev_d < 0.0 && d >= 0.0) || (prev_d > 0.0 && d <= 0.0))) {
      lo = prev_x;
      hi = x;
      break;
    }
    prev_x = x;
    prev_d = d;
  }
  if (!std::isfinite(lo)) {
    throw NoRootError("locate_ep: no exceptional point for gamma in (0, " +
                      std::to_string(search.gamma_max) + "] at q = " + std::to_string(q));
  }
  const bool lo_negative = disc(lo) < 0.0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((disc(mid) < 0.0) == lo_negative) lo = mid;
    else hi = mid;
  }

  EPResult out;
  out.q = q;
  out.gamma_ep = 0.5 * (lo + hi);
  const SystemConfig cfg = at_gamma(tmpl, q, out.gamma_ep);
  if (q == 0.0) {
    out.branch = EPBranch::Eta0;
    const ComplexMatrix heff = build_effective_hamiltonian(cfg);
    const std::vector<Complex> xi = eigenvalues(heff);
    const Complex center{cfg.epsilon, -0.25 * derive_rates(cfg).Gamma_total};
    const auto pair = nearest(xi, center, 2);
    out.residual_gap = std::abs(xi[pair[0]] - xi[pair[1]]);
    out.operator_norm = heff.norm();
    out.order = jordan_order(heff, 0.5 * (xi[pair[0]] + xi[pair[1]]));
  } else {
    out.branch = EPBranch::EtaQ2;
    const ComplexMatrix l = build_reduced_liouvillian(cfg).matrix;
    out.residual_gap = std::sqrt(std::abs(numerical_liouvillian_discriminant(cfg)));
    out.operator_norm = l.norm();
    out.order = jordan_order(l, Complex(-0.5 * derive_rates(cfg).Gamma_total));
  }
  if (out.residual_gap > 1e-6 * out.operator_norm) {
    throw NumericalError("locate_ep: eigenvalues do not coalesce at gamma = " +
                         std::to_string(out.gamma_ep) + " (gap " +
                         std::to_string(out.residual_gap) + ")");
  }
  return out;
}

std::string to_string(SweepVariable v) { return v == SweepVariable::G ? "g" : "gamma"; }

SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "g") return SweepVariable::G;
  if (s == "gamma") return SweepVariable::Gamma;
  throw ValidationError("sweep variable must be \"g\" or \"gamma\", got \"" + s + "\"");
}

std::vector<Complex> continue_branches(const std::vector<Complex>& prev,
                                       std::vector<Complex> next) {
  if (prev.size() != next.size()) {
    throw ValidationError("continue_branches: branch count changed");
  }
  const std::size_t n = prev.size();
  std::vector<Complex> out(n);
  std::vector<bool> prev_used(n, false), next_used(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (prev_used[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (next_used[j]) continue;
        const double d = std::abs(prev[i] - next[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    out[bi] = next[bj];
    prev_used[bi] = true;
    next_used[bj] = true;
  }
  return out;
}

std::vector<SweepPoint> spectrum_sweep(const SystemConfig& tmpl, SweepVariable variable,
                                       const std::vector<double>& grid, unsigned jobs) {
  require_monotone(grid, "spectrum_sweep");
  std::vector<SweepPoint> points(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    SystemConfig cfg = tmpl;
    (variable == SweepVariable::G ? cfg.g : cfg.gamma) = grid[i];
    validate(cfg);
    const SpectrumResult s = eig_general(build_liouvillian(cfg).matrix);
    points[i] = {grid[i], s.eigenvalues, s.near_defective};
  });
  for (std::size_t i = 1; i < points.size(); ++i) {
    points[i].eigenvalues = continue_branches(points[i - 1].eigenvalues, points[i].eigenvalues);
  }
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& sweep) {
  const std::size_t n = sweep.empty() ? 16 : sweep.front().eigenvalues.size();
  os << "sweep_value";
  for (std::size_t k = 1; k <= n; ++k) os << ",re_lambda_" << k;
  for (std::size_t k = 1; k <= n; ++k) os << ",im_lambda_" << k;
  os << ",near_defective\n";
  for (const SweepPoint& p : sweep) {
    os << csv_number(p.value);
    for (const Complex& z : p.eigenvalues) os << ',' << csv_number(z.real());
    for (const Complex& z : p.eigenvalues) os << ',' << csv_number(z.imag());
    os << ',' << (p.near_defective ? 1 : 0) << '\n';
  }
}

std::vector<std::pair<Complex, Complex>> track_heff_pair(
    const SystemConfig& tmpl, const std::vector<std::pair<double, double>>& path) {
  std::vector<std::pair<Complex, Complex>> out;
  out.reserve(path.size());
  for (const auto& [delta, gamma] : path) {
    SystemConfig cfg = tmpl;
    cfg.delta = delta;
    cfg.gamma = gamma;
    const HeffEigenvalues e = analytic_heff_eigs(cfg);
    Complex a = e.xi[1], b = e.xi[2];
    if (!out.empty() && swap_is_closer(out.back().first, out.back().second, a, b)) {
      std::swap(a, b);
    }
    out.emplace_back(a, b);
  }
  return out;
}

RiemannSheets riemann_sheets(const SystemConfig& tmpl, const std::vector<double>& deltas,
                             const std::vector<double>& gammas) {
  require_monotone(deltas, "riemann_sheets (delta)");
  require_monotone(gammas, "riemann_sheets (gamma)");
  RiemannSheets out;
  out.deltas = deltas;
  out.gammas = gammas;
  for (double gamma : gammas) {
    std::vector<std::pair<double, double>> row;
    row.reserve(deltas.size());
    for (double delta : deltas) row.emplace_back(delta, gamma);
    const auto tracked = track_heff_pair(tmpl, row);
    std::vector<Complex> up, low;
    std::vector<bool> decaying;
    for (const auto& [a, b] : tracked) {
      up.push_back(a);
      low.push_back(b);
      decaying.push_back(a.imag() < b.imag());
    }
    out.upper.push_back(std::move(up));
    out.lower.push_back(std::move(low));
    out.upper_more_decaying.push_back(std::move(decaying));
  }
  return out;
}

void write_sheets_csv(std::ostream& os, const RiemannSheets& sheets) {
  os << "delta,gamma,re_xi_upper,im_xi_upper,re_xi_lower,im_xi_lower,upper_more_decaying\n";
  for (std::size_t r = 0; r < sheets.gammas.size(); ++r)
    for (std::size_t c = 0; c < sheets.deltas.size(); ++c) {
      const Complex a = sheets.upper[r][c], b = sheets.lower[r][c];
      os << csv_number(sheets.deltas[c]) << ',' << csv_number(sheets.gammas[r]) << ','
         << csv_number(a.real()) << ',' << csv_number(a.imag()) << ',' << csv_number(b.real())
         << ',' << csv_number(b.imag()) << ',' << (sheets.upper_more_decaying[r][c] ? 1 : 0)
         << '\n';
    }
}

}  // namespace chiral
