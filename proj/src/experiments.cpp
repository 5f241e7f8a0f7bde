#include "chiral/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chiral/csv.hpp"
#include "chiral/errors.hpp"
#include "chiral/parallel.hpp"

namespace chiral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kConfigFields{"epsilon", "delta", "g",     "gamma",
                                             "alpha",   "beta1", "beta2", "q"};
const std::vector<std::string> kTrajectoryFields{"delta_amp", "gamma0", "gamma_amp", "period"};

double* field_pointer(ExperimentSpec& spec, const std::string& path) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) return nullptr;
  const std::string group = path.substr(0, dot), field = path.substr(dot + 1);
  SystemConfig& c = spec.base_config;
  Trajectory& t = spec.trajectory;
  if (group == "base_config") {
    if (field == "epsilon") return &c.epsilon;
    if (field == "delta") return &c.delta;
    if (field == "g") return &c.g;
    if (field == "gamma") return &c.gamma;
    if (field == "alpha") return &c.alpha;
    if (field == "beta1") return &c.beta1;
    if (field == "beta2") return &c.beta2;
    if (field == "q") return &c.q;
  } else if (group == "trajectory") {
    if (field == "delta_amp") return &t.delta_amp;
    if (field == "gamma0") return &t.gamma0;
    if (field == "gamma_amp") return &t.gamma_amp;
    if (field == "period") return &t.period;
  }
  return nullptr;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.empty()) throw ValidationError("output path is empty");
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write output file '" + path.string() + "'");
  return os;
}

std::size_t steps_for(const ExperimentSpec& spec, const RunOptions& opts) {
  return opts.steps ? *opts.steps : default_steps(spec.trajectory, spec.base_config);
}

std::string metric_line(const std::string& name, const MetricSample& m) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << name << ": F+(T)=" << m.fidelity_plus << " F-(T)=" << m.fidelity_minus
     << " C(T)=" << m.concurrence << " P(T)=" << m.purity;
  return os.str();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

ExperimentSpec make_spec(std::string name, SystemConfig cfg, Trajectory traj,
                         InitialState init, std::optional<SweepSpec> sweep = std::nullopt) {
  ExperimentSpec s;
  s.name = name;
  s.base_config = cfg;
  s.trajectory = traj;
  s.initial_state = std::move(init);
  s.sweep = std::move(sweep);
  s.output = name + ".csv";
  return s;
}

std::string q_label(double q) {
  if (q == 0.0) return "q0";
  if (q == 1.0) return "q1";
  std::ostringstream os;
  os << "q" << q;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

InitialState named(InitialState::Kind k) {
  InitialState s;
  s.kind = k;
  return s;
}

}  // namespace

DensityMatrix InitialState::density() const {
  const auto [plus, minus] = bell_states();
  switch (kind) {
    case Kind::BellPlus: return DensityMatrix::pure(plus);
    case Kind::BellMinus: return DensityMatrix::pure(minus);
    case Kind::MaximallyMixed: return DensityMatrix::maximally_mixed();
    case Kind::Basis: return DensityMatrix::basis(a, b);
    case Kind::Explicit: return DensityMatrix::from_matrix(matrix);
  }
  throw ValidationError("unknown initial state kind");
}

bool InitialState::operator==(const InitialState& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Basis) return a == o.a && b == o.b;
  if (kind == Kind::Explicit) return matrix == o.matrix;
  return true;
}

void to_json(nlohmann::json& j, const InitialState& s) {
  using K = InitialState::Kind;
  switch (s.kind) {
    case K::BellPlus: j = "bell_plus"; return;
    case K::BellMinus: j = "bell_minus"; return;
    case K::MaximallyMixed: j = "maximally_mixed"; return;
    case K::Basis: j = "basis:" + std::to_string(s.a) + std::to_string(s.b); return;
    case K::Explicit: {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < s.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < s.matrix.cols(); ++c) {
          row.push_back({s.matrix(r, c).real(), s.matrix(r, c).imag()});
        }
        rows.push_back(row);
      }
      j = nlohmann::json{{"explicit", rows}};
      return;
    }
  }
}

void from_json(const nlohmann::json& j, InitialState& s) {
  using K = InitialState::Kind;
  s = InitialState{};
  if (j.is_string()) {
    const auto v = j.get<std::string>();
    if (v == "bell_plus") { s.kind = K::BellPlus; return; }
    if (v == "bell_minus") { s.kind = K::BellMinus; return; }
    if (v == "maximally_mixed") { s.kind = K::MaximallyMixed; return; }
    if (v.rfind("basis:", 0) == 0) {
      std::string bits = v.substr(6);
      if (bits.size() == 4 && bits.front() == '|' && bits.back() == '>') bits = bits.substr(1, 2);
      if (bits.size() == 2 && (bits[0] == '0' || bits[0] == '1') &&
          (bits[1] == '0' || bits[1] == '1')) {
        s.kind = K::Basis;
        s.a = bits[0] - '0';
        s.b = bits[1] - '0';
        return;
      }
    }
    throw ValidationError("initial_state: unrecognized value \"" + v + "\"");
  }
  if (j.is_object() && j.size() == 1 && j.contains("explicit")) {
    const auto& rows = j.at("explicit");
    if (!rows.is_array() || rows.size() != 4) {
      throw ValidationError("initial_state.explicit must be a 4x4 array");
    }
    ComplexMatrix m(4, 4);
    for (std::size_t r = 0; r < 4; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || row.size() != 4) {
        throw ValidationError("initial_state.explicit must be a 4x4 array");
      }
      for (std::size_t c = 0; c < 4; ++c) {
        const auto& z = row[c];
        double re = 0, im = 0;
        if (z.is_number()) {
          re = z.get<double>();
        } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
          re = z[0].get<double>();
          im = z[1].get<double>();
        } else {
          throw ValidationError("initial_state.explicit entries must be numbers or [re, im]");
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(re, im);
      }
    }
    DensityMatrix::from_matrix(m);  // validates
    s.kind = K::Explicit;
    s.matrix = m;
    return;
  }
  throw ValidationError("initial_state must be a string or {\"explicit\": ...}");
}

void to_json(nlohmann::json& j, const ExperimentSpec& spec) {
  j = nlohmann::json{{"name", spec.name},
                     {"base_config", spec.base_config},
                     {"trajectory", spec.trajectory},
                     {"initial_state", spec.initial_state},
                     {"output", spec.output}};
  if (spec.sweep) {
    nlohmann::json grid = nlohmann::json::array();
    for (double x : spec.sweep->grid) grid.push_back(extended_real_to_json(x));
    j["sweep"] = {{"parameter", spec.sweep->parameter}, {"grid", grid}};
  }
}

void from_json(const nlohmann::json& j, ExperimentSpec& spec) {
  if (!j.is_object()) throw ValidationError("experiment spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "name" && key != "base_config" && key != "trajectory" &&
        key != "initial_state" && key != "sweep" && key != "output") {
      throw ValidationError("unknown top-level key '" + key + "'");
    }
  }
  for (const char* key : {"base_config", "trajectory", "initial_state", "output"}) {
    if (!j.contains(key)) throw ValidationError(std::string("missing top-level key '") + key + "'");
  }
  spec = ExperimentSpec{};
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ValidationError("'name' must be a string");
    spec.name = j.at("name").get<std::string>();
  }
  spec.base_config = j.at("base_config").get<SystemConfig>();
  spec.trajectory = j.at("trajectory").get<Trajectory>();
  spec.initial_state = j.at("initial_state").get<InitialState>();
  if (!j.at("output").is_string()) throw ValidationError("'output' must be a string path");
  spec.output = j.at("output").get<std::string>();
  if (spec.name.empty()) spec.name = std::filesystem::path(spec.output).stem().string();
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const auto& s = j.at("sweep");
    if (!s.is_object() || !s.contains("parameter") || !s.contains("grid") ||
        !s.at("parameter").is_string() || !s.at("grid").is_array()) {
      throw ValidationError("sweep must be {\"parameter\": string, \"grid\": array}");
    }
    SweepSpec sweep;
    sweep.parameter = s.at("parameter").get<std::string>();
    for (const auto& x : s.at("grid")) sweep.grid.push_back(json_to_extended_real(x, "sweep.grid"));
    spec.sweep = std::move(sweep);
  }
  validate(spec);
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config '" + path.string() + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return j.get<ExperimentSpec>();
}

void validate(const ExperimentSpec& spec) {
  validate(spec.base_config);
  validate(spec.trajectory);
  if (spec.output.empty()) throw ValidationError("output path is empty");
  if (!spec.sweep) return;
  const SweepSpec& s = spec.sweep.value();
  ExperimentSpec probe = spec;
  if (field_pointer(probe, s.parameter) == nullptr) {
    throw ValidationError("sweep parameter '" + s.parameter +
                          "' is not a real field of base_config or trajectory");
  }
  if (s.grid.empty()) throw ValidationError("sweep grid is empty");
  const bool beta = s.parameter == "base_config.beta1" || s.parameter == "base_config.beta2";
  for (double x : s.grid) {
    if (std::isnan(x) || (!beta && std::isinf(x))) {
      throw ValidationError("sweep grid value " + csv_number(x) + " is not allowed for " +
                            s.parameter);
    }
  }
  bool up = true, down = true;
  for (std::size_t i = 1; i < s.grid.size(); ++i) {
    up = up && s.grid[i] > s.grid[i - 1];
    down = down && s.grid[i] < s.grid[i - 1];
  }
  if (!up && !down) throw ValidationError("sweep grid is not strictly monotone");
  for (double x : s.grid) {
    const ExperimentSpec point = with_parameter(spec, s.parameter, x);
    validate(point.base_config);
    validate(point.trajectory);
  }
}

ExperimentSpec with_parameter(const ExperimentSpec& spec, const std::string& path, double value) {
  ExperimentSpec out = spec;
  double* field = field_pointer(out, path);
  if (field == nullptr) throw ValidationError("unknown parameter path '" + path + "'");
  *field = value;
  out.sweep.reset();
  return out;
}

std::vector<SweepRow> sweep_rows(const ExperimentSpec& spec, const RunOptions& opts) {
  validate(spec);
  if (!spec.sweep) throw ValidationError("spec '" + spec.name + "' has no sweep");
  const SweepSpec& s = *spec.sweep;
  const DensityMatrix rho0 = spec.initial_state.density();
  std::vector<SweepRow> rows(s.grid.size());
  parallel_for(s.grid.size(), opts.jobs, [&](std::size_t i) {
    const ExperimentSpec point = with_parameter(spec, s.parameter, s.grid[i]);
    const DensityMatrix final_state = propagate_final(
        point.trajectory, point.base_config, rho0, steps_for(point, opts));
    rows[i] = {s.grid[i], measure(final_state)};
  });
  return rows;
}

void write_sweep_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "sweep_value,fidelity_psi_plus,fidelity_psi_minus,concurrence,purity\n";
  for (const SweepRow& r : rows) {
    os << csv_number(r.value) << ',' << csv_number(r.final.fidelity_plus) << ','
       << csv_number(r.final.fidelity_minus) << ',' << csv_number(r.final.concurrence) << ','
       << csv_number(r.final.purity) << '\n';
  }
}

ExperimentSummary run_sweep(const ExperimentSpec& spec, const RunOptions& opts) {
  ExperimentSummary summary;
  summary.name = spec.name;
  summary.output = spec.output;
  std::ofstream os = open_output(summary.output);
  summary.sweep = sweep_rows(spec, opts);
  write_sweep_rows_csv(os, summary.sweep);
  if (!os) throw ValidationError("failed writing '" + summary.output.string() + "'");

  double lo = kInf, hi = -kInf;
  for (const SweepRow& r : summary.sweep) {
    lo = std::min(lo, r.final.fidelity_minus);
    hi = std::max(hi, r.final.fidelity_minus);
  }
  std::ostringstream line;
  line.precision(6);
  line << std::fixed << spec.name << ": " << summary.sweep.size() << " points over "
       << spec.sweep->parameter << ", F-(T) in [" << lo << ", " << hi << "] -> "
       << summary.output.string();
  summary.line = line.str();
  return summary;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  validate(spec);
  if (spec.sweep) return run_sweep(spec, opts);
  ExperimentSummary summary;
  summary.name = spec.name;
  summary.output = spec.output;
  std::ofstream os = open_output(summary.output);
  const PropagationRecord rec =
      propagate(spec.trajectory, spec.base_config, spec.initial_state.density(),
                steps_for(spec, opts), opts.record_stride);
  write_csv(os, rec, opts.include_rho);
  if (!os) throw ValidationError("failed writing '" + summary.output.string() + "'");
  summary.final = measure(rec.states.back());
  summary.line = metric_line(spec.name, *summary.final) + " -> " + summary.output.string();
  return summary;
}

SystemConfig fig2_config(double q) {
  SystemConfig c;
  c.epsilon = 1.0;
  c.delta = 0.0;
  c.g = 0.01;
  c.gamma = 0.0;
  c.alpha = 1.2;
  c.beta1 = -kInf;
  c.beta2 = kInf;
  c.q = q;
  return c;
}

Trajectory fig2_trajectory(Orientation o) {
  return Trajectory{0.04, 0.0, 0.008, 2500.0, o};
}

Trajectory fig4_trajectory(Orientation o) {
  return Trajectory{0.06, 0.0, 0.008, 2500.0, o};
}

SystemConfig figS1_config(double q) {
  SystemConfig c;
  c.epsilon = 1.0;
  c.gamma = 0.03;
  c.alpha = 0.5;
  c.beta1 = std::log(2.0);
  c.beta2 = std::log(2.0);
  c.q = q;
  return c;
}

std::vector<double> q_grid() { return linspace(0.0, 1.0, 21); }

std::vector<double> beta1_grid() {
  // Two points per decade between 1e-1 and 1e3 on each side.
  std::vector<double> mags;
  for (int k = 0; k <= 8; ++k) mags.push_back(std::pow(10.0, -1.0 + 0.5 * k));
  std::vector<double> grid{-kInf};
  for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
  for (double m : mags) grid.push_back(m);
  grid.push_back(kInf);
  return grid;
}

std::vector<double> gamma_amp_grid() {
  // 25 points in [0.002, 0.03] cover the q = 0 EP (0.0182). The tail reaches
  // past the q = 0.5 (0.101) and q = 1 (0.2) EPs so every marker has grid
  // points on both sides.
  std::vector<double> grid = linspace(0.002, 0.03, 25);
  for (double x : {0.04, 0.06, 0.08, 0.1, 0.12, 0.15, 0.18, 0.22, 0.26, 0.3}) grid.push_back(x);
  return grid;
}

std::vector<double> gamma0_grid() { return linspace(0.0, 0.02, 11); }

std::vector<double> figS1_g_grid() { return linspace(0.0, 0.03, 151); }

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2a", "fig2b", "fig3a", "fig3b",
                                            "fig4a", "fig4b", "figS1"};
  return ids;
}

std::vector<ExperimentSpec> builtin_specs(const std::string& figure_id) {
  using K = InitialState::Kind;
  std::vector<ExperimentSpec> out;
  const std::vector<double> three_q{0.0, 0.5, 1.0};
  if (figure_id == "fig2a") {
    for (double q : {0.0, 1.0})
      for (Orientation o : {Orientation::CW, Orientation::CCW}) {
        std::string name = "fig2a_" + q_label(q) + "_" + (o == Orientation::CW ? "cw" : "ccw");
        out.push_back(make_spec(name, fig2_config(q), fig2_trajectory(o), named(K::BellPlus)));
      }
  } else if (figure_id == "fig2b") {
    out.push_back(make_spec("fig2b_q_sweep", fig2_config(0.0), fig2_trajectory(Orientation::CCW),
                            named(K::BellPlus), SweepSpec{"base_config.q", q_grid()}));
    for (double q : {0.0, 1.0}) {
      out.push_back(make_spec("fig2b_inset_gamma0_" + q_label(q), fig2_config(q),
                              fig2_trajectory(Orientation::CCW), named(K::BellPlus),
                              SweepSpec{"trajectory.gamma0", gamma0_grid()}));
    }
  } else if (figure_id == "fig3a") {
    for (double q : three_q) {
      out.push_back(make_spec("fig3a_" + q_label(q), fig2_config(q),
                              fig2_trajectory(Orientation::CCW), named(K::BellPlus),
                              SweepSpec{"base_config.beta1", beta1_grid()}));
    }
  } else if (figure_id == "fig3b") {
    for (double q : three_q) {
      out.push_back(make_spec("fig3b_" + q_label(q), fig2_config(q),
                              fig2_trajectory(Orientation::CCW), named(K::BellPlus),
                              SweepSpec{"trajectory.gamma_amp", gamma_amp_grid()}));
    }
  } else if (figure_id == "fig4a" || figure_id == "fig4b") {
    for (double q : three_q) {
      out.push_back(make_spec(figure_id + "_" + q_label(q), fig2_config(q),
                              fig4_trajectory(Orientation::CCW), named(K::MaximallyMixed)));
    }
    out.push_back(make_spec(figure_id + "_q1_cw", fig2_config(1.0),
                            fig4_trajectory(Orientation::CW), named(K::MaximallyMixed)));
  } else if (figure_id == "figS1") {
    // spectrum sweep, handled by reproduce()
  } else {
    throw ValidationError("unknown figure id '" + figure_id + "'");
  }
  return out;
}

std::vector<ExperimentSummary> reproduce(const std::string& figure_id,
                                         const std::filesystem::path& out_dir,
                                         const RunOptions& opts) {
  std::vector<ExperimentSummary> summaries;
  for (ExperimentSpec spec : builtin_specs(figure_id)) {
    spec.output = (out_dir / spec.output).string();
    summaries.push_back(run_experiment(spec, opts));
  }
  if (figure_id == "fig3b") {
    const std::vector<double> qs{0.0, 0.5, 1.0};
    ExperimentSummary s;
    s.name = "fig3b_ep_markers";
    s.output = out_dir / "fig3b_ep_markers.csv";
    std::ofstream os = open_output(s.output);
    write_ep_csv(os, ep_report(qs, fig2_config(0.0)));
    s.line = s.name + ": EP positions for q = 0, 0.5, 1 -> " + s.output.string();
    summaries.push_back(std::move(s));
  }
  if (figure_id == "figS1") {
    for (double q : {0.0, 0.5, 1.0}) {
      ExperimentSummary s;
      s.name = "figS1_" + q_label(q);
      s.output = out_dir / (s.name + ".csv");
      std::ofstream os = open_output(s.output);
      const auto sweep = spectrum_sweep(figS1_config(q), SweepVariable::G, figS1_g_grid(), opts.jobs);
      write_sweep_csv(os, sweep);
      s.line = s.name + ": " + std::to_string(sweep.size()) + " g points -> " + s.output.string();
      summaries.push_back(std::move(s));
    }
  }
  return summaries;
}

std::vector<EPResult> ep_report(const std::vector<double>& qs, const SystemConfig& tmpl,
                                const EPSearch& search) {
  std::vector<EPResult> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(locate_ep(q, tmpl, search));
  return out;
}

void write_ep_csv(std::ostream& os, const std::vector<EPResult>& rows) {
  os << "q,gamma_ep,branch,order,residual_gap\n";
  for (const EPResult& r : rows) {
    os << csv_number(r.q) << ',' << csv_number(r.gamma_ep) << ',' << to_string(r.branch) << ','
       << r.order << ',' << csv_number(r.residual_gap) << '\n';
  }
}

}  // namespace chiral
