#pragma once

// Config-driven runs: single propagations, 1-D sweeps and the built-in
// figure reproductions.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/metrics.hpp"
#include "chiral/spectra.hpp"

namespace chiral {

struct InitialState {
  enum class Kind { BellPlus, BellMinus, MaximallyMixed, Basis, Explicit };
  Kind kind = Kind::BellPlus;
  int a = 0, b = 0;         // Basis: |ab>
  ComplexMatrix matrix;     // Explicit

  DensityMatrix density() const;
  bool operator==(const InitialState& o) const;
};

/// "bell_plus" | "bell_minus" | "maximally_mixed" | "basis:ab" (also
/// "basis:|ab>") | {"explicit": 4x4 array of [re, im]}.
void to_json(nlohmann::json& j, const InitialState& s);
void from_json(const nlohmann::json& j, InitialState& s);

struct SweepSpec {
  std::string parameter;  // "base_config.<field>" or "trajectory.<field>"
  std::vector<double> grid;
  bool operator==(const SweepSpec&) const = default;
};

struct ExperimentSpec {
  std::string name;
  SystemConfig base_config;
  Trajectory trajectory;
  InitialState initial_state;
  std::optional<SweepSpec> sweep;
  std::string output;
  bool operator==(const ExperimentSpec&) const = default;
};

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
/// Top-level keys {name?, base_config, trajectory, initial_state, sweep?,
/// output}. Throws ValidationError on anything malformed.
void from_json(const nlohmann::json& j, ExperimentSpec& spec);

ExperimentSpec load_spec(const std::filesystem::path& path);

/// Checks the sweep path names a real scalar field, the grid is non-empty,
/// strictly monotone and free of NaN (infinities only for beta1/beta2).
void validate(const ExperimentSpec& spec);

/// Copy of spec with the sweep parameter set to value.
ExperimentSpec with_parameter(const ExperimentSpec& spec, const std::string& path, double value);

struct RunOptions {
  std::optional<std::size_t> steps;  // default: 20 T epsilon
  unsigned jobs = 1;
  std::size_t record_stride = 1;
  bool include_rho = false;
};

struct SweepRow {
  double value = 0.0;
  MetricSample final;
};

struct ExperimentSummary {
  std::string name;
  std::optional<MetricSample> final;  // single runs
  std::vector<SweepRow> sweep;        // sweep runs
  std::filesystem::path output;
  std::string line;                   // one-line human summary
};

/// Single propagation writing the time-series CSV, or a sweep when
/// spec.sweep is set.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opts);

/// One propagation per grid point on up to opts.jobs threads; rows follow the
/// grid order whatever the scheduling.
std::vector<SweepRow> sweep_rows(const ExperimentSpec& spec, const RunOptions& opts);

/// Writes sweep_value,fidelity_psi_plus,fidelity_psi_minus,concurrence,purity.
ExperimentSummary run_sweep(const ExperimentSpec& spec, const RunOptions& opts);

void write_sweep_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Figure parameter sets.
SystemConfig fig2_config(double q);
Trajectory fig2_trajectory(Orientation o);
Trajectory fig4_trajectory(Orientation o);
/// Rates gamma1-=0.02, gamma1+=0.01, gamma2-=0.01, gamma2+=0.005 (epsilon=1),
/// i.e. gamma=0.03, alpha=0.5, beta1=beta2=ln 2.
SystemConfig figS1_config(double q);

std::vector<double> q_grid();           // 21 points in [0, 1]
std::vector<double> beta1_grid();       // -inf, -1e3..-1e-1, 1e-1..1e3, +inf
std::vector<double> gamma_amp_grid();   // 25 points in [0.002, 0.03], then up to 0.3
std::vector<double> gamma0_grid();      // 11 points in [0, 0.02]
std::vector<double> figS1_g_grid();     // 151 points in [0, 0.03]

const std::vector<std::string>& figure_ids();

/// Built-in experiment specs for a figure (empty for figS1, which is a
/// spectrum sweep). Throws ValidationError for unknown ids.
std::vector<ExperimentSpec> builtin_specs(const std::string& figure_id);

/// Runs a figure's specs, writing CSVs into out_dir; returns the summaries.
std::vector<ExperimentSummary> reproduce(const std::string& figure_id,
                                         const std::filesystem::path& out_dir,
                                         const RunOptions& opts);

std::vector<EPResult> ep_report(const std::vector<double>& qs, const SystemConfig& tmpl,
                                const EPSearch& search = {});
void write_ep_csv(std::ostream& os, const std::vector<EPResult>& rows);

}  // namespace chiral
