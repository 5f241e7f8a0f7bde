// Command-line front end: simulate, sweep, spectrum, ep, ptcheck, reproduce.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chiral/csv.hpp"
#include "chiral/errors.hpp"
#include "chiral/experiments.hpp"
#include "json.hpp"

using namespace chiral;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config '" + path + "'");
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

// Accepts either a bare SystemConfig object or an experiment spec.
SystemConfig read_system_config(const std::string& path) {
  const nlohmann::json j = read_json(path);
  if (j.is_object() && j.contains("base_config")) return j.at("base_config").get<SystemConfig>();
  return j.get<SystemConfig>();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write output file '" + path + "'");
  return os;
}

void warn_markovian(const SystemConfig& cfg) {
  if (auto w = markovian_warning(cfg)) std::cerr << "warning: " << *w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two dissipatively coupled qubits under the hybrid Liouvillian"};
  app.require_subcommand(1);

  std::string config, out, out_dir = "out", variable = "g", figure;
  std::size_t steps = 0, stride = 1;
  unsigned jobs = 1;
  bool include_rho = false;
  double from = 0.0, to = 0.03, gamma_max = 1.0;
  std::size_t points = 151;
  std::vector<double> qs{0.0, 0.5, 1.0};

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment spec (JSON)")->required();
    sub->add_option("--out", out, "output CSV (default: spec output)");
    sub->add_option("--steps", steps, "time steps per period (default 20 T epsilon)");
    sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "single propagation, time-series CSV");
  add_run_flags(simulate);
  simulate->add_option("--stride", stride, "record every n-th step")->check(CLI::PositiveNumber);
  simulate->add_flag("--include-rho", include_rho, "add density-matrix columns");

  auto* sweep = app.add_subcommand("sweep", "1-D parameter sweep of final metrics");
  add_run_flags(sweep);

  auto* spectrum = app.add_subcommand("spectrum", "16x16 Liouvillian spectrum along g or gamma");
  spectrum->add_option("--config", config, "SystemConfig or experiment spec (JSON)")->required();
  spectrum->add_option("--out", out, "output CSV")->required();
  spectrum->add_option("--variable", variable, "g or gamma");
  spectrum->add_option("--from", from);
  spectrum->add_option("--to", to);
  spectrum->add_option("--points", points)->check(CLI::PositiveNumber);
  spectrum->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* ep = app.add_subcommand("ep", "exceptional-point positions per q");
  ep->add_option("--config", config, "template SystemConfig or experiment spec (JSON)")->required();
  ep->add_option("--q", qs, "q values")->delimiter(',');
  ep->add_option("--gamma-max", gamma_max, "upper end of the search bracket");
  ep->add_option("--out", out, "output CSV (default: stdout)");

  auto* ptcheck = app.add_subcommand("ptcheck", "static PT-symmetry classifier");
  ptcheck->add_option("--config", config, "SystemConfig or experiment spec (JSON)")->required();

  auto* reproduce_cmd = app.add_subcommand("reproduce", "run a built-in figure");
  reproduce_cmd->add_option("figure", figure, "fig2a fig2b fig3a fig3b fig4a fig4b figS1")
      ->required();
  reproduce_cmd->add_option("--out", out_dir, "output directory");
  reproduce_cmd->add_option("--steps", steps, "time steps per period");
  reproduce_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  RunOptions opts;
  if (steps > 0) opts.steps = steps;
  opts.jobs = jobs;
  opts.record_stride = stride;
  opts.include_rho = include_rho;

  try {
    if (*simulate || *sweep) {
      ExperimentSpec spec = load_spec(config);
      if (!out.empty()) spec.output = out;
      warn_markovian(spec.base_config);
      if (*simulate) {
        spec.sweep.reset();
      } else if (!spec.sweep) {
        throw ValidationError("spec '" + spec.name + "' has no sweep");
      }
      std::cout << run_experiment(spec, opts).line << '\n';
    } else if (*spectrum) {
      const SystemConfig cfg = read_system_config(config);
      warn_markovian(cfg);
      if (points < 2 && from != to) throw ValidationError("--points must be at least 2");
      std::vector<double> grid(points);
      for (std::size_t i = 0; i < points; ++i) {
        grid[i] = points == 1 ? from : from + (to - from) * double(i) / double(points - 1);
      }
      const auto result = spectrum_sweep(cfg, sweep_variable_from_string(variable), grid, jobs);
      std::ofstream os = open_out(out);
      write_sweep_csv(os, result);
      std::size_t flagged = 0;
      for (const auto& p : result) flagged += p.near_defective;
      std::cout << "spectrum: " << result.size() << " points over " << variable << ", "
                << flagged << " near-defective -> " << out << '\n';
    } else if (*ep) {
      const SystemConfig cfg = read_system_config(config);
      EPSearch search;
      search.gamma_max = gamma_max;
      const auto rows = ep_report(qs, cfg, search);
      if (out.empty()) {
        write_ep_csv(std::cout, rows);
      } else {
        std::ofstream os = open_out(out);
        write_ep_csv(os, rows);
        std::cout << "ep: " << rows.size() << " rows -> " << out << '\n';
      }
    } else if (*ptcheck) {
      const PTReport r = pt_symmetry_check(read_system_config(config));
      std::cout << "pt_symmetric=" << (r.is_pt_symmetric ? "true" : "false")
                << " n1+n2=" << csv_number(r.occupation_sum);
      for (const auto& v : r.violated_conditions) std::cout << " violated: " << v << ';';
      std::cout << '\n';
    } else if (*reproduce_cmd) {
      for (const auto& s : reproduce(figure, out_dir, opts)) std::cout << s.line << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NoRootError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
