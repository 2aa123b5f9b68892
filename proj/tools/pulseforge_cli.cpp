// pulseforge command line: optimise scenarios, sweep and simulate pulses.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "pulseforge/config.hpp"
#include "pulseforge/dynamics.hpp"
#include "pulseforge/problems.hpp"
#include "pulseforge/repro.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace pulseforge;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// "start:stop:step" (inclusive) or a comma-separated list; empty gives none.
std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) {
    return out;
  }
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) {
        throw std::invalid_argument(s);
      }
      return v;
    } catch (const std::exception&) {
      throw ConfigError("--times: cannot parse '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) {
      parts.push_back(item);
    }
    if (parts.size() != 3) {
      throw ConfigError("--times: expected start:stop:step");
    }
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw ConfigError("--times: need step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) {
      out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    out.push_back(number(item));
  }
  return out;
}

// Writes to the named file, or stdout for "" / "-".
template <typename Writer>
void emit(const std::string& path, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write '" + path + "'");
  }
  writer(out);
}

void print_progress(const IterationRecord& r) {
  if (r.iter % 25 == 0) {
    std::cerr << "iter " << std::setw(4) << r.iter << "  worst F " << std::setprecision(6)
              << std::fixed << r.worst_case << "  radius " << std::scientific << r.trust_radius
              << std::defaultfloat << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust cross-resonance pulse optimisation"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::string pulse_path;
  std::string out_path;
  std::string output_dir;
  std::vector<std::string> axes;
  std::string times_text;
  std::string scenario_id;
  int points = 11;
  bool quiet = false;
  bool bypass = false;

  auto* optimize = app.add_subcommand("optimize", "Run a scenario and write its artifacts");
  optimize->add_option("--config", config_path, "Scenario JSON")->required();
  optimize->add_option("--outdir", output_dir, "Override the configured output directory");
  optimize->add_flag("--quiet", quiet, "Suppress progress output");

  auto* sweep = app.add_subcommand("sweep", "Fidelity of a pulse over parameter offsets");
  sweep->add_option("--config", config_path, "Scenario JSON")->required();
  sweep->add_option("--pulse", pulse_path, "Pulse CSV")->required();
  sweep->add_option("--axis", axes, "nu_a1 or nu_a2 (up to two)")->required()->expected(1, 2);
  sweep->add_option("--points", points, "Grid points per axis (odd)");
  sweep->add_flag("--bypass", bypass, "Use the target unitary in place of the pulse");
  sweep->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Evolve |+y>|+y> under a pulse");
  simulate->add_option("--config", config_path, "Scenario JSON")->required();
  simulate->add_option("--pulse", pulse_path, "Pulse CSV")->required();
  simulate->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* timesweep = app.add_subcommand("timesweep", "Best nominal fidelity against gate time");
  timesweep->add_option("--config", config_path, "Scenario JSON")->required();
  timesweep->add_option("--times", times_text, "start:stop:step or a comma list, in ns")->required();
  timesweep->add_option("--out", out_path, "Output CSV (default stdout)");
  timesweep->add_flag("--quiet", quiet, "Suppress progress output");

  auto* scenarios = app.add_subcommand("scenarios", "List registered scenarios");
  auto* show = app.add_subcommand("show-config", "Print a scenario's default configuration");
  show->add_option("scenario", scenario_id, "Scenario id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*scenarios) {
      for (const std::string& id : registered_scenarios()) {
        std::cout << id << '\n';
      }
      return 0;
    }
    if (*show) {
      std::cout << to_json(default_scenario(scenario_id)) << '\n';
      return 0;
    }

    ScenarioConfig cfg = load_config(config_path);

    if (*optimize) {
      if (!output_dir.empty()) {
        cfg.output_dir = output_dir;
      }
      RunOptions options;
      if (!quiet) {
        options.on_iteration = print_progress;
      }
      const ResultRecord rec = run_scenario(cfg, options);
      std::cout << "scenario     " << rec.scenario << '\n'
                << "worst-case F " << std::setprecision(10) << rec.worst_case << '\n'
                << "termination  " << to_string(rec.termination) << '\n'
                << "artifacts    " << rec.output_path << '\n';
      if (rec.failed) {
        std::cerr << "error: " << rec.failure << '\n';
        return kExitNumerical;
      }
      return 0;
    }

    if (*sweep) {
      std::vector<ParamId> ids;
      for (const std::string& a : axes) {
        ids.push_back(param_id_from_string(a));
      }
      const Pulse pulse = read_pulse_csv(pulse_path, quadratures_for(cfg.model));
      const auto rows = fidelity_sweep(cfg, pulse, ids, SweepOptions{points, bypass});
      emit(out_path, [&](std::ostream& o) { write_sweep_csv(o, rows); });
      return 0;
    }

    if (*simulate) {
      const Pulse pulse = read_pulse_csv(pulse_path, quadratures_for(cfg.model));
      const SystemParams p = resolve_drive(cfg.model, cfg.system);
      const ControlProblem cp = problem_builder(cfg.model, cfg.amplitude_bound)(p);
      const Pulse applied = cfg.filter ? apply_filter(pulse, *cfg.filter) : pulse;
      const EvolutionTrace trace = evolve_trace(cp, applied, plus_y_plus_y(cp));
      emit(out_path, [&](std::ostream& o) { write_trace_csv(o, trace); });
      std::cerr << "gate fidelity " << std::setprecision(10) << pulse_fidelity(cp, applied) << '\n';
      return 0;
    }

    if (*timesweep) {
      const std::vector<double> times = parse_times(times_text);
      const auto rows = time_sweep(cfg, times, quiet ? IterationCallback{} : print_progress);
      emit(out_path, [&](std::ostream& o) { write_time_sweep_csv(o, rows); });
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
