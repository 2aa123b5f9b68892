#include "pulseforge/repro.hpp"

#include "pulseforge/problems.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pulseforge {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

UncertainParam default_range(ParamId id, int n) {
  if (id == ParamId::NuA1) {
    return {ParamId::NuA1, 4.50, 0.005, n};
  }
  return {ParamId::NuA2, 4.85, 0.05, n};
}

SystemParams nominal_params(const ScenarioConfig& cfg) { return resolve_drive(cfg.model, cfg.system); }

json trace_json(std::span<const IterationRecord> trace) {
  json arr = json::array();
  for (const IterationRecord& r : trace) {
    arr.push_back({{"iter", r.iter},
                   {"accepted", r.accepted},
                   {"worst_case_F", r.worst_case},
                   {"trust_radius_GHz", r.trust_radius}});
  }
  return arr;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y%m%dT%H%M%SZ");
  return out.str();
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write '" + path.string() + "'");
  }
  writer(out);
}

void record_result(const OptResult& res, const SampleGrid& grid, ResultRecord& rec) {
  rec.optimal_pulse = res.pulse;
  rec.worst_case = res.worst_case;
  rec.trace = res.trace;
  rec.termination = res.termination;
  rec.evaluations += res.evaluations;
  for (std::size_t i = 0; i < res.per_sample.size(); ++i) {
    rec.per_sample.push_back({grid.coordinates[i], res.per_sample[i]});
  }
}

void run_optimisation(const ScenarioConfig& cfg, const RunOptions& options, ResultRecord& rec) {
  const SystemParams base = nominal_params(cfg);
  const ProblemBuilder builder = problem_builder(cfg.model, cfg.amplitude_bound);
  const SampleGrid grid = sample_grid(cfg.uncertainty, base);

  // A time sweep that already covers this total time supplies the result.
  for (const TimeSweepRow& row : rec.time_sweep) {
    if (row.total_time == cfg.total_time && cfg.uncertainty.params.empty() && !cfg.filter) {
      rec.seed_worst_case = row.result.initial_worst_case;
      record_result(row.result, grid, rec);
      const ControlProblem nominal = builder(base);
      rec.evolution = evolve_trace(nominal, rec.optimal_pulse, plus_y_plus_y(nominal));
      return;
    }
  }

  Pulse start = rec.initial_pulse;
  if (cfg.two_stage_filter) {
    const RobustObjective plain(builder, grid);
    const OptResult first = scp_optimize(plain, start, cfg.optimizer, options.on_iteration);
    rec.seed_worst_case = first.initial_worst_case;
    rec.unfiltered_worst_case = first.worst_case;
    rec.unfiltered_trace = first.trace;
    rec.evaluations += first.evaluations;
    start = first.pulse;
  }

  const RobustObjective objective(builder, grid, cfg.filter);
  if (cfg.two_stage_filter) {
    rec.filtered_before_reopt = worst_case(objective, start).worst;
  }
  const OptResult res = scp_optimize(objective, start, cfg.optimizer, options.on_iteration);
  if (!cfg.two_stage_filter) {
    rec.seed_worst_case = res.initial_worst_case;
  }
  record_result(res, grid, rec);

  const ControlProblem nominal = builder(base);
  rec.evolution = evolve_trace(nominal, objective.physical(rec.optimal_pulse), plus_y_plus_y(nominal));
}

}  // namespace

std::string version() { return PULSEFORGE_VERSION; }

std::vector<SweepRow> fidelity_sweep(const ScenarioConfig& cfg, const Pulse& pulse,
                                     const std::vector<ParamId>& axes, const SweepOptions& options) {
  if (axes.empty() || axes.size() > 2 || (axes.size() == 2 && axes[0] == axes[1])) {
    throw ConfigError("fidelity_sweep: need one or two distinct axes");
  }
  if (options.points_per_axis < 1 || options.points_per_axis % 2 == 0) {
    throw ConfigError("fidelity_sweep: points per axis must be odd and positive");
  }
  UncertaintySpec spec;
  for (ParamId id : axes) {
    UncertainParam axis = default_range(id, options.points_per_axis);
    for (const UncertainParam& p : cfg.uncertainty.params) {
      if (p.id == id) {
        axis = p;
        axis.n_samples = options.points_per_axis;
      }
    }
    spec.params.push_back(axis);
  }
  const SampleGrid grid = sample_grid(spec, nominal_params(cfg));
  const ProblemBuilder builder = problem_builder(cfg.model, cfg.amplitude_bound);

  std::vector<double> fidelities;
  if (options.bypass_pulse) {
    for (const SystemParams& s : grid.samples) {
      const ControlProblem cp = builder(s);
      fidelities.push_back(fidelity(cp, cp.target));
    }
  } else {
    if (pulse.quadratures() != quadratures_for(cfg.model)) {
      throw ConfigError("fidelity_sweep: pulse quadratures do not match the model");
    }
    fidelities = worst_case(builder, grid, pulse, cfg.filter).per_sample;
  }

  std::vector<SweepRow> rows;
  rows.reserve(fidelities.size());
  for (std::size_t i = 0; i < fidelities.size(); ++i) {
    SweepRow row;
    row.param1 = grid.coordinates[i][0];
    if (axes.size() == 2) {
      row.param2 = grid.coordinates[i][1];
    }
    row.fidelity = fidelities[i];
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param1,param2,F\n" << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.param1 << ',';
    if (r.param2) {
      out << *r.param2;
    }
    out << ',' << r.fidelity << '\n';
  }
}

std::vector<TimeSweepRow> time_sweep(const ScenarioConfig& cfg, std::span<const double> times,
                                     const IterationCallback& on_iteration) {
  if (cfg.model != ModelKind::MultiLevel) {
    throw ConfigError("time_sweep: requires the multi-level model");
  }
  const SystemParams base = nominal_params(cfg);
  const ProblemBuilder builder = problem_builder(cfg.model, cfg.amplitude_bound);
  const SampleGrid nominal = sample_grid(UncertaintySpec{}, base);
  const RobustObjective objective(builder, nominal);

  std::vector<TimeSweepRow> rows;
  for (double t : times) {
    if (!(t > 0.0)) {
      throw ConfigError("time_sweep: times must be positive");
    }
    const int n = pixels_for(t, cfg.pixel_width);
    const int ramp = std::min(cfg.seed.ramp_pixels, n / 2);
    const Pulse seed =
        with_quadratures(flat_top_gaussian(n, t, cfg.seed.peak, ramp), quadratures_for(cfg.model));
    OptResult res = scp_optimize(objective, seed, cfg.optimizer, on_iteration);
    rows.push_back({t, n, std::move(res)});
  }
  return rows;
}

void write_time_sweep_csv(std::ostream& out, std::span<const TimeSweepRow> rows) {
  out << "T_ns,F\n" << std::setprecision(17);
  for (const TimeSweepRow& r : rows) {
    out << r.total_time << ',' << r.fidelity() << '\n';
  }
}

ResultRecord run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  ResultRecord rec;
  rec.scenario = cfg.scenario;
  rec.config_json = to_json(cfg);
  rec.toolkit_version = version();
  rec.initial_pulse = cfg.seed_pulse();
  rec.optimal_pulse = rec.initial_pulse;

  try {
    if (!cfg.sweep_times.empty()) {
      rec.time_sweep = time_sweep(cfg, cfg.sweep_times, options.on_iteration);
    }
    run_optimisation(cfg, options, rec);
    std::vector<ParamId> axes;
    for (const UncertainParam& p : cfg.uncertainty.params) {
      axes.push_back(p.id);
    }
    if (axes.empty()) {
      axes.push_back(ParamId::NuA2);
    }
    rec.sweep = fidelity_sweep(cfg, rec.optimal_pulse, axes,
                               SweepOptions{cfg.verification_samples, false});
  } catch (const NumericalError& e) {
    rec.failed = true;
    rec.failure = e.what();
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (options.write_artifacts) {
    rec.output_path = write_artifacts(rec, cfg.output_dir);
  }
  return rec;
}

std::string result_json(const ResultRecord& rec, int indent) {
  json j;
  j["scenario"] = rec.scenario;
  j["toolkit_version"] = rec.toolkit_version;
  j["status"] = rec.failed ? "failed" : "ok";
  if (rec.failed) {
    j["failure"] = rec.failure;
  }
  j["config"] = json::parse(rec.config_json);
  j["seed_worst_case_F"] = rec.seed_worst_case;
  j["worst_case_F"] = rec.worst_case;
  j["termination"] = to_string(rec.termination);
  j["iterations"] = rec.trace.empty() ? 0 : static_cast<int>(rec.trace.size()) - 1;
  j["evaluations"] = rec.evaluations;
  json samples = json::array();
  for (const SampleFidelity& s : rec.per_sample) {
    samples.push_back({{"coordinates_GHz", s.coordinates}, {"F", s.fidelity}});
  }
  j["per_sample"] = samples;
  if (rec.unfiltered_worst_case) {
    j["unfiltered_worst_case_F"] = *rec.unfiltered_worst_case;
  }
  if (rec.filtered_before_reopt) {
    j["filtered_before_reopt_F"] = *rec.filtered_before_reopt;
  }
  if (!rec.sweep.empty()) {
    double lo = 1.0;
    for (const SweepRow& r : rec.sweep) {
      lo = std::min(lo, r.fidelity);
    }
    j["sweep_min_F"] = lo;
  }
  if (!rec.time_sweep.empty()) {
    json ts = json::array();
    for (const TimeSweepRow& r : rec.time_sweep) {
      ts.push_back({{"T_ns", r.total_time},
                    {"n_pixels", r.n_pixels},
                    {"F", r.fidelity()},
                    {"termination", to_string(r.result.termination)}});
    }
    j["time_sweep"] = ts;
  }
  j["trace"] = trace_json(rec.trace);
  if (!rec.evolution.steps.empty()) {
    j["evolution_trace"] = "evolution.csv";
    j["final_bell_fidelity"] = rec.evolution.steps.back().bell_fidelity;
    j["final_entanglement"] = rec.evolution.steps.back().entanglement;
  }
  j["wall_clock_s"] = rec.wall_seconds;
  return j.dump(indent);
}

std::string write_artifacts(const ResultRecord& rec, const std::string& output_dir) {
  const fs::path parent = fs::path(output_dir) / rec.scenario;
  fs::path dir = parent / timestamp();
  for (int k = 1; fs::exists(dir); ++k) {
    dir = parent / (timestamp() + "-" + std::to_string(k));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());
  }

  write_file(dir / "result.json", [&](std::ostream& o) { o << result_json(rec) << '\n'; });
  write_file(dir / "pulse_initial.csv", [&](std::ostream& o) { write_pulse_csv(o, rec.initial_pulse); });
  write_file(dir / "pulse_optimal.csv", [&](std::ostream& o) { write_pulse_csv(o, rec.optimal_pulse); });
  write_file(dir / "trace.csv", [&](std::ostream& o) { write_iteration_csv(o, rec.trace); });
  write_file(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rec.sweep); });
  write_file(dir / "evolution.csv", [&](std::ostream& o) { write_trace_csv(o, rec.evolution); });
  if (!rec.unfiltered_trace.empty()) {
    write_file(dir / "trace_unfiltered.csv",
               [&](std::ostream& o) { write_iteration_csv(o, rec.unfiltered_trace); });
  }
  if (!rec.time_sweep.empty()) {
    write_file(dir / "time_sweep.csv",
               [&](std::ostream& o) { write_time_sweep_csv(o, rec.time_sweep); });
  }
  return dir.string();
}

}  // namespace pulseforge
