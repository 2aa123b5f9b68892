#pragma once

// Scenario runner: seed -> (filter) -> sample grid -> optimise -> verify,
// plus the sweep utilities and on-disk artifacts.

#include "pulseforge/config.hpp"
#include "pulseforge/dynamics.hpp"
#include "pulseforge/scp.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pulseforge {

std::string version();

struct SweepRow {
  double param1 = 0.0;
  std::optional<double> param2;
  double fidelity = 0.0;
};

struct SweepOptions {
  int points_per_axis = 11;
  /// Replace the propagator by the target itself; every point must give 1.
  bool bypass_pulse = false;
};

/// Fidelity of `pulse` over a dense grid of one or two uncertain parameters.
/// Ranges come from cfg.uncertainty when the axis is listed there and
/// default to nu_a2 +- 0.05 GHz / nu_a1 +- 0.005 GHz otherwise. The first
/// axis is param1 and varies slowest.
std::vector<SweepRow> fidelity_sweep(const ScenarioConfig& cfg, const Pulse& pulse,
                                     const std::vector<ParamId>& axes,
                                     const SweepOptions& options = {});

/// Header: param1,param2,F (param2 empty for one axis).
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct TimeSweepRow {
  double total_time = 0.0;  ///< ns
  int n_pixels = 0;
  OptResult result;

  double fidelity() const { return result.worst_case; }
};

/// One independent nominal optimisation per total time with a flat-top seed
/// and cfg.pixel_width pixels. Multi-level model only.
std::vector<TimeSweepRow> time_sweep(const ScenarioConfig& cfg, std::span<const double> times,
                                     const IterationCallback& on_iteration = {});

/// Header: T_ns,F
void write_time_sweep_csv(std::ostream& out, std::span<const TimeSweepRow> rows);

struct SampleFidelity {
  std::vector<double> coordinates;  ///< one value per uncertain parameter
  double fidelity = 0.0;
};

struct ResultRecord {
  std::string scenario;
  std::string config_json;
  std::string toolkit_version;
  bool failed = false;
  std::string failure;

  Pulse initial_pulse;
  Pulse optimal_pulse;
  double seed_worst_case = 0.0;
  double worst_case = 0.0;
  std::vector<SampleFidelity> per_sample;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::MaxIterations;
  int evaluations = 0;

  // Two-stage filtered runs: unfiltered optimum and its filtered fidelity.
  std::optional<double> unfiltered_worst_case;
  std::optional<double> filtered_before_reopt;
  std::vector<IterationRecord> unfiltered_trace;

  std::vector<SweepRow> sweep;
  std::vector<TimeSweepRow> time_sweep;
  EvolutionTrace evolution;

  double wall_seconds = 0.0;
  std::string output_path;  ///< directory holding the artifacts, if written
};

struct RunOptions {
  bool write_artifacts = true;
  IterationCallback on_iteration;
};

/// Runs a scenario end to end. Numerical failures are caught and returned as
/// a record flagged `failed`; the artifacts computed so far are still
/// written.
ResultRecord run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Writes result.json, pulse_initial.csv, pulse_optimal.csv, trace.csv,
/// sweep.csv and evolution.csv (plus time_sweep.csv / trace_unfiltered.csv
/// when present) under <output_dir>/<scenario>/<timestamp>/ and returns
/// that directory.
std::string write_artifacts(const ResultRecord& record, const std::string& output_dir);

std::string result_json(const ResultRecord& record, int indent = 2);

}  // namespace pulseforge
