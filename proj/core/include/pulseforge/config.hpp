#pragma once

// Scenario configuration: JSON ingestion with unit-suffixed keys and the
// registry of named scenarios.

#include "pulseforge/model.hpp"
#include "pulseforge/problems.hpp"
#include "pulseforge/pulse.hpp"
#include "pulseforge/scp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pulseforge {

struct SeedSpec {
  double peak = 0.25;   ///< GHz, flat-top level of the x quadrature
  int ramp_pixels = 4;  ///< pixels per Gaussian edge
};

struct ScenarioConfig {
  std::string scenario;
  ModelKind model = ModelKind::TwoLevel;
  SystemParams system;
  double total_time = 200.0;  ///< ns
  double pixel_width = 12.5;  ///< ns, nominal; n_pixels = round(T / dt)
  SeedSpec seed;
  double amplitude_bound = 0.3;  ///< GHz
  std::optional<FilterSpec> filter;
  UncertaintySpec uncertainty;
  int verification_samples = 11;  ///< per uncertain axis, for the sweep artifact
  OptConfig optimizer;
  /// Filtered scenarios first optimise without the filter and re-optimise
  /// from that pulse with the filter switched on.
  bool two_stage_filter = false;
  std::vector<double> sweep_times;  ///< ns, time-sweep scenario only
  std::string output_dir = "runs";

  int n_pixels() const { return pixels_for(total_time, pixel_width); }
  Pulse seed_pulse() const;
  /// Grid used for the post-run verification sweep.
  UncertaintySpec verification_spec() const;
};

const std::vector<std::string>& registered_scenarios();

/// Built-in defaults for a registered scenario; throws ConfigError listing
/// the registered ids otherwise.
ScenarioConfig default_scenario(const std::string& id);

/// Parses a JSON document. Only "scenario" is required; every other key
/// overrides that scenario's defaults. Throws ConfigError on bad input.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

/// Complete JSON echo; parse_config(to_json(c)) reproduces c exactly.
std::string to_json(const ScenarioConfig& cfg, int indent = 2);

/// Throws ConfigError when the configuration cannot be run.
void validate(const ScenarioConfig& cfg);

}  // namespace pulseforge
