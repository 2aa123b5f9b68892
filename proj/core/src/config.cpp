#include "pulseforge/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pulseforge {
namespace {

using nlohmann::json;

constexpr double kNominalNuA1 = 4.50;
constexpr double kNominalNuA2 = 4.85;

UncertainParam qubit2_range(int n) { return {ParamId::NuA2, kNominalNuA2, 0.05, n}; }
UncertainParam qubit1_range(int n) { return {ParamId::NuA1, kNominalNuA1, 0.005, n}; }

ScenarioConfig two_level_base(const std::string& id) {
  ScenarioConfig c;
  c.scenario = id;
  c.model = ModelKind::TwoLevel;
  c.total_time = 200.0;
  c.pixel_width = 12.5;
  c.seed = {0.25, 4};
  c.amplitude_bound = 0.3;
  c.optimizer.max_iterations = 500;
  return c;
}

ScenarioConfig multilevel_base(const std::string& id) {
  ScenarioConfig c;
  c.scenario = id;
  c.model = ModelKind::MultiLevel;
  c.total_time = 199.0;
  c.pixel_width = 2.0;
  c.seed = {0.25, 4};
  c.amplitude_bound = 0.3;
  c.optimizer.max_iterations = 800;
  return c;
}

[[noreturn]] void config_error(const std::string& what) { throw ConfigError("config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.contains(it.key())) {
      config_error("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) {
    return;
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

json system_to_json(const SystemParams& p) {
  json j = {{"nu_r_GHz", p.nu_r},           {"nu_a1_GHz", p.nu_a1},
            {"nu_a2_GHz", p.nu_a2},         {"g1_GHz", p.g1},
            {"g2_GHz", p.g2},               {"anharmonicity1_GHz", p.delta1},
            {"anharmonicity2_GHz", p.delta2}, {"n_transmon", p.n_transmon},
            {"n_cavity", p.n_cavity}};
  j["nu_d_GHz"] = p.nu_d ? json(*p.nu_d) : json(nullptr);
  return j;
}

void system_from_json(const json& j, SystemParams& p) {
  reject_unknown(j,
                 {"nu_r_GHz", "nu_a1_GHz", "nu_a2_GHz", "g1_GHz", "g2_GHz", "anharmonicity1_GHz",
                  "anharmonicity2_GHz", "nu_d_GHz", "n_transmon", "n_cavity"},
                 "system");
  read(j, "nu_r_GHz", p.nu_r);
  read(j, "nu_a1_GHz", p.nu_a1);
  read(j, "nu_a2_GHz", p.nu_a2);
  read(j, "g1_GHz", p.g1);
  read(j, "g2_GHz", p.g2);
  read(j, "anharmonicity1_GHz", p.delta1);
  read(j, "anharmonicity2_GHz", p.delta2);
  read(j, "n_transmon", p.n_transmon);
  read(j, "n_cavity", p.n_cavity);
  if (j.contains("nu_d_GHz")) {
    if (j.at("nu_d_GHz").is_null()) {
      p.nu_d.reset();
    } else {
      double v = 0.0;
      read(j, "nu_d_GHz", v);
      p.nu_d = v;
    }
  }
}

json optimizer_to_json(const OptConfig& o) {
  json j = {{"expand_factor", o.expand_factor},
            {"shrink_factor", o.shrink_factor},
            {"trust_radius_min_GHz", o.trust_radius_min},
            {"max_iterations", o.max_iterations},
            {"stall_tolerance", o.stall_tolerance},
            {"stall_window", o.stall_window}};
  j["trust_radius_init_GHz"] = o.trust_radius_init ? json(*o.trust_radius_init) : json(nullptr);
  return j;
}

void optimizer_from_json(const json& j, OptConfig& o) {
  reject_unknown(j,
                 {"trust_radius_init_GHz", "expand_factor", "shrink_factor", "trust_radius_min_GHz",
                  "max_iterations", "stall_tolerance", "stall_window"},
                 "optimizer");
  if (j.contains("trust_radius_init_GHz")) {
    if (j.at("trust_radius_init_GHz").is_null()) {
      o.trust_radius_init.reset();
    } else {
      double v = 0.0;
      read(j, "trust_radius_init_GHz", v);
      o.trust_radius_init = v;
    }
  }
  read(j, "expand_factor", o.expand_factor);
  read(j, "shrink_factor", o.shrink_factor);
  read(j, "trust_radius_min_GHz", o.trust_radius_min);
  read(j, "max_iterations", o.max_iterations);
  read(j, "stall_tolerance", o.stall_tolerance);
  read(j, "stall_window", o.stall_window);
}

json uncertainty_to_json(const UncertaintySpec& u) {
  json arr = json::array();
  for (const UncertainParam& p : u.params) {
    arr.push_back({{"param", to_string(p.id)},
                   {"center_GHz", p.center},
                   {"half_width_GHz", p.half_width},
                   {"n_samples", p.n_samples}});
  }
  return arr;
}

UncertaintySpec uncertainty_from_json(const json& j) {
  if (!j.is_array()) {
    config_error("'uncertainty' must be an array");
  }
  UncertaintySpec u;
  for (const json& item : j) {
    if (!item.is_object()) {
      config_error("'uncertainty' entries must be objects");
    }
    reject_unknown(item, {"param", "center_GHz", "half_width_GHz", "n_samples"}, "uncertainty");
    if (!item.contains("param")) {
      config_error("uncertainty entry lacks 'param'");
    }
    UncertainParam p;
    std::string name;
    read(item, "param", name);
    p.id = param_id_from_string(name);
    p.center = p.id == ParamId::NuA1 ? kNominalNuA1 : kNominalNuA2;
    read(item, "center_GHz", p.center);
    read(item, "half_width_GHz", p.half_width);
    read(item, "n_samples", p.n_samples);
    u.params.push_back(p);
  }
  return u;
}

}  // namespace

Pulse ScenarioConfig::seed_pulse() const {
  return with_quadratures(flat_top_gaussian(n_pixels(), total_time, seed.peak, seed.ramp_pixels),
                          quadratures_for(model));
}

UncertaintySpec ScenarioConfig::verification_spec() const {
  UncertaintySpec out = uncertainty;
  for (UncertainParam& p : out.params) {
    p.n_samples = verification_samples;
  }
  return out;
}

const std::vector<std::string>& registered_scenarios() {
  static const std::vector<std::string> ids = {
      "two_level_nominal",   "two_level_100px",       "two_level_filtered_reopt",
      "two_level_robust_1d", "two_level_robust_2d",   "multilevel_time_sweep",
      "multilevel_nominal",  "multilevel_robust_1d",  "multilevel_robust_2d"};
  return ids;
}

ScenarioConfig default_scenario(const std::string& id) {
  if (id == "two_level_nominal") {
    return two_level_base(id);
  }
  if (id == "two_level_100px") {
    ScenarioConfig c = two_level_base(id);
    c.pixel_width = 2.0;
    c.seed.ramp_pixels = 25;
    c.optimizer.max_iterations = 3000;
    return c;
  }
  if (id == "two_level_filtered_reopt") {
    ScenarioConfig c = two_level_base(id);
    c.filter = FilterSpec{};
    c.two_stage_filter = true;
    c.optimizer.max_iterations = 1000;
    return c;
  }
  if (id == "two_level_robust_1d") {
    ScenarioConfig c = two_level_base(id);
    c.uncertainty.params = {qubit2_range(11)};
    return c;
  }
  if (id == "two_level_robust_2d") {
    ScenarioConfig c = two_level_base(id);
    c.uncertainty.params = {qubit2_range(5), qubit1_range(5)};
    c.filter = FilterSpec{};
    return c;
  }
  if (id == "multilevel_time_sweep") {
    ScenarioConfig c = multilevel_base(id);
    c.total_time = 200.0;
    c.sweep_times = {50.0, 100.0, 150.0, 200.0};
    return c;
  }
  if (id == "multilevel_nominal") {
    return multilevel_base(id);
  }
  if (id == "multilevel_robust_1d") {
    ScenarioConfig c = multilevel_base(id);
    c.uncertainty.params = {qubit2_range(11)};
    c.optimizer.max_iterations = 500;
    return c;
  }
  if (id == "multilevel_robust_2d") {
    ScenarioConfig c = multilevel_base(id);
    c.uncertainty.params = {qubit2_range(5), qubit1_range(5)};
    c.optimizer.max_iterations = 500;
    return c;
  }
  std::ostringstream msg;
  msg << "unknown scenario '" << id << "'; registered:";
  for (const std::string& s : registered_scenarios()) {
    msg << ' ' << s;
  }
  throw ConfigError(msg.str());
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    config_error("top level must be an object");
  }
  reject_unknown(j,
                 {"scenario", "model", "system", "pulse", "filter", "uncertainty",
                  "verification_samples", "optimizer", "two_stage_filter", "sweep_times_ns",
                  "output_dir"},
                 "config");
  if (!j.contains("scenario")) {
    config_error("missing 'scenario'");
  }
  std::string id;
  read(j, "scenario", id);
  ScenarioConfig c = default_scenario(id);

  if (j.contains("model")) {
    std::string kind;
    read(j, "model", kind);
    c.model = model_kind_from_string(kind);
  }
  if (j.contains("system")) {
    system_from_json(j.at("system"), c.system);
  }
  if (j.contains("pulse")) {
    const json& p = j.at("pulse");
    reject_unknown(p,
                   {"total_time_ns", "pixel_width_ns", "seed_peak_GHz", "seed_ramp_pixels",
                    "amplitude_bound_GHz"},
                   "pulse");
    read(p, "total_time_ns", c.total_time);
    read(p, "pixel_width_ns", c.pixel_width);
    read(p, "seed_peak_GHz", c.seed.peak);
    read(p, "seed_ramp_pixels", c.seed.ramp_pixels);
    read(p, "amplitude_bound_GHz", c.amplitude_bound);
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    if (f.is_null()) {
      c.filter.reset();
    } else {
      reject_unknown(f, {"sigma_ns", "oversample"}, "filter");
      FilterSpec spec = c.filter.value_or(FilterSpec{});
      read(f, "sigma_ns", spec.sigma);
      read(f, "oversample", spec.oversample);
      c.filter = spec;
    }
  }
  if (j.contains("uncertainty")) {
    c.uncertainty = uncertainty_from_json(j.at("uncertainty"));
  }
  read(j, "verification_samples", c.verification_samples);
  if (j.contains("optimizer")) {
    optimizer_from_json(j.at("optimizer"), c.optimizer);
  }
  read(j, "two_stage_filter", c.two_stage_filter);
  read(j, "sweep_times_ns", c.sweep_times);
  read(j, "output_dir", c.output_dir);
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    config_error("cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_json(const ScenarioConfig& cfg, int indent) {
  json j;
  j["scenario"] = cfg.scenario;
  j["model"] = to_string(cfg.model);
  j["system"] = system_to_json(cfg.system);
  j["pulse"] = {{"total_time_ns", cfg.total_time},
                {"pixel_width_ns", cfg.pixel_width},
                {"seed_peak_GHz", cfg.seed.peak},
                {"seed_ramp_pixels", cfg.seed.ramp_pixels},
                {"amplitude_bound_GHz", cfg.amplitude_bound}};
  j["filter"] = cfg.filter ? json{{"sigma_ns", cfg.filter->sigma},
                                  {"oversample", cfg.filter->oversample}}
                           : json(nullptr);
  j["uncertainty"] = uncertainty_to_json(cfg.uncertainty);
  j["verification_samples"] = cfg.verification_samples;
  j["optimizer"] = optimizer_to_json(cfg.optimizer);
  j["two_stage_filter"] = cfg.two_stage_filter;
  j["sweep_times_ns"] = cfg.sweep_times;
  j["output_dir"] = cfg.output_dir;
  return j.dump(indent);
}

void validate(const ScenarioConfig& cfg) {
  const auto& ids = registered_scenarios();
  if (std::find(ids.begin(), ids.end(), cfg.scenario) == ids.end()) {
    default_scenario(cfg.scenario);  // throws with the list of registered ids
  }
  (void)validate(cfg.system);
  if (!(cfg.total_time > 0.0) || !(cfg.pixel_width > 0.0)) {
    config_error("total_time_ns and pixel_width_ns must be positive");
  }
  if (!(cfg.amplitude_bound > 0.0)) {
    config_error("amplitude_bound_GHz must be positive");
  }
  if (std::abs(cfg.seed.peak) > cfg.amplitude_bound) {
    config_error("seed_peak_GHz exceeds amplitude_bound_GHz");
  }
  if (cfg.seed.ramp_pixels < 0 || 2 * cfg.seed.ramp_pixels > cfg.n_pixels()) {
    config_error("seed_ramp_pixels must lie in [0, n_pixels / 2]");
  }
  if (cfg.filter && (!(cfg.filter->sigma >= 0.0) || cfg.filter->oversample < 1)) {
    config_error("filter needs sigma_ns >= 0 and oversample >= 1");
  }
  if (cfg.two_stage_filter && !cfg.filter) {
    config_error("two_stage_filter requires a filter");
  }
  std::set<ParamId> seen;
  for (const UncertainParam& p : cfg.uncertainty.params) {
    if (!seen.insert(p.id).second) {
      config_error("parameter '" + to_string(p.id) + "' listed twice in uncertainty");
    }
    if (p.n_samples < 1 || p.n_samples % 2 == 0 || !(p.half_width >= 0.0)) {
      config_error("uncertainty needs an odd n_samples >= 1 and half_width_GHz >= 0");
    }
  }
  if (cfg.verification_samples < 1 || cfg.verification_samples % 2 == 0) {
    config_error("verification_samples must be odd and positive");
  }
  for (double t : cfg.sweep_times) {
    if (!(t > 0.0)) {
      config_error("sweep_times_ns must be positive");
    }
  }
  cfg.optimizer.validate();
}

}  // namespace pulseforge
