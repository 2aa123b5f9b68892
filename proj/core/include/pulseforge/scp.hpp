#pragma once

// Worst-case (max-min) robust pulse optimisation by sequential convex
// programming: linearise every sampled fidelity, solve a small LP for the
// increment inside an infinity-norm trust region, accept/expand or
// reject/shrink.

#include "pulseforge/dynamics.hpp"
#include "pulseforge/model.hpp"
#include "pulseforge/pulse.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pulseforge {

enum class ParamId { NuA1, NuA2 };

std::string to_string(ParamId id);
ParamId param_id_from_string(const std::string& name);
double& param_ref(SystemParams& p, ParamId id);
double param_value(const SystemParams& p, ParamId id);

struct UncertainParam {
  ParamId id = ParamId::NuA2;
  double center = 0.0;      ///< GHz
  double half_width = 0.0;  ///< GHz
  int n_samples = 1;        ///< odd, so the centre is sampled
};

struct UncertaintySpec {
  std::vector<UncertainParam> params;
};

struct SampleGrid {
  std::vector<SystemParams> samples;
  std::vector<std::vector<double>> coordinates;  ///< per sample, one value per parameter
  std::vector<ParamId> axes;
  int nominal_index = 0;
};

/// Uniform inclusive grid per parameter, Cartesian product in lexicographic
/// order (first parameter slowest).
SampleGrid sample_grid(const UncertaintySpec& spec, const SystemParams& base);

using ProblemBuilder = std::function<ControlProblem(const SystemParams&)>;

/// Control problems for every sample plus an optional hardware filter that
/// maps the optimised (coarse) pulse onto the pulse the system sees.
class RobustObjective {
 public:
  RobustObjective(const ProblemBuilder& builder, const SampleGrid& grid,
                  std::optional<FilterSpec> filter = std::nullopt);
  RobustObjective(std::vector<ControlProblem> problems, std::optional<FilterSpec> filter);

  std::size_t size() const { return problems_.size(); }
  const ControlProblem& problem(std::size_t i) const { return problems_[i]; }
  const std::optional<FilterSpec>& filter() const { return filter_; }
  double amplitude_bound() const;

  /// Physical pulse actually applied to the system.
  Pulse physical(const Pulse& control) const;

  /// Per-sample fidelities (and gradients w.r.t. the control pulse when
  /// requested), ordered by sample index.
  std::vector<FidelityGradient> evaluate(const Pulse& control, bool with_gradient) const;

 private:
  std::vector<ControlProblem> problems_;
  std::optional<FilterSpec> filter_;
};

struct WorstCase {
  double worst = 0.0;
  std::vector<double> per_sample;
};

WorstCase worst_case(const ProblemBuilder& builder, const SampleGrid& grid, const Pulse& p,
                     const std::optional<FilterSpec>& filter = std::nullopt);
WorstCase worst_case(const RobustObjective& objective, const Pulse& p);

struct MaximinStep {
  RealVector increment;
  double model_value = 0.0;  ///< min_i [F_i + g_i^T increment]
  int lp_iterations = 0;
};

/// Solves: maximize t s.t. t <= F_i + g_i^T x for all i, |x|_inf <= rho,
/// -bound <= current + x <= bound.
MaximinStep maximin_step(std::span<const double> fidelities, std::span<const RealVector> gradients,
                         const RealVector& current, double bound, double trust_radius);

struct OptConfig {
  std::optional<double> trust_radius_init;  ///< GHz; defaults to 0.1 * bound
  double expand_factor = 1.5;
  double shrink_factor = 0.5;
  double trust_radius_min = 1e-5;
  int max_iterations = 300;
  double stall_tolerance = 1e-7;
  int stall_window = 10;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  bool accepted = false;
  double worst_case = 0.0;    ///< worst case of the evaluated (trial) pulse
  double trust_radius = 0.0;  ///< radius used for this iteration's step
};

enum class Termination { RadiusFloor, MaxIterations, Stall };

std::string to_string(Termination t);

struct OptResult {
  Pulse pulse;
  std::vector<double> per_sample;
  double worst_case = 0.0;
  double initial_worst_case = 0.0;
  std::vector<IterationRecord> trace;  ///< trace[0] is the seed
  Termination termination = Termination::MaxIterations;
  int evaluations = 0;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

OptResult scp_optimize(const RobustObjective& objective, const Pulse& seed, const OptConfig& cfg,
                       const IterationCallback& on_iteration = {});
OptResult scp_optimize(const ProblemBuilder& builder, const SampleGrid& grid, const Pulse& seed,
                       const OptConfig& cfg, const std::optional<FilterSpec>& filter = std::nullopt);

/// Header: iter,accepted,worst_case_F,trust_radius
void write_iteration_csv(std::ostream& out, std::span<const IterationRecord> trace);

}  // namespace pulseforge
