#include "pulseforge/scp.hpp"

#include "pulseforge/parallel.hpp"
#include "pulseforge/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pulseforge {

std::string to_string(ParamId id) {
  switch (id) {
    case ParamId::NuA1:
      return "nu_a1";
    case ParamId::NuA2:
      return "nu_a2";
  }
  return "?";
}

ParamId param_id_from_string(const std::string& name) {
  if (name == "nu_a1") {
    return ParamId::NuA1;
  }
  if (name == "nu_a2") {
    return ParamId::NuA2;
  }
  throw ConfigError("unknown uncertain parameter '" + name + "' (expected nu_a1 or nu_a2)");
}

double& param_ref(SystemParams& p, ParamId id) {
  return id == ParamId::NuA1 ? p.nu_a1 : p.nu_a2;
}

double param_value(const SystemParams& p, ParamId id) {
  return id == ParamId::NuA1 ? p.nu_a1 : p.nu_a2;
}

SampleGrid sample_grid(const UncertaintySpec& spec, const SystemParams& base) {
  std::vector<std::vector<double>> axis_values;
  for (const UncertainParam& u : spec.params) {
    if (u.n_samples < 1 || u.n_samples % 2 == 0) {
      throw ConfigError("uncertainty for " + to_string(u.id) + ": n_samples must be a positive odd number");
    }
    if (!(u.half_width >= 0.0)) {
      throw ConfigError("uncertainty for " + to_string(u.id) + ": half_width must be >= 0");
    }
    std::vector<double> values(static_cast<std::size_t>(u.n_samples), u.center);
    if (u.n_samples > 1) {
      const double span = u.n_samples - 1;
      for (int i = 0; i < u.n_samples; ++i) {
        values[static_cast<std::size_t>(i)] = u.center + u.half_width * (2.0 * i - span) / span;
      }
    }
    axis_values.push_back(std::move(values));
  }

  SampleGrid grid;
  for (const UncertainParam& u : spec.params) {
    grid.axes.push_back(u.id);
  }
  std::size_t total = 1;
  for (const auto& v : axis_values) {
    total *= v.size();
  }
  grid.samples.reserve(total);
  grid.coordinates.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    SystemParams p = base;
    std::vector<double> coords(axis_values.size());
    std::size_t rem = flat;
    for (std::size_t a = axis_values.size(); a-- > 0;) {
      const std::size_t n = axis_values[a].size();
      coords[a] = axis_values[a][rem % n];
      rem /= n;
      param_ref(p, spec.params[a].id) = coords[a];
    }
    grid.samples.push_back(p);
    grid.coordinates.push_back(std::move(coords));
  }
  std::size_t nominal = 0;
  for (const auto& v : axis_values) {
    nominal = nominal * v.size() + v.size() / 2;
  }
  grid.nominal_index = static_cast<int>(nominal);
  return grid;
}

RobustObjective::RobustObjective(const ProblemBuilder& builder, const SampleGrid& grid,
                                 std::optional<FilterSpec> filter)
    : filter_(filter) {
  if (grid.samples.empty()) {
    throw ConfigError("RobustObjective: empty sample grid");
  }
  problems_.resize(grid.samples.size());
  parallel_for(grid.samples.size(), [&](std::size_t i) {
    try {
      problems_[i] = builder(grid.samples[i]);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sample " << i << ": " << e.what();
      throw NumericalError(msg.str());
    }
  });
}

RobustObjective::RobustObjective(std::vector<ControlProblem> problems,
                                 std::optional<FilterSpec> filter)
    : problems_(std::move(problems)), filter_(filter) {
  if (problems_.empty()) {
    throw ConfigError("RobustObjective: no control problems");
  }
}

double RobustObjective::amplitude_bound() const { return problems_.front().amplitude_bound; }

Pulse RobustObjective::physical(const Pulse& control) const {
  return filter_ ? apply_filter(control, *filter_) : control;
}

std::vector<FidelityGradient> RobustObjective::evaluate(const Pulse& control,
                                                        bool with_gradient) const {
  const Pulse applied = physical(control);
  RealMatrix transfer;
  if (filter_ && with_gradient) {
    transfer = transfer_matrix(control.n_pixels(), control.total_time, *filter_);
  }
  std::vector<FidelityGradient> out(problems_.size());
  parallel_for(problems_.size(), [&](std::size_t i) {
    try {
      if (with_gradient) {
        FidelityGradient fg = fidelity_and_gradient(problems_[i], applied);
        if (filter_) {
          fg.gradient = (fg.gradient * transfer).eval();
        }
        out[i] = std::move(fg);
      } else {
        out[i].fidelity = pulse_fidelity(problems_[i], applied);
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sample " << i << ": " << e.what();
      throw NumericalError(msg.str());
    }
  });
  return out;
}

WorstCase worst_case(const RobustObjective& objective, const Pulse& p) {
  WorstCase wc;
  for (const FidelityGradient& fg : objective.evaluate(p, false)) {
    wc.per_sample.push_back(fg.fidelity);
  }
  wc.worst = *std::min_element(wc.per_sample.begin(), wc.per_sample.end());
  return wc;
}

WorstCase worst_case(const ProblemBuilder& builder, const SampleGrid& grid, const Pulse& p,
                     const std::optional<FilterSpec>& filter) {
  return worst_case(RobustObjective(builder, grid, filter), p);
}

MaximinStep maximin_step(std::span<const double> fidelities, std::span<const RealVector> gradients,
                         const RealVector& current, double bound, double trust_radius) {
  if (fidelities.empty() || fidelities.size() != gradients.size()) {
    throw NumericalError("maximin_step: need one gradient per fidelity and at least one sample");
  }
  const Eigen::Index n = current.size();
  for (const RealVector& g : gradients) {
    if (g.size() != n) {
      throw NumericalError("maximin_step: gradient length does not match the pulse");
    }
  }
  if (trust_radius < 0.0 || bound < 0.0) {
    throw NumericalError("maximin_step: trust radius and bound must be non-negative");
  }
  const auto m = static_cast<Eigen::Index>(fidelities.size());
  const double f_min = *std::min_element(fidelities.begin(), fidelities.end());

  // Variables: [t, x_plus (n), x_minus (n)], increment = x_plus - x_minus.
  lp::LinearProgram prog;
  prog.a = RealMatrix::Zero(m, 1 + 2 * n);
  prog.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const RealVector& g = gradients[static_cast<std::size_t>(i)];
    prog.a(i, 0) = 1.0;
    prog.a.row(i).segment(1, n) = -g.transpose();
    prog.a.row(i).segment(1 + n, n) = g.transpose();
    prog.b(i) = fidelities[static_cast<std::size_t>(i)];
  }
  prog.c = RealVector::Zero(1 + 2 * n);
  prog.c(0) = 1.0;
  prog.lower = RealVector::Zero(1 + 2 * n);
  prog.upper.resize(1 + 2 * n);
  // t = min F is always attainable (zero increment), so this bound never binds.
  prog.lower(0) = f_min - 1.0;
  prog.upper(0) = std::numeric_limits<double>::infinity();
  for (Eigen::Index p = 0; p < n; ++p) {
    prog.upper(1 + p) = std::max(0.0, std::min(trust_radius, bound - current(p)));
    prog.upper(1 + n + p) = std::max(0.0, std::min(trust_radius, bound + current(p)));
  }

  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) {
    throw NumericalError("maximin_step: linear program did not reach an optimum");
  }
  MaximinStep step;
  step.increment = sol.x.segment(1, n) - sol.x.segment(1 + n, n);
  step.model_value = sol.x(0);
  step.lp_iterations = sol.iterations;
  return step;
}

void OptConfig::validate() const {
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0 && expand_factor > 1.0)) {
    throw ConfigError("OptConfig: need 0 < shrink_factor < 1 < expand_factor");
  }
  if (!(trust_radius_min > 0.0)) {
    throw ConfigError("OptConfig: trust_radius_min must be positive");
  }
  if (trust_radius_init && !(*trust_radius_init > 0.0)) {
    throw ConfigError("OptConfig: trust_radius_init must be positive");
  }
  if (max_iterations < 0 || stall_window < 1 || stall_tolerance < 0.0) {
    throw ConfigError("OptConfig: invalid iteration/stall settings");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::RadiusFloor:
      return "trust_radius_floor";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::Stall:
      return "stall";
  }
  return "?";
}

namespace {

struct Evaluation {
  std::vector<double> fidelities;
  std::vector<RealVector> gradients;
  double worst = 0.0;
};

Evaluation evaluate_at(const RobustObjective& objective, const Pulse& pulse) {
  Evaluation e;
  for (FidelityGradient& fg : objective.evaluate(pulse, true)) {
    e.fidelities.push_back(fg.fidelity);
    e.gradients.push_back(Pulse(pulse.total_time, std::move(fg.gradient)).flatten());
  }
  e.worst = *std::min_element(e.fidelities.begin(), e.fidelities.end());
  return e;
}

}  // namespace

OptResult scp_optimize(const RobustObjective& objective, const Pulse& seed, const OptConfig& cfg,
                       const IterationCallback& on_iteration) {
  cfg.validate();
  const double bound = objective.amplitude_bound();
  if (!clamp_check(seed, bound).ok) {
    throw ConfigError("scp_optimize: seed pulse violates the amplitude bound");
  }
  // Increments can never exceed the width of the amplitude box.
  const double radius_cap = 2.0 * bound;
  double radius = std::min(cfg.trust_radius_init.value_or(0.1 * bound), radius_cap);

  Pulse current = seed;
  RealVector theta = seed.flatten();
  Evaluation eval = evaluate_at(objective, current);

  OptResult result;
  result.initial_worst_case = eval.worst;
  result.evaluations = 1;
  result.trace.push_back({0, true, eval.worst, radius});
  if (on_iteration) {
    on_iteration(result.trace.back());
  }
  std::vector<double> accepted_history{eval.worst};

  result.termination = Termination::MaxIterations;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    if (radius < cfg.trust_radius_min) {
      result.termination = Termination::RadiusFloor;
      break;
    }
    const MaximinStep step = maximin_step(eval.fidelities, eval.gradients, theta, bound, radius);
    IterationRecord rec{iter, false, eval.worst, radius};

    if (step.increment.cwiseAbs().maxCoeff() > 0.0) {
      RealVector trial_theta = (theta + step.increment).cwiseMax(-bound).cwiseMin(bound);
      const Pulse trial = Pulse::unflatten(seed.total_time, seed.quadratures(), trial_theta);
      Evaluation trial_eval = evaluate_at(objective, trial);
      ++result.evaluations;
      rec.worst_case = trial_eval.worst;
      if (trial_eval.worst > eval.worst) {
        rec.accepted = true;
        theta = std::move(trial_theta);
        current = trial;
        eval = std::move(trial_eval);
      }
    }

    result.trace.push_back(rec);
    if (on_iteration) {
      on_iteration(rec);
    }
    if (rec.accepted) {
      radius = std::min(radius * cfg.expand_factor, radius_cap);
      accepted_history.push_back(eval.worst);
      const auto count = static_cast<int>(accepted_history.size());
      if (count > cfg.stall_window &&
          eval.worst - accepted_history[static_cast<std::size_t>(count - 1 - cfg.stall_window)] <
              cfg.stall_tolerance) {
        result.termination = Termination::Stall;
        break;
      }
    } else {
      radius *= cfg.shrink_factor;
    }
  }

  result.pulse = current;
  result.per_sample = eval.fidelities;
  result.worst_case = eval.worst;
  return result;
}

OptResult scp_optimize(const ProblemBuilder& builder, const SampleGrid& grid, const Pulse& seed,
                       const OptConfig& cfg, const std::optional<FilterSpec>& filter) {
  return scp_optimize(RobustObjective(builder, grid, filter), seed, cfg);
}

void write_iteration_csv(std::ostream& out, std::span<const IterationRecord> trace) {
  out << "iter,accepted,worst_case_F,trust_radius\n" << std::setprecision(17);
  for (const IterationRecord& r : trace) {
    out << r.iter << ',' << (r.accepted ? 1 : 0) << ',' << r.worst_case << ',' << r.trust_radius
        << '\n';
  }
}

}  // namespace pulseforge
