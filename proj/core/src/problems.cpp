#include "pulseforge/problems.hpp"

namespace pulseforge {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::TwoLevel ? "two-level" : "multi-level";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "two-level" || name == "two_level") {
    return ModelKind::TwoLevel;
  }
  if (name == "multi-level" || name == "multi_level" || name == "multilevel") {
    return ModelKind::MultiLevel;
  }
  throw ConfigError("unknown model kind '" + name + "' (expected two-level or multi-level)");
}

int quadratures_for(ModelKind kind) { return kind == ModelKind::TwoLevel ? 1 : 2; }

SystemParams resolve_drive(ModelKind kind, const SystemParams& p) {
  if (p.nu_d) {
    return p;
  }
  SystemParams out = p;
  if (kind == ModelKind::TwoLevel) {
    out.nu_d = effective_params(p).nu_tilde_a1;
  } else {
    const DuffingModel model = duffing_hamiltonian(p);
    out.nu_d = dressed_qubit1_frequency(dress(model.h_static, model.dims));
  }
  return out;
}

ControlProblem make_two_level_problem(const SystemParams& p, double amplitude_bound) {
  if (!p.nu_d) {
    throw ConfigError("two-level problem: drive frequency is not resolved");
  }
  const EffectiveParams eff = effective_params(p);
  return ControlProblem::from_subspace(two_level_drift(p, eff), {two_level_control(p, eff)},
                                       numkit::identity(4), cross_resonance_target(),
                                       amplitude_bound);
}

ControlProblem make_multilevel_problem(const SystemParams& p, double amplitude_bound) {
  if (!p.nu_d) {
    throw ConfigError("multi-level problem: drive frequency is not resolved");
  }
  const DuffingModel model = duffing_hamiltonian(p);
  const DressedBasis db = dress(model.h_static, model.dims);
  RotatingFrameOps ops = rotating_frame(db, model, *p.nu_d);
  Operator comp = Operator::Zero(model.h_static.rows(), 4);
  for (int k = 0; k < 4; ++k) {
    comp(db.comp_indices[static_cast<std::size_t>(k)], k) = 1.0;
  }
  return ControlProblem::from_subspace(std::move(ops.h_drift), {std::move(ops.h_x), std::move(ops.h_y)},
                                       std::move(comp), cross_resonance_target(), amplitude_bound);
}

ProblemBuilder problem_builder(ModelKind kind, double amplitude_bound) {
  if (kind == ModelKind::TwoLevel) {
    return [amplitude_bound](const SystemParams& p) { return make_two_level_problem(p, amplitude_bound); };
  }
  return [amplitude_bound](const SystemParams& p) { return make_multilevel_problem(p, amplitude_bound); };
}

}  // namespace pulseforge
