#pragma once

// Glue between the physical models and the optimiser: builds the control
// problem for one parameter sample.

#include "pulseforge/dynamics.hpp"
#include "pulseforge/model.hpp"
#include "pulseforge/scp.hpp"

#include <string>

namespace pulseforge {

enum class ModelKind { TwoLevel, MultiLevel };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Number of pulse quadratures the model is driven with.
int quadratures_for(ModelKind kind);

/// Fixes the drive frequency from the nominal parameters when unset:
/// nu_tilde_a1 for the two-level model, the dressed qubit-1 splitting for
/// the multi-level model.
SystemParams resolve_drive(ModelKind kind, const SystemParams& p);

/// 4x4 effective model, one control, identity projector.
ControlProblem make_two_level_problem(const SystemParams& p, double amplitude_bound);

/// Dressed Duffing model in the frame rotating at p.nu_d, x/y controls.
ControlProblem make_multilevel_problem(const SystemParams& p, double amplitude_bound);

ProblemBuilder problem_builder(ModelKind kind, double amplitude_bound);

}  // namespace pulseforge
