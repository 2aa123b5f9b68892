#pragma once

// Piecewise-constant propagation, subspace gate fidelity and its exact
// gradient, and per-pixel state diagnostics.

#include "pulseforge/numkit.hpp"
#include "pulseforge/pulse.hpp"

#include <iosfwd>
#include <vector>

namespace pulseforge {

/// Drift in rad/ns; controls are dimensionless and enter as
/// 2pi * amp(GHz) * control. The computational subspace is spanned by the
/// columns of comp_basis, ordered |00>, |01>, |10>, |11>.
struct ControlProblem {
  Operator h_drift;
  std::vector<Operator> h_controls;
  Operator comp_basis;   ///< dim x 4 isometry
  Operator projector;    ///< comp_basis comp_basis^dagger
  Operator target_subspace;  ///< 4 x 4
  Operator target;       ///< target_subspace embedded in the full space
  double amplitude_bound = 0.30;  ///< GHz

  static ControlProblem from_subspace(Operator h_drift, std::vector<Operator> h_controls,
                                      Operator comp_basis, Operator target_subspace,
                                      double amplitude_bound);

  Eigen::Index dim() const { return h_drift.rows(); }
  int subspace_dim() const { return static_cast<int>(comp_basis.cols()); }
  int n_controls() const { return static_cast<int>(h_controls.size()); }
};

struct Propagation {
  Operator total;
  std::vector<Operator> prefix;  ///< prefix[k] = U_{k+1} ... U_1
};

Propagation propagate(const ControlProblem& cp, const Pulse& p);

/// |tr(W^dagger O U O) / n_s|^2.
double fidelity(const ControlProblem& cp, const Operator& u_total);

struct FidelityGradient {
  double fidelity = 0.0;
  RealMatrix gradient;  ///< quadratures x n_pixels, dF/d amp (per GHz)
};

/// Fidelity and its exact gradient for one pulse; a single forward and a
/// single backward sweep over the pixels.
FidelityGradient fidelity_and_gradient(const ControlProblem& cp, const Pulse& p);

RealMatrix fidelity_gradient(const ControlProblem& cp, const Pulse& p);

/// Fidelity only; propagates just the computational columns.
double pulse_fidelity(const ControlProblem& cp, const Pulse& p);

struct TraceStep {
  int step = 0;
  double t_ns = 0.0;
  StateVector state;
  double entanglement = 0.0;
  double bell_fidelity = 0.0;
  double leakage = 0.0;
};

struct EvolutionTrace {
  std::vector<TraceStep> steps;  ///< steps[0] is the initial state
};

/// 2|ad - bc| for a normalised two-qubit state (a, b, c, d).
double entanglement(const Eigen::Vector4cd& amplitudes);

/// Initial state |+y>|+y>, embedded through cp.comp_basis.
StateVector plus_y_plus_y(const ControlProblem& cp);

/// (|00> - |11>)/sqrt(2) in the 4-dim computational basis.
Eigen::Vector4cd bell_phi_minus();

EvolutionTrace evolve_trace(const ControlProblem& cp, const Pulse& p, const StateVector& initial);

/// Header: step,t_ns,entanglement,bell_fidelity,leakage
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);

}  // namespace pulseforge
