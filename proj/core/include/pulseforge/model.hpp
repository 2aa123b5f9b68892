#pragma once

// Hamiltonians for two qubits sharing one driven cavity.
//
// Stored frequencies are linear frequencies (omega / 2pi) in GHz. Every
// operator returned here is an angular frequency in rad/ns, except the drive
// operators, which are dimensionless and get multiplied by 2pi * amplitude
// (GHz) at propagation time.

#include "pulseforge/numkit.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pulseforge {

struct SystemParams {
  double nu_r = 6.44;
  double nu_a1 = 4.50;
  double nu_a2 = 4.85;
  double g1 = 0.133;
  double g2 = 0.133;
  double delta1 = -0.160;
  double delta2 = -0.170;
  std::optional<double> nu_d;
  int n_transmon = 4;
  int n_cavity = 5;
};

/// Hard errors throw ConfigError; soft issues (weak dispersive regime) come
/// back as human-readable warnings.
std::vector<std::string> validate(const SystemParams& p);

struct EffectiveParams {
  double Delta1 = 0.0;  ///< nu_a1 - nu_r
  double Delta2 = 0.0;  ///< nu_a2 - nu_r
  double J = 0.0;       ///< cavity-mediated exchange
  double Delta12 = 0.0; ///< nu'_a1 - nu'_a2
  double nu_shifted_a1 = 0.0;  ///< Lamb-shifted, empty cavity
  double nu_shifted_a2 = 0.0;
  double nu_tilde_a1 = 0.0;
  double nu_tilde_a2 = 0.0;
  double drive_prefactor1 = 0.0;  ///< 2 g1 / (nu_r - nu_d)
  double drive_prefactor2 = 0.0;
};

/// Dispersive/Schrieffer-Wolff parameters. Drive prefactors use p.nu_d when
/// set and nu_tilde_a1 otherwise.
EffectiveParams effective_params(const SystemParams& p);

/// Returns p with nu_d filled in (nu_tilde_a1) when it was unset.
SystemParams with_two_level_drive(const SystemParams& p);

// Two-level model, basis |q1 q2> ordered 00, 01, 10, 11 (qubit 1 leftmost).

Operator two_level_drift(const SystemParams& p, const EffectiveParams& eff);
Operator two_level_control(const SystemParams& p, const EffectiveParams& eff);

// Multi-level (Duffing) model. Bare basis index is
// (n_cav * n_t + j1) * n_t + j2, i.e. cavity (x) transmon 1 (x) transmon 2.

struct BareDims {
  int n_cavity = 1;
  int n_transmon1 = 2;
  int n_transmon2 = 2;

  int total() const { return n_cavity * n_transmon1 * n_transmon2; }
};

struct BareLabel {
  int j1 = 0;
  int j2 = 0;
  int n_cav = 0;

  bool operator==(const BareLabel&) const = default;
};

inline constexpr int kMaxModelDimension = 4096;

struct DuffingModel {
  Operator h_static;  ///< rad/ns
  Operator a_op;      ///< cavity annihilation in the bare product basis
  Operator excitation_number;  ///< a^dag a + sum_j c_j^dag c_j
  BareDims dims;
};

DuffingModel duffing_hamiltonian(const SystemParams& p);

int bare_index(const BareDims& dims, const BareLabel& label);
BareLabel bare_label(const BareDims& dims, int index);

struct DressedBasis {
  RealVector energies;  ///< GHz, ascending
  Operator vectors;     ///< columns = dressed states in the bare basis
  std::vector<BareLabel> label_of;   ///< dressed index -> bare label
  std::vector<int> index_of;         ///< bare index -> dressed index
  std::array<int, 4> comp_indices{};  ///< dressed |00,0>, |01,0>, |10,0>, |11,0>
  BareDims dims;

  double energy(const BareLabel& label) const;
};

/// Diagonalises h_static and assigns each dressed state the bare label of
/// maximal overlap (greedy, descending overlap, labels used once). Dressed
/// vectors are phased so that their overlap with their bare label is real
/// and positive.
DressedBasis dress(const Operator& h_static, const BareDims& dims);

/// Transition frequency (GHz) of dressed |10,0> above dressed |00,0>.
double dressed_qubit1_frequency(const DressedBasis& db);
double dressed_qubit2_frequency(const DressedBasis& db);

struct RotatingFrameOps {
  Operator h_drift;  ///< rad/ns, dressed basis
  Operator h_x;      ///< a + a^dag, dressed basis
  Operator h_y;      ///< i (a^dag - a), dressed basis
};

RotatingFrameOps rotating_frame(const DressedBasis& db, const DuffingModel& model,
                                double nu_d);

/// Projector on the four computational dressed states (dressed basis).
Operator computational_projector(const DressedBasis& db);

/// exp(-i pi/4 sigma_x^(1) sigma_z^(2)) on the 4-dim computational space.
Operator cross_resonance_target();

}  // namespace pulseforge
