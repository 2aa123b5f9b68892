#include "pulseforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace pulseforge {
namespace {

Operator annihilation(int levels) {
  Operator a = Operator::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

void require_nonzero(double value, const char* what) {
  if (value == 0.0) {
    std::ostringstream msg;
    msg << "effective_params: " << what << " is zero; the dispersive expansion is undefined";
    throw ConfigError(msg.str());
  }
}

}  // namespace

std::vector<std::string> validate(const SystemParams& p) {
  if (p.n_transmon < 2) {
    throw ConfigError("n_transmon must be >= 2");
  }
  if (p.n_cavity < 1) {
    throw ConfigError("n_cavity must be >= 1");
  }
  std::vector<std::string> warnings;
  const std::array<std::tuple<double, double, int>, 2> qubits{
      std::tuple{p.g1, p.nu_a1, 1}, std::tuple{p.g2, p.nu_a2, 2}};
  for (const auto& [g, nu, j] : qubits) {
    const double detuning = std::abs(nu - p.nu_r);
    if (detuning == 0.0 || std::abs(g) / detuning > 0.2) {
      std::ostringstream msg;
      msg << "qubit " << j << ": g/|nu_a - nu_r| = "
          << (detuning == 0.0 ? INFINITY : std::abs(g) / detuning)
          << " exceeds 0.2; dispersive approximation is weak";
      warnings.push_back(msg.str());
    }
  }
  return warnings;
}

EffectiveParams effective_params(const SystemParams& p) {
  EffectiveParams e;
  e.Delta1 = p.nu_a1 - p.nu_r;
  e.Delta2 = p.nu_a2 - p.nu_r;
  require_nonzero(e.Delta1, "qubit-1/cavity detuning");
  require_nonzero(e.Delta2, "qubit-2/cavity detuning");

  e.J = p.g1 * p.g2 * (e.Delta1 + e.Delta2) / (2.0 * e.Delta1 * e.Delta2);
  // Empty cavity: 2 g^2/Delta (n + 1/2) at n = 0.
  e.nu_shifted_a1 = p.nu_a1 + p.g1 * p.g1 / e.Delta1;
  e.nu_shifted_a2 = p.nu_a2 + p.g2 * p.g2 / e.Delta2;
  e.Delta12 = e.nu_shifted_a1 - e.nu_shifted_a2;
  require_nonzero(e.Delta12, "qubit-qubit detuning");

  const double level_shift = e.J * e.J / e.Delta12;
  e.nu_tilde_a1 = e.nu_shifted_a1 + level_shift;
  e.nu_tilde_a2 = e.nu_shifted_a2 - level_shift;

  const double nu_d = p.nu_d.value_or(e.nu_tilde_a1);
  require_nonzero(p.nu_r - nu_d, "cavity/drive detuning");
  e.drive_prefactor1 = 2.0 * p.g1 / (p.nu_r - nu_d);
  e.drive_prefactor2 = 2.0 * p.g2 / (p.nu_r - nu_d);
  return e;
}

SystemParams with_two_level_drive(const SystemParams& p) {
  SystemParams out = p;
  if (!out.nu_d) {
    out.nu_d = effective_params(p).nu_tilde_a1;
  }
  return out;
}

Operator two_level_drift(const SystemParams& p, const EffectiveParams& eff) {
  if (!p.nu_d) {
    throw ConfigError("two_level_drift: drive frequency nu_d is not set");
  }
  using numkit::identity;
  using numkit::kron;
  using numkit::pauli_z;
  const double detuning1 = eff.nu_tilde_a1 - *p.nu_d;
  const double detuning2 = eff.nu_tilde_a2 - *p.nu_d;
  const Operator z1 = kron(pauli_z(), identity(2));
  const Operator z2 = kron(identity(2), pauli_z());
  return kTwoPi * (0.5 * detuning1 * z1 + 0.5 * detuning2 * z2);
}

Operator two_level_control(const SystemParams& p, const EffectiveParams& eff) {
  if (!p.nu_d) {
    throw ConfigError("two_level_control: drive frequency nu_d is not set");
  }
  using numkit::identity;
  using numkit::kron;
  using numkit::pauli_x;
  using numkit::pauli_z;
  // Prefactors follow the supplied drive frequency, not whatever eff assumed.
  const double pref1 = 2.0 * p.g1 / (p.nu_r - *p.nu_d);
  const double pref2 = 2.0 * p.g2 / (p.nu_r - *p.nu_d);
  const double ratio = eff.J / eff.Delta12;
  const Operator x1 = kron(pauli_x(), identity(2));
  const Operator x2 = kron(identity(2), pauli_x());
  const Operator z1x2 = kron(pauli_z(), pauli_x());
  const Operator x1z2 = kron(pauli_x(), pauli_z());
  return pref1 * (x1 + ratio * z1x2) + pref2 * (x2 - ratio * x1z2);
}

int bare_index(const BareDims& dims, const BareLabel& label) {
  return (label.n_cav * dims.n_transmon1 + label.j1) * dims.n_transmon2 + label.j2;
}

BareLabel bare_label(const BareDims& dims, int index) {
  BareLabel label;
  label.j2 = index % dims.n_transmon2;
  index /= dims.n_transmon2;
  label.j1 = index % dims.n_transmon1;
  label.n_cav = index / dims.n_transmon1;
  return label;
}

DuffingModel duffing_hamiltonian(const SystemParams& p) {
  validate(p);
  const BareDims dims{p.n_cavity, p.n_transmon, p.n_transmon};
  const long long total = 1LL * p.n_cavity * p.n_transmon * p.n_transmon;
  if (total > kMaxModelDimension) {
    std::ostringstream msg;
    msg << "duffing_hamiltonian: dimension " << total << " exceeds the limit of "
        << kMaxModelDimension;
    throw ConfigError(msg.str());
  }
  using numkit::identity;
  using numkit::kron;
  const Operator id_c = identity(p.n_cavity);
  const Operator id_t = identity(p.n_transmon);
  const Operator a = kron(kron(annihilation(p.n_cavity), id_t), id_t);
  const Operator c1 = kron(kron(id_c, annihilation(p.n_transmon)), id_t);
  const Operator c2 = kron(kron(id_c, id_t), annihilation(p.n_transmon));

  const Eigen::Index dim = a.rows();
  const Operator id = identity(dim);
  const Operator n_a = a.adjoint() * a;
  const Operator n_1 = c1.adjoint() * c1;
  const Operator n_2 = c2.adjoint() * c2;

  Operator h = p.nu_r * n_a;
  h += p.nu_a1 * n_1 + 0.5 * p.delta1 * n_1 * (n_1 - id);
  h += p.nu_a2 * n_2 + 0.5 * p.delta2 * n_2 * (n_2 - id);
  const Operator hop1 = a.adjoint() * c1;
  const Operator hop2 = a.adjoint() * c2;
  h += p.g1 * (hop1 + hop1.adjoint());
  h += p.g2 * (hop2 + hop2.adjoint());

  DuffingModel model;
  model.h_static = kTwoPi * h;
  model.a_op = a;
  model.excitation_number = n_a + n_1 + n_2;
  model.dims = dims;
  return model;
}

double DressedBasis::energy(const BareLabel& label) const {
  return energies(index_of.at(static_cast<std::size_t>(bare_index(dims, label))));
}

DressedBasis dress(const Operator& h_static, const BareDims& dims) {
  if (h_static.rows() != dims.total()) {
    throw NumericalError("dress: operator dimension does not match bare dimensions");
  }
  const numkit::HermitianEigen eig = numkit::eig_hermitian(h_static);
  const int n = static_cast<int>(h_static.rows());
  const RealMatrix overlap = eig.vectors.cwiseAbs2();  // (bare, dressed)

  struct Candidate {
    double weight;
    int bare;
    int dressed;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * n);
  for (int d = 0; d < n; ++d) {
    for (int b = 0; b < n; ++b) {
      if (overlap(b, d) > 1e-14) {
        candidates.push_back({overlap(b, d), b, d});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.weight > y.weight; });

  DressedBasis db;
  db.dims = dims;
  db.index_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> bare_of(static_cast<std::size_t>(n), -1);
  int assigned = 0;
  for (const Candidate& c : candidates) {
    if (bare_of[c.dressed] >= 0 || db.index_of[c.bare] >= 0) {
      continue;
    }
    bare_of[c.dressed] = c.bare;
    db.index_of[c.bare] = c.dressed;
    if (++assigned == n) {
      break;
    }
  }
  if (assigned != n) {
    throw NumericalError("dress: could not build a complete bare/dressed assignment");
  }

  db.vectors = eig.vectors;
  db.label_of.resize(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const int b = bare_of[d];
    db.label_of[d] = bare_label(dims, b);
    const Complex amp = db.vectors(b, d);
    db.vectors.col(d) *= std::conj(amp) / std::abs(amp);
  }
  db.energies = eig.values / kTwoPi;

  const std::array<BareLabel, 4> comp{BareLabel{0, 0, 0}, BareLabel{0, 1, 0}, BareLabel{1, 0, 0},
                                      BareLabel{1, 1, 0}};
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const int b = bare_index(dims, comp[k]);
    const int d = db.index_of[b];
    db.comp_indices[k] = d;
    if (overlap(b, d) <= 0.5) {
      std::ostringstream msg;
      msg << "dress: computational state |" << comp[k].j1 << comp[k].j2 << ",0> is ambiguous "
          << "(max overlap^2 = " << overlap(b, d) << " <= 0.5)";
      throw NumericalError(msg.str());
    }
  }
  return db;
}

double dressed_qubit1_frequency(const DressedBasis& db) {
  return db.energy({1, 0, 0}) - db.energy({0, 0, 0});
}

double dressed_qubit2_frequency(const DressedBasis& db) {
  return db.energy({0, 1, 0}) - db.energy({0, 0, 0});
}

RotatingFrameOps rotating_frame(const DressedBasis& db, const DuffingModel& model,
                                double nu_d) {
  if (model.h_static.rows() != db.vectors.rows()) {
    throw NumericalError("rotating_frame: dressed basis does not match the model");
  }
  const Operator& v = db.vectors;
  Operator number = v.adjoint() * model.excitation_number * v;
  number = 0.5 * (number + number.adjoint()).eval();
  const Operator a_dressed = v.adjoint() * model.a_op * v;

  RotatingFrameOps ops;
  ops.h_drift = (kTwoPi * db.energies).cast<Complex>().asDiagonal();
  ops.h_drift -= kTwoPi * nu_d * number;
  ops.h_x = a_dressed + a_dressed.adjoint();
  ops.h_y = Complex(0.0, 1.0) * (a_dressed.adjoint() - a_dressed);
  return ops;
}

Operator computational_projector(const DressedBasis& db) {
  const Eigen::Index n = db.vectors.rows();
  Operator proj = Operator::Zero(n, n);
  for (int d : db.comp_indices) {
    proj(d, d) = 1.0;
  }
  return proj;
}

Operator cross_resonance_target() {
  const Operator xz = numkit::kron(numkit::pauli_x(), numkit::pauli_z());
  const double c = std::sqrt(0.5);
  return c * numkit::identity(4) - Complex(0.0, c) * xz;
}

}  // namespace pulseforge
