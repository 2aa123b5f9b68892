#include "pulseforge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pulseforge {
namespace {

void check_pulse(const ControlProblem& cp, const Pulse& p) {
  if (p.quadratures() != cp.n_controls()) {
    std::ostringstream msg;
    msg << "pulse has " << p.quadratures() << " quadrature(s) but the problem has "
        << cp.n_controls() << " control operator(s)";
    throw NumericalError(msg.str());
  }
}

Operator pixel_hamiltonian(const ControlProblem& cp, const Pulse& p, int k) {
  Operator h = cp.h_drift;
  for (int q = 0; q < cp.n_controls(); ++q) {
    h += (kTwoPi * p.amps(q, k)) * cp.h_controls[static_cast<std::size_t>(q)];
  }
  return h;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

ControlProblem ControlProblem::from_subspace(Operator h_drift, std::vector<Operator> h_controls,
                                             Operator comp_basis, Operator target_subspace,
                                             double amplitude_bound) {
  const Eigen::Index dim = h_drift.rows();
  if (h_drift.cols() != dim || comp_basis.rows() != dim) {
    throw NumericalError("ControlProblem: inconsistent dimensions");
  }
  if (!numkit::is_hermitian(h_drift)) {
    throw NumericalError("ControlProblem: drift is not Hermitian");
  }
  for (const Operator& h : h_controls) {
    if (h.rows() != dim || h.cols() != dim || !numkit::is_hermitian(h)) {
      throw NumericalError("ControlProblem: control operators must be Hermitian and match the drift");
    }
  }
  const Eigen::Index ns = comp_basis.cols();
  if (target_subspace.rows() != ns || target_subspace.cols() != ns) {
    throw NumericalError("ControlProblem: target does not match the subspace dimension");
  }
  if ((comp_basis.adjoint() * comp_basis - numkit::identity(ns)).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("ControlProblem: computational basis is not orthonormal");
  }
  if (numkit::unitarity_defect(target_subspace) > 1e-10) {
    throw NumericalError("ControlProblem: target is not unitary on the subspace");
  }
  ControlProblem cp;
  cp.h_drift = std::move(h_drift);
  cp.h_controls = std::move(h_controls);
  cp.projector = comp_basis * comp_basis.adjoint();
  cp.target = comp_basis * target_subspace * comp_basis.adjoint();
  cp.comp_basis = std::move(comp_basis);
  cp.target_subspace = std::move(target_subspace);
  cp.amplitude_bound = amplitude_bound;
  return cp;
}

Propagation propagate(const ControlProblem& cp, const Pulse& p) {
  check_pulse(cp, p);
  Propagation out;
  out.prefix.reserve(static_cast<std::size_t>(p.n_pixels()));
  Operator acc = numkit::identity(cp.dim());
  for (int k = 0; k < p.n_pixels(); ++k) {
    const Operator u = numkit::propagator(pixel_hamiltonian(cp, p, k), p.tau());
    acc = (u * acc).eval();
    out.prefix.push_back(acc);
  }
  out.total = acc;
  return out;
}

double fidelity(const ControlProblem& cp, const Operator& u_total) {
  const Complex tr =
      (cp.target.adjoint() * cp.projector * u_total * cp.projector).trace() /
      static_cast<double>(cp.subspace_dim());
  return clamp_unit(std::norm(tr));
}

double pulse_fidelity(const ControlProblem& cp, const Pulse& p) {
  check_pulse(cp, p);
  Operator cols = cp.comp_basis;
  for (int k = 0; k < p.n_pixels(); ++k) {
    cols = numkit::propagator(pixel_hamiltonian(cp, p, k), p.tau()) * cols;
  }
  const Complex tr = (cp.target_subspace.adjoint() * cp.comp_basis.adjoint() * cols).trace() /
                     static_cast<double>(cp.subspace_dim());
  return clamp_unit(std::norm(tr));
}

FidelityGradient fidelity_and_gradient(const ControlProblem& cp, const Pulse& p) {
  check_pulse(cp, p);
  const int n = p.n_pixels();
  const double tau = p.tau();
  const double ns = cp.subspace_dim();

  std::vector<numkit::HermitianEigen> eigs;
  std::vector<Operator> steps;
  std::vector<Operator> forward;  // forward[k] = U_k ... U_1 E (before pixel k+1)
  eigs.reserve(static_cast<std::size_t>(n));
  steps.reserve(static_cast<std::size_t>(n));
  forward.reserve(static_cast<std::size_t>(n) + 1);
  forward.push_back(cp.comp_basis);
  for (int k = 0; k < n; ++k) {
    eigs.push_back(numkit::eig_hermitian(pixel_hamiltonian(cp, p, k)));
    steps.push_back(numkit::propagator(eigs.back(), tau));
    forward.push_back(steps.back() * forward.back());
  }

  const Operator w_dag = cp.target_subspace.adjoint();
  const Complex z = (w_dag * cp.comp_basis.adjoint() * forward.back()).trace() / ns;

  FidelityGradient out;
  out.fidelity = clamp_unit(std::norm(z));
  out.gradient = RealMatrix::Zero(p.quadratures(), n);

  Operator backward = w_dag * cp.comp_basis.adjoint();  // 4 x dim, W^dag E^dag U_N ... U_{k+1}
  for (int k = n - 1; k >= 0; --k) {
    const Operator& v = eigs[static_cast<std::size_t>(k)].vectors;
    const Operator gamma = numkit::loewner_kernel(eigs[static_cast<std::size_t>(k)].values, tau);
    // tr(Y V (Gamma o M) V^dag X) = sum_ab h_ab S_ab with S = conj(V) R V^T,
    // R = (V^dag X Y V)^T o Gamma.
    const Operator vx = v.adjoint() * forward[static_cast<std::size_t>(k)];
    const Operator yv = backward * v;
    const Operator r = (vx * yv).transpose().cwiseProduct(gamma);
    const Operator s = v.conjugate() * r * v.transpose();
    for (int q = 0; q < p.quadratures(); ++q) {
      const Complex dz =
          kTwoPi * cp.h_controls[static_cast<std::size_t>(q)].cwiseProduct(s).sum() / ns;
      out.gradient(q, k) = 2.0 * (std::conj(z) * dz).real();
    }
    backward = (backward * steps[static_cast<std::size_t>(k)]).eval();
  }
  return out;
}

RealMatrix fidelity_gradient(const ControlProblem& cp, const Pulse& p) {
  return fidelity_and_gradient(cp, p).gradient;
}

double entanglement(const Eigen::Vector4cd& a) {
  return clamp_unit(2.0 * std::abs(a(0) * a(3) - a(1) * a(2)));
}

StateVector plus_y_plus_y(const ControlProblem& cp) {
  Eigen::Vector2cd plus_y(1.0, Complex(0.0, 1.0));
  plus_y /= std::sqrt(2.0);
  Eigen::Vector4cd both;
  both << plus_y(0) * plus_y(0), plus_y(0) * plus_y(1), plus_y(1) * plus_y(0),
      plus_y(1) * plus_y(1);
  return cp.comp_basis * both;
}

Eigen::Vector4cd bell_phi_minus() {
  const double c = std::sqrt(0.5);
  return Eigen::Vector4cd(c, 0.0, 0.0, -c);
}

EvolutionTrace evolve_trace(const ControlProblem& cp, const Pulse& p, const StateVector& initial) {
  check_pulse(cp, p);
  if (initial.size() != cp.dim()) {
    throw NumericalError("evolve_trace: initial state dimension mismatch");
  }
  const Eigen::Vector4cd phi_minus = bell_phi_minus();
  auto diagnose = [&](int step, double t, const StateVector& psi) {
    TraceStep s;
    s.step = step;
    s.t_ns = t;
    s.state = psi;
    const Eigen::Vector4cd comp = cp.comp_basis.adjoint() * psi;
    const double kept = comp.squaredNorm();
    s.leakage = clamp_unit(1.0 - kept);
    s.bell_fidelity = clamp_unit(std::norm(phi_minus.dot(comp)));
    s.entanglement = kept > 0.0 ? entanglement(comp / std::sqrt(kept)) : 0.0;
    return s;
  };

  EvolutionTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(p.n_pixels()) + 1);
  StateVector psi = initial;
  trace.steps.push_back(diagnose(0, 0.0, psi));
  for (int k = 0; k < p.n_pixels(); ++k) {
    psi = numkit::propagator(pixel_hamiltonian(cp, p, k), p.tau()) * psi;
    trace.steps.push_back(diagnose(k + 1, (k + 1) * p.tau(), psi));
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "step,t_ns,entanglement,bell_fidelity,leakage\n" << std::setprecision(17);
  for (const TraceStep& s : trace.steps) {
    out << s.step << ',' << s.t_ns << ',' << s.entanglement << ',' << s.bell_fidelity << ','
        << s.leakage << '\n';
  }
}

}  // namespace pulseforge
