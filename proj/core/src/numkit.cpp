#include "pulseforge/numkit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pulseforge::numkit {

Operator kron(const Operator& a, const Operator& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw NumericalError("kron: empty operand");
  }
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator pauli_x() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Operator pauli_y() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

Operator pauli_z() {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Operator identity(Eigen::Index dim) { return Operator::Identity(dim, dim); }

double hermiticity_defect(const Operator& a) {
  if (a.rows() != a.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    return 0.0;
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Operator& a, double rel_tol) {
  return hermiticity_defect(a) <= rel_tol;
}

HermitianEigen eig_hermitian(const Operator& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw NumericalError("eig_hermitian: operator must be square and non-empty");
  }
  const double defect = hermiticity_defect(h);
  if (defect > 1e-12) {
    std::ostringstream msg;
    msg << "eig_hermitian: operator is not Hermitian (relative defect " << defect << ")";
    throw NumericalError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Operator> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Operator propagator(const HermitianEigen& eig, double tau) {
  const Eigen::Index n = eig.values.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    phases(m) = std::polar(1.0, -eig.values(m) * tau);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Operator propagator(const Operator& h, double tau) {
  if (tau == 0.0) {
    return identity(h.rows());
  }
  return propagator(eig_hermitian(h), tau);
}

Operator loewner_kernel(const RealVector& eigenvalues, double tau) {
  const Eigen::Index n = eigenvalues.size();
  Eigen::VectorXcd f(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    f(m) = std::polar(1.0, -eigenvalues(m) * tau);
  }
  const Complex minus_i_tau(0.0, -tau);
  Operator gamma(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    gamma(m, m) = minus_i_tau * f(m);
    for (Eigen::Index k = m + 1; k < n; ++k) {
      const double gap = eigenvalues(m) - eigenvalues(k);
      Complex value;
      if (std::abs(gap) < kDegenerateGap) {
        value = minus_i_tau * 0.5 * (f(m) + f(k));
      } else {
        value = (f(m) - f(k)) / gap;
      }
      gamma(m, k) = value;
      gamma(k, m) = value;
    }
  }
  return gamma;
}

PropagatorDerivatives propagator_with_derivatives(const Operator& h0,
                                                  std::span<const Operator> controls,
                                                  std::span<const double> amps,
                                                  double tau) {
  if (controls.size() != amps.size()) {
    throw NumericalError("propagator_with_derivatives: controls/amps size mismatch");
  }
  Operator h = h0;
  for (std::size_t j = 0; j < controls.size(); ++j) {
    if (controls[j].rows() != h0.rows() || controls[j].cols() != h0.cols()) {
      throw NumericalError("propagator_with_derivatives: control dimension mismatch");
    }
    h += amps[j] * controls[j];
  }
  const HermitianEigen eig = eig_hermitian(h);
  PropagatorDerivatives out;
  out.u = propagator(eig, tau);
  if (controls.empty()) {
    return out;
  }
  const Operator gamma = loewner_kernel(eig.values, tau);
  out.du.reserve(controls.size());
  for (const Operator& hc : controls) {
    const Operator in_eigenbasis = eig.vectors.adjoint() * hc * eig.vectors;
    const Operator weighted = in_eigenbasis.cwiseProduct(gamma);
    out.du.push_back(eig.vectors * weighted * eig.vectors.adjoint());
  }
  return out;
}

double unitarity_defect(const Operator& u) {
  return (u.adjoint() * u - identity(u.rows())).cwiseAbs().maxCoeff();
}

}  // namespace pulseforge::numkit
