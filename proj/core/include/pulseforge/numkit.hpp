#pragma once

// Dense complex linear algebra used throughout pulseforge: Hermitian
// eigendecomposition, unitary propagators and their exact first derivatives.
//
// Units: Hamiltonians passed here are angular frequencies in rad/ns and
// times are in ns.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulseforge {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised for malformed numerical input (non-Hermitian generators, dimension
/// mismatches, solver iteration caps).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration or parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numkit {

Operator kron(const Operator& a, const Operator& b);

Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator identity(Eigen::Index dim);

/// Largest entry of |A - A^dagger| relative to max|A|; zero matrices are
/// Hermitian.
double hermiticity_defect(const Operator& a);
bool is_hermitian(const Operator& a, double rel_tol = 1e-12);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors as
/// orthonormal columns.
struct HermitianEigen {
  RealVector values;
  Operator vectors;
};

HermitianEigen eig_hermitian(const Operator& h);

/// exp(-i h tau).
Operator propagator(const Operator& h, double tau);

/// Same as propagator() but reuses an existing eigendecomposition.
Operator propagator(const HermitianEigen& eig, double tau);

/// Divided-difference (Loewner) matrix of f(x) = exp(-i x tau) over the
/// eigenvalues: Gamma(m,n) = (f(l_m) - f(l_n)) / (l_m - l_n), with the
/// derivative -i tau f(l_m) on (near-)degenerate pairs.
Operator loewner_kernel(const RealVector& eigenvalues, double tau);

/// Eigenvalue gaps below this use the analytic degenerate limit.
inline constexpr double kDegenerateGap = 1e-9;

struct PropagatorDerivatives {
  Operator u;
  std::vector<Operator> du;
};

/// U = exp(-i H tau) with H = h0 + sum_j amps[j] * controls[j], and the exact
/// derivatives dU/d amps[j].
PropagatorDerivatives propagator_with_derivatives(const Operator& h0,
                                                  std::span<const Operator> controls,
                                                  std::span<const double> amps,
                                                  double tau);

/// max |U^dagger U - I| entrywise.
double unitarity_defect(const Operator& u);

}  // namespace numkit
}  // namespace pulseforge
