#include "pulseforge/numkit.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <vector>

using namespace pulseforge;

namespace {

const Complex I(0.0, 1.0);

TEST(Kron, XTensorIdentitySwapsQubitOne) {
  const Operator m = numkit::kron(numkit::pauli_x(), numkit::identity(2));
  Operator expected = Operator::Zero(4, 4);
  expected(0, 2) = expected(1, 3) = expected(2, 0) = expected(3, 1) = 1.0;
  EXPECT_EQ(m, expected);
}

TEST(Kron, IdentityTensorIdentity) {
  EXPECT_EQ(numkit::kron(numkit::identity(2), numkit::identity(2)), numkit::identity(4));
}

TEST(Kron, ZTensorZParity) {
  const Operator m = numkit::kron(numkit::pauli_z(), numkit::pauli_z());
  EXPECT_EQ(m.diagonal().real(), Eigen::Vector4d(1, -1, -1, 1));
  EXPECT_EQ(oracle::max_abs(m - Operator(m.diagonal().asDiagonal())), 0.0);
}

TEST(Pauli, Algebra) {
  const Operator x = numkit::pauli_x();
  const Operator y = numkit::pauli_y();
  const Operator z = numkit::pauli_z();
  EXPECT_LT(oracle::max_abs(x * y - I * z), 1e-15);
  EXPECT_LT(oracle::max_abs(x * x - numkit::identity(2)), 1e-15);
}

TEST(EigHermitian, DiagonalInput) {
  Operator h = Operator::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 3.0;
  const auto e = numkit::eig_hermitian(h);
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 3.0);
  EXPECT_LT(oracle::max_abs(e.vectors.cwiseAbs().cast<Complex>() - numkit::identity(2)), 1e-15);
}

TEST(EigHermitian, PauliX) {
  const auto e = numkit::eig_hermitian(numkit::pauli_x());
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  // (1, -1)/sqrt2 up to phase for the lower eigenvalue.
  const Complex ratio = e.vectors(1, 0) / e.vectors(0, 0);
  EXPECT_NEAR(std::abs(ratio + 1.0), 0.0, 1e-14);
}

TEST(EigHermitian, RandomReconstruction) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = oracle::random_hermitian(8, rng);
    const auto e = numkit::eig_hermitian(h);
    const Operator rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(oracle::max_abs(rebuilt - h), 1e-10);
    EXPECT_LT(oracle::max_abs(e.vectors.adjoint() * e.vectors - numkit::identity(8)), 1e-10);
    for (int k = 1; k < 8; ++k) {
      EXPECT_LE(e.values(k - 1), e.values(k));
    }
  }
}

TEST(EigHermitian, RejectsNonHermitian) {
  Operator h = numkit::pauli_x();
  h(0, 1) = 2.0;
  EXPECT_THROW(numkit::eig_hermitian(h), NumericalError);
}

TEST(Propagator, HalfPiRotation) {
  const Operator u = numkit::propagator(0.5 * std::numbers::pi * numkit::pauli_x(), 1.0);
  EXPECT_LT(oracle::max_abs(u - (-I) * numkit::pauli_x()), 1e-14);
}

TEST(Propagator, ZeroTimeIsIdentity) {
  std::mt19937 rng(5);
  const Operator h = oracle::random_hermitian(6, rng);
  EXPECT_LT(oracle::max_abs(numkit::propagator(h, 0.0) - numkit::identity(6)), 1e-14);
}

TEST(Propagator, UnitaryAndMatchesTaylorOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 7;
    const Operator h = oracle::random_hermitian(dim, rng, 3.0);
    const double tau = 0.1 + 0.05 * trial;
    const Operator u = numkit::propagator(h, tau);
    EXPECT_LE(numkit::unitarity_defect(u), 1e-10);
    EXPECT_LT(oracle::max_abs(u - oracle::expm_taylor(h, tau)), 1e-10);
  }
}

TEST(Propagator, SemigroupProperty) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = oracle::random_hermitian(5, rng, 2.0);
    const Operator joined = numkit::propagator(h, 0.4) * numkit::propagator(h, 1.1);
    EXPECT_LT(oracle::max_abs(joined - numkit::propagator(h, 1.5)), 1e-9);
  }
}

TEST(PropagatorDerivatives, NoControls) {
  std::mt19937 rng(2);
  const Operator h0 = oracle::random_hermitian(4, rng);
  const auto d = numkit::propagator_with_derivatives(h0, {}, {}, 0.7);
  EXPECT_TRUE(d.du.empty());
  EXPECT_LT(oracle::max_abs(d.u - numkit::propagator(h0, 0.7)), 1e-15);
}

TEST(PropagatorDerivatives, MatchesCentralDifferences) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const double step = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Operator h0 = oracle::random_hermitian(4, rng);
    const std::vector<Operator> controls = {oracle::random_hermitian(4, rng),
                                            oracle::random_hermitian(4, rng)};
    std::vector<double> amps = {amp(rng), amp(rng)};
    const double tau = 0.8;
    const auto d = numkit::propagator_with_derivatives(h0, controls, amps, tau);
    for (std::size_t j = 0; j < controls.size(); ++j) {
      auto h_at = [&](double a) {
        Operator h = h0;
        for (std::size_t q = 0; q < controls.size(); ++q) {
          h += (q == j ? a : amps[q]) * controls[q];
        }
        return oracle::expm_taylor(h, tau);
      };
      const Operator fd = (h_at(amps[j] + step) - h_at(amps[j] - step)) / (2.0 * step);
      EXPECT_LE(oracle::max_abs(fd - d.du[j]) / oracle::max_abs(fd), 1e-6) << "trial " << trial;
    }
  }
}

TEST(PropagatorDerivatives, DegenerateCommutingCase) {
  const Operator h0 = Operator::Zero(2, 2);
  const std::vector<Operator> controls = {numkit::pauli_z()};
  const std::vector<double> amps = {0.0};
  const double tau = 1.3;
  const auto d = numkit::propagator_with_derivatives(h0, controls, amps, tau);
  EXPECT_LT(oracle::max_abs(d.du[0] - (-I * tau) * numkit::pauli_z() * d.u), 1e-15);
}

TEST(LoewnerKernel, NearDegenerateIsContinuous) {
  const double tau = 2.0;
  RealVector close(2);
  close << 1.0, 1.0 + 1e-7;
  RealVector equal(2);
  equal << 1.0, 1.0;
  const Operator a = numkit::loewner_kernel(close, tau);
  const Operator b = numkit::loewner_kernel(equal, tau);
  EXPECT_LT(oracle::max_abs(a - b), 1e-6);
}

}  // namespace
