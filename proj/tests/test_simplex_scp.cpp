#include "pulseforge/problems.hpp"
#include "pulseforge/scp.hpp"
#include "pulseforge/simplex.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace pulseforge;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

lp::LinearProgram two_variable(RealMatrix a, RealVector b, RealVector c) {
  lp::LinearProgram prog{std::move(a), std::move(b), std::move(c), RealVector::Zero(2),
                         RealVector::Constant(2, kInf)};
  return prog;
}

TEST(Simplex, TextbookMaximum) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  RealMatrix a(3, 2);
  a << 1, 0, 0, 2, 3, 2;
  const auto sol = lp::solve(two_variable(a, RealVector{{4, 12, 18}}, RealVector{{3, 5}}));
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, 36.0, 1e-12);
  EXPECT_NEAR(sol.x(0), 2.0, 1e-12);
  EXPECT_NEAR(sol.x(1), 6.0, 1e-12);
}

TEST(Simplex, UpperBoundsActive) {
  RealMatrix a(1, 2);
  a << 1, 1;
  lp::LinearProgram prog = two_variable(a, RealVector{{10}}, RealVector{{1, 2}});
  prog.upper << 3, 4;
  const auto sol = lp::solve(prog);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, 11.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // x + y >= 2 written as -x - y <= -2; minimise x + 2y.
  RealMatrix a(1, 2);
  a << -1, -1;
  lp::LinearProgram prog = two_variable(a, RealVector{{-2}}, RealVector{{-1, -2}});
  const auto sol = lp::solve(prog);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, -2.0, 1e-12);
  EXPECT_NEAR(sol.x(0), 2.0, 1e-12);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  RealMatrix a(1, 2);
  a << 1, 1;
  EXPECT_EQ(lp::solve(two_variable(a, RealVector{{-1}}, RealVector{{1, 1}})).status,
            lp::Status::Infeasible);
  RealMatrix b(1, 2);
  b << 1, -1;
  EXPECT_EQ(lp::solve(two_variable(b, RealVector{{1}}, RealVector{{1, 1}})).status,
            lp::Status::Unbounded);
}

TEST(Simplex, RandomProgramsMatchVertexEnumeration) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    RealMatrix a(4, 2);
    for (int i = 0; i < a.size(); ++i) {
      a(i) = u(rng);
    }
    const RealVector b = RealVector::Constant(4, 1.0) + 0.5 * RealVector::NullaryExpr(4, [&] { return u(rng); }).cwiseAbs();
    const RealVector c = RealVector::NullaryExpr(2, [&] { return u(rng); });
    lp::LinearProgram prog = two_variable(a, b, c);
    prog.upper = RealVector::Constant(2, 2.0);
    const auto sol = lp::solve(prog);
    ASSERT_EQ(sol.status, lp::Status::Optimal);
    // Every pairwise intersection of constraint and bound lines.
    std::vector<std::pair<RealVector, double>> lines;
    for (int i = 0; i < 4; ++i) {
      lines.emplace_back(a.row(i).transpose(), b(i));
    }
    lines.emplace_back(RealVector{{1, 0}}, 0.0);
    lines.emplace_back(RealVector{{0, 1}}, 0.0);
    lines.emplace_back(RealVector{{1, 0}}, 2.0);
    lines.emplace_back(RealVector{{0, 1}}, 2.0);
    double best = -kInf;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        Eigen::Matrix2d m;
        m.row(0) = lines[i].first.transpose();
        m.row(1) = lines[j].first.transpose();
        if (std::abs(m.determinant()) < 1e-12) {
          continue;
        }
        const Eigen::Vector2d x = m.inverse() * Eigen::Vector2d(lines[i].second, lines[j].second);
        if (x.minCoeff() < -1e-9 || x.maxCoeff() > 2.0 + 1e-9 ||
            ((a * x - b).array() > 1e-9).any()) {
          continue;
        }
        best = std::max(best, c.dot(x));
      }
    }
    EXPECT_NEAR(sol.objective, best, 1e-9) << "trial " << trial;
  }
}

TEST(Maximin, SingleSampleMovesAlongGradientSign) {
  const std::vector<double> f = {0.5};
  const std::vector<RealVector> g = {RealVector{{0.3, -0.2, 0.0}}};
  const RealVector current = RealVector::Zero(3);
  const MaximinStep step = maximin_step(f, g, current, 1.0, 0.1);
  EXPECT_NEAR(step.increment(0), 0.1, 1e-12);
  EXPECT_NEAR(step.increment(1), -0.1, 1e-12);
  EXPECT_NEAR(step.model_value, 0.55, 1e-12);
}

TEST(Maximin, RespectsAmplitudeBox) {
  const std::vector<double> f = {0.5};
  const std::vector<RealVector> g = {RealVector{{1.0, -1.0}}};
  const RealVector current{{0.28, -0.25}};
  const MaximinStep step = maximin_step(f, g, current, 0.3, 0.1);
  EXPECT_NEAR(step.increment(0), 0.02, 1e-12);
  EXPECT_NEAR(step.increment(1), -0.05, 1e-12);
}

TEST(Maximin, ZeroRadiusGivesZeroIncrement) {
  const std::vector<double> f = {0.4, 0.6};
  const std::vector<RealVector> g = {RealVector{{1.0}}, RealVector{{-1.0}}};
  const MaximinStep step = maximin_step(f, g, RealVector::Zero(1), 1.0, 0.0);
  EXPECT_EQ(step.increment(0), 0.0);
  EXPECT_NEAR(step.model_value, 0.4, 1e-12);
}

TEST(Maximin, MatchesBruteForceSearch) {
  std::mt19937 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 3;
    const int m = 1 + trial % 4;
    std::vector<double> f;
    std::vector<RealVector> g;
    for (int i = 0; i < m; ++i) {
      f.push_back(0.5 + 0.2 * u(rng));
      g.push_back(RealVector::NullaryExpr(n, [&] { return u(rng); }));
    }
    const RealVector current = RealVector::NullaryExpr(n, [&] { return 0.25 * u(rng); });
    const double bound = 0.3;
    const double rho = 0.1;
    const MaximinStep step = maximin_step(f, g, current, bound, rho);
    const int resolution = n == 3 ? 60 : 400;
    const double brute = oracle::brute_force_maximin(f, g, current, bound, rho, resolution);
    // The LP optimum is exact; the grid can only undershoot it by about
    // (box width / resolution) * sum|g|.
    EXPECT_GE(step.model_value, brute - 1e-12);
    EXPECT_LE(step.model_value - brute, 0.2 / resolution * n + 1e-6);
    double achieved = 1e300;
    for (int i = 0; i < m; ++i) {
      achieved = std::min(achieved, f[static_cast<std::size_t>(i)] + g[static_cast<std::size_t>(i)].dot(step.increment));
    }
    EXPECT_NEAR(step.model_value, oracle::vertex_maximin(f, g, current, bound, rho), 1e-6);
    EXPECT_NEAR(achieved, step.model_value, 1e-10);
    EXPECT_LE(step.increment.cwiseAbs().maxCoeff(), rho + 1e-12);
    EXPECT_LE((current + step.increment).cwiseAbs().maxCoeff(), bound + 1e-12);
  }
}

TEST(Maximin, ExactOnFineGridTwoSamples) {
  // Opposing gradients: optimum balances the two models exactly.
  const std::vector<double> f = {0.4, 0.6};
  const std::vector<RealVector> g = {RealVector{{1.0, 0.5}}, RealVector{{-1.0, 0.5}}};
  const MaximinStep step = maximin_step(f, g, RealVector::Zero(2), 1.0, 0.2);
  RealVector arg;
  const double brute = oracle::brute_force_maximin(f, g, RealVector::Zero(2), 1.0, 0.2, 400, &arg);
  EXPECT_NEAR(step.model_value, brute, 1e-6);
  EXPECT_NEAR(step.model_value, 0.6, 1e-12);
}

TEST(Maximin, RejectsBadInput) {
  const std::vector<double> f = {0.5};
  const std::vector<RealVector> g = {RealVector{{1.0}}};
  EXPECT_THROW(maximin_step(f, g, RealVector::Zero(2), 1.0, 0.1), NumericalError);
  EXPECT_THROW(maximin_step(f, g, RealVector::Zero(1), 1.0, -0.1), NumericalError);
  EXPECT_THROW(maximin_step({}, {}, RealVector::Zero(1), 1.0, 0.1), NumericalError);
}

TEST(SampleGrid, OneAxisInclusiveWithCentre) {
  const UncertaintySpec spec{{UncertainParam{ParamId::NuA2, 4.85, 0.05, 11}}};
  const SampleGrid grid = sample_grid(spec, SystemParams{});
  ASSERT_EQ(grid.samples.size(), 11u);
  EXPECT_NEAR(grid.samples.front().nu_a2, 4.80, 1e-15);
  EXPECT_NEAR(grid.samples.back().nu_a2, 4.90, 1e-15);
  EXPECT_NEAR(grid.samples[5].nu_a2, 4.85, 1e-15);
  EXPECT_EQ(grid.nominal_index, 5);
  EXPECT_EQ(grid.samples[3].nu_a1, 4.50);
}

TEST(SampleGrid, TwoAxesFirstSlowest) {
  const UncertaintySpec spec{{UncertainParam{ParamId::NuA2, 4.85, 0.05, 5},
                              UncertainParam{ParamId::NuA1, 4.50, 0.005, 5}}};
  const SampleGrid grid = sample_grid(spec, SystemParams{});
  ASSERT_EQ(grid.samples.size(), 25u);
  EXPECT_EQ(grid.nominal_index, 12);
  EXPECT_NEAR(grid.samples[12].nu_a2, 4.85, 1e-15);
  EXPECT_NEAR(grid.samples[12].nu_a1, 4.50, 1e-15);
  EXPECT_NEAR(grid.samples[1].nu_a1, 4.4975, 1e-15);
  EXPECT_NEAR(grid.samples[1].nu_a2, 4.80, 1e-15);
  EXPECT_NEAR(grid.coordinates[5][0], 4.825, 1e-15);
}

TEST(SampleGrid, EmptySpecIsNominalOnly) {
  const SampleGrid grid = sample_grid(UncertaintySpec{}, SystemParams{});
  ASSERT_EQ(grid.samples.size(), 1u);
  EXPECT_EQ(grid.nominal_index, 0);
}

TEST(SampleGrid, RejectsEvenCounts) {
  const UncertaintySpec spec{{UncertainParam{ParamId::NuA2, 4.85, 0.05, 4}}};
  EXPECT_THROW(sample_grid(spec, SystemParams{}), ConfigError);
}

TEST(ParamId, StringRoundTrip) {
  for (ParamId id : {ParamId::NuA1, ParamId::NuA2}) {
    EXPECT_EQ(param_id_from_string(to_string(id)), id);
  }
  EXPECT_THROW(param_id_from_string("g1"), ConfigError);
}

struct TwoLevelFixture {
  SystemParams base = resolve_drive(ModelKind::TwoLevel, SystemParams{});
  ProblemBuilder builder = problem_builder(ModelKind::TwoLevel, 0.3);
  SampleGrid grid = sample_grid(
      UncertaintySpec{{UncertainParam{ParamId::NuA2, 4.85, 0.05, 3}}}, base);
  Pulse seed = flat_top_gaussian(16, 200.0, 0.25, 4);
};

TEST(WorstCase, IsMinimumOfSamplesAndNominalMatches) {
  TwoLevelFixture fx;
  const WorstCase wc = worst_case(fx.builder, fx.grid, fx.seed);
  ASSERT_EQ(wc.per_sample.size(), 3u);
  EXPECT_EQ(wc.worst, *std::min_element(wc.per_sample.begin(), wc.per_sample.end()));
  EXPECT_NEAR(wc.per_sample[1], pulse_fidelity(fx.builder(fx.grid.samples[1]), fx.seed), 1e-15);
}

TEST(WorstCase, FilterChangesPhysicalPulseOnly) {
  TwoLevelFixture fx;
  const FilterSpec filter{15.0, 5};
  const RobustObjective objective(fx.builder, fx.grid, filter);
  const Pulse physical = objective.physical(fx.seed);
  EXPECT_EQ(physical.n_pixels(), 80);
  EXPECT_NEAR(worst_case(objective, fx.seed).per_sample[0],
              pulse_fidelity(fx.builder(fx.grid.samples[0]), physical), 1e-15);
}

TEST(RobustObjective, FilteredGradientMatchesFiniteDifferences) {
  TwoLevelFixture fx;
  const RobustObjective objective(fx.builder, fx.grid, FilterSpec{15.0, 5});
  const auto eval = objective.evaluate(fx.seed, true);
  const RealVector exact = Pulse(200.0, eval[2].gradient).flatten();
  const auto f = [&](const RealVector& theta) {
    return objective.evaluate(Pulse::unflatten(200.0, 1, theta), false)[2].fidelity;
  };
  const RealVector fd = oracle::central_difference(f, fx.seed.flatten(), 1e-6);
  EXPECT_LE((fd - exact).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Optimizer, MonotoneFeasibleAndDeterministic) {
  TwoLevelFixture fx;
  OptConfig cfg;
  cfg.max_iterations = 30;
  const OptResult a = scp_optimize(fx.builder, fx.grid, fx.seed, cfg);
  const OptResult b = scp_optimize(fx.builder, fx.grid, fx.seed, cfg);
  EXPECT_EQ(a.pulse.amps, b.pulse.amps);
  EXPECT_EQ(a.worst_case, b.worst_case);
  EXPECT_GT(a.worst_case, a.initial_worst_case);
  EXPECT_TRUE(clamp_check(a.pulse, 0.3).ok);
  double best = a.trace.front().worst_case;
  for (std::size_t k = 1; k < a.trace.size(); ++k) {
    const IterationRecord& r = a.trace[k];
    if (r.accepted) {
      EXPECT_GT(r.worst_case, best);
      best = r.worst_case;
    }
    EXPECT_LE(r.trust_radius, 0.6);
  }
  EXPECT_EQ(best, a.worst_case);
  EXPECT_NEAR(worst_case(fx.builder, fx.grid, a.pulse).worst, a.worst_case, 1e-15);
}

TEST(Optimizer, TrustRadiusFollowsAcceptance) {
  TwoLevelFixture fx;
  OptConfig cfg;
  cfg.max_iterations = 20;
  const OptResult r = scp_optimize(fx.builder, fx.grid, fx.seed, cfg);
  EXPECT_NEAR(r.trace[0].trust_radius, 0.03, 1e-15);
  for (std::size_t k = 1; k + 1 < r.trace.size(); ++k) {
    const double expected = r.trace[k].accepted ? std::min(0.6, r.trace[k].trust_radius * 1.5)
                                                : r.trace[k].trust_radius * 0.5;
    EXPECT_NEAR(r.trace[k + 1].trust_radius, expected, 1e-15);
  }
}

TEST(Optimizer, OptimalSeedStaysPut) {
  const Operator xz = numkit::kron(numkit::pauli_x(), numkit::pauli_z());
  const ControlProblem cp = ControlProblem::from_subspace(
      (std::numbers::pi / 4.0 / 40.0) * xz, {numkit::kron(numkit::pauli_x(), numkit::identity(2))},
      numkit::identity(4), cross_resonance_target(), 0.3);
  const RobustObjective objective(std::vector<ControlProblem>{cp}, std::nullopt);
  const Pulse seed(40.0, 1, 4);
  OptConfig cfg;
  cfg.max_iterations = 200;
  const OptResult r = scp_optimize(objective, seed, cfg);
  EXPECT_NEAR(r.worst_case, 1.0, 1e-12);
  EXPECT_EQ(r.pulse.amps, seed.amps);
  EXPECT_EQ(r.termination, Termination::RadiusFloor);
}

TEST(Optimizer, ZeroIterationsReturnsSeed) {
  TwoLevelFixture fx;
  OptConfig cfg;
  cfg.max_iterations = 0;
  const OptResult r = scp_optimize(fx.builder, fx.grid, fx.seed, cfg);
  EXPECT_EQ(r.pulse.amps, fx.seed.amps);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.termination, Termination::MaxIterations);
}

TEST(Optimizer, RejectsInfeasibleSeedAndBadConfig) {
  TwoLevelFixture fx;
  Pulse loud = fx.seed;
  loud.amps(0, 3) = 0.5;
  EXPECT_THROW(scp_optimize(fx.builder, fx.grid, loud, OptConfig{}), ConfigError);
  OptConfig bad;
  bad.shrink_factor = 1.2;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Optimizer, IterationCsv) {
  const std::vector<IterationRecord> trace = {{0, true, 0.5, 0.03}, {1, false, 0.4, 0.045}};
  std::stringstream ss;
  write_iteration_csv(ss, trace);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "iter,accepted,worst_case_F,trust_radius");
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 4), "0,1,");
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 4), "1,0,");
}

TEST(Termination, Strings) {
  EXPECT_EQ(to_string(Termination::RadiusFloor), "trust_radius_floor");
  EXPECT_EQ(to_string(Termination::MaxIterations), "max_iterations");
  EXPECT_EQ(to_string(Termination::Stall), "stall");
}

}  // namespace
