#pragma once

#include "pulseforge/numkit.hpp"

namespace pulseforge::lp {

/// maximize c^T x  subject to  A x <= b,  lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  RealMatrix a;
  RealVector b;
  RealVector c;
  RealVector lower;
  RealVector upper;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  RealVector x;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense bounded-variable primal simplex. Phase 1 (artificial variables) runs
/// only for rows whose slack would start negative. Entering and leaving
/// variables follow Bland's smallest-index rule, so the pivot sequence is
/// deterministic and cannot cycle. Throws NumericalError when the iteration
/// cap is reached.
Solution solve(const LinearProgram& problem, int max_iterations = 100000);

}  // namespace pulseforge::lp
