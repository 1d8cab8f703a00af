#pragma once

#include "progeq/rational.hpp"

#include <vector>

namespace progeq {

// Exact two-phase simplex over rationals (Bland's rule, so it terminates).
// Problems here are tiny: equilibrium decompositions and 2-player minimax.
//
// Solves  min c.x  s.t.  A x = b,  x >= 0.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded } status;
  std::vector<Rat> x;  // empty unless Optimal
  Rat value = 0;
};

LpResult lp_minimize(const std::vector<Rat>& c,
                     const std::vector<std::vector<Rat>>& A,
                     const std::vector<Rat>& b);

// Convenience: any x >= 0 with A x = b.
LpResult lp_feasible(const std::vector<std::vector<Rat>>& A,
                     const std::vector<Rat>& b);

}  // namespace progeq
