#pragma once

#include "progeq/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace progeq {

using ActionProfile = std::vector<int>;
using PayoffVector = std::vector<Rat>;

// Finite normal-form game with exact rational payoffs.  The tensor is stored
// flat in row-major order over the action profile (player 0 slowest).
class NormalFormGame {
 public:
  NormalFormGame(std::vector<std::vector<std::string>> action_labels,
                 std::vector<PayoffVector> cells);

  int player_count() const { return static_cast<int>(labels_.size()); }
  int action_count(int player) const {
    return static_cast<int>(labels_[player].size());
  }
  const std::vector<std::string>& actions(int player) const {
    return labels_[player];
  }
  const PayoffVector& payoff(const ActionProfile& a) const;
  Rat payoff(int player, const ActionProfile& a) const {
    return payoff(a)[player];
  }
  std::size_t profile_count() const { return cells_.size(); }
  ActionProfile profile_at(std::size_t flat_index) const;
  std::size_t flat_index(const ActionProfile& a) const;
  int action_index(int player, const std::string& label) const;

  Rat max_payoff() const;
  Rat min_payoff() const;

 private:
  std::vector<std::vector<std::string>> labels_;
  std::vector<PayoffVector> cells_;
};

struct MixedStrategy {
  std::vector<Rat> probs;

  static MixedStrategy pure(int action, int action_count);
  bool valid() const;
};

using StrategyProfile = std::vector<MixedStrategy>;

struct JointOutcomeDistribution {
  std::map<ActionProfile, Rat> mass;

  bool valid() const;
  // Per-player marginals.
  std::vector<MixedStrategy> marginals(const NormalFormGame& game) const;
};

struct MinimaxResult {
  Rat value;
  StrategyProfile punisher_profile;  // entry for player i is unused
  bool certified = false;            // exact (2-player LP) vs grid bound
};

// u_i(a) = sum_j u_{ij}(a_j); components[i][j][a_j], normalized so that
// u_{ij}(first action) = 0 for j != i.
struct SeparableDecomposition {
  std::vector<std::vector<std::vector<Rat>>> components;
};

struct FeasibilityReport {
  bool individually_rational = false;
  bool strictly_individually_rational = false;
  bool feasible_with_corr = false;           // exact LP over rationals
  bool feasible_no_corr = false;             // grid approximation
  double no_corr_tolerance = 0.0;
  JointOutcomeDistribution corr_witness;     // when feasible_with_corr
};

PayoffVector expected_utility(const NormalFormGame& game,
                              const StrategyProfile& profile);

PayoffVector expected_utility_joint(const NormalFormGame& game,
                                    const JointOutcomeDistribution& joint);

// 2-player: exact LP over rationals (certified). n >= 3: grid search over
// product simplices with refinement; upper bound on the true minimax.
MinimaxResult minimax(const NormalFormGame& game, int player,
                      int grid_resolution = 64, int refine_rounds = 3);

FeasibilityReport rationality_and_feasibility(const NormalFormGame& game,
                                              const PayoffVector& v,
                                              int grid_resolution = 16);

std::optional<SeparableDecomposition> separable_decomposition(
    const NormalFormGame& game);

}  // namespace progeq
