#pragma once

#include "progeq/bots.hpp"
#include "progeq/game.hpp"
#include "progeq/montecarlo.hpp"

namespace progeq {

// The repeated game with correlating signals and screening: the round count
// is geometric with parameter eps, players observe screened histories, and
// utilities accrue from the unscreened actions.
struct RepeatedGameConfig {
  const NormalFormGame* game = nullptr;
  double eps = 0.1;
  long long max_rounds = 1'000'000;
};

// Coupled screened/unscreened policy for one player.  Both maps read the
// screened history and the round's correlating signal q.  tau is a
// distribution over actions; tau_star a subdistribution, with the deficit
// mass emitted as the sentinel R_i.  Compatibility (tau_star <= tau
// pointwise) is asserted on every draw.
struct PolicyPair {
  std::function<std::vector<Rat>(const ScreenedHistory&, double q)> tau;
  std::function<std::vector<Rat>(const ScreenedHistory&, double q)> tau_star;
};

struct RepeatedEstimate {
  long long episodes = 0;
  std::vector<double> mean_total;  // per-player mean total utility
  std::vector<double> se_total;
  double mean_length = 0;
  std::map<int, long long> length_law;
};

RepeatedEstimate simulate_repeated(const RepeatedGameConfig& config,
                                   const std::vector<PolicyPair>& pairs,
                                   long long episodes, std::uint64_t seed);

// A deterministic profile sequence realizing target payoffs v in discounted
// average, with every continuation tail certified within delta.
struct ActionSequenceSchedule {
  bool ok = false;
  std::string message;
  std::vector<ActionProfile> sequence;  // cycled beyond its length
  PayoffVector target;
  Rat eps;
  Rat delta;
  // Exact sup over all continuation values of the cycled sequence.  Per-round
  // granularity floors this at about eps*|u - v|, so pick delta >= that.
  Rat max_tail_error;
};

// Exact LP decomposition of v over pure-profile payoffs followed by
// largest-remaining-deficit scheduling; continuation values of the periodic
// extension are re-checked in exact rationals.
ActionSequenceSchedule construct_action_sequence(const NormalFormGame& game,
                                                 const PayoffVector& v,
                                                 const Rat& eps,
                                                 const Rat& delta);

// Grim folk-theorem policies: follow the schedule; the first deviator
// (sentinels included) is punished forever with the independent minimax
// profile, the screened policy emitting R_i exactly when its punishment
// strategy is mixed.
std::vector<PolicyPair> synthesize_folk_policies(
    const NormalFormGame& game, const ActionSequenceSchedule& schedule);

// The associated G_eps policy of a deterministic (never private-reading)
// program-side policy: the signal q is mapped to the grounding real the
// program would have seen (eps*q on the empty history, eps+(1-eps)*q after).
PolicyPair associated_policy_pair(const Policy& pi, int player, int n_players,
                                  double eps);

struct CorrespondenceReport {
  std::vector<double> program_mean, program_se;
  std::vector<double> scaled_repeated_mean, scaled_repeated_se;
  bool pass = false;  // 3-sigma CI overlap per player
};

// E[u | programs] vs eps * E_{G_eps}[totals | associated policies], both by
// Monte Carlo with the given trial/episode count per side.
CorrespondenceReport correspondence_check(
    const NormalFormGame& game, const std::vector<ProgramHandle>& programs,
    const std::vector<PolicyPair>& associated, double eps, long long trials,
    std::uint64_t seed, const TrialConfig& trial_config);

struct LastActionReport {
  std::vector<std::vector<long long>> program_marginal;   // [player][action]
  std::vector<std::vector<long long>> repeated_marginal;  // last-round law
  std::vector<double> program_payoff_mean, program_payoff_se;
  std::vector<double> repeated_scaled_mean, repeated_scaled_se;
  double min_marginal_chi2_p = 1.0;
  bool marginals_match = false;   // chi-square p > 0.01 per player
  bool payoffs_match = false;     // 3-sigma overlap (separable games)
};

// Uncorrelated bots vs the repeated game driven by the same policies with
// per-round grounding reals: per-player last-action marginals, plus the
// payoff identity E_G[u] = eps * E_{G_eps}[u] for separable games.
LastActionReport last_action_law(const NormalFormGame& game,
                                 const std::vector<Policy>& policies,
                                 double eps, long long trials,
                                 std::uint64_t seed,
                                 const TrialConfig& trial_config);

}  // namespace progeq
