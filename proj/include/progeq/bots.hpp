#pragma once

#include "progeq/game.hpp"
#include "progeq/vm.hpp"

#include <functional>
#include <memory>

namespace progeq {

// History rows as seen by policies: per round, one symbol per player, either
// an action index or the sentinel R_j.
using HistorySymbol = BotOutput;
using ScreenedHistory = std::vector<std::vector<HistorySymbol>>;

bool is_action(const HistorySymbol& s, int action);
bool is_screened(const HistorySymbol& s);

struct PolicyInput {
  const ScreenedHistory& history;
  // Correlated bots supply {r_0}; uncorrelated bots supply r_0..r_T.
  const std::vector<double>& r;
  // Correlated setting only (null otherwise); reads trigger screening.
  PrivateStream* private_stream = nullptr;
  int player = 0;
};

struct Policy {
  std::function<int(const PolicyInput&)> act;
  bool reads_private = false;
};

// Samples an action from a mixed strategy with a uniform [0,1) variate.
int sample_mixed(const MixedStrategy& s, double u);

// --- policy constructors -------------------------------------------------

Policy constant_policy(int action);

// Cooperate while every observed symbol is C; hire the lawyer otherwise
// (sentinels count as deviations).
Policy pirates_policy();

// Player 1 plays C until someone defects, then punishes the first defector
// with P_j; players 2 and 3 play C until any defection, then D.
Policy intro_policy(int player);

// Player 1 shares (K) exactly when the round index is odd and player 2's
// last action was G; player 2 alternates C (odd rounds) and G (even rounds).
Policy trust_mixed_policy(int player);

// Follow a cyclic profile sequence; on the first observed deviation (wrong
// action or sentinel) by j, punish j forever with this player's component of
// the supplied punisher profile.  A first deviation by this player itself
// switches to a fixed best response against the punishment.  Mixed
// punishment draws from x_0 (correlated) or r_0 (uncorrelated).
Policy sequence_follower_policy(const NormalFormGame& game,
                                std::vector<ActionProfile> cycle, int player,
                                std::vector<StrategyProfile> punisher_for);

// sequence_follower with a single-profile cycle and minimax punishers.
Policy grim_minimax_policy(const NormalFormGame& game,
                           const ActionProfile& target, int player);

// Variant keyed on the deviator's first off-path action rather than a fixed
// punisher (the punishment-map construction).
Policy sequence_follower_with_map_policy(
    const NormalFormGame& game, std::vector<ActionProfile> cycle, int player,
    std::vector<std::vector<MixedStrategy>> punishment_map);

// --- pi-bot builders ------------------------------------------------------

// Algorithm-style bot: draw T = min{t : r_t < eps}; replay rows 1..T by
// simulating every seat (self included) on the matching stream suffix;
// finish with pi on the screened history.  Correlated bots use apply* and
// forward the private stream; uncorrelated bots use plain apply and hand pi
// the grounding reals r_0..r_T.
ProgramHandle build_correlated_bot(int player, int n_players, double eps,
                                   Policy pi);
ProgramHandle build_uncorrelated_bot(int player, int n_players, double eps,
                                     Policy pi);

// --- reference bots -------------------------------------------------------

// Grounds with probability eps; otherwise simulates every opponent on a
// disjoint partition of its stream and plays coop_action iff all simulations
// returned coop_action (the naive n-player extension; halts with the
// eps/(1-eps) fixed-point probability when eps < 1/2).
ProgramHandle build_naive_sim_bot(int player, int n_players, double eps,
                                  int coop_action, int defect_action);

// Grounds with probability eps on ground_action; otherwise copies one
// uniformly chosen other player simulated two elements down the stream.
ProgramHandle build_random_opponent_sim_bot(int player, int n_players,
                                            double eps, int ground_action);

// Two-player: simulates the opponent on both halves of a stream partition
// and plays yes_action iff both samples equal trigger_action.
ProgramHandle build_double_sample_bot(int player, int opponent,
                                      int trigger_action, int yes_action,
                                      int no_action);

ProgramHandle build_constant_bot(int player, int action);

// Plays action `a` when its stream's element 0 is below q, else `b`; each
// simulation re-randomizes (used for the chained-simulation deviations).
ProgramHandle build_stream_mix_bot(int player, double q, int a, int b);

// --- deviation bots -------------------------------------------------------

// One-shot mixture deviation against pi-bot opponents: recomputes T from the
// stream, deviates to s_dev (randomized by r_{T+1}) with probability q, and
// defers to `base` otherwise.
ProgramHandle build_q_mix_bot(ProgramHandle base, double eps, double q,
                              MixedStrategy s_dev);

// Depth-threshold deviation: runs `base` once while measuring its maximum
// nested apply depth T_i; keeps the base action when T_i < t0, otherwise
// randomizes d from r_0.
ProgramHandle build_threshold_bot(ProgramHandle base, int t0, MixedStrategy d);

// --- general simulationist bot (delta-schedules) --------------------------

struct GenSimConfig {
  int player = 0;
  int n_players = 2;
  std::vector<DeltaSchedule> schedules;  // one per player
  std::size_t t0 = 1;  // rows below t0 take k samples, others one
  int k = 1;
  // When set, each sample is cross-checked against the reference program for
  // that seat re-run on the same view (substitution semantics).
  std::shared_ptr<std::vector<ProgramHandle>> reference_profile;
};

// samples[t-1][j][l]: l-th sampled action of seat j at history row t (own
// column left empty); consistent mirrors it when checking is enabled.
using GenSimPolicy = std::function<int(
    const std::vector<std::vector<std::vector<int>>>& samples,
    const std::vector<std::vector<std::vector<bool>>>& consistent, double r0)>;

ProgramHandle build_general_simulationist_bot(GenSimConfig cfg,
                                              GenSimPolicy pi);

// Re-runs `reference` on the same inputs (its inner calls resolve against
// the concrete profile in ctx) and reports agreement with `observed`.
bool consistent_check(int observed, const ProgramHandle& reference,
                      ExecCtx& ctx, const StreamView& view,
                      PrivateStream& priv);

// Fresh identity token for hand-rolled ProgramHandles.
std::uint64_t next_bot_identity();

}  // namespace progeq
