#pragma once

#include "progeq/game.hpp"
#include "progeq/vm.hpp"

#include <map>

namespace progeq {

enum class Mode { Correlated, Uncorrelated };

struct OutcomeEstimate {
  long long trials = 0;
  long long halted = 0;
  double non_halt_rate = 0;
  std::map<ActionProfile, long long> counts;                // halted trials
  std::vector<std::vector<long long>> marginal_counts;      // [player][action]
  std::vector<double> mean_payoff;                          // over halted
  std::vector<double> payoff_se;
  double mean_total_calls = 0;
  double mean_max_depth = 0;
  double mean_apply_star_calls = 0;
  double mean_memo_hits = 0;
  long long max_distinct_memo_keys = 0;
};

// Seeds for trial `t` of a run with base seed `b` (exposed so replays and
// diagnostics can reproduce a single trial).
std::uint64_t trial_shared_seed(std::uint64_t base, long long trial);
std::uint64_t trial_player_seed(std::uint64_t base, long long trial,
                                int player);

// Independent seeded trials; deterministic given (base_seed, config, threads
// do not affect results).  Non-halting trials are excluded from payoff and
// outcome tallies and reported through non_halt_rate.
OutcomeEstimate estimate_outcomes(const NormalFormGame& game,
                                  const std::vector<ProgramHandle>& profile,
                                  Mode mode, long long trials,
                                  std::uint64_t base_seed,
                                  const TrialConfig& config, int threads = 1);

// Raw trials for trace-level analysis (screening replays, depth laws).
std::vector<TrialResult> collect_trials(
    const std::vector<ProgramHandle>& profile, Mode mode, long long trials,
    std::uint64_t base_seed, const TrialConfig& config);

struct TraceStats {
  long long trials = 0;
  double halt_rate = 0;
  std::map<int, long long> depth_law;
  double mean_total_calls = 0;
  double mean_max_depth = 0;
  double mean_memo_hits = 0;
  long long max_distinct_memo_keys = 0;
};

TraceStats trace_statistics(const std::vector<TrialResult>& results);

}  // namespace progeq
