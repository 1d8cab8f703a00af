#include "progeq/montecarlo.hpp"

#include <cmath>
#include <thread>

namespace progeq {

namespace {
constexpr std::uint64_t kSharedSalt = 0x5348415245440001ULL;
constexpr std::uint64_t kPlayerSalt = 0x504C415945520001ULL;
}  // namespace

std::uint64_t trial_shared_seed(std::uint64_t base, long long trial) {
  return mix_u64(base, mix_u64(kSharedSalt, static_cast<std::uint64_t>(trial)));
}

std::uint64_t trial_player_seed(std::uint64_t base, long long trial,
                                int player) {
  return mix_u64(base, mix_u64(kPlayerSalt + player,
                               static_cast<std::uint64_t>(trial)));
}

namespace {

TrialResult run_one(const std::vector<ProgramHandle>& profile, Mode mode,
                    std::uint64_t base_seed, long long t,
                    const TrialConfig& config) {
  std::vector<std::uint64_t> seeds(profile.size());
  for (std::size_t j = 0; j < profile.size(); ++j)
    seeds[j] = trial_player_seed(base_seed, t, static_cast<int>(j));
  if (mode == Mode::Correlated)
    return run_trial_correlated(profile, trial_shared_seed(base_seed, t),
                                seeds, config);
  return run_trial_uncorrelated(profile, seeds, config);
}

// All tallies are exact integers, so merged results do not depend on the
// number of workers; means are derived from the counts afterwards.
struct Accum {
  long long halted = 0;
  std::map<ActionProfile, long long> counts;
  std::vector<std::vector<long long>> marginals;
  long long total_calls = 0, max_depth_sum = 0, apply_star = 0, memo_hits = 0;
  long long max_distinct = 0;

  void init(const NormalFormGame& game) {
    int n = game.player_count();
    marginals.resize(n);
    for (int i = 0; i < n; ++i)
      marginals[i].assign(game.action_count(i), 0);
  }

  void add(const NormalFormGame&, const TrialResult& r) {
    total_calls += r.trace.total_calls;
    max_depth_sum += r.trace.max_depth;
    apply_star += r.trace.apply_star_calls;
    memo_hits += r.trace.memo_hits;
    max_distinct = std::max(max_distinct, r.trace.distinct_memo_keys);
    if (!r.failures.empty()) return;
    ActionProfile a(r.actions.size());
    for (std::size_t j = 0; j < r.actions.size(); ++j) a[j] = *r.actions[j];
    ++halted;
    ++counts[a];
    for (std::size_t j = 0; j < a.size(); ++j) ++marginals[j][a[j]];
  }

  void merge(const Accum& o) {
    halted += o.halted;
    for (const auto& [a, c] : o.counts) counts[a] += c;
    for (std::size_t i = 0; i < marginals.size(); ++i)
      for (std::size_t a = 0; a < marginals[i].size(); ++a)
        marginals[i][a] += o.marginals[i][a];
    total_calls += o.total_calls;
    max_depth_sum += o.max_depth_sum;
    apply_star += o.apply_star;
    memo_hits += o.memo_hits;
    max_distinct = std::max(max_distinct, o.max_distinct);
  }
};

}  // namespace

OutcomeEstimate estimate_outcomes(const NormalFormGame& game,
                                  const std::vector<ProgramHandle>& profile,
                                  Mode mode, long long trials,
                                  std::uint64_t base_seed,
                                  const TrialConfig& config, int threads) {
  if (static_cast<int>(profile.size()) != game.player_count())
    throw std::invalid_argument("profile arity does not match game");
  threads = std::max(1, threads);
  std::vector<Accum> parts(threads);
  for (auto& p : parts) p.init(game);
  auto worker = [&](int w) {
    // Fixed interleaved assignment keeps results independent of `threads`
    // only via merge order; trial seeds depend on the trial index alone.
    for (long long t = w; t < trials; t += threads)
      parts[w].add(game, run_one(profile, mode, base_seed, t, config));
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  Accum acc = std::move(parts[0]);
  for (int w = 1; w < threads; ++w) acc.merge(parts[w]);

  OutcomeEstimate out;
  out.trials = trials;
  out.halted = acc.halted;
  out.non_halt_rate =
      trials ? static_cast<double>(trials - acc.halted) / trials : 0;
  out.counts = std::move(acc.counts);
  out.marginal_counts = std::move(acc.marginals);
  int n = game.player_count();
  out.mean_payoff.assign(n, 0);
  out.payoff_se.assign(n, 0);
  if (acc.halted > 0) {
    // Exact moments from the integer outcome counts.
    std::vector<Rat> sum(n, Rat(0)), sum_sq(n, Rat(0));
    for (const auto& [a, c] : out.counts) {
      const PayoffVector& u = game.payoff(a);
      for (int i = 0; i < n; ++i) {
        sum[i] += c * u[i];
        sum_sq[i] += c * u[i] * u[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      Rat mean = sum[i] / acc.halted;
      out.mean_payoff[i] = to_double(mean);
      if (acc.halted > 1) {
        Rat var = (sum_sq[i] - acc.halted * mean * mean) / (acc.halted - 1);
        if (var < 0) var = 0;
        out.payoff_se[i] = std::sqrt(to_double(var / acc.halted));
      }
    }
  }
  out.mean_total_calls = static_cast<double>(acc.total_calls) / trials;
  out.mean_max_depth = static_cast<double>(acc.max_depth_sum) / trials;
  out.mean_apply_star_calls = static_cast<double>(acc.apply_star) / trials;
  out.mean_memo_hits = static_cast<double>(acc.memo_hits) / trials;
  out.max_distinct_memo_keys = acc.max_distinct;
  return out;
}

std::vector<TrialResult> collect_trials(
    const std::vector<ProgramHandle>& profile, Mode mode, long long trials,
    std::uint64_t base_seed, const TrialConfig& config) {
  std::vector<TrialResult> out;
  out.reserve(trials);
  for (long long t = 0; t < trials; ++t)
    out.push_back(run_one(profile, mode, base_seed, t, config));
  return out;
}

TraceStats trace_statistics(const std::vector<TrialResult>& results) {
  TraceStats s;
  s.trials = static_cast<long long>(results.size());
  long long halted = 0;
  for (const auto& r : results) {
    if (r.failures.empty()) ++halted;
    ++s.depth_law[r.trace.max_depth];
    s.mean_total_calls += static_cast<double>(r.trace.total_calls);
    s.mean_max_depth += r.trace.max_depth;
    s.mean_memo_hits += static_cast<double>(r.trace.memo_hits);
    s.max_distinct_memo_keys =
        std::max(s.max_distinct_memo_keys, r.trace.distinct_memo_keys);
  }
  if (s.trials) {
    s.halt_rate = static_cast<double>(halted) / s.trials;
    s.mean_total_calls /= s.trials;
    s.mean_max_depth /= s.trials;
    s.mean_memo_hits /= s.trials;
  }
  return s;
}

}  // namespace progeq
