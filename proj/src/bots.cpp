#include "progeq/bots.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

namespace progeq {

namespace {

constexpr std::uint64_t kMaxTimeStepScan = 1 << 22;

// T = min{t : r_t < eps} on the given view.
std::uint64_t grounding_time(const StreamView& view, double eps) {
  for (std::uint64_t t = 0; t < kMaxTimeStepScan; ++t)
    if (view.element(t) < eps) return t;
  throw std::runtime_error("grounding scan exceeded its guard");
}

int best_pure_response(const NormalFormGame& game, int player,
                       const StrategyProfile& others) {
  int best_a = 0;
  Rat best_v;
  for (int a = 0; a < game.action_count(player); ++a) {
    StrategyProfile p = others;
    p[player] = MixedStrategy::pure(a, game.action_count(player));
    Rat v = expected_utility(game, p)[player];
    if (a == 0 || v > best_v) {
      best_v = v;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace

bool is_action(const HistorySymbol& s, int action) {
  const int* a = std::get_if<int>(&s);
  return a && *a == action;
}

bool is_screened(const HistorySymbol& s) {
  return std::holds_alternative<Sentinel>(s);
}

int sample_mixed(const MixedStrategy& s, double u) {
  double acc = 0;
  for (std::size_t a = 0; a < s.probs.size(); ++a) {
    acc += to_double(s.probs[a]);
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(s.probs.size()) - 1;
}

std::uint64_t next_bot_identity() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// --- policies --------------------------------------------------------------

Policy constant_policy(int action) {
  return Policy{[action](const PolicyInput&) { return action; }, false};
}

Policy pirates_policy() {
  return Policy{[](const PolicyInput& in) {
                  for (const auto& row : in.history)
                    for (const auto& sym : row)
                      if (!is_action(sym, 0)) return 2;  // L
                  return 0;                              // C
                },
                false};
}

Policy intro_policy(int player) {
  return Policy{[player](const PolicyInput& in) {
                  // Scan for the first defection by players 2 or 3 (columns
                  // 1 and 2); player 1's own transfers are payoff-neutral
                  // for itself and are not punished.
                  for (const auto& row : in.history)
                    for (int j = 1; j < 3; ++j)
                      if (is_action(row[j], 1) || is_screened(row[j])) {
                        if (player == 0) return j;  // P2 = 1, P3 = 2
                        return 1;                   // D
                      }
                  return 0;  // C
                },
                false};
}

Policy trust_mixed_policy(int player) {
  if (player == 0) {
    // K iff round index t (= history length) is odd and player 2 just
    // played G.  K = 0, S = 1.
    return Policy{[](const PolicyInput& in) {
                    std::size_t t = in.history.size();
                    if (t % 2 == 1 && is_action(in.history.back()[1], 1))
                      return 0;
                    return 1;
                  },
                  false};
  }
  // Player 2: C on even history lengths (odd rounds), G otherwise.
  // C = 0, G = 1.
  return Policy{[](const PolicyInput& in) {
                  return in.history.size() % 2 == 0 ? 0 : 1;
                },
                false};
}

namespace {

// Shared skeleton for the sequence-following policies: find the first
// off-path symbol, then delegate the punishment choice.
Policy make_sequence_policy(
    const NormalFormGame& game, std::vector<ActionProfile> cycle, int player,
    std::function<MixedStrategy(int deviator, int observed)> punish,
    std::function<int(int deviator)> self_response, bool mixes) {
  if (cycle.empty()) throw std::invalid_argument("empty profile cycle");
  int n = game.player_count();
  auto act = [cycle = std::move(cycle), player, punish = std::move(punish),
              self_response = std::move(self_response), n](const PolicyInput& in) {
    int deviator = -1;
    int observed = -1;
    for (std::size_t t = 0; t < in.history.size() && deviator < 0; ++t) {
      const ActionProfile& expect = cycle[t % cycle.size()];
      for (int j = 0; j < n; ++j) {
        const HistorySymbol& sym = in.history[t][j];
        if (is_action(sym, expect[j])) continue;
        deviator = j;
        observed = is_screened(sym) ? -1 : std::get<int>(sym);
        break;
      }
    }
    if (deviator < 0)
      return cycle[in.history.size() % cycle.size()][player];
    if (deviator == player) return self_response(deviator);
    MixedStrategy s = punish(deviator, observed);
    for (std::size_t a = 0; a < s.probs.size(); ++a)
      if (s.probs[a] == 1) return static_cast<int>(a);
    double u = in.private_stream ? in.private_stream->element(0)
                                 : (in.r.empty() ? 0.0 : in.r[0]);
    return sample_mixed(s, u);
  };
  return Policy{std::move(act), mixes};
}

bool any_mixed(const std::vector<StrategyProfile>& punishers, int player) {
  for (const auto& prof : punishers)
    for (const Rat& p : prof[player].probs)
      if (p != 0 && p != 1) return true;
  return false;
}

}  // namespace

Policy sequence_follower_policy(const NormalFormGame& game,
                                std::vector<ActionProfile> cycle, int player,
                                std::vector<StrategyProfile> punisher_for) {
  std::vector<int> responses(game.player_count(), 0);
  {
    StrategyProfile others = punisher_for[player];
    responses[player] = best_pure_response(game, player, others);
  }
  bool mixes = any_mixed(punisher_for, player);
  return make_sequence_policy(
      game, std::move(cycle), player,
      [punisher_for, player](int deviator, int) {
        return punisher_for[deviator][player];
      },
      [responses, player](int) { return responses[player]; }, mixes);
}

Policy grim_minimax_policy(const NormalFormGame& game,
                           const ActionProfile& target, int player) {
  std::vector<StrategyProfile> punishers;
  for (int j = 0; j < game.player_count(); ++j)
    punishers.push_back(minimax(game, j).punisher_profile);
  return sequence_follower_policy(game, {target}, player, std::move(punishers));
}

Policy sequence_follower_with_map_policy(
    const NormalFormGame& game, std::vector<ActionProfile> cycle, int player,
    std::vector<std::vector<MixedStrategy>> punishment_map) {
  bool mixes = false;
  for (const auto& row : punishment_map)
    for (const auto& s : row)
      for (const Rat& p : s.probs)
        if (p != 0 && p != 1) mixes = true;
  return make_sequence_policy(
      game, std::move(cycle), player,
      [map = std::move(punishment_map)](int deviator, int observed) {
        const auto& row = map[deviator];
        if (observed < 0 || observed >= static_cast<int>(row.size()))
          observed = 0;  // screened deviation: punish the first action's entry
        return row[observed];
      },
      [](int) { return 0; }, mixes);
}

// --- pi-bot builders --------------------------------------------------------

ProgramHandle build_correlated_bot(int player, int n_players, double eps,
                                   Policy pi) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [player, n_players, eps, pi = std::move(pi)](
                   ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    std::uint64_t T = grounding_time(view, eps);
    ScreenedHistory hist(T, std::vector<HistorySymbol>(n_players));
    for (std::uint64_t t = 1; t <= T; ++t) {
      StreamView sub = view.suffix(T + 1 - t);
      for (int j = 0; j < n_players; ++j)
        hist[t - 1][j] = ctx.apply_star(j, sub, priv);
    }
    std::vector<double> r{view.element(0)};
    return pi.act(PolicyInput{hist, r, &priv, player});
  };
  return h;
}

ProgramHandle build_uncorrelated_bot(int player, int n_players, double eps,
                                     Policy pi) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [player, n_players, eps, pi = std::move(pi)](
                   ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    std::uint64_t T = grounding_time(view, eps);
    ScreenedHistory hist(T, std::vector<HistorySymbol>(n_players));
    for (std::uint64_t t = 1; t <= T; ++t) {
      StreamView sub = view.suffix(T + 1 - t);
      for (int j = 0; j < n_players; ++j)
        hist[t - 1][j] = HistorySymbol{ctx.apply(j, sub, priv)};
    }
    std::vector<double> r(T + 1);
    for (std::uint64_t t = 0; t <= T; ++t) r[t] = view.element(t);
    return pi.act(PolicyInput{hist, r, nullptr, player});
  };
  return h;
}

// --- reference bots ---------------------------------------------------------

ProgramHandle build_naive_sim_bot(int player, int n_players, double eps,
                                  int coop_action, int defect_action) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [=](ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    if (view.element(0) < eps) return coop_action;
    std::uint64_t slot = 1;
    bool all_coop = true;
    for (int j = 0; j < n_players; ++j) {
      if (j == player) continue;
      int a = ctx.apply(j, partition(view, slot, n_players - 1), priv);
      all_coop = all_coop && a == coop_action;
      ++slot;
    }
    return all_coop ? coop_action : defect_action;
  };
  return h;
}

ProgramHandle build_random_opponent_sim_bot(int player, int n_players,
                                            double eps, int ground_action) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [=](ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    if (view.element(0) < eps) return ground_action;
    double u = view.element(1);
    int pick = std::min(n_players - 2,
                        static_cast<int>(u * (n_players - 1)));
    int target = -1;
    for (int j = 0; j < n_players; ++j) {
      if (j == player) continue;
      if (pick-- == 0) {
        target = j;
        break;
      }
    }
    return ctx.apply(target, view.suffix(2), priv);
  };
  return h;
}

ProgramHandle build_double_sample_bot(int player, int opponent,
                                      int trigger_action, int yes_action,
                                      int no_action) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [=](ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    int a = ctx.apply(opponent, partition(view, 1, 2), priv);
    int b = ctx.apply(opponent, partition(view, 2, 2), priv);
    return (a == trigger_action && b == trigger_action) ? yes_action
                                                        : no_action;
  };
  return h;
}

ProgramHandle build_constant_bot(int player, int action) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [action](ExecCtx&, const StreamView&, PrivateStream&) {
    return action;
  };
  return h;
}

ProgramHandle build_stream_mix_bot(int player, double q, int a, int b) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [=](ExecCtx&, const StreamView& view, PrivateStream&) {
    return view.element(0) < q ? a : b;
  };
  return h;
}

// --- deviation bots ---------------------------------------------------------

ProgramHandle build_q_mix_bot(ProgramHandle base, double eps, double q,
                              MixedStrategy s_dev) {
  ProgramHandle h;
  h.player = base.player;
  h.identity = next_bot_identity();
  h.behavior = [base = std::move(base), eps, q, s_dev = std::move(s_dev)](
                   ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    std::uint64_t T = grounding_time(view, eps);
    double u = view.element(T + 1);
    if (u < q) return sample_mixed(s_dev, u / q);
    return base.behavior(ctx, view, priv);
  };
  return h;
}

ProgramHandle build_threshold_bot(ProgramHandle base, int t0,
                                  MixedStrategy d) {
  ProgramHandle h;
  h.player = base.player;
  h.identity = next_bot_identity();
  h.behavior = [base = std::move(base), t0, d = std::move(d)](
                   ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    // Measure the base bot's maximum nested apply depth relative to here.
    int base_depth = ctx.depth;
    int saved_max = ctx.trace.max_depth;
    ctx.trace.max_depth = ctx.depth;
    int action = base.behavior(ctx, view, priv);
    int measured = ctx.trace.max_depth - base_depth;
    ctx.trace.max_depth = std::max(saved_max, ctx.trace.max_depth);
    if (measured < t0) return action;
    return sample_mixed(d, view.element(0));
  };
  return h;
}

// --- general simulationist bot -----------------------------------------------

bool consistent_check(int observed, const ProgramHandle& reference,
                      ExecCtx& ctx, const StreamView& view,
                      PrivateStream& priv) {
  return reference.behavior(ctx, view, priv) == observed;
}

ProgramHandle build_general_simulationist_bot(GenSimConfig cfg,
                                              GenSimPolicy pi) {
  if (cfg.k < 1) throw std::invalid_argument("k must be at least 1");
  for (const auto& s : cfg.schedules)
    if (!s.valid()) throw std::invalid_argument("invalid delta schedule");
  ProgramHandle h;
  h.player = cfg.player;
  h.identity = next_bot_identity();
  h.behavior = [cfg = std::move(cfg), pi = std::move(pi)](
                   ExecCtx& ctx, const StreamView& view,
                   PrivateStream& priv) -> int {
    std::size_t T = sample_time_step(view, cfg.schedules[cfg.player]);
    std::vector<std::vector<std::vector<int>>> samples(
        T, std::vector<std::vector<int>>(cfg.n_players));
    std::vector<std::vector<std::vector<bool>>> consistent(
        T, std::vector<std::vector<bool>>(cfg.n_players));
    for (std::size_t t = 1; t <= T; ++t) {
      std::uint64_t kk = t >= cfg.t0 ? 1 : static_cast<std::uint64_t>(cfg.k);
      for (int j = 0; j < cfg.n_players; ++j) {
        if (j == cfg.player) continue;
        if (cfg.schedules[j].mass_at(t - 1) == 0) continue;
        for (std::uint64_t l = 1; l <= kk; ++l) {
          StreamView sub = reparameterize_first(partition(view, l, kk), t - 1,
                                                cfg.schedules[j]);
          int a = ctx.apply(j, sub, priv);
          samples[t - 1][j].push_back(a);
          bool ok = true;
          if (cfg.reference_profile)
            ok = consistent_check(a, (*cfg.reference_profile)[j], ctx, sub,
                                  priv);
          consistent[t - 1][j].push_back(ok);
        }
      }
    }
    return pi(samples, consistent, view.element(0));
  };
  return h;
}

}  // namespace progeq
