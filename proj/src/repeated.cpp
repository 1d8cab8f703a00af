#include "progeq/repeated.hpp"

#include "progeq/lp.hpp"
#include "progeq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace progeq {

namespace {

// Deterministic episode-local draw source for the repeated-game simulator.
struct Draws {
  SharedStream stream;
  std::uint64_t next = 0;
  double operator()() { return stream.element(next++); }
};

std::uint64_t episode_seed(std::uint64_t base, long long episode) {
  return mix_u64(base, mix_u64(0x5245504541544544ULL, episode));
}

int sample_distribution(const std::vector<Rat>& probs, double u) {
  double acc = 0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    acc += to_double(probs[a]);
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;
}

int pure_best_response(const NormalFormGame& game, int player,
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

// First deviation from the cyclic schedule in a screened history, if any:
// (round, player).  Sentinels count as deviations.
std::optional<std::pair<std::size_t, int>> first_schedule_deviation(
    const ScreenedHistory& h, const std::vector<ActionProfile>& sequence) {
  for (std::size_t t = 0; t < h.size(); ++t) {
    const ActionProfile& expected = sequence[t % sequence.size()];
    for (std::size_t j = 0; j < h[t].size(); ++j)
      if (!is_action(h[t][j], expected[j]))
        return std::make_pair(t, static_cast<int>(j));
  }
  return std::nullopt;
}

}  // namespace

RepeatedEstimate simulate_repeated(const RepeatedGameConfig& config,
                                   const std::vector<PolicyPair>& pairs,
                                   long long episodes, std::uint64_t seed) {
  const NormalFormGame& game = *config.game;
  const int n = game.player_count();
  if (static_cast<int>(pairs.size()) != n)
    throw std::invalid_argument("one policy pair per player required");

  RepeatedEstimate est;
  est.episodes = episodes;
  std::vector<double> sum(n, 0), sumsq(n, 0);
  double length_sum = 0;

  for (long long e = 0; e < episodes; ++e) {
    Draws draw{SharedStream{episode_seed(seed, e)}};
    ScreenedHistory screened;
    std::vector<double> total(n, 0);
    int rounds = 0;
    for (;;) {
      const double q = draw();
      ActionProfile played(n);
      std::vector<HistorySymbol> row(n);
      for (int i = 0; i < n; ++i) {
        std::vector<Rat> tau = pairs[i].tau(screened, q);
        std::vector<Rat> tau_star = pairs[i].tau_star(screened, q);
        if (tau.size() != static_cast<std::size_t>(game.action_count(i)) ||
            tau_star.size() != tau.size())
          throw std::logic_error("policy returned wrong action count");
        Rat mass = 0, star_mass = 0;
        for (std::size_t a = 0; a < tau.size(); ++a) {
          if (tau_star[a] > tau[a])
            throw std::logic_error("screened policy exceeds its unscreened "
                                   "mass (coupling violated)");
          mass += tau[a];
          star_mass += tau_star[a];
        }
        if (mass != 1 || star_mass > 1)
          throw std::logic_error("policy distribution not normalized");
        // Coupled draw: walk tau_star(a) then tau(a)-tau_star(a) per action,
        // landing in (a, a) or (a, R_i) respectively.
        const double u = draw();
        double acc = 0;
        int act = static_cast<int>(tau.size()) - 1;
        bool visible = true;
        for (std::size_t a = 0; a < tau.size() && acc <= u; ++a) {
          acc += to_double(tau_star[a]);
          if (u < acc) {
            act = static_cast<int>(a);
            visible = true;
            break;
          }
          acc += to_double(tau[a] - tau_star[a]);
          if (u < acc) {
            act = static_cast<int>(a);
            visible = false;
            break;
          }
        }
        played[i] = act;
        row[i] = visible ? HistorySymbol{act} : HistorySymbol{Sentinel{i}};
      }
      const PayoffVector& u_round = game.payoff(played);
      for (int i = 0; i < n; ++i) total[i] += to_double(u_round[i]);
      screened.push_back(std::move(row));
      ++rounds;
      if (draw() < config.eps || rounds >= config.max_rounds) break;
    }
    for (int i = 0; i < n; ++i) {
      sum[i] += total[i];
      sumsq[i] += total[i] * total[i];
    }
    length_sum += rounds;
    est.length_law[rounds]++;
  }

  est.mean_total.resize(n);
  est.se_total.resize(n);
  for (int i = 0; i < n; ++i) {
    est.mean_total[i] = sum[i] / episodes;
    double var =
        std::max(0.0, sumsq[i] / episodes - est.mean_total[i] * est.mean_total[i]);
    est.se_total[i] = std::sqrt(var / episodes);
  }
  est.mean_length = length_sum / episodes;
  return est;
}

ActionSequenceSchedule construct_action_sequence(const NormalFormGame& game,
                                                 const PayoffVector& v,
                                                 const Rat& eps,
                                                 const Rat& delta) {
  ActionSequenceSchedule out;
  out.target = v;
  out.eps = eps;
  out.delta = delta;
  const int n = game.player_count();
  const std::size_t m = game.profile_count();
  if (eps <= 0 || eps > 1 || delta <= 0) {
    out.message = "require 0 < eps <= 1 and delta > 0";
    return out;
  }

  // Exact convex decomposition of v over pure-profile payoff vectors.
  std::vector<std::vector<Rat>> A(n + 1, std::vector<Rat>(m));
  std::vector<Rat> b(n + 1);
  for (std::size_t a = 0; a < m; ++a) {
    const PayoffVector& u = game.payoff(game.profile_at(a));
    for (int i = 0; i < n; ++i) A[i][a] = u[i];
    A[n][a] = 1;
  }
  for (int i = 0; i < n; ++i) b[i] = v[i];
  b[n] = 1;
  LpResult lp = lp_feasible(A, b);
  if (lp.status != LpResult::Status::Optimal) {
    out.message = "target payoff is not a convex combination of pure "
                  "profile payoffs";
    return out;
  }
  const std::vector<Rat>& w = lp.x;

  const Rat keep = 1 - eps;  // survival probability per round
  if (eps == 1) {
    // Degenerate geometric: only the first round matters; play the heaviest
    // support profile (exact only when v is itself a pure-profile payoff).
    std::size_t best = 0;
    for (std::size_t a = 1; a < m; ++a)
      if (w[a] > w[best]) best = a;
    out.sequence = {game.profile_at(best)};
    Rat err = 0;
    const PayoffVector& u = game.payoff(out.sequence[0]);
    for (int i = 0; i < n; ++i) err = std::max(err, abs(u[i] - v[i]));
    out.max_tail_error = err;
    out.ok = err <= delta;
    if (!out.ok) out.message = "eps = 1 leaves a single round; target not a "
                               "pure-profile payoff";
    return out;
  }

  // Horizon: (1-eps)^H * payoff range below delta/2, with slack for the
  // schedule to settle into its cycle.
  const Rat range = std::max(Rat(1), game.max_payoff() - game.min_payoff());
  std::size_t horizon = 1;
  {
    Rat tail = keep * range;
    while (tail > delta / 2 && horizon < 200'000) {
      tail *= keep;
      ++horizon;
    }
    horizon = std::max<std::size_t>(horizon * 2, 8);
  }

  // Largest-remaining-deficit schedule: at step t give the round weight
  // eps*(1-eps)^(t-1) to the profile whose discounted mass m_a most lags its
  // target share w_a of C_t = 1 - (1-eps)^t.  Ties break toward the lowest
  // flat profile index.
  std::vector<Rat> given(m, Rat(0));
  Rat round_weight = eps;  // eps*(1-eps)^(t-1) at step t
  Rat coverage = 0;        // C_t after the update
  out.sequence.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    coverage += round_weight;
    std::size_t pick = m;
    Rat best_deficit;
    for (std::size_t a = 0; a < m; ++a) {
      if (w[a] == 0) continue;
      Rat deficit = w[a] * coverage - given[a];
      if (pick == m || deficit > best_deficit) {
        best_deficit = deficit;
        pick = a;
      }
    }
    given[pick] += round_weight;
    out.sequence.push_back(game.profile_at(pick));
    round_weight *= keep;
  }

  // Certify every continuation value of the cycled sequence exactly.  The
  // schedule is periodic with period `horizon`, so the continuation values
  // solve V_t = eps*u_t + (1-eps)*V_{t+1 mod L}: one closed form for V_0,
  // then a backward pass.  Note the per-round granularity puts a floor of
  // about eps*|u - v| on the achievable error, so delta must be chosen
  // compatibly with eps.
  const std::size_t L = horizon;
  const Rat keep_L = rat_pow(keep, static_cast<unsigned long>(L));
  std::vector<PayoffVector> V(L + 1, PayoffVector(n, Rat(0)));
  for (int i = 0; i < n; ++i) {
    Rat s = 0, wgt = eps;
    for (std::size_t t = 0; t < L; ++t) {
      s += wgt * game.payoff(i, out.sequence[t]);
      wgt *= keep;
    }
    V[L][i] = s / (1 - keep_L);  // wraps around to V_0
  }
  Rat err = 0;
  for (std::size_t t = L; t-- > 0;) {
    const PayoffVector& u = game.payoff(out.sequence[t]);
    for (int i = 0; i < n; ++i) {
      V[t][i] = eps * u[i] + keep * V[t + 1][i];
      err = std::max(err, abs(V[t][i] - v[i]));
    }
  }
  out.max_tail_error = err;
  out.ok = err <= delta;
  if (!out.ok) {
    std::ostringstream os;
    os << "continuation tails certified only to " << format_rational(err)
       << " > delta";
    out.message = os.str();
  }
  return out;
}

std::vector<PolicyPair> synthesize_folk_policies(
    const NormalFormGame& game, const ActionSequenceSchedule& schedule) {
  const int n = game.player_count();
  if (!schedule.ok || schedule.sequence.empty())
    throw std::invalid_argument("schedule not certified");

  // Independent minimax punishment per potential deviator, plus the
  // deviator's own fixed best response to it.
  auto punisher_for = std::make_shared<std::vector<StrategyProfile>>();
  auto self_response = std::make_shared<std::vector<int>>(n, 0);
  for (int d = 0; d < n; ++d) {
    MinimaxResult mm = minimax(game, d);
    punisher_for->push_back(mm.punisher_profile);
    (*self_response)[d] = pure_best_response(game, d, mm.punisher_profile);
  }
  auto sequence = std::make_shared<std::vector<ActionProfile>>(
      schedule.sequence);

  std::vector<PolicyPair> pairs(n);
  for (int i = 0; i < n; ++i) {
    auto dist_for = [&game, i, n, punisher_for, self_response, sequence](
                        const ScreenedHistory& h) -> std::vector<Rat> {
      const int actions = game.action_count(i);
      auto dev = first_schedule_deviation(h, *sequence);
      if (!dev) {
        int a = (*sequence)[h.size() % sequence->size()][i];
        return MixedStrategy::pure(a, actions).probs;
      }
      const int d = dev->second;
      if (d == i)
        return MixedStrategy::pure((*self_response)[i], actions).probs;
      return (*punisher_for)[d][i].probs;
    };
    pairs[i].tau = [dist_for](const ScreenedHistory& h, double) {
      return dist_for(h);
    };
    // R_i is emitted exactly when this player is punishing with a mixed
    // strategy; deterministic play is never screened.
    pairs[i].tau_star = [dist_for, &game, i](const ScreenedHistory& h,
                                             double) -> std::vector<Rat> {
      std::vector<Rat> d = dist_for(h);
      int support = 0;
      for (const Rat& p : d)
        if (p > 0) ++support;
      if (support > 1) return std::vector<Rat>(d.size(), Rat(0));
      return d;
    };
  }
  return pairs;
}

PolicyPair associated_policy_pair(const Policy& pi, int player, int n_players,
                                  double eps) {
  if (pi.reads_private)
    throw std::invalid_argument(
        "associated policies require a program that never reads its private "
        "stream");
  (void)n_players;
  PolicyPair pair;
  auto dist = [pi, player, eps](const ScreenedHistory& h,
                                double q) -> std::vector<Rat> {
    // Map the round signal to the grounding real the program would have
    // seen: with no history the program grounds immediately (r_0 < eps);
    // otherwise it did not (r_0 >= eps).
    const double r0 = h.empty() ? eps * q : eps + (1 - eps) * q;
    std::vector<double> r{r0};
    PolicyInput in{h, r, nullptr, player};
    const int a = pi.act(in);
    // Point mass; action count is discovered by the simulator via the game,
    // so return a one-hot vector sized lazily by the caller's check.
    std::vector<Rat> out(static_cast<std::size_t>(a) + 1, Rat(0));
    out[a] = 1;
    return out;
  };
  pair.tau = dist;
  pair.tau_star = dist;
  return pair;
}

namespace {

// Pads associated one-hot vectors (sized to the chosen action) out to the
// full action count so simulate_repeated's checks pass.
PolicyPair pad_pair(PolicyPair p, int actions) {
  auto pad = [actions](std::vector<Rat> d) {
    d.resize(actions, Rat(0));
    return d;
  };
  PolicyPair out;
  out.tau = [f = p.tau, pad](const ScreenedHistory& h, double q) {
    return pad(f(h, q));
  };
  out.tau_star = [f = p.tau_star, pad](const ScreenedHistory& h, double q) {
    return pad(f(h, q));
  };
  return out;
}

bool three_sigma_overlap(double m1, double s1, double m2, double s2) {
  return std::abs(m1 - m2) <= 3 * std::sqrt(s1 * s1 + s2 * s2) + 1e-12;
}

}  // namespace

CorrespondenceReport correspondence_check(
    const NormalFormGame& game, const std::vector<ProgramHandle>& programs,
    const std::vector<PolicyPair>& associated, double eps, long long trials,
    std::uint64_t seed, const TrialConfig& trial_config) {
  const int n = game.player_count();
  CorrespondenceReport rep;

  OutcomeEstimate prog = estimate_outcomes(game, programs, Mode::Correlated,
                                           trials, seed, trial_config);
  rep.program_mean = prog.mean_payoff;
  rep.program_se = prog.payoff_se;

  RepeatedGameConfig cfg{&game, eps};
  std::vector<PolicyPair> padded;
  for (int i = 0; i < n; ++i)
    padded.push_back(pad_pair(associated[i], game.action_count(i)));
  RepeatedEstimate rg =
      simulate_repeated(cfg, padded, trials, mix_u64(seed, 0x47455053ULL));
  rep.scaled_repeated_mean.resize(n);
  rep.scaled_repeated_se.resize(n);
  for (int i = 0; i < n; ++i) {
    rep.scaled_repeated_mean[i] = eps * rg.mean_total[i];
    rep.scaled_repeated_se[i] = eps * rg.se_total[i];
  }

  rep.pass = true;
  for (int i = 0; i < n; ++i)
    rep.pass = rep.pass &&
               three_sigma_overlap(rep.program_mean[i], rep.program_se[i],
                                   rep.scaled_repeated_mean[i],
                                   rep.scaled_repeated_se[i]);
  return rep;
}

LastActionReport last_action_law(const NormalFormGame& game,
                                 const std::vector<Policy>& policies,
                                 double eps, long long trials,
                                 std::uint64_t seed,
                                 const TrialConfig& trial_config) {
  const int n = game.player_count();
  LastActionReport rep;
  rep.program_marginal.assign(n, {});
  rep.repeated_marginal.assign(n, {});
  for (int i = 0; i < n; ++i) {
    rep.program_marginal[i].assign(game.action_count(i), 0);
    rep.repeated_marginal[i].assign(game.action_count(i), 0);
  }

  // Program side: uncorrelated pi-bots, top-level actions.
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < n; ++i)
    bots.push_back(build_uncorrelated_bot(i, n, eps, policies[i]));
  OutcomeEstimate prog = estimate_outcomes(game, bots, Mode::Uncorrelated,
                                           trials, seed, trial_config);
  rep.program_marginal = prog.marginal_counts;
  rep.program_payoff_mean = prog.mean_payoff;
  rep.program_payoff_se = prog.payoff_se;

  // Repeated side: the policies drive T+1 rounds with grounding reals
  // conditioned exactly as the nested program calls see them — the round at
  // history length t receives t reals in [eps,1) followed by the shared
  // final real in [0,eps).
  std::vector<double> sum(n, 0), sumsq(n, 0);
  for (long long e = 0; e < trials; ++e) {
    Draws draw{SharedStream{episode_seed(mix_u64(seed, 0x4C415354ULL), e)}};
    long long T = 0;
    while (draw() >= eps && T < (1 << 22)) ++T;
    const double r_last = eps * draw();  // U[0, eps)
    std::vector<double> r{r_last};
    ScreenedHistory h;
    std::vector<double> total(n, 0);
    for (long long t = 0; t <= T; ++t) {
      if (t > 0) r.insert(r.begin(), eps + (1 - eps) * draw());  // U[eps, 1)
      ActionProfile played(n);
      std::vector<HistorySymbol> row(n);
      for (int i = 0; i < n; ++i) {
        PolicyInput in{h, r, nullptr, i};
        played[i] = policies[i].act(in);
        row[i] = HistorySymbol{played[i]};
      }
      const PayoffVector& u = game.payoff(played);
      for (int i = 0; i < n; ++i) total[i] += to_double(u[i]);
      if (t == T)
        for (int i = 0; i < n; ++i) rep.repeated_marginal[i][played[i]]++;
      h.push_back(std::move(row));
    }
    for (int i = 0; i < n; ++i) {
      sum[i] += eps * total[i];
      sumsq[i] += eps * total[i] * eps * total[i];
    }
  }
  rep.repeated_scaled_mean.resize(n);
  rep.repeated_scaled_se.resize(n);
  for (int i = 0; i < n; ++i) {
    rep.repeated_scaled_mean[i] = sum[i] / trials;
    double var = std::max(0.0, sumsq[i] / trials - rep.repeated_scaled_mean[i] *
                                                       rep.repeated_scaled_mean[i]);
    rep.repeated_scaled_se[i] = std::sqrt(var / trials);
  }

  rep.marginals_match = true;
  rep.min_marginal_chi2_p = 1.0;
  for (int i = 0; i < n; ++i) {
    double p = chi2_two_sample_p(rep.program_marginal[i],
                                 rep.repeated_marginal[i]);
    rep.min_marginal_chi2_p = std::min(rep.min_marginal_chi2_p, p);
    rep.marginals_match = rep.marginals_match && p > 0.01;
  }
  rep.payoffs_match = true;
  for (int i = 0; i < n; ++i)
    rep.payoffs_match =
        rep.payoffs_match &&
        three_sigma_overlap(rep.program_payoff_mean[i],
                            rep.program_payoff_se[i],
                            rep.repeated_scaled_mean[i],
                            rep.repeated_scaled_se[i]);
  return rep;
}

}  // namespace progeq
