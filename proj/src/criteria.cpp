#include "progeq/criteria.hpp"

#include "progeq/analysis.hpp"
#include "progeq/bots.hpp"
#include "progeq/builtins.hpp"
#include "progeq/montecarlo.hpp"
#include "progeq/repeated.hpp"
#include "progeq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace progeq {

namespace {

std::uint64_t sub_seed(std::uint64_t seed, int criterion) {
  return mix_u64(seed, mix_u64(0x4352495445524941ULL, criterion));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

bool within_3se(double a, double sa, double b, double sb) {
  return std::abs(a - b) <= 3 * std::sqrt(sa * sa + sb * sb) + 1e-12;
}

// ---------------------------------------------------------------------------
// 1: payoff tables

CriterionResult c1_tables() {
  CriterionResult r{1, "payoff tables exact", "tables", true, ""};
  std::ostringstream bad;

  auto check_game = [&](const NormalFormGame& g,
                        const std::vector<std::vector<int>>& cells,
                        const char* name) {
    for (const auto& row : cells) {
      const int n = g.player_count();
      ActionProfile a(row.begin(), row.begin() + n);
      StrategyProfile prof;
      for (int i = 0; i < n; ++i)
        prof.push_back(MixedStrategy::pure(a[i], g.action_count(i)));
      PayoffVector u = expected_utility(g, prof);
      for (int i = 0; i < n; ++i)
        if (u[i] != row[n + i]) {
          r.pass = false;
          bad << name << " cell mismatch; ";
          return;
        }
    }
  };

  // Transfer game (player 1 in {C,P2,P3}, others {C,D}); full table.
  check_game(intro_game(),
             {{0, 0, 0, 6, 6, 6},   {0, 0, 1, 3, 3, 11}, {0, 1, 0, 3, 11, 3},
              {0, 1, 1, 0, 8, 8},   {1, 0, 0, 6, 3, 9},  {1, 0, 1, 3, 0, 14},
              {1, 1, 0, 3, 8, 6},   {1, 1, 1, 0, 5, 11}, {2, 0, 0, 6, 9, 3},
              {2, 0, 1, 3, 6, 8},   {2, 1, 0, 3, 14, 0}, {2, 1, 1, 0, 11, 5}},
             "transfer");
  // Treasure split (C=0, D=1, L=2); full 27-cell table.
  check_game(
      pirates_game(),
      {{0, 0, 0, 10, 10, 10}, {0, 0, 1, 0, 0, 14},   {0, 0, 2, 10, 10, 9},
       {0, 1, 0, 0, 14, 0},   {0, 1, 1, 0, 14, 14},  {0, 1, 2, 0, 14, 0},
       {0, 2, 0, 10, 9, 10},  {0, 2, 1, 0, 0, 14},   {0, 2, 2, 9, 9, 9},
       {1, 0, 0, 14, 0, 0},   {1, 0, 1, 14, 0, 14},  {1, 0, 2, 14, 0, 0},
       {1, 1, 0, 14, 14, 0},  {1, 1, 1, 14, 14, 0},  {1, 1, 2, 14, 14, 0},
       {1, 2, 0, 14, 0, 0},   {1, 2, 1, 14, 0, 14},  {1, 2, 2, 9, 9, 9},
       {2, 0, 0, 9, 10, 10},  {2, 0, 1, 0, 0, 14},   {2, 0, 2, 9, 9, 9},
       {2, 1, 0, 0, 14, 0},   {2, 1, 1, 0, 14, 14},  {2, 1, 2, 9, 9, 9},
       {2, 2, 0, 9, 9, 9},    {2, 2, 1, 9, 9, 9},    {2, 2, 2, 9, 9, 9}},
      "treasure");
  // Trust games, full tables.
  check_game(trust_mixed_game(),
             {{0, 0, 3, 0}, {0, 1, 3, 0}, {1, 0, 4, 2}, {1, 1, 2, 4}},
             "trust-mixed");
  check_game(trust_simple_game(),
             {{0, 0, 3, 0}, {0, 1, 3, 0}, {1, 0, 0, 6}, {1, 1, 4, 2}},
             "trust-simple");
  r.detail = r.pass ? "all cells of the four tables match" : bad.str();
  return r;
}

// ---------------------------------------------------------------------------
// 2: closed-form deviation values + Monte Carlo confirmation

CriterionResult c2_example3(std::uint64_t seed, int threads) {
  CriterionResult r{2, "deviation closed forms", "example3", false, ""};
  auto [l, d] = example3_values(Rat(3, 4));
  bool exact = l == Rat(43, 4) && d == Rat(341, 32) && l > 10 && d > 10;

  // Uncorrelated treasure-split bots, deviator mixes a defection in with
  // probability 3/4; each punisher detects with probability (1-eps)*q (all
  // simulated rows deviate together off one raw draw).
  const double eps = 0.05;
  const double q = 0.75;
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < 3; ++i)
    bots.push_back(build_uncorrelated_bot(i, 3, eps, pirates_policy()));
  TrialConfig cfg;
  cfg.memo_apply = true;
  auto family = [&](double p) {
    return build_q_mix_bot(bots[0], eps, p, MixedStrategy::pure(1, 3));
  };
  std::vector<ProgramHandle> profile = bots;
  profile[0] = family(q);
  OutcomeEstimate est = estimate_outcomes(pirates_game(), profile,
                                          Mode::Uncorrelated, 100'000,
                                          sub_seed(seed, 2), cfg, threads);
  const double predicted =
      to_double(pirates_value_l_punish(Rat(3, 4), Rat(3, 4) * (1 - Rat(1, 20))));
  bool mc = std::abs(est.mean_payoff[0] - predicted) <= 3 * est.payoff_se[0];
  r.pass = exact && mc;
  r.detail = "exact (43/4, 341/32): " + std::string(exact ? "ok" : "FAIL") +
             "; empirical " + fmt(est.mean_payoff[0]) + " vs predicted " +
             fmt(predicted) + " (3se " + fmt(3 * est.payoff_se[0]) + ")";
  return r;
}

// ---------------------------------------------------------------------------
// 3: epsilon thresholds + Monte Carlo sign changes

struct SignProbe {
  double lo_gain, lo_se, hi_gain, hi_se;
  bool ok;
};

SignProbe probe_signs(const NormalFormGame& game,
                      const std::vector<ProgramHandle>& lo_profile,
                      const std::function<ProgramHandle(double)>& lo_family,
                      const std::vector<ProgramHandle>& hi_profile,
                      const std::function<ProgramHandle(double)>& hi_family,
                      int deviator, Mode mode, long long trials,
                      std::uint64_t seed, const TrialConfig& cfg) {
  DeviationReport lo = empirical_best_response(game, lo_profile, deviator,
                                               lo_family, 1.0, mode, trials,
                                               seed, cfg);
  DeviationReport hi = empirical_best_response(game, hi_profile, deviator,
                                               hi_family, 1.0, mode, trials,
                                               seed + 1, cfg);
  SignProbe p{lo.gain, lo.gain_se, hi.gain, hi.gain_se, false};
  p.ok = lo.gain + 3 * lo.gain_se < 0 && hi.gain - 3 * hi.gain_se > 0;
  return p;
}

CriterionResult c3_thresholds(std::uint64_t seed, int threads) {
  (void)threads;
  CriterionResult r{3, "epsilon thresholds + sign change", "thresholds",
                    false, ""};
  auto table = epsilon_thresholds();
  bool exact = table.size() == 3 && table[0].threshold == Rat(1, 6) &&
               table[1].threshold == Rat(1, 3) &&
               table[2].threshold == Rat(1, 5);
  // Gain formulas change sign at the stated thresholds symbolically.
  for (const auto& e : table)
    exact = exact && e.gain(Rat(1), e.threshold * Rat(4, 5)) < 0 &&
            e.gain(Rat(1), e.threshold * Rat(6, 5)) > 0 &&
            e.gain(Rat(1), e.threshold) == 0;

  const long long trials = 100'000;
  TrialConfig cfg;
  cfg.memo_apply = true;
  std::ostringstream detail;
  bool mc_ok = true;

  // Transfer game, uncorrelated, player 2 mixing a defection with q=1.
  {
    auto mk = [&](double eps) {
      std::vector<ProgramHandle> b;
      for (int i = 0; i < 3; ++i)
        b.push_back(build_uncorrelated_bot(i, 3, eps, intro_policy(i)));
      return b;
    };
    const double lo = 0.8 / 6, hi = 1.2 / 6;
    auto blo = mk(lo), bhi = mk(hi);
    SignProbe p = probe_signs(
        intro_game(), blo,
        [&](double q) {
          return build_q_mix_bot(blo[1], lo, q, MixedStrategy::pure(1, 2));
        },
        bhi,
        [&](double q) {
          return build_q_mix_bot(bhi[1], hi, q, MixedStrategy::pure(1, 2));
        },
        1, Mode::Uncorrelated, trials, sub_seed(seed, 31), cfg);
    mc_ok = mc_ok && p.ok;
    detail << "transfer gains " << fmt(p.lo_gain) << "/" << fmt(p.hi_gain)
           << "; ";
  }
  // 3-player PD, uncorrelated, stream-mix defector against copy-a-random-
  // opponent bots.  The defect mass propagates through the copiers at rate
  // p = (1-eps)(q+p)/2, so the deviator's gain is q - 2q(1-eps)/(1+eps),
  // which changes sign at eps = 1/3.
  {
    auto mk = [&](double eps) {
      std::vector<ProgramHandle> b;
      for (int i = 0; i < 3; ++i)
        b.push_back(build_random_opponent_sim_bot(i, 3, eps, 0));
      return b;
    };
    const double lo = 0.8 / 3, hi = 1.2 / 3;
    auto blo = mk(lo), bhi = mk(hi);
    auto family = [](double q) { return build_stream_mix_bot(1, q, 1, 0); };
    SignProbe p = probe_signs(pd3_game(), blo, family, bhi, family, 1,
                              Mode::Uncorrelated, trials, sub_seed(seed, 32),
                              cfg);
    mc_ok = mc_ok && p.ok;
    detail << "pd3 gains " << fmt(p.lo_gain) << "/" << fmt(p.hi_gain) << "; ";
  }
  // Treasure split, correlated, q-mix defector.
  {
    auto mk = [&](double eps) {
      std::vector<ProgramHandle> b;
      for (int i = 0; i < 3; ++i)
        b.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
      return b;
    };
    const double lo = 0.8 / 5, hi = 1.2 / 5;
    auto blo = mk(lo), bhi = mk(hi);
    SignProbe p = probe_signs(
        pirates_game(), blo,
        [&](double q) {
          return build_q_mix_bot(blo[0], lo, q, MixedStrategy::pure(1, 3));
        },
        bhi,
        [&](double q) {
          return build_q_mix_bot(bhi[0], hi, q, MixedStrategy::pure(1, 3));
        },
        0, Mode::Correlated, trials, sub_seed(seed, 33), cfg);
    mc_ok = mc_ok && p.ok;
    detail << "treasure gains " << fmt(p.lo_gain) << "/" << fmt(p.hi_gain);
  }
  r.pass = exact && mc_ok;
  r.detail = std::string("thresholds 1/6,1/3,1/5 ") +
             (exact ? "exact" : "FAIL") + "; " + detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 4: halting fixed point of the naive simulator

CriterionResult c4_halting(std::uint64_t seed) {
  CriterionResult r{4, "naive-simulation halting fixed point", "halting",
                    false, ""};
  std::ostringstream detail;
  bool ok = true;
  for (double eps : {0.25, 0.4}) {
    std::vector<ProgramHandle> bots;
    for (int i = 0; i < 3; ++i)
      bots.push_back(build_naive_sim_bot(i, 3, eps, 0, 1));
    TrialConfig cfg;
    cfg.fuel.max_depth = 200;
    const long long trials = 100'000;
    std::vector<TrialResult> ts = collect_trials(
        bots, Mode::Uncorrelated, trials, sub_seed(seed, 4), cfg);
    long long halted = 0, seats = 0;
    for (const auto& t : ts)
      for (const auto& a : t.actions) {
        ++seats;
        halted += a.has_value();
      }
    const double freq = static_cast<double>(halted) / seats;
    const double expect = eps / (1 - eps);
    const double se = std::sqrt(expect * (1 - expect) / seats);
    ok = ok && std::abs(freq - expect) <= 3 * se;
    detail << "eps=" << eps << ": " << fmt(freq) << " vs " << fmt(expect)
           << " (3se " << fmt(3 * se) << "); ";
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 5: program game vs repeated game correspondence

CriterionResult c5_correspondence(std::uint64_t seed, int threads) {
  CriterionResult r{5, "repeated-game correspondence", "correspondence",
                    false, ""};
  std::ostringstream detail;
  bool ok = true;
  TrialConfig cfg;
  for (double eps : {0.1, 0.2}) {
    std::vector<ProgramHandle> bots;
    std::vector<PolicyPair> assoc;
    for (int i = 0; i < 3; ++i) {
      bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
      assoc.push_back(associated_policy_pair(pirates_policy(), i, 3, eps));
    }
    CorrespondenceReport rep =
        correspondence_check(pirates_game(), bots, assoc, eps, 100'000,
                             sub_seed(seed, 5), cfg);
    (void)threads;
    ok = ok && rep.pass;
    detail << "eps=" << eps << ": program " << fmt(rep.program_mean[0])
           << " vs eps*repeated " << fmt(rep.scaled_repeated_mean[0]) << "; ";
  }
  {
    // eps = 1: a single grounded round on both sides, exact equality.
    std::vector<ProgramHandle> bots;
    std::vector<PolicyPair> assoc;
    for (int i = 0; i < 3; ++i) {
      bots.push_back(build_correlated_bot(i, 3, 1.0, pirates_policy()));
      assoc.push_back(associated_policy_pair(pirates_policy(), i, 3, 1.0));
    }
    CorrespondenceReport rep = correspondence_check(
        pirates_game(), bots, assoc, 1.0, 1'000, sub_seed(seed, 51), cfg);
    bool exact = true;
    for (int i = 0; i < 3; ++i)
      exact = exact && rep.program_mean[i] == rep.scaled_repeated_mean[i];
    ok = ok && exact;
    detail << "eps=1 exact: " << (exact ? "ok" : "FAIL");
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 6: screening replay

CriterionResult c6_screening(std::uint64_t seed) {
  CriterionResult r{6, "screening replay invariance", "screening", false, ""};
  const double eps = 0.3;
  std::vector<ProgramHandle> bots;
  Policy mixer;  // privately randomizing policy: gets screened
  mixer.reads_private = true;
  mixer.act = [](const PolicyInput& in) {
    return in.private_stream && in.private_stream->element(0) < 0.5 ? 0 : 2;
  };
  bots.push_back(build_correlated_bot(0, 3, eps, pirates_policy()));
  bots.push_back(build_correlated_bot(1, 3, eps, pirates_policy()));
  bots.push_back(build_correlated_bot(2, 3, eps, mixer));

  TrialConfig cfg;
  cfg.full_trace = true;
  std::vector<TrialResult> trials =
      collect_trials(bots, Mode::Correlated, 100, sub_seed(seed, 6), cfg);

  long long nodes = 0, violations = 0;
  for (const auto& t : trials) {
    SharedStream shared{t.shared_seed};
    for (const auto& node : t.trace.nodes) {
      if (node.kind != CallKind::ApplyStar || node.view_transformed) continue;
      ++nodes;
      StreamView view{&shared, node.view_mult, node.view_shift, std::nullopt};
      for (int s = 0; s < 20; ++s) {
        ExecCtx ctx;
        ctx.profile = &bots;
        ctx.config = cfg;
        PrivateStream priv{mix_u64(sub_seed(seed, 66), s * 1000 + node.callee),
                           &ctx.screening};
        BotOutput out = ctx.apply_star(node.callee, view, priv);
        const bool screened = std::holds_alternative<Sentinel>(out);
        if (screened != node.screened ||
            (!screened && std::get<int>(out) != node.output))
          ++violations;
      }
    }
  }
  r.pass = nodes > 0 && violations == 0;
  r.detail = std::to_string(nodes) + " screened-call nodes x 20 seeds, " +
             std::to_string(violations) + " violations";
  return r;
}

// ---------------------------------------------------------------------------
// 7: memoization soundness and cost

CriterionResult c7_memoization(std::uint64_t seed) {
  CriterionResult r{7, "memoization soundness and cost", "memoization",
                    false, ""};
  std::ostringstream detail;

  // (a) per-seed equality, memo on vs off.  High grounding keeps the
  // unmemoized (n+1)^T tree within fuel.
  bool equal = true;
  {
    const double eps = 0.8;
    std::vector<ProgramHandle> bots;
    for (int i = 0; i < 3; ++i)
      bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
    TrialConfig on, off;
    off.memo_apply_star = false;
    off.fuel.max_calls = 10'000'000;
    auto a = collect_trials(bots, Mode::Correlated, 1'000, sub_seed(seed, 7),
                            on);
    auto b = collect_trials(bots, Mode::Correlated, 1'000, sub_seed(seed, 7),
                            off);
    for (std::size_t t = 0; t < a.size(); ++t)
      equal = equal && a[t].actions == b[t].actions;
    detail << "memo on/off equal over 1000 seeds: "
           << (equal ? "ok" : "FAIL") << "; ";
  }

  // (b) distinct screened evaluations bounded by n*T per trial.
  bool bounded = true;
  {
    const double eps = 0.3;
    std::vector<ProgramHandle> bots;
    for (int i = 0; i < 3; ++i)
      bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
    TrialConfig cfg;
    auto trials = collect_trials(bots, Mode::Correlated, 500,
                                 sub_seed(seed, 71), cfg);
    for (const auto& t : trials) {
      SharedStream s{t.shared_seed};
      long long T = 0;
      while (s.element(T) >= eps) ++T;
      bounded = bounded && t.trace.distinct_memo_keys <= 3 * T;
    }
    detail << "distinct apply* keys <= n*T: " << (bounded ? "ok" : "FAIL")
           << "; ";
  }

  // (c) polynomial cost: mean call count grows with slope <= 3.5 in
  // log(1/eps).
  bool poly = true;
  {
    std::vector<double> eps_grid{0.4, 0.2, 0.1, 0.05};
    std::vector<double> calls;
    for (double eps : eps_grid) {
      std::vector<ProgramHandle> bots;
      for (int i = 0; i < 3; ++i)
        bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
      TrialConfig cfg;
      OutcomeEstimate est =
          estimate_outcomes(pirates_game(), bots, Mode::Correlated, 2'000,
                            sub_seed(seed, 72), cfg);
      calls.push_back(std::max(est.mean_total_calls, 1.0));
    }
    double max_slope = 0;
    for (std::size_t i = 0; i + 1 < calls.size(); ++i) {
      double slope = std::log(calls[i + 1] / calls[i]) /
                     std::log(eps_grid[i] / eps_grid[i + 1]);
      max_slope = std::max(max_slope, slope);
    }
    poly = max_slope <= 3.5;
    detail << "log-log cost slope " << fmt(max_slope) << " <= 3.5: "
           << (poly ? "ok" : "FAIL");
  }
  r.pass = equal && bounded && poly;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 8: separable folk equilibrium and action-law match

CriterionResult c8_separable_folk(std::uint64_t seed, int threads) {
  CriterionResult r{8, "separable folk equilibrium", "separable-folk", false,
                    ""};
  const double eps = 0.1;
  std::ostringstream detail;

  std::vector<Policy> policies;
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < 3; ++i) {
    policies.push_back(intro_policy(i));
    bots.push_back(build_uncorrelated_bot(i, 3, eps, policies[i]));
  }
  TrialConfig cfg;
  cfg.memo_apply = true;
  OutcomeEstimate est =
      estimate_outcomes(intro_game(), bots, Mode::Uncorrelated, 100'000,
                        sub_seed(seed, 8), cfg, threads);
  auto it = est.counts.find(ActionProfile{0, 0, 0});
  bool coop = est.halted == est.trials && it != est.counts.end() &&
              it->second == est.halted;
  detail << "(C,C,C) frequency " << (coop ? "1.0" : "NOT 1.0") << "; ";

  LastActionReport law = last_action_law(intro_game(), policies, eps, 100'000,
                                         sub_seed(seed, 81), cfg);
  detail << "payoff identity "
         << (law.payoffs_match ? "ok" : "FAIL") << ", min chi2 p "
         << fmt(law.min_marginal_chi2_p) << "; ";

  // Marginal law with a genuinely history-dependent (alternating) policy.
  std::vector<Policy> tm{trust_mixed_policy(0), trust_mixed_policy(1)};
  LastActionReport law2 = last_action_law(trust_mixed_game(), tm, eps, 30'000,
                                          sub_seed(seed, 82), cfg);
  detail << "alternating-policy marginal chi2 p "
         << fmt(law2.min_marginal_chi2_p);
  r.pass = coop && law.payoffs_match && law.marginals_match &&
           law2.marginals_match;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 9: Cor-7 violations

CriterionResult c9_cor7() {
  CriterionResult r{9, "unilateral-sum violations", "cor7", false, ""};
  StrategyProfile sf{MixedStrategy::pure(1, 2), MixedStrategy::pure(1, 2)};
  Cor7Report ts = cor7_check(trust_simple_game(), sf, {Rat(4), Rat(2)});
  bool a = ts.violated && ts.player == 1 && ts.witness_action == 0 &&
           ts.value == 2;

  StrategyProfile ccc{MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 2),
                      MixedStrategy::pure(0, 2)};
  Cor7Report in = cor7_check(intro_game(), ccc, {Rat(6), Rat(6), Rat(6)});
  bool b = !in.violated;
  r.pass = a && b;
  r.detail = std::string("trust-simple (S,F) violated by s_2'=G value ") +
             format_rational(ts.value) + (a ? " ok" : " FAIL") +
             "; transfer (C,C,C) " + (b ? "not violated" : "VIOLATED");
  return r;
}

// ---------------------------------------------------------------------------
// 10: simulationist negative results

CriterionResult c10_simulationist() {
  CriterionResult r{10, "schedule impossibility results", "simulationist",
                    false, ""};
  ImpossibilitySearchReport search = pirates_impossibility_search(10);
  GovCitizensReport gov = gov_citizens_check();
  r.pass = search.candidates > 0 &&
           search.violated == search.candidates && !search.anomaly &&
           gov.custom_schedules_pass && gov.geometric_all_fail && !gov.anomaly;
  std::ostringstream os;
  os << search.violated << "/" << search.candidates
     << " treasure-split schedules rejected"
     << (search.anomaly ? " (ANOMALY)" : "") << "; population game custom "
     << (gov.custom_schedules_pass ? "pass" : "FAIL") << ", geometric "
     << (gov.geometric_all_fail ? "all fail" : "ANOMALY");
  r.detail = os.str();
  return r;
}

// ---------------------------------------------------------------------------
// 11: alternating trust equilibrium

CriterionResult c11_trust_mixed(std::uint64_t seed, int threads) {
  CriterionResult r{11, "alternating trust equilibrium", "trust-mixed",
                    false, ""};
  const double eps = 0.01;
  std::ostringstream detail;
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < 2; ++i)
    bots.push_back(build_uncorrelated_bot(i, 2, eps, trust_mixed_policy(i)));
  TrialConfig cfg;
  cfg.memo_apply = true;

  OutcomeEstimate est =
      estimate_outcomes(trust_mixed_game(), bots, Mode::Uncorrelated, 30'000,
                        sub_seed(seed, 11), cfg, threads);
  const double w_c =
      static_cast<double>(est.marginal_counts[1][0]) / est.halted;
  const double expect_c = 1.0 / (2 - eps);
  const double se_c = std::sqrt(expect_c * (1 - expect_c) / est.halted);
  bool weights = std::abs(w_c - expect_c) <= 3 * se_c;
  const double expect_u2 = 2 + (2 - 2 * eps) / (2 - eps);
  bool u2 = std::abs(est.mean_payoff[1] - expect_u2) <= 3 * est.payoff_se[1];
  detail << "P2 weight(C) " << fmt(w_c) << " vs " << fmt(expect_c) << "; u2 "
         << fmt(est.mean_payoff[1]) << " vs " << fmt(expect_u2) << "; gains";

  bool gains_neg = true;
  auto family = [&](double q) {
    return build_q_mix_bot(bots[1], eps, q, MixedStrategy::pure(1, 2));
  };
  for (int k = 1; k <= 9; ++k) {
    const double q = k / 10.0;
    const long long trials = k <= 2 ? 20'000 : 6'000;
    DeviationReport dev = empirical_best_response(
        trust_mixed_game(), bots, 1, family, q, Mode::Uncorrelated, trials,
        sub_seed(seed, 110 + k), cfg);
    gains_neg = gains_neg && dev.gain < 0;
    detail << " " << fmt(dev.gain);
  }
  r.pass = weights && u2 && gains_neg;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 12: property suite

CriterionResult c12_properties(std::uint64_t seed, int threads) {
  CriterionResult r{12, "property suite", "properties", false, ""};
  std::ostringstream detail;
  bool ok = true;

  // Geometric grounding-time law (chi-square).
  {
    const double eps = 0.2;
    DeltaSchedule geo = DeltaSchedule::geometric(Rat(1, 5));
    const int K = 20;
    std::vector<long long> counts(K + 1, 0);
    for (int t = 0; t < 20'000; ++t) {
      SharedStream s{mix_u64(sub_seed(seed, 121), t)};
      StreamView v{&s, 1, 0, std::nullopt};
      std::size_t T = sample_time_step(v, geo);
      counts[std::min<std::size_t>(T, K)]++;
    }
    std::vector<double> probs(K + 1);
    for (int k = 0; k < K; ++k) probs[k] = eps * std::pow(1 - eps, k);
    probs[K] = std::pow(1 - eps, K);
    const double p = chi2_gof_p(counts, probs);
    ok = ok && p > 0.01;
    detail << "geometric-T chi2 p " << fmt(p) << "; ";
  }

  // Suffix law: suffix views are uniform streams again (two-sample KS).
  {
    std::vector<double> a, b;
    for (int t = 0; t < 5'000; ++t) {
      SharedStream s1{mix_u64(sub_seed(seed, 122), t)};
      SharedStream s2{mix_u64(sub_seed(seed, 123), t)};
      StreamView v1{&s1, 1, 0, std::nullopt};
      StreamView v2{&s2, 1, 0, std::nullopt};
      a.push_back(v1.element(0));
      b.push_back(v2.suffix(7).element(0));
    }
    const double p = ks_two_sample_p(a, b);
    ok = ok && p > 0.01;
    detail << "suffix KS p " << fmt(p) << "; ";
  }

  // Coupling assertions: folk policies run clean; a broken pair throws.
  {
    ActionSequenceSchedule sched = construct_action_sequence(
        trust_mixed_game(), {Rat(3), Rat(1)}, Rat(1, 10), Rat(1, 2));
    bool built = sched.ok;
    bool ran = false, threw = false;
    if (built) {
      auto pairs = synthesize_folk_policies(trust_mixed_game(), sched);
      RepeatedGameConfig rc{&trust_mixed_game(), 0.1};
      simulate_repeated(rc, pairs, 2'000, sub_seed(seed, 124));
      ran = true;
      PolicyPair broken = pairs[0];
      broken.tau_star = [](const ScreenedHistory&, double) {
        return std::vector<Rat>{Rat(1), Rat(1)};  // exceeds tau: invalid
      };
      try {
        simulate_repeated(rc, {broken, pairs[1]}, 10, sub_seed(seed, 125));
      } catch (const std::logic_error&) {
        threw = true;
      }
    }
    ok = ok && built && ran && threw;
    detail << "coupling asserts " << (built && ran && threw ? "ok" : "FAIL")
           << "; ";
  }

  // Determinism: thread count does not change the report.
  {
    std::vector<ProgramHandle> bots;
    for (int i = 0; i < 3; ++i)
      bots.push_back(build_correlated_bot(i, 3, 0.2, pirates_policy()));
    TrialConfig cfg;
    OutcomeEstimate a = estimate_outcomes(pirates_game(), bots,
                                          Mode::Correlated, 5'000,
                                          sub_seed(seed, 126), cfg, 1);
    OutcomeEstimate b = estimate_outcomes(pirates_game(), bots,
                                          Mode::Correlated, 5'000,
                                          sub_seed(seed, 126), cfg, threads);
    bool same = a.counts == b.counts && a.mean_payoff == b.mean_payoff &&
                a.halted == b.halted;
    ok = ok && same;
    detail << "thread determinism " << (same ? "ok" : "FAIL") << "; ";
  }

  // Output-independent halting: replacing one program with assorted halting
  // programs never breaks halting.
  {
    const double eps = 0.25;
    std::vector<ProgramHandle> bots;
    for (int i = 0; i < 3; ++i)
      bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
    std::vector<ProgramHandle> replacements{
        build_constant_bot(0, 1), build_stream_mix_bot(0, 0.5, 1, 0),
        build_threshold_bot(bots[0], 2, MixedStrategy::pure(2, 3))};
    long long failures = 0;
    TrialConfig cfg;
    for (const auto& rep : replacements) {
      std::vector<ProgramHandle> prof = bots;
      prof[0] = rep;
      auto trials = collect_trials(prof, Mode::Correlated, 1'000,
                                   sub_seed(seed, 127), cfg);
      for (const auto& t : trials) failures += t.failures.size();
    }
    ok = ok && failures == 0;
    detail << "replacement halting failures " << failures;
  }

  r.pass = ok;
  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all_criteria(
    std::uint64_t seed, const std::string& filter, int threads,
    const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  auto want = [&](const std::string& tag) {
    return filter.empty() || tag.find(filter) != std::string::npos;
  };
  auto emit = [&](CriterionResult r) {
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };
  if (want("tables")) emit(c1_tables());
  if (want("example3")) emit(c2_example3(seed, threads));
  if (want("thresholds")) emit(c3_thresholds(seed, threads));
  if (want("halting")) emit(c4_halting(seed));
  if (want("correspondence")) emit(c5_correspondence(seed, threads));
  if (want("screening")) emit(c6_screening(seed));
  if (want("memoization")) emit(c7_memoization(seed));
  if (want("separable-folk")) emit(c8_separable_folk(seed, threads));
  if (want("cor7")) emit(c9_cor7());
  if (want("simulationist")) emit(c10_simulationist());
  if (want("trust-mixed")) emit(c11_trust_mixed(seed, threads));
  if (want("properties")) emit(c12_properties(seed, threads));
  return out;
}

}  // namespace progeq
