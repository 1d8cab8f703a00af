#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "progeq/bots.hpp"
#include "progeq/builtins.hpp"
#include "progeq/repeated.hpp"

#include <cmath>

using namespace progeq;

TEST_CASE("construct_action_sequence certifies alternation for trust-mixed") {
  // Target (3, 3): the (S,C)/(S,G) alternation averages (3,3) exactly.
  ActionSequenceSchedule s = construct_action_sequence(
      trust_mixed_game(), {Rat(3), Rat(3)}, Rat(1, 10), Rat(1, 5));
  REQUIRE(s.ok);
  CHECK(s.max_tail_error <= s.delta);
  REQUIRE(!s.sequence.empty());
  // Every scheduled profile is one of the two alternation cells.
  for (const auto& a : s.sequence)
    CHECK((a == ActionProfile{1, 0} || a == ActionProfile{1, 1}));
}

TEST_CASE("construct_action_sequence rejects infeasible targets") {
  ActionSequenceSchedule s = construct_action_sequence(
      trust_mixed_game(), {Rat(100), Rat(0)}, Rat(1, 10), Rat(1, 100));
  CHECK_FALSE(s.ok);
  CHECK_FALSE(s.message.empty());
}

TEST_CASE("eps = 1 collapses to a single stage profile") {
  ActionSequenceSchedule s = construct_action_sequence(
      trust_mixed_game(), {Rat(4), Rat(2)}, Rat(1), Rat(1, 100));
  REQUIRE(s.ok);
  CHECK(s.sequence.size() == 1);
  CHECK(s.sequence[0] == ActionProfile{1, 0});
}

TEST_CASE("simulate_repeated length law is geometric") {
  std::vector<PolicyPair> pairs;
  for (int i = 0; i < 2; ++i) {
    PolicyPair p;
    p.tau = [](const ScreenedHistory&, double) {
      return std::vector<Rat>{Rat(1), Rat(0)};
    };
    p.tau_star = p.tau;
    pairs.push_back(p);
  }
  RepeatedGameConfig cfg{&trust_mixed_game(), 0.25};
  RepeatedEstimate est = simulate_repeated(cfg, pairs, 40'000, 5);
  CHECK(est.episodes == 40'000);
  // Mean length 1/eps = 4.
  CHECK(std::abs(est.mean_length - 4.0) < 0.1);
  // Pr[len = 1] = 0.25.
  double p1 = double(est.length_law.at(1)) / est.episodes;
  CHECK(std::abs(p1 - 0.25) < 4 * std::sqrt(0.25 * 0.75 / 40'000));
  // Constant (K, C) forever: per-round payoff 3 for player 1.
  CHECK(std::abs(est.mean_total[0] - 3 * est.mean_length) < 1e-9);
}

TEST_CASE("coupling compatibility is asserted both ways") {
  PolicyPair good;
  good.tau = [](const ScreenedHistory&, double) {
    return std::vector<Rat>{Rat(1, 2), Rat(1, 2)};
  };
  good.tau_star = [](const ScreenedHistory&, double) {
    return std::vector<Rat>{Rat(1, 2), Rat(0)};  // deficit mass -> sentinel
  };
  RepeatedGameConfig cfg{&trust_mixed_game(), 0.5};
  CHECK_NOTHROW(simulate_repeated(cfg, {good, good}, 200, 7));

  PolicyPair bad = good;
  bad.tau_star = [](const ScreenedHistory&, double) {
    return std::vector<Rat>{Rat(0), Rat(1)};  // exceeds tau on action 1
  };
  CHECK_THROWS_AS(simulate_repeated(cfg, {bad, good}, 200, 7),
                  std::logic_error);
}

TEST_CASE("folk policies follow the schedule and emit sentinels only for "
          "mixed punishment") {
  ActionSequenceSchedule s = construct_action_sequence(
      trust_mixed_game(), {Rat(3), Rat(3)}, Rat(1, 10), Rat(1, 5));
  REQUIRE(s.ok);
  auto pairs = synthesize_folk_policies(trust_mixed_game(), s);
  REQUIRE(pairs.size() == 2);
  // On-path rounds: tau is the scheduled pure profile, tau* equals tau
  // (pure punishments need no screening mass withheld on-path).
  ScreenedHistory empty;
  for (int i = 0; i < 2; ++i) {
    auto t = pairs[i].tau(empty, 0.37);
    auto ts = pairs[i].tau_star(empty, 0.37);
    REQUIRE(t.size() == 2);
    CHECK(t[s.sequence[0][i]] == 1);
    CHECK(t == ts);
  }
  // Off-path: a defection by player 1 (K instead of S) triggers punishment.
  ScreenedHistory dev{{HistorySymbol{0}, HistorySymbol{s.sequence[0][1]}}};
  auto t0 = pairs[1].tau(dev, 0.5);
  Rat mass = 0;
  for (const auto& m : t0) mass += m;
  CHECK(mass == 1);
  RepeatedGameConfig cfg{&trust_mixed_game(), 0.1};
  RepeatedEstimate est = simulate_repeated(cfg, pairs, 5'000, 9);
  // Discounted-average identity: eps * E[total] ~ target.
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(0.1 * est.mean_total[i] - 3.0) <
          3 * 0.1 * est.se_total[i] + 0.1);
}

TEST_CASE("associated policies refuse private-reading program policies") {
  Policy p;
  p.reads_private = true;
  p.act = [](const PolicyInput&) { return 0; };
  CHECK_THROWS(associated_policy_pair(p, 0, 2, 0.1));
}

TEST_CASE("associated policy maps the signal to grounding reals") {
  const double eps = 0.25;
  PolicyPair pp = associated_policy_pair(pirates_policy(), 0, 3, eps);
  ScreenedHistory empty;
  auto t = pp.tau(empty, 0.9);  // empty history: r0 = eps * q < eps
  CHECK(t[0] == 1);             // cooperative opening
  ScreenedHistory dirty{{HistorySymbol{0}, HistorySymbol{1}, HistorySymbol{0}}};
  auto t2 = pp.tau(dirty, 0.5);
  CHECK(t2[2] == 1);  // lawyer after an observed defection
}

TEST_CASE("correspondence holds for correlated treasure-split bots") {
  const double eps = 0.25;
  std::vector<ProgramHandle> bots;
  std::vector<PolicyPair> assoc;
  for (int i = 0; i < 3; ++i) {
    bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
    assoc.push_back(associated_policy_pair(pirates_policy(), i, 3, eps));
  }
  TrialConfig cfg;
  CorrespondenceReport rep = correspondence_check(
      pirates_game(), bots, assoc, eps, 20'000, 31, cfg);
  CHECK(rep.pass);
}

TEST_CASE("last-action law matches for the separable transfer game") {
  std::vector<Policy> pol{intro_policy(0), intro_policy(1), intro_policy(2)};
  TrialConfig cfg;
  cfg.memo_apply = true;
  LastActionReport rep =
      last_action_law(intro_game(), pol, 0.15, 20'000, 37, cfg);
  CHECK(rep.marginals_match);
  CHECK(rep.payoffs_match);
  CHECK(rep.min_marginal_chi2_p > 0.01);
}
