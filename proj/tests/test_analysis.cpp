#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "progeq/analysis.hpp"
#include "progeq/builtins.hpp"

using namespace progeq;

TEST_CASE("treasure-split deviation closed forms") {
  auto [l, d] = example3_values(Rat(3, 4));
  CHECK(l == Rat(43, 4));
  CHECK(d == Rat(341, 32));
  CHECK(l > 10);
  CHECK(d > 10);
  // Perfect detection deters the deviation under lawyer punishment.
  CHECK(pirates_value_l_punish(Rat(3, 4), Rat(1)) < 10);
  // Zero detection leaves the full defection value.
  CHECK(pirates_value_l_punish(Rat(1), Rat(0)) == 14);
  CHECK(pirates_value_d_punish(Rat(1), Rat(0)) == 14);
}

TEST_CASE("epsilon thresholds are exact and change sign") {
  auto table = epsilon_thresholds();
  REQUIRE(table.size() == 3);
  CHECK(table[0].name == "intro");
  CHECK(table[0].threshold == Rat(1, 6));
  CHECK(table[1].name == "pd3");
  CHECK(table[1].threshold == Rat(1, 3));
  CHECK(table[2].name == "pirates-correlated");
  CHECK(table[2].threshold == Rat(1, 5));
  for (const auto& e : table)
    for (Rat q : {Rat(1, 4), Rat(1, 2), Rat(1)}) {
      CHECK(e.gain(q, e.threshold * Rat(1, 2)) < 0);
      CHECK(e.gain(q, e.threshold) == 0);
      CHECK(e.gain(q, e.threshold * Rat(3, 2)) > 0);
    }
}

TEST_CASE("unilateral-sum condition (exact)") {
  // trust-simple at (S, F) with payoffs (4, 2): player 2 can defect to G
  // (value 6) and player 1's only response option costs less: value 2.
  StrategyProfile sf{MixedStrategy::pure(1, 2), MixedStrategy::pure(1, 2)};
  Cor7Report r = cor7_check(trust_simple_game(), sf, {Rat(4), Rat(2)});
  CHECK(r.violated);
  CHECK(r.player == 1);
  CHECK(r.witness_action == 0);
  CHECK(r.value == 2);
  // intro at (C,C,C): no violation anywhere.
  StrategyProfile ccc{MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 2),
                      MixedStrategy::pure(0, 2)};
  Cor7Report ok = cor7_check(intro_game(), ccc, {Rat(6), Rat(6), Rat(6)});
  CHECK_FALSE(ok.violated);
  CHECK(ok.per_player_value.size() == 3);
  for (const auto& v : ok.per_player_value) CHECK(v <= 0);
}

TEST_CASE("punishment-map sufficiency verdicts") {
  StrategyProfile ccc{MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 2),
                      MixedStrategy::pure(0, 2)};
  CHECK(prop5_check(intro_game(), ccc, Rat(1, 10)).verdict ==
        Prop5Verdict::Holds);
  // trust-simple (S,F) fails the necessary condition, so no punishment map
  // can work.
  StrategyProfile sf{MixedStrategy::pure(1, 2), MixedStrategy::pure(1, 2)};
  CHECK(prop5_check(trust_simple_game(), sf, Rat(1, 10)).verdict ==
        Prop5Verdict::Fails);
  // pirates all-C: lawyer punishment works in the correlated setting but the
  // map here is restricted to pure responses per deviation action; accept
  // any verdict except a spurious "Holds" being contradicted by cor7.
  StrategyProfile cc{MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 3),
                     MixedStrategy::pure(0, 3)};
  Prop5Report pr = prop5_check(pirates_game(), cc, Rat(1, 10));
  if (pr.verdict == Prop5Verdict::Holds) {
    Cor7Report c7 = cor7_check(pirates_game(), cc,
                               expected_utility(pirates_game(), cc));
    CHECK_FALSE(c7.violated);
  }
}

TEST_CASE("prop5 implies the necessary condition (sandwich invariant)") {
  // Wherever prop5 certifies Holds, cor7 must not report a violation.
  for (const NormalFormGame* g :
       {&intro_game(), &pd3_game(), &trust_simple_game()}) {
    std::size_t m = g->profile_count();
    for (std::size_t f = 0; f < m; ++f) {
      ActionProfile a = g->profile_at(f);
      StrategyProfile s;
      for (int i = 0; i < g->player_count(); ++i)
        s.push_back(MixedStrategy::pure(a[i], g->action_count(i)));
      if (prop5_check(*g, s, Rat(1, 100)).verdict == Prop5Verdict::Holds) {
        Cor7Report c7 = cor7_check(*g, s, expected_utility(*g, s));
        CHECK_FALSE(c7.violated);
      }
    }
  }
}

TEST_CASE("simulationist bound is monotone in punisher detection mass") {
  // Holding the attacker's schedule fixed, shifting the punishers' detection
  // mass later (weaker detection) cannot lower the attacker's value: the
  // bound minimizes over punishment corners weighted by the punisher tails.
  SimulationistInstance strong, weak;
  strong.game = weak.game = &pirates_game();
  strong.path = weak.path =
      StrategyProfile{MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 3),
                      MixedStrategy::pure(0, 3)};
  strong.v = weak.v = PayoffVector(3, Rat(10));
  // Same attacker schedule; punishers detect faster in the strong instance.
  strong.schedules = {DeltaSchedule::geometric(Rat(1, 3)),
                      DeltaSchedule::geometric(Rat(1, 4)),
                      DeltaSchedule::geometric(Rat(1, 4))};
  weak.schedules = {DeltaSchedule::geometric(Rat(1, 3)),
                    DeltaSchedule::geometric(Rat(1, 2)),
                    DeltaSchedule::geometric(Rat(1, 2))};
  // Pr[T >= t] is larger under eps=1/4 for every t >= 1: more detection.
  for (std::size_t t0 : {1u, 2u, 3u})
    CHECK(simulationist_bound(strong, 0, t0, 1) <=
          simulationist_bound(weak, 0, t0, 1));
}

TEST_CASE("treasure-split impossibility chain and search") {
  std::vector<DeltaSchedule> geo(3, DeltaSchedule::geometric(Rat(1, 5)));
  PiratesChainReport chain = pirates_impossibility_chain(geo);
  CHECK(chain.violated);
  CHECK(chain.witness_gain > 0);
  CHECK((chain.stage == 1 || chain.stage == 2));
  ImpossibilitySearchReport search = pirates_impossibility_search(6);
  CHECK(search.candidates > 0);
  CHECK(search.violated == search.candidates);
  CHECK_FALSE(search.anomaly);
}

TEST_CASE("population-game closed forms and schedule verdicts") {
  // Spot values of the closed-form gains.
  CHECK(gov_gain(Rat(0), Rat(0)) == 0);
  CHECK(gov_gain(Rat(1), Rat(0)) == 1);       // defect, never detected
  CHECK(citizen_gain(Rat(1), Rat(0)) == 1);   // escalate, never detected
  CHECK(citizen_gain(Rat(0), Rat(1)) == Rat(-1, 10));
  GovCitizensReport rep = gov_citizens_check();
  CHECK(rep.custom_schedules_pass);
  CHECK(rep.geometric_all_fail);
  CHECK_FALSE(rep.anomaly);
}

TEST_CASE("2-player detection schedules deter all deviations") {
  // A synthetic prisoner's dilemma exercises the full construction: (C,C)
  // is strictly IR and strictly Pareto-in-the-limit.
  NormalFormGame pd({{"C", "D"}, {"C", "D"}},
                    {{Rat(3), Rat(3)},
                     {Rat(0), Rat(5)},
                     {Rat(5), Rat(0)},
                     {Rat(1), Rat(1)}});
  DetectionScheduleResult r = detection_schedule_2p(pd, {0, 0});
  REQUIRE(r.ok);
  CHECK_FALSE(r.degenerate);
  CHECK(r.limit_ratio < 1);
  CHECK(r.tail1.size() > 1);
  // Tails are decreasing survival functions starting at 1.
  CHECK(r.tail1[0] == 1);
  for (std::size_t t = 1; t < r.tail1.size(); ++t)
    CHECK(r.tail1[t] <= r.tail1[t - 1]);

  // trust-simple (S,F): player 1 has no profitable deviation at all, the
  // one-sided branch triggers.
  DetectionScheduleResult ts =
      detection_schedule_2p(trust_simple_game(), {1, 1});
  CHECK(ts.ok);
  CHECK(ts.degenerate);

  // A zero-sum game has no IR-and-Pareto cooperative cell: must refuse.
  NormalFormGame zs({{"a", "b"}, {"a", "b"}},
                    {{Rat(1), Rat(-1)},
                     {Rat(-1), Rat(1)},
                     {Rat(-1), Rat(1)},
                     {Rat(1), Rat(-1)}});
  DetectionScheduleResult bad = detection_schedule_2p(zs, {0, 0});
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.message.empty());
}

TEST_CASE("exactness cross-check: thresholds against the bound machinery") {
  // The correlated treasure-split gain at the threshold must vanish for
  // every q, matching 4q - ((1-eps)/eps) q at eps = 1/5.
  const auto& entry = epsilon_thresholds()[2];
  for (Rat q : {Rat(1, 8), Rat(1, 3), Rat(9, 10)})
    CHECK(entry.gain(q, Rat(1, 5)) == 0);
  // And the intro gain matches its separable decomposition source: the
  // defection bonus is 5, the per-punisher loss 6.
  CHECK(epsilon_thresholds()[0].gain(Rat(1), Rat(0)) == -1);
  CHECK(epsilon_thresholds()[0].gain(Rat(1), Rat(1)) == 5);
}
