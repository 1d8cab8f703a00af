#include "progeq/analysis.hpp"

#include "progeq/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace progeq {

namespace {

// ---------------------------------------------------------------------------
// exact univariate polynomials (coefficient vectors, index = degree)

using Poly = std::vector<Rat>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Rat poly_eval(const Poly& p, const Rat& x) {
  Rat v = 0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

double poly_eval_d(const Poly& p, double x) {
  double v = 0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + to_double(p[k]);
  return v;
}

// Upper bound on max_{[0,1]} p: exact values at the endpoints and at
// rational snapshots of the numerically located critical points, padded by
// L * 1e-9 with L an exact bound on |p'| over [0,1].
Rat poly_max_upper_bound(const Poly& p) {
  std::vector<Rat> candidates{Rat(0), Rat(1)};
  Poly dp;
  for (std::size_t k = 1; k < p.size(); ++k) dp.push_back(p[k] * Rat(k));
  if (!dp.empty()) {
    const int grid = 4096;
    double prev = poly_eval_d(dp, 0.0);
    for (int g = 1; g <= grid; ++g) {
      double x = static_cast<double>(g) / grid;
      double cur = poly_eval_d(dp, x);
      if ((prev <= 0) != (cur <= 0)) {
        double lo = static_cast<double>(g - 1) / grid, hi = x;
        for (int it = 0; it < 60; ++it) {
          double mid = (lo + hi) / 2;
          if ((poly_eval_d(dp, lo) <= 0) == (poly_eval_d(dp, mid) <= 0))
            lo = mid;
          else
            hi = mid;
        }
        candidates.push_back(
            Rat(static_cast<long long>(lo * (1LL << 40)), 1LL << 40));
      }
      prev = cur;
    }
  }
  Rat lipschitz = 0;
  for (std::size_t k = 0; k < dp.size(); ++k) lipschitz += abs(dp[k]);
  Rat best;
  bool first = true;
  for (const Rat& x : candidates) {
    Rat clamped = std::min(std::max(x, Rat(0)), Rat(1));
    Rat v = poly_eval(p, clamped);
    if (first || v > best) best = v;
    first = false;
  }
  return best + lipschitz / Rat(1'000'000);
}

// Expected utility for player i when every player's strategy is affine in q:
// strat_k(q) = base_k + q * dir_k.  Exact polynomial of degree <= n.
Poly affine_profile_value(const NormalFormGame& game, int i,
                          const std::vector<std::vector<Rat>>& base,
                          const std::vector<std::vector<Rat>>& dir) {
  const int n = game.player_count();
  Poly total{Rat(0)};
  total.resize(n + 1, Rat(0));
  for (std::size_t f = 0; f < game.profile_count(); ++f) {
    ActionProfile a = game.profile_at(f);
    Poly w{Rat(1)};
    bool zero = false;
    for (int k = 0; k < n && !zero; ++k) {
      Poly lin{base[k][a[k]], dir[k][a[k]]};
      if (lin[0] == 0 && lin[1] == 0) {
        zero = true;
        break;
      }
      w = poly_mul(w, lin);
    }
    if (zero) continue;
    Rat u = game.payoff(i, a);
    for (std::size_t k = 0; k < w.size(); ++k) total[k] += w[k] * u;
  }
  return total;
}

std::vector<Rat> strategy_vec(const MixedStrategy& s) { return s.probs; }

std::vector<Rat> pure_vec(int action, int count) {
  std::vector<Rat> v(count, Rat(0));
  v[action] = 1;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// treasure-split closed forms

Rat pirates_value_l_punish(const Rat& q, const Rat& detect) {
  // (1-q)(10 - d^2) + q(14(1-d^2) + 9 d^2) = 10 + 4q - d^2 - 4q d^2.
  const Rat d2 = detect * detect;
  return 10 + 4 * q - d2 - 4 * q * d2;
}

Rat pirates_value_d_punish(const Rat& q, const Rat& detect) {
  // 14q (defectors always collect) + 10(1-q)(1-d)^2 (cooperating pays only
  // if neither punisher defected).
  const Rat keep = 1 - detect;
  return 14 * q + 10 * (1 - q) * keep * keep;
}

std::pair<Rat, Rat> example3_values(const Rat& q) {
  return {pirates_value_l_punish(q, q), pirates_value_d_punish(q, q)};
}

// ---------------------------------------------------------------------------
// closed-form epsilon thresholds

std::vector<ThresholdEntry> epsilon_thresholds() {
  std::vector<ThresholdEntry> out;
  out.push_back({"intro", Rat(1, 6), [](const Rat& q, const Rat& eps) {
                   return 5 * q - 6 * q * (1 - eps);
                 }});
  out.push_back({"pd3", Rat(1, 3), [](const Rat& q, const Rat& eps) {
                   return q - 2 * q * (1 - eps) / (1 + eps);
                 }});
  out.push_back({"pirates-correlated", Rat(1, 5),
                 [](const Rat& q, const Rat& eps) {
                   return 4 * q - (1 - eps) / eps * q;
                 }});
  return out;
}

// ---------------------------------------------------------------------------
// Cor-7 necessary condition

Cor7Report cor7_check(const NormalFormGame& game, const StrategyProfile& s,
                      const PayoffVector& v) {
  const int n = game.player_count();
  Cor7Report rep;
  rep.per_player_value.resize(n);
  for (int i = 0; i < n; ++i) {
    // Independent unilateral perturbations: the other players' worst pure
    // replacements decompose player by player.
    Rat others = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Rat worst;
      for (int x = 0; x < game.action_count(j); ++x) {
        StrategyProfile p = s;
        p[j] = MixedStrategy::pure(x, game.action_count(j));
        Rat val = expected_utility(game, p)[i] - v[i];
        if (x == 0 || val < worst) worst = val;
      }
      others += worst;
    }
    Rat best;
    int best_a = 0;
    for (int a = 0; a < game.action_count(i); ++a) {
      StrategyProfile p = s;
      p[i] = MixedStrategy::pure(a, game.action_count(i));
      Rat val = expected_utility(game, p)[i] - v[i] + others;
      if (a == 0 || val > best) {
        best = val;
        best_a = a;
      }
    }
    rep.per_player_value[i] = best;
    if (best > 0 && !rep.violated) {
      rep.violated = true;
      rep.player = i;
      rep.witness_action = best_a;
      rep.value = best;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Prop-5 sufficiency condition

namespace {

// Enumerates corner punishment maps for deviator i: per punisher j != i and
// per deviation action a_i, a pure response.  The assignment is flattened
// into mixed-radix digits.
struct CornerMaps {
  const NormalFormGame& game;
  int deviator;
  std::vector<int> slots;  // (j, a_i) pairs in order
  std::vector<int> radix;

  CornerMaps(const NormalFormGame& g, int i) : game(g), deviator(i) {
    for (int j = 0; j < g.player_count(); ++j) {
      if (j == i) continue;
      for (int a = 0; a < g.action_count(i); ++a) {
        slots.push_back(j);
        radix.push_back(g.action_count(j));
      }
    }
  }

  long long count() const {
    long long c = 1;
    for (int r : radix) c *= r;
    return c;
  }

  // response[j][a_i] for assignment index `idx`.
  std::vector<std::vector<int>> decode(long long idx) const {
    const int n = game.player_count();
    std::vector<std::vector<int>> resp(n);
    for (int j = 0; j < n; ++j)
      if (j != deviator) resp[j].assign(game.action_count(deviator), 0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      int digit = static_cast<int>(idx % radix[s]);
      idx /= radix[s];
      int j = slots[s];
      int a = static_cast<int>(s) % game.action_count(deviator);
      resp[j][a] = digit;
    }
    return resp;
  }
};

}  // namespace

Prop5Report prop5_check(const NormalFormGame& game, const StrategyProfile& s,
                        const Rat& lambda, int resolution) {
  (void)resolution;
  const int n = game.player_count();
  const PayoffVector v = expected_utility(game, s);
  Prop5Report rep;

  // Exact failure test first: the q -> 0 derivative of the deviation value
  // is linear in the punishment responses, so pure corners are exhaustive.
  // A player with every corner response leaving a positive derivative has no
  // punishment map at all.
  for (int i = 0; i < n; ++i) {
    Rat best_over_dev;
    bool first_dev = true;
    for (int a = 0; a < game.action_count(i); ++a) {
      StrategyProfile own = s;
      own[i] = MixedStrategy::pure(a, game.action_count(i));
      Rat deriv = expected_utility(game, own)[i] - v[i] - lambda;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Rat worst;
        for (int x = 0; x < game.action_count(j); ++x) {
          StrategyProfile p = s;
          p[j] = MixedStrategy::pure(x, game.action_count(j));
          Rat val = expected_utility(game, p)[i] - v[i];
          if (x == 0 || val < worst) worst = val;
        }
        deriv += worst;
      }
      if (first_dev || deriv > best_over_dev) best_over_dev = deriv;
      first_dev = false;
    }
    if (best_over_dev > 0) {
      rep.verdict = Prop5Verdict::Fails;
      rep.worst_player = i;
      std::ostringstream os;
      os << "player " << i << ": every punishment map leaves a deviation "
         << "with initial slope " << format_rational(best_over_dev)
         << " > 0";
      rep.detail = os.str();
      return rep;
    }
  }

  // Holds certificate: for each player, some corner map must cap every pure
  // deviation's exact q-polynomial on [0,1].  (Pure deviations only; a
  // mixed-deviation gap is reported as indeterminate by construction since
  // the certificate would simply not be found.)
  for (int i = 0; i < n; ++i) {
    CornerMaps corners(game, i);
    bool player_ok = false;
    for (long long idx = 0; idx < corners.count() && !player_ok; ++idx) {
      std::vector<std::vector<int>> resp = corners.decode(idx);
      bool map_ok = true;
      for (int a = 0; a < game.action_count(i) && map_ok; ++a) {
        // strat_k(q) = s_k + q*(target_k - s_k) with target_i = a and
        // target_j = resp[j][a].
        std::vector<std::vector<Rat>> base(n), dir(n);
        for (int k = 0; k < n; ++k) {
          base[k] = strategy_vec(s[k]);
          std::vector<Rat> target =
              k == i ? pure_vec(a, game.action_count(i))
                     : pure_vec(resp[k][a], game.action_count(k));
          dir[k].resize(target.size());
          for (std::size_t x = 0; x < target.size(); ++x)
            dir[k][x] = target[x] - base[k][x];
        }
        Poly value = affine_profile_value(game, i, base, dir);
        value[0] -= v[i];   // g(0) = 0 exactly
        value[1] -= lambda; // the -lambda*q slack
        if (value[0] != 0)
          throw std::logic_error("deviation polynomial must vanish at q=0");
        Poly h(value.begin() + 1, value.end());  // g(q) = q*h(q)
        if (poly_max_upper_bound(h) > 0) map_ok = false;
      }
      player_ok = map_ok;
    }
    if (!player_ok) {
      rep.verdict = Prop5Verdict::Indeterminate;
      rep.worst_player = i;
      rep.detail = "no corner punishment map certifies player " +
                   std::to_string(i) +
                   "; mixed maps/deviations not resolved by this search";
      return rep;
    }
  }
  rep.verdict = Prop5Verdict::Holds;
  rep.detail = "corner punishment maps certify every player";
  return rep;
}

// ---------------------------------------------------------------------------
// simulationist (delta-schedule) checks

Rat simulationist_bound(const SimulationistInstance& inst, int attacker,
                        std::size_t t0, int d) {
  const NormalFormGame& game = *inst.game;
  const int n = game.player_count();
  const Rat p = inst.schedules[attacker].tail_mass_from(t0);

  StrategyProfile profile = inst.path;
  MixedStrategy atk;
  atk.probs.assign(game.action_count(attacker), Rat(0));
  for (int a = 0; a < game.action_count(attacker); ++a)
    atk.probs[a] = (1 - p) * inst.path[attacker].probs[a];
  atk.probs[d] += p;
  profile[attacker] = atk;

  // Joint pure-corner enumeration over defenders; expected utility is
  // multilinear, so the minimum over product punishments is at a corner.
  std::vector<int> defenders;
  for (int j = 0; j < n; ++j)
    if (j != attacker) defenders.push_back(j);
  long long combos = 1;
  for (int j : defenders) combos *= game.action_count(j);

  Rat best;
  bool first = true;
  for (long long c = 0; c < combos; ++c) {
    long long idx = c;
    StrategyProfile p2 = profile;
    for (int j : defenders) {
      const int s_j = static_cast<int>(idx % game.action_count(j));
      idx /= game.action_count(j);
      const Rat qj = inst.schedules[j].tail_mass_from(t0 + 1);
      MixedStrategy def;
      def.probs.assign(game.action_count(j), Rat(0));
      for (int a = 0; a < game.action_count(j); ++a)
        def.probs[a] = (1 - qj) * inst.path[j].probs[a];
      def.probs[s_j] += qj;
      p2[j] = def;
    }
    Rat val = expected_utility(game, p2)[attacker];
    if (first || val < best) best = val;
    first = false;
  }
  return best;
}

SimulationistReport simulationist_check(const SimulationistInstance& inst) {
  const NormalFormGame& game = *inst.game;
  const int n = game.player_count();
  const Rat negligible(1, 1'000'000'000);

  std::size_t t_end = 0;
  for (const DeltaSchedule& s : inst.schedules) {
    std::size_t t = 0;
    while (s.tail_mass_from(t) >= negligible && t < 100'000) ++t;
    t_end = std::max(t_end, t);
  }

  SimulationistReport rep;
  rep.t0_sweep_end = t_end;
  bool first = true;
  for (int i = 0; i < n; ++i) {
    for (std::size_t t0 = 0; t0 <= t_end; ++t0) {
      if (inst.schedules[i].tail_mass_from(t0) == 0) break;
      for (int d = 0; d < game.action_count(i); ++d) {
        Rat gain = simulationist_bound(inst, i, t0, d) - inst.v[i];
        if (first || gain > rep.gain) {
          rep.gain = gain;
          rep.attacker = i;
          rep.t0 = t0;
          rep.deviation = d;
          first = false;
        }
        if (rep.gain > 0) {  // one profitable deviation settles the verdict
          rep.pass = false;
          return rep;
        }
      }
    }
  }
  rep.pass = rep.gain <= 0;
  return rep;
}

// ---------------------------------------------------------------------------
// treasure-split impossibility

PiratesChainReport pirates_impossibility_chain(
    const std::vector<DeltaSchedule>& schedules) {
  const NormalFormGame& game = pirates_game();
  PiratesChainReport rep;

  // t0 := max{t : Pr[T_1 >= t] >= 3/4}; exists because tails start at 1 and
  // vanish.
  std::size_t t0 = 0;
  while (schedules[0].tail_mass_from(t0 + 1) >= Rat(3, 4) && t0 < 100'000)
    ++t0;
  rep.t0 = t0;
  rep.p1 = schedules[0].tail_mass_from(t0);
  rep.q_product = schedules[1].tail_mass_from(t0 + 1) *
                  schedules[2].tail_mass_from(t0 + 1);

  SimulationistInstance inst;
  inst.game = &game;
  inst.schedules = schedules;
  inst.path = {MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 3),
               MixedStrategy::pure(0, 3)};
  inst.v = {10, 10, 10};

  // Stage 1: player 1 defecting from t0.  Defect-punishment is already
  // beaten (14 * P1 >= 14 * 3/4 > 10), so only full lawyer detection can
  // deter, which needs Q2*Q3 >= 4P/(4P+1).
  Rat gain1 = simulationist_bound(inst, 0, t0, 1) - Rat(10);
  if (gain1 > 0) {
    rep.stage = 1;
    rep.witness_gain = gain1;
    std::ostringstream os;
    os << "4P(1-Q) - Q = "
       << format_rational(4 * rep.p1 * (1 - rep.q_product) - rep.q_product)
       << " > 0 at t0=" << t0 << " (lawyer detection short of 4P/(4P+1))";
    rep.inequality = os.str();
    rep.violated = true;
    return rep;
  }

  // Stage 2: deterring player 1 forced Pr[T_2 >= t0+1] >= 3/4, while
  // maximality caps Pr[T_1 >= t0+2] < 3/4 -- player 2's defection from
  // t0+1 now beats every corner punishment.
  Rat gain2 = simulationist_bound(inst, 1, t0 + 1, 1) - Rat(10);
  rep.stage = 2;
  rep.witness_gain = gain2;
  std::ostringstream os;
  os << "Pr[T_2>=t0+1] = "
     << format_rational(schedules[1].tail_mass_from(t0 + 1))
     << " >= 3/4 while Pr[T_1>=t0+2] = "
     << format_rational(schedules[0].tail_mass_from(t0 + 2))
     << " < 3/4 (t0 maximality); player 2 deviation gain "
     << format_rational(gain2);
  rep.inequality = os.str();
  rep.violated = gain2 > 0;
  return rep;
}

ImpossibilitySearchReport pirates_impossibility_search(int grid_points) {
  ImpossibilitySearchReport rep;
  const NormalFormGame& game = pirates_game();

  std::vector<std::vector<DeltaSchedule>> candidates;
  // Geometric grid eps in (0, 1/2].
  for (int g = 1; g <= grid_points; ++g) {
    Rat eps = Rat(g, 2 * grid_points);
    DeltaSchedule s = DeltaSchedule::geometric(eps);
    candidates.push_back({s, s, s});
  }
  // Two-block family: hold mass 1-m at step 0 and spread m geometrically
  // from step k (the shape of the population-game schedules).
  for (int k = 1; k <= 3; ++k)
    for (int g = 1; g <= std::min(grid_points, 4); ++g) {
      Rat m(1, g + 1);
      std::vector<Rat> head(k, Rat(0));
      head[0] = 1 - m;
      DeltaSchedule s;
      s.head = head;
      s.tail_coeff = m * Rat(1, 100);
      s.tail_ratio = Rat(99, 100);
      candidates.push_back({s, s, s});
    }
  // Degenerate point mass at 0: no detection at all.
  candidates.push_back({DeltaSchedule::point_mass(0),
                        DeltaSchedule::point_mass(0),
                        DeltaSchedule::point_mass(0)});

  SimulationistInstance inst;
  inst.game = &game;
  inst.path = {MixedStrategy::pure(0, 3), MixedStrategy::pure(0, 3),
               MixedStrategy::pure(0, 3)};
  inst.v = {10, 10, 10};

  for (const auto& sched : candidates) {
    ++rep.candidates;
    inst.schedules = sched;
    SimulationistReport check = simulationist_check(inst);
    PiratesChainReport chain = pirates_impossibility_chain(sched);
    if (check.pass || !chain.violated) {
      rep.anomaly = true;
      rep.notes.push_back("candidate " + std::to_string(rep.candidates) +
                          " PASSED the deviation check: contradicts the "
                          "known impossibility");
      continue;
    }
    ++rep.violated;
    rep.notes.push_back(chain.inequality);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// government/citizens population game

Rat gov_gain(const Rat& p, const Rat& q) {
  const Rat q99 = rat_pow(q, 99);
  const Rat keep99 = rat_pow(1 - q, 99);
  return p * (1 - q99) - 10 * (1 - p) * (1 - q99 - keep99) - 100 * q99;
}

Rat citizen_gain(const Rat& p, const Rat& q) {
  return p * (1 - q) - 10 * p * q - Rat(1, 10) * (1 - p) * q;
}

namespace {

DeltaSchedule gov_schedule() {
  DeltaSchedule s;
  s.head = {Rat(4, 5)};
  s.tail_coeff = Rat(1, 5) * Rat(1, 100);
  s.tail_ratio = Rat(99, 100);
  return s;
}

DeltaSchedule citizen_schedule() {
  DeltaSchedule s;
  s.head = {Rat(0), Rat(99, 100)};
  s.tail_coeff = Rat(1, 100) * Rat(1, 100);
  s.tail_ratio = Rat(99, 100);
  return s;
}

}  // namespace

GovCitizensReport gov_citizens_check() {
  GovCitizensReport rep;
  const DeltaSchedule gov = gov_schedule();
  const DeltaSchedule cit = citizen_schedule();
  std::ostringstream detail;

  bool ok = gov.valid() && cit.valid();

  // Government deviations: p = Pr[T_1 >= t0], q = Pr[T_j >= t0+1].
  // t0 = 0 and small t0 exactly; the geometric tail once via the bound
  //   gain <= 20q - 10(1-20q)(99q/(1+99q) - q^99)        (p = 20q there)
  // with (1-q)^99 <= 1/(1+99q) (AM-GM over the 100 factors (1+99q),
  // (1-q),...,(1-q)) and q^99 <= q/100^98 for q <= 1/100.
  for (std::size_t t0 = 0; t0 <= 60 && ok; ++t0) {
    Rat g = gov_gain(gov.tail_mass_from(t0), cit.tail_mass_from(t0 + 1));
    if (g >= 0) {
      ok = false;
      detail << "government gain " << format_rational(g) << " at t0=" << t0
             << "; ";
    }
  }
  if (ok) {
    // Structural identities behind the tail bound, verified exactly.
    for (std::size_t t0 = 1; t0 <= 5; ++t0)
      ok = ok && gov.tail_mass_from(t0) == 20 * cit.tail_mass_from(t0 + 1);
    ok = ok && cit.tail_mass_from(62) <= Rat(1, 100);
    // 99q/(1+99q) >= (9900/199) q for q <= 1/100, and 9900/199 - 1 >= 48, so
    // 1 - (1-q)^99 - q^99 >= 48q; then gain <= 20q - 10*(4/5)*48q < 0.
    ok = ok && Rat(9900, 199) - 1 >= 48 && Rat(20) - Rat(10) * Rat(4, 5) * 48 < 0;
    if (!ok) detail << "government tail bound failed; ";
  }

  // Citizen deviations: p = Pr[T_j >= t0], q = Pr[T_1 >= t0+1].
  for (std::size_t t0 = 0; t0 <= 2 && ok; ++t0) {
    Rat g = citizen_gain(cit.tail_mass_from(t0), gov.tail_mass_from(t0 + 1));
    if (g >= 0) {
      ok = false;
      detail << "citizen gain " << format_rational(g) << " at t0=" << t0
             << "; ";
    }
  }
  if (ok) {
    // t0 >= 2: gain <= p - (1/10)(1-p)q <= p - (1/10)(99/100)q, and both p
    // and q scale by the shared factor (99/100)^(t0-2), so one exact check
    // of the leading coefficient covers the whole tail.
    const Rat p2 = cit.tail_mass_from(2);   // 1/100
    const Rat q2 = gov.tail_mass_from(3);   // (1/5)(99/100)^2
    ok = ok && p2 - Rat(1, 10) * Rat(99, 100) * q2 < 0 && p2 <= Rat(1, 100);
    if (!ok) detail << "citizen tail bound failed; ";
  }
  rep.custom_schedules_pass = ok;

  // Geometric pairs: sweep in double for a profitable deviation, then
  // confirm the found point in exact rationals.
  rep.geometric_all_fail = true;
  for (int g1 = 1; g1 <= 10; ++g1) {
    for (int g2 = 1; g2 <= 10; ++g2) {
      const Rat e1(g1, 20), e2(g2, 20);
      const double l1 = 1 - to_double(e1), l2 = 1 - to_double(e2);
      bool found = false;
      for (int t0 = 0; t0 <= 2000 && !found; ++t0) {
        // Citizen first: its confirmation avoids the 99th powers.
        const double pc = std::pow(l2, t0), qc = std::pow(l1, t0 + 1);
        if (pc * (1 - qc) - 10 * pc * qc - 0.1 * (1 - pc) * qc > 1e-12) {
          Rat p = rat_pow(1 - e2, t0), q = rat_pow(1 - e1, t0 + 1);
          found = citizen_gain(p, q) > 0;
          if (found)
            detail << "geometric(" << format_rational(e1) << ","
                   << format_rational(e2) << "): citizen gain at t0=" << t0
                   << "; ";
        }
        const double pg = std::pow(l1, t0), qg = std::pow(l2, t0 + 1);
        const double q99 = std::pow(qg, 99), k99 = std::pow(1 - qg, 99);
        if (!found &&
            pg * (1 - q99) - 10 * (1 - pg) * (1 - q99 - k99) - 100 * q99 >
                1e-12) {
          Rat p = rat_pow(1 - e1, t0), q = rat_pow(1 - e2, t0 + 1);
          found = gov_gain(p, q) > 0;
          if (found)
            detail << "geometric(" << format_rational(e1) << ","
                   << format_rational(e2) << "): government gain at t0=" << t0
                   << "; ";
        }
      }
      if (!found) {
        rep.geometric_all_fail = false;
        rep.anomaly = true;
        detail << "geometric(" << format_rational(e1) << ","
               << format_rational(e2)
               << ") admitted no profitable deviation: ANOMALY; ";
      }
    }
  }
  rep.detail = detail.str();
  return rep;
}

// ---------------------------------------------------------------------------
// 2-player detection schedules

namespace {

// Normalized payoff u_i - u_i(c) of the mixture ((1-p)c_1 + p a_1,
// (1-q)c_2 + q a_2).
Rat mixture_value(const NormalFormGame& game, int i, const ActionProfile& c,
                  int a1, const Rat& p, int a2, const Rat& q) {
  StrategyProfile prof(2);
  for (int k = 0; k < 2; ++k) {
    prof[k].probs.assign(game.action_count(k), Rat(0));
    prof[k].probs[c[k]] += k == 0 ? 1 - p : 1 - q;
    prof[k].probs[k == 0 ? a1 : a2] += k == 0 ? p : q;
  }
  return expected_utility(game, prof)[i] - game.payoff(i, c);
}

// Minimal detection mass q on `defender` such that attacker `i` deviating
// with mass p to d gains nothing; infinity encoded as nullopt.
std::optional<Rat> min_detection(const NormalFormGame& game, int i,
                                 const ActionProfile& c, int d, const Rat& p,
                                 int punishment) {
  const int attacker_slot = i;
  Rat a0 =
      attacker_slot == 0
          ? mixture_value(game, i, c, d, p, c[1], Rat(0))
          : mixture_value(game, i, c, c[0], Rat(0), d, p);  // value at q=0
  Rat a1 = attacker_slot == 0
               ? mixture_value(game, i, c, d, p, punishment, Rat(1))
               : mixture_value(game, i, c, punishment, Rat(1), d, p);
  if (a0 <= 0) return Rat(0);
  if (a1 >= 0) return std::nullopt;  // even full detection fails
  return a0 / (a0 - a1);  // linear in q
}

// q_i(p): detection needed against attacker i deviating with mass p --
// worst pure deviation, best pure punishment.
std::optional<Rat> required_detection(const NormalFormGame& game, int i,
                                      const ActionProfile& c, const Rat& p) {
  const int defender = 1 - i;
  Rat worst = 0;
  for (int d = 0; d < game.action_count(i); ++d) {
    if (d == c[i]) continue;
    std::optional<Rat> best;
    for (int s = 0; s < game.action_count(defender); ++s) {
      std::optional<Rat> q = min_detection(game, i, c, d, p, s);
      if (q && (!best || *q < *best)) best = q;
    }
    if (!best) return std::nullopt;
    worst = std::max(worst, *best);
  }
  return worst;
}

}  // namespace

DetectionScheduleResult detection_schedule_2p(const NormalFormGame& game,
                                              const ActionProfile& c,
                                              int resolution) {
  DetectionScheduleResult res;
  if (game.player_count() != 2)
    throw std::invalid_argument("detection schedules are 2-player only");

  // Strict individual rationality.
  for (int i = 0; i < 2; ++i) {
    MinimaxResult mm = minimax(game, i);
    if (!(game.payoff(i, c) > mm.value)) {
      res.message = "target is not strictly individually rational for player " +
                    std::to_string(i);
      return res;
    }
  }
  // Strict Pareto-in-the-limit over pure deviation pairs: for every pure
  // (s1, s2) != c some player strictly prefers c to the average of the two
  // unilateral switches.
  for (int a1 = 0; a1 < game.action_count(0); ++a1)
    for (int a2 = 0; a2 < game.action_count(1); ++a2) {
      if (a1 == c[0] && a2 == c[1]) continue;
      bool someone = false;
      for (int i = 0; i < 2 && !someone; ++i) {
        Rat avg = game.payoff(i, {a1, c[1]}) + game.payoff(i, {c[0], a2});
        someone = avg < 2 * game.payoff(i, c);
      }
      if (!someone) {
        std::ostringstream os;
        os << "not strictly Pareto-in-the-limit at pure pair (" << a1 << ","
           << a2 << "): u_i(s1,c2)+u_i(c1,s2) >= 2 u_i(c) for both players";
        res.message = os.str();
        return res;
      }
    }

  // Degenerate sides: a player with no profitable unilateral deviation
  // needs no detection at all.
  bool need[2];
  for (int i = 0; i < 2; ++i) {
    need[i] = false;
    for (int d = 0; d < game.action_count(i); ++d) {
      ActionProfile a = c;
      a[i] = d;
      if (game.payoff(i, a) > game.payoff(i, c)) need[i] = true;
    }
  }
  if (!need[0] || !need[1]) {
    res.ok = true;
    res.degenerate = true;
    res.eps = Rat(1, 2);
    // tail_i(t): detection of the *other* player's deviations; constant 1
    // where needed, 0 otherwise (beyond t=0 the deviator has no mass left).
    res.tail1 = {Rat(1), need[1] ? Rat(1) : Rat(0)};
    res.tail2 = {Rat(1), need[0] ? Rat(1) : Rat(0)};
    res.message = "degenerate: at least one side needs no deterrence";
    return res;
  }

  // Limit ratio as p -> 0: composition of the two linear detection rates
  // must contract.
  Rat num1 = 0, den1 = 0, num2 = 0, den2 = 0;
  for (int d = 0; d < game.action_count(0); ++d)
    num1 = std::max(num1, game.payoff(0, {d, c[1]}) - game.payoff(0, c));
  for (int s = 0; s < game.action_count(1); ++s)
    den1 = std::max(den1, game.payoff(0, c) - game.payoff(0, {c[0], s}));
  for (int d = 0; d < game.action_count(1); ++d)
    num2 = std::max(num2, game.payoff(1, {c[0], d}) - game.payoff(1, c));
  for (int s = 0; s < game.action_count(0); ++s)
    den2 = std::max(den2, game.payoff(1, c) - game.payoff(1, {s, c[1]}));
  if (den1 == 0 || den2 == 0) {
    res.message = "no punishing action strictly hurts a deviator at c";
    return res;
  }
  res.limit_ratio = (num1 / den1) * (num2 / den2);

  // Grid supremum of the detection composition ratio.
  Rat sup = res.limit_ratio;
  std::optional<Rat> q1_at_1, q2_at_1;
  for (int g = 1; g <= resolution; ++g) {
    const Rat p(g, resolution);
    std::optional<Rat> q2 = required_detection(game, 0, c, p);
    if (!q2) {
      res.message = "player 1 deviation cannot be deterred at mass " +
                    format_rational(p);
      return res;
    }
    std::optional<Rat> q1 = required_detection(game, 1, c, *q2);
    if (!q1) {
      res.message = "player 2 deviation cannot be deterred";
      return res;
    }
    sup = std::max(sup, *q1 / p);
    if (g == resolution) {
      q2_at_1 = q2;
      q1_at_1 = required_detection(game, 1, c, Rat(1));
    }
  }
  if (sup >= 1) {
    res.message =
        "detection composition ratio reaches " + format_rational(sup) +
        " >= 1 on the grid";
    return res;
  }

  // Choose eps = 1/k with ((k-1)/k)^2 > sup and 1-eps covering the full-mass
  // detections, then lay out tail1 geometric and tail2 by composition.
  int k = 2;
  while (k < 1'000'000) {
    Rat keep = Rat(k - 1, k);
    if (keep * keep > sup && keep >= *q1_at_1 && keep >= *q2_at_1) break;
    ++k;
  }
  res.eps = Rat(1, k);
  const Rat keep = 1 - res.eps;
  const Rat negligible(1, 1'000'000'000);
  res.tail1 = {Rat(1)};
  res.tail2 = {Rat(1)};
  while (res.tail1.back() >= negligible && res.tail1.size() < 100'000)
    res.tail1.push_back(res.tail1.back() * keep);
  for (std::size_t t = 1; t < res.tail1.size(); ++t) {
    std::optional<Rat> q2 = required_detection(game, 0, c, res.tail1[t - 1]);
    if (!q2) {
      res.message = "composition failed mid-table";
      return res;
    }
    res.tail2.push_back(*q2);
  }
  // Exact verification of both detection constraints over the horizon.
  for (std::size_t t = 0; t + 1 < res.tail1.size(); ++t) {
    std::optional<Rat> want2 = required_detection(game, 0, c, res.tail1[t]);
    std::optional<Rat> want1 = required_detection(game, 1, c, res.tail2[t]);
    if (!want2 || res.tail2[t + 1] < *want2 || !want1 ||
        res.tail1[t + 1] < *want1) {
      res.message = "detection constraint violated at t=" + std::to_string(t);
      return res;
    }
    if (res.tail2[t + 1] > res.tail2[t]) {
      res.message = "composed schedule not monotone at t=" + std::to_string(t);
      return res;
    }
  }
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo deviation probe

DeviationReport empirical_best_response(
    const NormalFormGame& game, const std::vector<ProgramHandle>& profile,
    int deviator, const std::function<ProgramHandle(double)>& family,
    double parameter, Mode mode, long long trials, std::uint64_t seed,
    const TrialConfig& config) {
  DeviationReport rep;
  rep.parameter = parameter;
  rep.trials = trials;

  // Both runs share the trial seeds (common random numbers), which cancels
  // most of the opponents' sampling noise out of the gain estimate.
  OutcomeEstimate base =
      estimate_outcomes(game, profile, mode, trials, seed, config);
  std::vector<ProgramHandle> deviated = profile;
  deviated[deviator] = family(parameter);
  OutcomeEstimate dev =
      estimate_outcomes(game, deviated, mode, trials, seed, config);

  rep.non_halt_rate = std::max(base.non_halt_rate, dev.non_halt_rate);
  if (rep.non_halt_rate > 0.02)
    throw std::runtime_error("excessive non-halting in deviation probe: " +
                             std::to_string(rep.non_halt_rate));
  rep.baseline_mean = base.mean_payoff[deviator];
  rep.baseline_se = base.payoff_se[deviator];
  rep.attacker_mean = dev.mean_payoff[deviator];
  rep.attacker_se = dev.payoff_se[deviator];
  rep.gain = rep.attacker_mean - rep.baseline_mean;
  rep.gain_se = std::sqrt(rep.attacker_se * rep.attacker_se +
                          rep.baseline_se * rep.baseline_se);
  return rep;
}

}  // namespace progeq
