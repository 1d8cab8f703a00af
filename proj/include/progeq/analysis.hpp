#pragma once

#include "progeq/game.hpp"
#include "progeq/montecarlo.hpp"
#include "progeq/streams.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace progeq {

// --- closed-form treasure-split (pirates) deviation values -----------------

// Value of a probability-q defection against lawyer punishment, where each
// punisher independently detects with probability `detect`.
Rat pirates_value_l_punish(const Rat& q, const Rat& detect);
// Same against defection punishment.
Rat pirates_value_d_punish(const Rat& q, const Rat& detect);

// Deviation values at detection probability q (uncorrelated limit):
// (lawyer-punish value, defect-punish value).
std::pair<Rat, Rat> example3_values(const Rat& q);

// --- closed-form epsilon thresholds -----------------------------------------

struct ThresholdEntry {
  std::string name;  // "intro" | "pd3" | "pirates-correlated"
  Rat threshold;     // gain changes sign here
  // Deviation gain at deviation probability q and grounding parameter eps;
  // positive above the threshold, negative below.
  std::function<Rat(const Rat& q, const Rat& eps)> gain;
};

std::vector<ThresholdEntry> epsilon_thresholds();

// --- punishment-map conditions ----------------------------------------------

// For deviator i: maps[j] is j's response to each of i's actions (empty for
// j == i).
struct PunishmentMap {
  int deviator = 0;
  std::vector<std::vector<MixedStrategy>> maps;
};

enum class Prop5Verdict { Holds, Fails, Indeterminate };

struct Prop5Report {
  Prop5Verdict verdict = Prop5Verdict::Indeterminate;
  int worst_player = -1;
  std::string detail;
};

// Sufficiency condition for uncorrelated pi-bot equilibria at payoff u(s):
// per player, a punishment map must cap every (q, s_i') mixture deviation at
// v_i - lambda*q.  "Holds" is certified by exhibiting a corner map whose
// exact q-polynomial maximum over every pure deviation stays below v_i;
// "Fails" by an exact positive derivative at q=0 (linear in the map, so
// corner enumeration is exhaustive); anything else is honest indeterminacy.
Prop5Report prop5_check(const NormalFormGame& game, const StrategyProfile& s,
                        const Rat& lambda, int resolution = 64);

struct Cor7Report {
  bool violated = false;
  int player = -1;          // violating player, when violated
  int witness_action = -1;  // s_i'
  Rat value = 0;            // the positive max-min value at the witness
  std::vector<Rat> per_player_value;  // max-min per player
};

// Necessary condition: at payoffs v = u(s), no player i may have a pure
// s_i' with   u_i(s_i', s_-i) - v_i + sum_{j != i} min_{s_j'} (u_i(s_j',
// s_-j) - v_i) > 0.  Exact rationals, exhaustive over pure actions.
Cor7Report cor7_check(const NormalFormGame& game, const StrategyProfile& s,
                      const PayoffVector& v);

// --- simulationist (delta-schedule) necessary condition ---------------------

struct SimulationistInstance {
  const NormalFormGame* game = nullptr;
  std::vector<DeltaSchedule> schedules;  // per-player time-step laws
  StrategyProfile path;                  // constant per-step strategies c_j
  PayoffVector v;                        // target payoffs
};

// Attacker value when player `attacker` switches to pure action d from time
// t0 on (probability tail_i(t0)) and each defender j switches to pure s_j
// from t0+1 on (probability tail_j(t0+1)); minimized over defender corners.
// Exact rationals.
Rat simulationist_bound(const SimulationistInstance& inst, int attacker,
                        std::size_t t0, int d);

struct SimulationistReport {
  bool pass = true;  // v_i >= attacker value for every tested deviation
  int attacker = -1;
  std::size_t t0 = 0;
  int deviation = -1;
  // First profitable deviation found (sweep stops there), else the maximum
  // deficit over the whole sweep.
  Rat gain = 0;
  std::size_t t0_sweep_end = 0;
};

// Sweeps t0 until every schedule tail drops below 1e-9 and every pure d.
SimulationistReport simulationist_check(const SimulationistInstance& inst);

// --- treasure-split impossibility (pure cooperative target) -----------------

struct PiratesChainReport {
  std::size_t t0 = 0;   // maximal t with Pr[T_1 >= t] >= 3/4
  Rat p1;               // Pr[T_1 >= t0]
  Rat q_product;        // Pr[T_2 >= t0+1] * Pr[T_3 >= t0+1]
  int stage = 0;        // 1: lawyer detection short at t0; 2: player-2 step
  Rat witness_gain;     // the positive deviation gain found
  std::string inequality;
  bool violated = false;
};

// The two-step argument that no schedule triple supports the pure
// all-cooperate split: either lawyer detection at t0 is short of
// 4P/(4P+1) (and defect-punishment is already beaten by 14P > 10), or the
// detection mass forces player 2's own deviation at t0+1 past every corner
// punishment.  Exact rationals.
PiratesChainReport pirates_impossibility_chain(
    const std::vector<DeltaSchedule>& schedules);

struct ImpossibilitySearchReport {
  long long candidates = 0;
  long long violated = 0;
  bool anomaly = false;  // a candidate passed: contradicts the known result
  std::vector<std::string> notes;
};

// Geometric grid plus two-block (point-mass head + geometric tail) schedule
// families; every candidate must be rejected, a pass is a loud anomaly.
ImpossibilitySearchReport pirates_impossibility_search(int grid_points);

// --- government/citizens schedules (one dictator, 99 citizens) --------------

struct GovCitizensReport {
  bool custom_schedules_pass = false;  // the two-block schedules: exact
  bool geometric_all_fail = false;     // every geometric pair has a deviation
  bool anomaly = false;
  std::string detail;
};

// Population game evaluated in closed form (payoffs depend only on the
// dictator action and the count of escalating citizens, so the 100-player
// tensor is never materialized).  Government deviation gain at defection
// mass p and per-citizen detection mass q:
//   p(1-q^99) - 10(1-p)(1-q^99-(1-q)^99) - 100 q^99,
// citizen gain at deviation mass p and government detection mass q:
//   p(1-q) - 10pq - (1/10)(1-p)q.
Rat gov_gain(const Rat& p, const Rat& q);
Rat citizen_gain(const Rat& p, const Rat& q);
GovCitizensReport gov_citizens_check();

// --- 2-player detection-schedule constructor --------------------------------

struct DetectionScheduleResult {
  bool ok = false;
  bool degenerate = false;  // one side needed no deterrence
  std::string message;      // violating inequality when !ok
  Rat eps;                  // geometric parameter chosen for player 1
  // Pr[T_i >= t] tables over the verified horizon.
  std::vector<Rat> tail1, tail2;
  Rat limit_ratio;  // p->0 detection-composition ratio (must be < 1)
};

// Builds per-player detection schedules deterring every deviation from the
// target pure profile c, for 2-player games where c is strictly IR and
// strictly Pareto-in-the-limit; otherwise reports the failing precondition.
DetectionScheduleResult detection_schedule_2p(const NormalFormGame& game,
                                              const ActionProfile& c,
                                              int resolution = 64);

// --- Monte Carlo deviation probe --------------------------------------------

struct DeviationReport {
  double parameter = 0;
  double attacker_mean = 0, attacker_se = 0;
  double baseline_mean = 0, baseline_se = 0;
  double gain = 0, gain_se = 0;
  double non_halt_rate = 0;
  long long trials = 0;
};

// Replaces profile[deviator] with family(parameter), estimates both runs,
// and reports the empirical gain.  Throws on excessive non-halting.
DeviationReport empirical_best_response(
    const NormalFormGame& game, const std::vector<ProgramHandle>& profile,
    int deviator, const std::function<ProgramHandle(double)>& family,
    double parameter, Mode mode, long long trials, std::uint64_t seed,
    const TrialConfig& config);

}  // namespace progeq
