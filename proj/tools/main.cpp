// progeq: deterministic simulation and equilibrium analysis for program games.
//
//   progeq simulate <scenario>   run a bot profile and report outcomes
//   progeq check-eq <scenario>   probe declared deviation families, verdicts
//   progeq paper-suite           run the full verification battery
//
// Scenarios are JSON files or builtin names (progeq simulate --list).

#include "progeq/analysis.hpp"
#include "progeq/bots.hpp"
#include "progeq/builtins.hpp"
#include "progeq/criteria.hpp"
#include "progeq/montecarlo.hpp"
#include "progeq/repeated.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace progeq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNonHalting = 3;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rat json_to_rat(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long long>());
  if (v.is_number_unsigned()) return Rat(v.get<unsigned long long>());
  if (v.is_number_float()) return Rat(v.get<double>());  // exact binary value
  throw ParseError(where + ": expected number or \"p/q\" string");
}

// --- game files -------------------------------------------------------------

std::unique_ptr<NormalFormGame> parse_game_file(const json& doc) {
  if (!doc.contains("actions") || !doc["actions"].is_array())
    throw ParseError("game file: missing actions array");
  std::vector<std::vector<std::string>> labels;
  for (const auto& pl : doc["actions"]) {
    labels.emplace_back();
    for (const auto& a : pl) labels.back().push_back(a.get<std::string>());
  }
  const int n = static_cast<int>(labels.size());
  std::vector<PayoffVector> cells;
  // Nested row-major arrays: one level per player, innermost = payoff vector.
  std::function<void(const json&, int)> walk = [&](const json& node,
                                                   int depth) {
    if (!node.is_array())
      throw ParseError("game file: payoffs must be nested arrays");
    if (depth == n) {
      PayoffVector u;
      for (const auto& x : node) u.push_back(json_to_rat(x, "payoffs"));
      if (static_cast<int>(u.size()) != n)
        throw ParseError("game file: payoff vector arity mismatch");
      cells.push_back(std::move(u));
      return;
    }
    if (node.size() != labels[depth].size())
      throw ParseError("game file: payoff tensor shape mismatch");
    for (const auto& child : node) walk(child, depth + 1);
  };
  walk(doc.at("payoffs"), 0);
  return std::make_unique<NormalFormGame>(std::move(labels), std::move(cells));
}

// --- scenarios ---------------------------------------------------------------

struct Scenario {
  std::string name;
  json doc;
  const NormalFormGame* game = nullptr;
  std::unique_ptr<NormalFormGame> owned_game;
  std::string game_name;
  Mode mode = Mode::Correlated;
  double epsilon = 0.1;
  long long trials = 10'000;
  std::uint64_t seed = 1;
  TrialConfig trial_config;
  double non_halt_limit = 0.95;
  std::vector<ProgramHandle> bots;
  json bot_specs;
  json analysis;
};

json builtin_scenario(const std::string& name) {
  if (name == "pirates-correlated-eq")
    return json{{"game", "pirates"},
                {"mode", "correlated"},
                {"epsilon", 0.2},
                {"trials", 20000},
                {"seed", 1},
                {"bots", json::array({json{{"type", "pi"}, {"policy", "pirates"}},
                                      json{{"type", "pi"}, {"policy", "pirates"}},
                                      json{{"type", "pi"}, {"policy", "pirates"}}})}};
  if (name == "pirates-uncorrelated")
    return json{{"game", "pirates"},
                {"mode", "uncorrelated"},
                {"epsilon", 0.05},
                {"trials", 100000},
                {"seed", 1},
                {"memo", json{{"apply", true}}},
                {"bots", json::array({json{{"type", "pi"}, {"policy", "pirates"}},
                                      json{{"type", "pi"}, {"policy", "pirates"}},
                                      json{{"type", "pi"}, {"policy", "pirates"}}})},
                {"analysis",
                 json{{"deviations",
                       json::array({json{{"player", 0},
                                         {"family", "q-mix"},
                                         {"dev_action", "D"},
                                         {"q", json::array({0.75})}}})}}}};
  if (name == "trust-simple-doublesample")
    return json{{"game", "trust-simple"},
                {"mode", "correlated"},
                {"epsilon", 1.0},
                {"trials", 20000},
                {"seed", 1},
                {"bots",
                 json::array({json{{"type", "double-sample"},
                                   {"opponent", 1},
                                   {"trigger", "F"},
                                   {"yes", "S"},
                                   {"no", "K"}},
                              json{{"type", "constant"}, {"action", "F"}}})}};
  if (name == "intro-uncorrelated")
    return json{{"game", "intro"},
                {"mode", "uncorrelated"},
                {"epsilon", 0.1},
                {"trials", 50000},
                {"seed", 1},
                {"memo", json{{"apply", true}}},
                {"bots", json::array({json{{"type", "pi"}, {"policy", "intro"}},
                                      json{{"type", "pi"}, {"policy", "intro"}},
                                      json{{"type", "pi"}, {"policy", "intro"}}})},
                {"analysis",
                 json{{"deviations",
                       json::array({json{{"player", 1},
                                         {"family", "q-mix"},
                                         {"dev_action", "D"},
                                         {"q", json::array({0.5, 1.0})}},
                                    json{{"player", 2},
                                         {"family", "q-mix"},
                                         {"dev_action", "D"},
                                         {"q", json::array({0.5, 1.0})}}})}}}};
  if (name == "pd3-allD")
    return json{{"game", "pd3"},
                {"mode", "uncorrelated"},
                {"epsilon", 0.25},
                {"trials", 20000},
                {"seed", 1},
                {"bots", json::array({json{{"type", "constant"}, {"action", "D"}},
                                      json{{"type", "constant"}, {"action", "D"}},
                                      json{{"type", "constant"}, {"action", "D"}}})}};
  return json();
}

std::vector<std::string> builtin_scenario_names() {
  return {"pirates-correlated-eq", "pirates-uncorrelated",
          "trust-simple-doublesample", "intro-uncorrelated", "pd3-allD"};
}

int action_from_json(const NormalFormGame& game, int player, const json& v,
                     const std::string& where) {
  if (v.is_number_integer()) {
    int a = v.get<int>();
    if (a < 0 || a >= game.action_count(player))
      throw ParseError(where + ": action index out of range");
    return a;
  }
  if (v.is_string()) {
    int a = game.action_index(player, v.get<std::string>());
    if (a < 0) throw ParseError(where + ": unknown action label");
    return a;
  }
  throw ParseError(where + ": expected action index or label");
}

Policy named_policy(const NormalFormGame& game, const std::string& name,
                    int player, const json& spec) {
  if (name == "pirates") return pirates_policy();
  if (name == "intro") return intro_policy(player);
  if (name == "trust-mixed") return trust_mixed_policy(player);
  if (name == "constant")
    return constant_policy(
        action_from_json(game, player, spec.at("action"), "policy constant"));
  if (name == "grim") {
    ActionProfile target;
    const auto& tj = spec.at("target");
    for (int j = 0; j < game.player_count(); ++j)
      target.push_back(action_from_json(game, j, tj.at(j), "policy grim"));
    return grim_minimax_policy(game, target, player);
  }
  throw ParseError("unknown policy name: " + name);
}

ProgramHandle build_bot(const Scenario& sc, int player, const json& spec) {
  const std::string type = spec.value("type", "pi");
  const NormalFormGame& game = *sc.game;
  const int n = game.player_count();
  if (type == "pi") {
    Policy p = named_policy(game, spec.value("policy", "constant"), player,
                            spec);
    return sc.mode == Mode::Correlated
               ? build_correlated_bot(player, n, sc.epsilon, std::move(p))
               : build_uncorrelated_bot(player, n, sc.epsilon, std::move(p));
  }
  if (type == "constant")
    return build_constant_bot(
        player, action_from_json(game, player, spec.at("action"), "constant"));
  if (type == "double-sample")
    return build_double_sample_bot(
        player, spec.at("opponent").get<int>(),
        action_from_json(game, spec.at("opponent").get<int>(),
                         spec.at("trigger"), "double-sample"),
        action_from_json(game, player, spec.at("yes"), "double-sample"),
        action_from_json(game, player, spec.at("no"), "double-sample"));
  if (type == "naive-sim")
    return build_naive_sim_bot(
        player, n, sc.epsilon,
        action_from_json(game, player, spec.value("coop", json(0)),
                         "naive-sim"),
        action_from_json(game, player, spec.value("defect", json(1)),
                         "naive-sim"));
  if (type == "stream-mix")
    return build_stream_mix_bot(
        player, spec.at("q").get<double>(),
        action_from_json(game, player, spec.at("a"), "stream-mix"),
        action_from_json(game, player, spec.at("b"), "stream-mix"));
  throw ParseError("unknown bot type: " + type);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<double> epsilon;
  std::optional<int> fuel_depth;
  std::optional<long long> fuel_calls;
  std::optional<std::string> memo;
  int threads = 1;
};

Scenario load_scenario(const std::string& ref, const Overrides& ov) {
  Scenario sc;
  sc.name = ref;
  sc.doc = builtin_scenario(ref);
  if (sc.doc.is_null()) {
    std::ifstream in(ref);
    if (!in) throw ParseError("cannot open scenario: " + ref);
    try {
      sc.doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError(std::string("scenario JSON: ") + e.what());
    }
  }
  try {
    const std::string game_ref = sc.doc.at("game").get<std::string>();
    if (const NormalFormGame* g = builtin_game(game_ref)) {
      sc.game = g;
      sc.game_name = game_ref;
    } else {
      std::ifstream in(game_ref);
      if (!in) throw ParseError("cannot open game file: " + game_ref);
      sc.owned_game = parse_game_file(json::parse(in));
      sc.game = sc.owned_game.get();
      sc.game_name = game_ref;
    }
    const std::string mode = sc.doc.value("mode", "correlated");
    if (mode == "correlated")
      sc.mode = Mode::Correlated;
    else if (mode == "uncorrelated")
      sc.mode = Mode::Uncorrelated;
    else
      throw ParseError("mode must be correlated|uncorrelated");
    sc.epsilon = ov.epsilon.value_or(sc.doc.value("epsilon", 0.1));
    if (!(sc.epsilon > 0 && sc.epsilon <= 1))
      throw ParseError("epsilon must be in (0, 1]");
    sc.trials = ov.trials.value_or(sc.doc.value("trials", 10'000LL));
    sc.seed = ov.seed.value_or(sc.doc.value("seed", 1ULL));
    if (sc.doc.contains("fuel")) {
      sc.trial_config.fuel.max_depth =
          sc.doc["fuel"].value("depth", sc.trial_config.fuel.max_depth);
      sc.trial_config.fuel.max_calls =
          sc.doc["fuel"].value("calls", sc.trial_config.fuel.max_calls);
    }
    if (ov.fuel_depth) sc.trial_config.fuel.max_depth = *ov.fuel_depth;
    if (ov.fuel_calls) sc.trial_config.fuel.max_calls = *ov.fuel_calls;
    if (sc.doc.contains("memo")) {
      sc.trial_config.memo_apply_star =
          sc.doc["memo"].value("apply_star", true);
      sc.trial_config.memo_apply = sc.doc["memo"].value("apply", false);
    }
    if (ov.memo) {
      sc.trial_config.memo_apply_star = *ov.memo == "on";
      sc.trial_config.memo_apply =
          *ov.memo == "on" && sc.mode == Mode::Uncorrelated;
    }
    sc.non_halt_limit = sc.doc.value("non_halt_limit", 0.95);
    sc.bot_specs = sc.doc.at("bots");
    if (static_cast<int>(sc.bot_specs.size()) != sc.game->player_count())
      throw ParseError("bot count must match the game's player count");
    for (int i = 0; i < sc.game->player_count(); ++i)
      sc.bots.push_back(build_bot(sc, i, sc.bot_specs.at(i)));
    sc.analysis = sc.doc.value("analysis", json::object());
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return sc;
}

// --- reports -----------------------------------------------------------------

json outcome_to_json(const NormalFormGame& game, const OutcomeEstimate& est) {
  json out;
  out["trials"] = est.trials;
  out["halted"] = est.halted;
  out["non_halt_rate"] = est.non_halt_rate;
  json counts = json::object();
  for (const auto& [profile, c] : est.counts) {
    std::string key;
    for (int i = 0; i < game.player_count(); ++i) {
      if (i) key += ",";
      key += game.actions(i)[profile[i]];
    }
    counts[key] = c;
  }
  out["outcome_counts"] = counts;
  json marg = json::array();
  for (int i = 0; i < game.player_count(); ++i) {
    json m = json::object();
    for (int a = 0; a < game.action_count(i); ++a)
      m[game.actions(i)[a]] = est.marginal_counts[i][a];
    marg.push_back(m);
  }
  out["marginal_counts"] = marg;
  out["mean_payoff"] = est.mean_payoff;
  out["payoff_se"] = est.payoff_se;
  out["trace"] = json{{"mean_total_calls", est.mean_total_calls},
                      {"mean_max_depth", est.mean_max_depth},
                      {"mean_apply_star_calls", est.mean_apply_star_calls},
                      {"mean_memo_hits", est.mean_memo_hits},
                      {"max_distinct_memo_keys", est.max_distinct_memo_keys}};
  return out;
}

json scenario_echo(const Scenario& sc, int threads) {
  return json{{"scenario", sc.name},
              {"game", sc.game_name},
              {"mode", sc.mode == Mode::Correlated ? "correlated"
                                                   : "uncorrelated"},
              {"epsilon", sc.epsilon},
              {"trials", sc.trials},
              {"seed", sc.seed},
              {"threads", threads},
              {"fuel", json{{"depth", sc.trial_config.fuel.max_depth},
                            {"calls", sc.trial_config.fuel.max_calls}}},
              {"memo", json{{"apply_star", sc.trial_config.memo_apply_star},
                            {"apply", sc.trial_config.memo_apply}}}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void flatten_csv(const json& node, const std::string& prefix,
                 std::ostream& os) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items())
      flatten_csv(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten_csv(node[i], prefix + "[" + std::to_string(i) + "]", os);
  } else if (node.is_string()) {
    os << csv_field(prefix) << "," << csv_field(node.get<std::string>())
       << "\n";
  } else {
    os << csv_field(prefix) << "," << node.dump() << "\n";
  }
}

void emit_report(const json& report, const std::string& out_path,
                 const std::string& format) {
  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << "key,value\n";
    flatten_csv(report, "", os);
    text = os.str();
  } else {
    text = report.dump(2);
    text += "\n";
  }
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

// --- check-eq ----------------------------------------------------------------

json run_deviations(const Scenario& sc, int threads, bool& any_profitable) {
  (void)threads;
  json out = json::array();
  json devs = sc.analysis.value("deviations", json::array());
  if (devs.empty()) {
    // Default battery: every player, every alternative pure action.
    for (int i = 0; i < sc.game->player_count(); ++i)
      for (int a = 0; a < sc.game->action_count(i); ++a)
        devs.push_back(json{{"player", i},
                            {"family", "constant"},
                            {"dev_action", a},
                            {"q", json::array({1.0})}});
  }
  const long long trials = sc.analysis.value("trials", sc.trials);
  for (const auto& d : devs) {
    const int player = d.at("player").get<int>();
    const std::string family = d.value("family", "q-mix");
    const int dev =
        action_from_json(*sc.game, player, d.at("dev_action"), "deviation");
    std::function<ProgramHandle(double)> make;
    if (family == "q-mix") {
      ProgramHandle base = sc.bots[player];
      const double eps = sc.epsilon;
      const int ac = sc.game->action_count(player);
      make = [base, eps, dev, ac](double q) {
        return build_q_mix_bot(base, eps, q, MixedStrategy::pure(dev, ac));
      };
    } else if (family == "constant") {
      make = [player, dev](double) { return build_constant_bot(player, dev); };
    } else {
      throw ParseError("unknown deviation family: " + family);
    }
    for (const auto& qv : d.value("q", json::array({1.0}))) {
      const double q = qv.get<double>();
      DeviationReport rep = empirical_best_response(
          *sc.game, sc.bots, player, make, q, sc.mode, trials,
          mix_u64(sc.seed, 0xDE71A7E), sc.trial_config);
      const bool profitable = rep.gain - 3 * rep.gain_se > 0;
      any_profitable = any_profitable || profitable;
      out.push_back(json{{"player", player},
                         {"family", family},
                         {"dev_action", sc.game->actions(player)[dev]},
                         {"q", q},
                         {"gain", rep.gain},
                         {"gain_se", rep.gain_se},
                         {"profitable", profitable}});
    }
  }
  return out;
}

// --- commands ----------------------------------------------------------------

int cmd_simulate(const std::string& scenario_ref, const Overrides& ov,
                 const std::string& out_path, const std::string& format) {
  Scenario sc = load_scenario(scenario_ref, ov);
  OutcomeEstimate est =
      estimate_outcomes(*sc.game, sc.bots, sc.mode, sc.trials, sc.seed,
                        sc.trial_config, ov.threads);
  json report;
  report["command"] = "simulate";
  report["config"] = scenario_echo(sc, ov.threads);
  report["results"] = outcome_to_json(*sc.game, est);
  emit_report(report, out_path, format);
  return est.non_halt_rate > sc.non_halt_limit ? kExitNonHalting : kExitOk;
}

int cmd_check_eq(const std::string& scenario_ref, const Overrides& ov,
                 const std::string& out_path, const std::string& format) {
  Scenario sc = load_scenario(scenario_ref, ov);
  json report;
  report["command"] = "check-eq";
  report["config"] = scenario_echo(sc, ov.threads);

  OutcomeEstimate est =
      estimate_outcomes(*sc.game, sc.bots, sc.mode, sc.trials, sc.seed,
                        sc.trial_config, ov.threads);
  report["on_path"] = outcome_to_json(*sc.game, est);
  if (est.non_halt_rate > sc.non_halt_limit) {
    emit_report(report, out_path, format);
    return kExitNonHalting;
  }

  bool any_profitable = false;
  report["deviations"] = run_deviations(sc, ov.threads, any_profitable);

  // Optional exact analyses against declared target payoffs/profile.
  if (sc.analysis.contains("cor7")) {
    const auto& cj = sc.analysis["cor7"];
    StrategyProfile s;
    PayoffVector v;
    for (int i = 0; i < sc.game->player_count(); ++i) {
      s.push_back(MixedStrategy::pure(
          action_from_json(*sc.game, i, cj.at("profile").at(i), "cor7"),
          sc.game->action_count(i)));
      v.push_back(json_to_rat(cj.at("payoffs").at(i), "cor7 payoffs"));
    }
    Cor7Report c7 = cor7_check(*sc.game, s, v);
    report["cor7"] = json{{"violated", c7.violated},
                          {"player", c7.player},
                          {"witness_action",
                           c7.violated
                               ? sc.game->actions(c7.player)[c7.witness_action]
                               : std::string()},
                          {"value", format_rational(c7.value)}};
    any_profitable = any_profitable || c7.violated;
  }
  if (sc.analysis.value("thresholds", false)) {
    json th = json::array();
    for (const auto& e : epsilon_thresholds())
      th.push_back(json{{"name", e.name},
                        {"threshold", format_rational(e.threshold)}});
    report["thresholds"] = th;
  }

  json verdict = json::array();
  for (int i = 0; i < sc.game->player_count(); ++i) {
    bool bad = false;
    for (const auto& d : report["deviations"])
      bad = bad || (d["player"].get<int>() == i && d["profitable"].get<bool>());
    verdict.push_back(json{
        {"player", i},
        {"verdict", bad ? "not-equilibrium" : "equilibrium-consistent"}});
  }
  report["verdict"] = verdict;
  report["overall"] =
      any_profitable ? "not-equilibrium" : "equilibrium-consistent";
  emit_report(report, out_path, format);
  return kExitOk;
}

int cmd_paper_suite(const std::string& filter, std::uint64_t seed,
                    int threads, const std::string& out_path,
                    const std::string& format) {
  auto results = run_all_criteria(seed, filter, threads);
  json rows = json::array();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-40s %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    failures += !r.pass;
    rows.push_back(json{{"id", r.id},
                        {"name", r.name},
                        {"tag", r.tag},
                        {"pass", r.pass},
                        {"detail", r.detail}});
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failures);
  if (!out_path.empty()) {
    json report;
    report["command"] = "paper-suite";
    report["seed"] = seed;
    report["criteria"] = rows;
    emit_report(report, out_path, format);
  }
  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "progeq: simulation engine and equilibrium analysis for program games"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Overrides ov;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  std::string out_path, format = "json", memo_flag;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed_flag = s; seed_set = true; },
         "base RNG seed (decimal or 0x hex)")
      ->envname("PROGEQ_SEED");
  auto* trials_opt = app.add_option("--trials", "trial/episode count");
  auto* eps_opt = app.add_option("--epsilon", "grounding parameter override");
  auto* depth_opt = app.add_option("--fuel-depth", "max simulation depth");
  auto* calls_opt = app.add_option("--fuel-calls", "max simulation calls");
  app.add_option("--memo", memo_flag, "memoization on|off")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--out", out_path, "report output path ('-' for stdout)");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", ov.threads, "worker thread cap")
      ->check(CLI::PositiveNumber);

  std::string scenario_ref, suite_filter;
  bool list_builtins = false;
  auto* sim = app.add_subcommand("simulate", "run a scenario's bot profile");
  sim->add_option("scenario", scenario_ref, "scenario file or builtin name");
  sim->add_flag("--list", list_builtins, "list builtin scenarios and games");
  auto* chk = app.add_subcommand("check-eq",
                                 "deviation probes and exact analyses");
  chk->add_option("scenario", scenario_ref, "scenario file or builtin name")
      ->required();
  auto* suite = app.add_subcommand("paper-suite",
                                   "run the full verification battery");
  suite->add_option("--filter", suite_filter, "criterion tag substring");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim && list_builtins) {
      for (const auto& s : builtin_scenario_names())
        std::printf("scenario  %s\n", s.c_str());
      for (const auto& g : builtin_game_names())
        std::printf("game      %s\n", g.c_str());
      return kExitOk;
    }
    if (trials_opt->count()) ov.trials = trials_opt->as<long long>();
    if (eps_opt->count()) ov.epsilon = eps_opt->as<double>();
    if (depth_opt->count()) ov.fuel_depth = depth_opt->as<int>();
    if (calls_opt->count()) ov.fuel_calls = calls_opt->as<long long>();
    if (!memo_flag.empty()) ov.memo = memo_flag;
    if (seed_set) ov.seed = seed_flag;

    if (*sim) {
      if (scenario_ref.empty())
        throw ParseError("simulate: scenario argument required");
      return cmd_simulate(scenario_ref, ov, out_path, format);
    }
    if (*chk) return cmd_check_eq(scenario_ref, ov, out_path, format);
    if (*suite)
      return cmd_paper_suite(suite_filter, ov.seed.value_or(0xACCE97ED5EEDULL),
                             ov.threads > 1 ? ov.threads : 4, out_path,
                             format);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
  return kExitOk;
}
