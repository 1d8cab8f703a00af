#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "progeq/bots.hpp"
#include "progeq/vm.hpp"

using namespace progeq;

namespace {

// A program that reads its private stream and answers 0/1.
ProgramHandle private_reader(int player) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [](ExecCtx&, const StreamView&, PrivateStream& priv) {
    return priv.element(0) < 0.5 ? 0 : 1;
  };
  return h;
}

// A program that forwards its private stream into a nested apply*.
ProgramHandle forwarder(int player, int callee) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [callee](ExecCtx& ctx, const StreamView& view,
                        PrivateStream& priv) {
    BotOutput out = ctx.apply_star(callee, view, priv);
    return std::holds_alternative<Sentinel>(out) ? 1 : 0;
  };
  return h;
}

ProgramHandle infinite_regress(int player) {
  ProgramHandle h;
  h.player = player;
  h.identity = next_bot_identity();
  h.behavior = [player](ExecCtx& ctx, const StreamView& view,
                        PrivateStream& priv) {
    return ctx.apply(player, view, priv);
  };
  return h;
}

}  // namespace

TEST_CASE("apply* screens private reads; plain apply does not") {
  std::vector<ProgramHandle> profile{private_reader(0),
                                     build_constant_bot(1, 0)};
  SUBCASE("apply* yields the sentinel") {
    ExecCtx ctx;
    ctx.profile = &profile;
    SharedStream s{1};
    StreamView v{&s, 1, 0, std::nullopt};
    PrivateStream p{2, &ctx.screening};
    BotOutput out = ctx.apply_star(0, v, p);
    REQUIRE(std::holds_alternative<Sentinel>(out));
    CHECK(std::get<Sentinel>(out).player == 0);
  }
  SUBCASE("plain apply returns the action") {
    ExecCtx ctx;
    ctx.profile = &profile;
    SharedStream s{1};
    StreamView v{&s, 1, 0, std::nullopt};
    PrivateStream p{2, &ctx.screening};
    int a = ctx.apply(0, v, p);
    CHECK((a == 0 || a == 1));
  }
}

TEST_CASE("screening flags the innermost apply* frame only") {
  // caller --apply*--> forwarder --apply*--> private_reader.
  // The inner frame is screened (sentinel seen by the forwarder); the
  // forwarder itself performed no private read, so the outer apply* returns
  // the forwarder's ordinary action.
  std::vector<ProgramHandle> profile{forwarder(0, 1), private_reader(1)};
  ExecCtx ctx;
  ctx.profile = &profile;
  SharedStream s{3};
  StreamView v{&s, 1, 0, std::nullopt};
  PrivateStream p{4, &ctx.screening};
  BotOutput out = ctx.apply_star(0, v, p);
  REQUIRE(std::holds_alternative<int>(out));
  CHECK(std::get<int>(out) == 1);  // forwarder reports "callee screened"
}

TEST_CASE("depth fuel turns infinite regress into NonHalting") {
  std::vector<ProgramHandle> profile{infinite_regress(0)};
  TrialConfig cfg;
  cfg.fuel.max_depth = 50;
  TrialResult r = run_trial_uncorrelated(profile, {7}, cfg);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].player == 0);
  CHECK(r.failures[0].kind == FuelKind::Depth);
  CHECK_FALSE(r.actions[0].has_value());
}

TEST_CASE("memoization caches repeated apply* calls without changing output") {
  const double eps = 0.5;
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < 3; ++i)
    bots.push_back(build_correlated_bot(i, 3, eps, pirates_policy()));
  for (int k = 0; k < 50; ++k) {
    TrialConfig on, off;
    off.memo_apply_star = false;
    off.fuel.max_calls = 10'000'000;
    std::vector<std::uint64_t> priv{mix_u64(1, k), mix_u64(2, k),
                                    mix_u64(3, k)};
    TrialResult a = run_trial_correlated(bots, mix_u64(9, k), priv, on);
    TrialResult b = run_trial_correlated(bots, mix_u64(9, k), priv, off);
    REQUIRE(a.failures.empty());
    CHECK(a.actions == b.actions);
    CHECK(a.trace.total_calls <= b.trace.total_calls);
  }
}

TEST_CASE("full trace records the simulation tree") {
  const double eps = 0.4;
  std::vector<ProgramHandle> bots;
  for (int i = 0; i < 2; ++i)
    bots.push_back(build_correlated_bot(i, 2, eps, pirates_policy()));
  TrialConfig cfg;
  cfg.full_trace = true;
  // Find a seed with a nonempty history (some apply* activity).
  for (int k = 0; k < 100; ++k) {
    TrialResult r =
        run_trial_correlated(bots, mix_u64(31, k), {mix_u64(41, k),
                                                    mix_u64(51, k)}, cfg);
    if (r.trace.apply_star_calls == 0) continue;
    REQUIRE(!r.trace.nodes.empty());
    long long star_nodes = 0;
    for (const auto& nd : r.trace.nodes) {
      if (nd.kind == CallKind::ApplyStar) ++star_nodes;
      if (nd.parent >= 0) {
        CHECK(nd.parent < static_cast<int>(r.trace.nodes.size()));
        CHECK(r.trace.nodes[nd.parent].depth == nd.depth - 1);
      }
    }
    CHECK(star_nodes == r.trace.apply_star_calls);
    // Exports are well-formed and non-empty.
    CHECK(trace_to_json(r.trace).find("\"nodes\"") != std::string::npos);
    CHECK(trace_to_csv(r.trace).find("kind") != std::string::npos);
    return;
  }
  FAIL("no trial with apply* activity found");
}

TEST_CASE("memo keys distinguish views, transforms and call kinds") {
  MemoKeyHash h;
  MemoKey a{1, 2, 3, 4, 0, CallKind::Apply};
  MemoKey b = a;
  CHECK(a == b);
  CHECK(h(a) == h(b));
  b.kind = CallKind::ApplyStar;
  CHECK_FALSE(a == b);
  b = a;
  b.shift = 5;
  CHECK_FALSE(a == b);
  b = a;
  b.transform_bits = 9;
  CHECK_FALSE(a == b);
}
