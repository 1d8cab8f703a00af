#pragma once

#include "progeq/streams.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace progeq {

struct ExecCtx;

// R_i: the output of a screened simulation whose result depended on the
// caller-visible private stream.
struct Sentinel {
  int player;
  bool operator==(const Sentinel&) const = default;
};

using BotOutput = std::variant<int, Sentinel>;  // action index or R_i

// A submitted program: a deterministic procedure over the execution context,
// a shared-stream view and a (forwardable) private stream.
struct ProgramHandle {
  int player = 0;
  std::uint64_t identity = 0;  // stable within a trial; memo key component
  std::function<int(ExecCtx&, const StreamView&, PrivateStream&)> behavior;
};

struct FuelConfig {
  int max_depth = 10'000;
  long long max_calls = 1'000'000;
};

enum class FuelKind { Depth, Calls };

struct FuelExhausted {
  FuelKind kind;
};

enum class CallKind { Apply, ApplyStar };

// One node of the simulation tree (full-trace mode).
struct TraceNode {
  CallKind kind;
  int callee = 0;
  std::uint64_t view_mult = 1;
  std::uint64_t view_shift = 0;
  bool view_transformed = false;
  int depth = 0;
  int output = -1;           // action, or -1 when screened/aborted
  bool screened = false;     // output was a Sentinel
  bool memo_hit = false;
  int parent = -1;           // index into nodes, -1 for top level
};

struct CallTrace {
  // Aggregates are always collected; nodes only in full-trace mode.
  int max_depth = 0;
  long long total_calls = 0;
  long long apply_star_calls = 0;
  long long memo_hits = 0;
  long long distinct_memo_keys = 0;
  std::vector<TraceNode> nodes;
};

struct NonHalting {
  int player;
  FuelKind kind;
};

struct TrialResult {
  std::vector<std::optional<int>> actions;  // per seat; nullopt if non-halting
  std::vector<NonHalting> failures;
  CallTrace trace;
  std::uint64_t shared_seed = 0;  // correlated mode
};

struct MemoKey {
  std::uint64_t identity;
  std::uint64_t stream_seed;
  std::uint64_t mult;
  std::uint64_t shift;
  std::uint64_t transform_bits;  // hash of the first-element transform, or 0
  CallKind kind;
  bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const;
};

using MemoCache = std::unordered_map<MemoKey, BotOutput, MemoKeyHash>;

struct TrialConfig {
  FuelConfig fuel;
  bool memo_apply_star = true;
  bool memo_apply = false;  // sound for uncorrelated pi-bot trials
  bool full_trace = false;
};

// Per-trial execution state: fuel, screening stack, memo cache, trace.
struct ExecCtx {
  const std::vector<ProgramHandle>* profile = nullptr;
  TrialConfig config;
  ScreeningStack screening;
  MemoCache memo;
  CallTrace trace;
  int depth = 0;
  int current_node = -1;  // parent for the next trace node

  // Plain simulation of seat `callee` on `view`, forwarding `priv`.
  int apply(int callee, const StreamView& view, PrivateStream& priv);

  // Screened simulation: Sentinel(callee) if the callee's computation read
  // the forwarded private stream outside deeper apply* frames.
  BotOutput apply_star(int callee, const StreamView& view,
                       PrivateStream& priv);

  // Runs seat `callee`'s behavior inline and reports the maximum apply depth
  // reached beneath the current frame (the Prop-9-style depth probe).
  int run_measured(int callee, const StreamView& view, PrivateStream& priv,
                   int* max_rel_depth);
};

// Executes one trial: top-level plain apply per seat.  Correlated mode gives
// every seat the same shared view plus its own private stream; uncorrelated
// mode gives each seat only its own shared stream.
TrialResult run_trial_correlated(const std::vector<ProgramHandle>& profile,
                                 std::uint64_t shared_seed,
                                 const std::vector<std::uint64_t>& private_seeds,
                                 const TrialConfig& config);

TrialResult run_trial_uncorrelated(const std::vector<ProgramHandle>& profile,
                                   const std::vector<std::uint64_t>& stream_seeds,
                                   const TrialConfig& config);

// Trace export for offline inspection.
std::string trace_to_json(const CallTrace& trace);
std::string trace_to_csv(const CallTrace& trace);

}  // namespace progeq
