#include "progeq/vm.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace progeq {
namespace {

std::uint64_t transform_bits(const std::optional<FirstElementTransform>& t) {
  if (!t) return 0;
  std::uint64_t a, b;
  static_assert(sizeof(double) == 8);
  std::memcpy(&a, &t->prefix, 8);
  std::memcpy(&b, &t->bucket, 8);
  return mix_u64(a, b) | 1;  // never collides with the "absent" value 0
}

}  // namespace

std::size_t MemoKeyHash::operator()(const MemoKey& k) const {
  std::uint64_t h = mix_u64(k.identity, k.stream_seed);
  h = mix_u64(h, k.mult);
  h = mix_u64(h, k.shift);
  h = mix_u64(h, k.transform_bits);
  h = mix_u64(h, static_cast<std::uint64_t>(k.kind));
  return static_cast<std::size_t>(h);
}

namespace {

struct FrameGuard {
  ExecCtx& ctx;
  int saved_node;
  ~FrameGuard() {
    --ctx.depth;
    ctx.current_node = saved_node;
  }
};

MemoKey make_key(const ProgramHandle& h, const StreamView& view,
                 CallKind kind) {
  return MemoKey{h.identity, view.base->seed, view.mult, view.shift,
                 transform_bits(view.transform), kind};
}

int push_node(ExecCtx& ctx, CallKind kind, int callee, const StreamView& view) {
  if (!ctx.config.full_trace) return -1;
  TraceNode n;
  n.kind = kind;
  n.callee = callee;
  n.view_mult = view.mult;
  n.view_shift = view.shift;
  n.view_transformed = view.transform.has_value();
  n.depth = ctx.depth;
  n.parent = ctx.current_node;
  ctx.trace.nodes.push_back(n);
  return static_cast<int>(ctx.trace.nodes.size()) - 1;
}

void charge_fuel(ExecCtx& ctx) {
  ++ctx.trace.total_calls;
  if (ctx.depth > ctx.config.fuel.max_depth) throw FuelExhausted{FuelKind::Depth};
  if (ctx.trace.total_calls > ctx.config.fuel.max_calls)
    throw FuelExhausted{FuelKind::Calls};
  if (ctx.depth > ctx.trace.max_depth) ctx.trace.max_depth = ctx.depth;
}

}  // namespace

int ExecCtx::apply(int callee, const StreamView& view, PrivateStream& priv) {
  const ProgramHandle& h = (*profile)[callee];
  ++depth;
  charge_fuel(*this);
  int node = push_node(*this, CallKind::Apply, callee, view);
  FrameGuard guard{*this, current_node};
  current_node = node;

  MemoKey key;
  if (config.memo_apply) {
    key = make_key(h, view, CallKind::Apply);
    auto it = memo.find(key);
    if (it != memo.end()) {
      ++trace.memo_hits;
      if (node >= 0) {
        trace.nodes[node].memo_hit = true;
        trace.nodes[node].output = std::get<int>(it->second);
      }
      return std::get<int>(it->second);
    }
  }
  int action = h.behavior(*this, view, priv);
  if (config.memo_apply) {
    memo.emplace(key, BotOutput{action});
    ++trace.distinct_memo_keys;
  }
  if (node >= 0) trace.nodes[node].output = action;
  return action;
}

BotOutput ExecCtx::apply_star(int callee, const StreamView& view,
                              PrivateStream& priv) {
  const ProgramHandle& h = (*profile)[callee];
  ++depth;
  charge_fuel(*this);
  ++trace.apply_star_calls;
  int node = push_node(*this, CallKind::ApplyStar, callee, view);
  FrameGuard guard{*this, current_node};
  current_node = node;

  MemoKey key;
  if (config.memo_apply_star) {
    key = make_key(h, view, CallKind::ApplyStar);
    auto it = memo.find(key);
    if (it != memo.end()) {
      ++trace.memo_hits;
      if (node >= 0) {
        trace.nodes[node].memo_hit = true;
        if (auto* a = std::get_if<int>(&it->second))
          trace.nodes[node].output = *a;
        else
          trace.nodes[node].screened = true;
      }
      return it->second;
    }
  }
  screening.push();
  BotOutput out;
  try {
    int action = h.behavior(*this, view, priv);
    bool flagged = screening.pop();
    out = flagged ? BotOutput{Sentinel{h.player}} : BotOutput{action};
  } catch (...) {
    screening.pop();
    throw;
  }
  if (config.memo_apply_star) {
    memo.emplace(key, out);
    ++trace.distinct_memo_keys;
  }
  if (node >= 0) {
    if (auto* a = std::get_if<int>(&out))
      trace.nodes[node].output = *a;
    else
      trace.nodes[node].screened = true;
  }
  return out;
}

int ExecCtx::run_measured(int callee, const StreamView& view,
                          PrivateStream& priv, int* max_rel_depth) {
  const ProgramHandle& h = (*profile)[callee];
  int base_depth = depth;
  int saved_max = trace.max_depth;
  trace.max_depth = depth;
  int action = h.behavior(*this, view, priv);
  int rel = trace.max_depth - base_depth;
  trace.max_depth = std::max(saved_max, trace.max_depth);
  if (max_rel_depth) *max_rel_depth = rel;
  return action;
}

TrialResult run_trial_correlated(
    const std::vector<ProgramHandle>& profile, std::uint64_t shared_seed,
    const std::vector<std::uint64_t>& private_seeds, const TrialConfig& config) {
  std::vector<SharedStream> streams{SharedStream{shared_seed}};
  std::vector<StreamView> views(profile.size(),
                                StreamView{&streams[0], 1, 0, std::nullopt});
  std::vector<PrivateStream> privates(profile.size());
  TrialResult r;
  // Screening stack must live in the ctx; wire privates inside impl via ctx.
  // We construct privates first and point them at a shared stack below.
  ExecCtx ctx;
  ctx.profile = &profile;
  ctx.config = config;
  r.actions.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    privates[i].seed = i < private_seeds.size() ? private_seeds[i] : 0;
    privates[i].screening = &ctx.screening;
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    ctx.depth = 0;
    ctx.current_node = -1;
    try {
      r.actions[i] = profile[i].behavior(ctx, views[i], privates[i]);
    } catch (const FuelExhausted& fe) {
      r.failures.push_back(NonHalting{static_cast<int>(i), fe.kind});
    }
  }
  r.trace = std::move(ctx.trace);
  r.shared_seed = shared_seed;
  return r;
}

TrialResult run_trial_uncorrelated(
    const std::vector<ProgramHandle>& profile,
    const std::vector<std::uint64_t>& stream_seeds, const TrialConfig& config) {
  std::vector<SharedStream> streams;
  streams.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i)
    streams.push_back(SharedStream{stream_seeds[i]});
  ExecCtx ctx;
  ctx.profile = &profile;
  ctx.config = config;
  TrialResult r;
  r.actions.resize(profile.size());
  std::vector<PrivateStream> privates(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    // No private randomness in the uncorrelated setting; reads still route
    // through the screening stack so misuse is observable.
    privates[i].seed = mix_u64(stream_seeds[i], 0x707269766174ULL);
    privates[i].screening = &ctx.screening;
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    ctx.depth = 0;
    ctx.current_node = -1;
    StreamView v{&streams[i], 1, 0, std::nullopt};
    try {
      r.actions[i] = profile[i].behavior(ctx, v, privates[i]);
    } catch (const FuelExhausted& fe) {
      r.failures.push_back(NonHalting{static_cast<int>(i), fe.kind});
    }
  }
  r.trace = std::move(ctx.trace);
  return r;
}

std::string trace_to_csv(const CallTrace& trace) {
  std::ostringstream out;
  out << "node,parent,kind,callee,depth,view_mult,view_shift,transformed,"
         "output,screened,memo_hit\n";
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const TraceNode& n = trace.nodes[i];
    out << i << ',' << n.parent << ','
        << (n.kind == CallKind::Apply ? "apply" : "apply_star") << ','
        << n.callee << ',' << n.depth << ',' << n.view_mult << ','
        << n.view_shift << ',' << (n.view_transformed ? 1 : 0) << ','
        << n.output << ',' << (n.screened ? 1 : 0) << ','
        << (n.memo_hit ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string trace_to_json(const CallTrace& trace) {
  std::ostringstream out;
  out << "{\"max_depth\":" << trace.max_depth
      << ",\"total_calls\":" << trace.total_calls
      << ",\"apply_star_calls\":" << trace.apply_star_calls
      << ",\"memo_hits\":" << trace.memo_hits
      << ",\"distinct_memo_keys\":" << trace.distinct_memo_keys
      << ",\"nodes\":[";
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const TraceNode& n = trace.nodes[i];
    if (i) out << ',';
    out << "{\"parent\":" << n.parent << ",\"kind\":\""
        << (n.kind == CallKind::Apply ? "apply" : "apply_star")
        << "\",\"callee\":" << n.callee << ",\"depth\":" << n.depth
        << ",\"view_mult\":" << n.view_mult << ",\"view_shift\":" << n.view_shift
        << ",\"transformed\":" << (n.view_transformed ? "true" : "false")
        << ",\"output\":" << n.output
        << ",\"screened\":" << (n.screened ? "true" : "false")
        << ",\"memo_hit\":" << (n.memo_hit ? "true" : "false") << '}';
  }
  out << "]}";
  return out.str();
}

}  // namespace progeq
