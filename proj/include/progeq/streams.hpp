#pragma once

#include "progeq/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace progeq {

// Counter-based uniform stream: element(m) is a pure function of (seed, m),
// so suffix views and memo keys get random access without materializing
// prefixes.
struct SharedStream {
  std::uint64_t seed = 0;

  double element(std::uint64_t raw_index) const;
};

// splitmix64-style finalizer; also used to derive per-trial seeds.
std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b);
double u64_to_unit(std::uint64_t z);

// Bitwise XOR of seeds (uniform if any input is uniform and independent).
std::uint64_t combine_seeds(const std::vector<std::uint64_t>& seeds);

// Per-player distribution over virtual time steps: an explicit finite head
// followed by an optional geometric tail  delta^(k+t) = coeff * ratio^t.
struct DeltaSchedule {
  std::vector<Rat> head;
  Rat tail_coeff = 0;   // mass at index head.size()
  Rat tail_ratio = 0;   // in [0,1); tail absent when coeff == 0

  static DeltaSchedule geometric(const Rat& eps);      // eps*(1-eps)^t
  static DeltaSchedule point_mass(std::size_t t);
  static DeltaSchedule from_head(std::vector<Rat> head);  // must sum to 1

  Rat mass_at(std::size_t t) const;
  Rat cumulative_below(std::size_t t) const;  // sum_{t' < t} delta^{t'}
  Rat tail_mass_from(std::size_t t) const;    // sum_{t' >= t} delta^{t'}
  Rat total_mass() const;
  bool valid() const;  // masses >= 0, total exactly 1
};

// Affine remap applied to element 0 only (used by reparameterize_first).
struct FirstElementTransform {
  double prefix;  // cumulative mass below the forced bucket
  double bucket;  // mass of the forced bucket

  bool operator==(const FirstElementTransform&) const = default;
};

// A view into a SharedStream.  Suffixes and partitions compose into a single
// affine index map raw(m) = mult*m + shift; the optional transform applies at
// m == 0 only and is dropped by any composition that skips element 0.
struct StreamView {
  const SharedStream* base = nullptr;
  std::uint64_t mult = 1;
  std::uint64_t shift = 0;
  std::optional<FirstElementTransform> transform;

  double element(std::uint64_t m) const;
  StreamView suffix(std::uint64_t k) const;
};

// q_{i,k}: element(l) = view.element(l*k + i + 1).  The k partitions are
// disjoint and never touch element 0, so any pending transform is dropped.
StreamView partition(const StreamView& view, std::uint64_t i, std::uint64_t k);

// f_{t,j}: remaps element 0 into the schedule's bucket for t; elements m >= 1
// are unchanged.  sample_time_step of the result always returns t.
StreamView reparameterize_first(const StreamView& view, std::size_t t,
                                const DeltaSchedule& schedule);

// Smallest t with sum_{t'<=t} delta^{t'} > r_0, so Pr[T = t] = delta^t.
std::size_t sample_time_step(const StreamView& view,
                             const DeltaSchedule& schedule);

// Cumulative sums in double, shared by reparameterize_first and
// sample_time_step so the forced-bucket property holds bit-exactly.
double schedule_cumulative_below(const DeltaSchedule& schedule, std::size_t t);

// Tracks open apply* frames; a private read flags the innermost frame only.
class ScreeningStack {
 public:
  void push() { flags_.push_back(false); }
  bool pop() {
    bool f = flags_.back();
    flags_.pop_back();
    return f;
  }
  void notify_read() {
    if (!flags_.empty()) flags_.back() = true;
  }
  bool empty() const { return flags_.empty(); }

 private:
  std::vector<bool> flags_;
};

// Private randomness: reads notify the trial's screening stack; merely
// holding or forwarding the handle does not.
struct PrivateStream {
  std::uint64_t seed = 0;
  ScreeningStack* screening = nullptr;

  double element(std::uint64_t m) const {
    if (screening) screening->notify_read();
    return SharedStream{seed}.element(m);
  }
};

}  // namespace progeq
