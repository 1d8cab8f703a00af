#include "progeq/streams.hpp"

#include <cassert>
#include <stdexcept>

namespace progeq {

std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + b * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double u64_to_unit(std::uint64_t z) {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double SharedStream::element(std::uint64_t raw_index) const {
  return u64_to_unit(mix_u64(seed, raw_index));
}

std::uint64_t combine_seeds(const std::vector<std::uint64_t>& seeds) {
  std::uint64_t acc = 0;
  for (auto s : seeds) acc ^= s;
  return acc;
}

DeltaSchedule DeltaSchedule::geometric(const Rat& eps) {
  if (eps <= 0 || eps > 1) throw std::invalid_argument("geometric: bad eps");
  DeltaSchedule d;
  if (eps == 1) {
    d.head = {Rat(1)};
  } else {
    d.tail_coeff = eps;
    d.tail_ratio = 1 - eps;
  }
  return d;
}

DeltaSchedule DeltaSchedule::point_mass(std::size_t t) {
  DeltaSchedule d;
  d.head.assign(t + 1, Rat(0));
  d.head[t] = 1;
  return d;
}

DeltaSchedule DeltaSchedule::from_head(std::vector<Rat> head) {
  DeltaSchedule d;
  d.head = std::move(head);
  if (!d.valid()) throw std::invalid_argument("schedule mass != 1");
  return d;
}

Rat DeltaSchedule::mass_at(std::size_t t) const {
  if (t < head.size()) return head[t];
  if (tail_coeff == 0) return 0;
  return tail_coeff * rat_pow(tail_ratio, t - head.size());
}

Rat DeltaSchedule::cumulative_below(std::size_t t) const {
  Rat sum = 0;
  for (std::size_t i = 0; i < t && i < head.size(); ++i) sum += head[i];
  if (t > head.size() && tail_coeff != 0) {
    // coeff * (1 - ratio^(t-k)) / (1 - ratio)
    std::size_t len = t - head.size();
    sum += tail_coeff * (1 - rat_pow(tail_ratio, len)) / (1 - tail_ratio);
  }
  return sum;
}

Rat DeltaSchedule::tail_mass_from(std::size_t t) const {
  return total_mass() - cumulative_below(t);
}

Rat DeltaSchedule::total_mass() const {
  Rat sum = 0;
  for (const auto& h : head) sum += h;
  if (tail_coeff != 0) sum += tail_coeff / (1 - tail_ratio);
  return sum;
}

bool DeltaSchedule::valid() const {
  for (const auto& h : head)
    if (h < 0) return false;
  if (tail_coeff < 0 || tail_ratio < 0 || tail_ratio >= 1) return false;
  return total_mass() == 1;
}

double StreamView::element(std::uint64_t m) const {
  if (m == 0 && transform) {
    double r0 = base->element(shift);
    return transform->prefix + r0 * transform->bucket;
  }
  return base->element(mult * m + shift);
}

StreamView StreamView::suffix(std::uint64_t k) const {
  if (k == 0) return *this;
  StreamView v = *this;
  v.shift = shift + mult * k;
  v.transform.reset();
  return v;
}

StreamView partition(const StreamView& view, std::uint64_t i,
                     std::uint64_t k) {
  if (i < 1 || i > k) throw std::invalid_argument("partition: bad index");
  StreamView v = view;
  v.mult = view.mult * k;
  v.shift = view.shift + view.mult * (i + 1);
  v.transform.reset();
  return v;
}

double schedule_cumulative_below(const DeltaSchedule& schedule, std::size_t t) {
  double cum = 0;
  for (std::size_t i = 0; i < t; ++i) cum += to_double(schedule.mass_at(i));
  return cum;
}

StreamView reparameterize_first(const StreamView& view, std::size_t t,
                                const DeltaSchedule& schedule) {
  double bucket = to_double(schedule.mass_at(t));
  if (!(bucket > 0))
    throw std::invalid_argument("reparameterize_first: zero-mass bucket");
  StreamView v = view;
  v.transform = FirstElementTransform{schedule_cumulative_below(schedule, t),
                                      bucket};
  return v;
}

std::size_t sample_time_step(const StreamView& view,
                             const DeltaSchedule& schedule) {
  double r0 = view.element(0);
  double cum = 0;
  constexpr std::size_t kMaxSteps = 1u << 22;
  for (std::size_t t = 0; t < kMaxSteps; ++t) {
    cum += to_double(schedule.mass_at(t));
    if (cum > r0) return t;
  }
  // Mass-1 schedules reach any r0 < 1 long before the guard trips.
  return kMaxSteps;
}

}  // namespace progeq
