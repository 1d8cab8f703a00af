#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "progeq/streams.hpp"

#include <cmath>

using namespace progeq;

TEST_CASE("counter stream is a pure function of (seed, index)") {
  SharedStream s{42};
  CHECK(s.element(7) == s.element(7));
  CHECK(s.element(7) != s.element(8));
  for (int m = 0; m < 100; ++m) {
    double x = s.element(m);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("suffix views compose into one affine map") {
  SharedStream s{9};
  StreamView v{&s, 1, 0, std::nullopt};
  StreamView w = v.suffix(3).suffix(4);
  for (int m = 0; m < 20; ++m) CHECK(w.element(m) == v.element(m + 7));
  CHECK(w.mult == 1);
  CHECK(w.shift == 7);
}

TEST_CASE("partitions are disjoint and nested") {
  SharedStream s{5};
  StreamView v{&s, 1, 0, std::nullopt};
  StreamView a = partition(v, 1, 3);
  StreamView b = partition(v, 2, 3);
  StreamView c = partition(v, 3, 3);
  // q_{i,k}: element(l) = v.element(l*k + i + 1); never touches element 0.
  for (int l = 0; l < 10; ++l) {
    CHECK(a.element(l) == v.element(3 * l + 2));
    CHECK(b.element(l) == v.element(3 * l + 3));
    CHECK(c.element(l) == v.element(3 * l + 4));
  }
  CHECK_THROWS_AS(partition(v, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(partition(v, 4, 3), std::invalid_argument);
  // Nested partition still an affine map of the base stream.
  StreamView ab = partition(a, 2, 2);
  for (int l = 0; l < 10; ++l) CHECK(ab.element(l) == a.element(2 * l + 3));
}

TEST_CASE("partition drops a pending first-element transform") {
  SharedStream s{5};
  DeltaSchedule geo = DeltaSchedule::geometric(Rat(1, 4));
  StreamView v{&s, 1, 0, std::nullopt};
  StreamView forced = reparameterize_first(v, 2, geo);
  CHECK(forced.transform.has_value());
  CHECK_FALSE(partition(forced, 1, 2).transform.has_value());
  CHECK_FALSE(forced.suffix(1).transform.has_value());
  // suffix(0) keeps element 0 and therefore the transform.
  CHECK(forced.suffix(0).transform.has_value());
}

TEST_CASE("delta schedule exact masses") {
  DeltaSchedule geo = DeltaSchedule::geometric(Rat(1, 3));
  CHECK(geo.valid());
  CHECK(geo.mass_at(0) == Rat(1, 3));
  CHECK(geo.mass_at(2) == Rat(4, 27));
  CHECK(geo.cumulative_below(2) == Rat(5, 9));
  CHECK(geo.tail_mass_from(2) == Rat(4, 9));
  CHECK(geo.total_mass() == 1);

  DeltaSchedule pm = DeltaSchedule::point_mass(3);
  CHECK(pm.valid());
  CHECK(pm.mass_at(3) == 1);
  CHECK(pm.mass_at(2) == 0);
  CHECK(pm.tail_mass_from(4) == 0);

  DeltaSchedule head = DeltaSchedule::from_head({Rat(1, 2), Rat(1, 2)});
  CHECK(head.valid());
  CHECK(head.tail_mass_from(1) == Rat(1, 2));

  DeltaSchedule bad;
  bad.head = {Rat(1, 2)};
  CHECK_FALSE(bad.valid());
}

TEST_CASE("sample_time_step follows the schedule law") {
  DeltaSchedule geo = DeltaSchedule::geometric(Rat(1, 4));
  long long hits0 = 0, hits2 = 0;
  const int n = 40'000;
  for (int t = 0; t < n; ++t) {
    SharedStream s{mix_u64(77, t)};
    StreamView v{&s, 1, 0, std::nullopt};
    std::size_t T = sample_time_step(v, geo);
    hits0 += T == 0;
    hits2 += T == 2;
  }
  // Pr[T=0] = 1/4, Pr[T=2] = 9/64; allow 4 sigma.
  CHECK(std::abs(hits0 / double(n) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
  CHECK(std::abs(hits2 / double(n) - 9.0 / 64) <
        4 * std::sqrt(9.0 / 64 * (1 - 9.0 / 64) / n));
}

TEST_CASE("reparameterize_first forces the chosen bucket") {
  DeltaSchedule geo = DeltaSchedule::geometric(Rat(1, 4));
  for (std::size_t t : {0u, 1u, 5u, 12u}) {
    for (int k = 0; k < 200; ++k) {
      SharedStream s{mix_u64(123, k)};
      StreamView v{&s, 1, 0, std::nullopt};
      StreamView f = reparameterize_first(v, t, geo);
      CHECK(sample_time_step(f, geo) == t);
      // Elements past 0 are untouched.
      CHECK(f.element(1) == v.element(1));
    }
  }
}

TEST_CASE("private stream reads flag the innermost frame only") {
  ScreeningStack st;
  PrivateStream p{99, &st};
  st.push();
  st.push();
  (void)p.element(0);
  CHECK_FALSE(st.pop() == false);  // inner frame flagged
  CHECK(st.pop() == false);        // outer frame untouched
  CHECK(st.empty());
  // No open frame: reading is harmless.
  (void)p.element(1);
  // Forwarding (holding the handle) does not notify.
  st.push();
  PrivateStream q = p;
  (void)q.seed;
  CHECK(st.pop() == false);
}
