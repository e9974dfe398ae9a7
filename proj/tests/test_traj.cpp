#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "passval/rng.hpp"
#include "passval/traj.hpp"

using namespace passval;

namespace {

Event pass_event(double t, PitchPoint from, PitchPoint to) {
  Event e;
  e.kind = EventKind::Pass;
  e.timestamp = t;
  e.start = from;
  e.end = to;
  return e;
}

Subsequence single_pass(double t0, PitchPoint from, PitchPoint to,
                        double arrival) {
  Subsequence sub;
  sub.events = {pass_event(t0, from, to)};
  sub.final_arrival = arrival;
  return sub;
}

}  // namespace

TEST_CASE("dtw frozen examples") {
  std::vector<double> a{0, 1, 2}, b{0, 2}, single_a{0}, single_b{3};
  CHECK(dtw_distance(a, a) == 0.0);
  CHECK(dtw_distance(single_a, single_b) == 3.0);
  CHECK(dtw_distance(a, b) == 1.0);  // matches exhaustive enumeration below
  CHECK(oracle::dtw_bruteforce(a, b) == 1.0);
  CHECK_THROWS_AS(dtw_distance({}, a), ValidationError);
}

TEST_CASE("dtw equals exhaustive path enumeration on short series") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(1 + rng.below(6)), b(1 + rng.below(6));
    const bool integers = trial % 2 == 0;
    for (auto& v : a) v = integers ? static_cast<double>(rng.below(10)) : rng.uniform(0, 10);
    for (auto& v : b) v = integers ? static_cast<double>(rng.below(10)) : rng.uniform(0, 10);
    const double got = dtw_distance(a, b);
    const double want = oracle::dtw_bruteforce(a, b);
    if (integers) {
      CHECK(got == want);
    } else {
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("dtw symmetry, identity, and non-negativity") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(1 + rng.below(12)), b(1 + rng.below(12));
    for (auto& v : a) v = rng.uniform(0, 105);
    for (auto& v : b) v = rng.uniform(0, 105);
    CHECK(dtw_distance(a, b) == dtw_distance(b, a));
    CHECK(dtw_distance(a, b) >= 0.0);
    CHECK(dtw_distance(a, a) == 0.0);
  }
}

TEST_CASE("appending a shared trailing sample never increases the distance") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(1 + rng.below(10)), b(1 + rng.below(10));
    for (auto& v : a) v = rng.uniform(0, 50);
    for (auto& v : b) v = rng.uniform(0, 50);
    const double base = dtw_distance(a, b);
    const double tail = rng.uniform(0, 50);
    auto a2 = a;
    auto b2 = b;
    a2.push_back(tail);
    b2.push_back(tail);
    CHECK(dtw_distance(a2, b2) <= base + 1e-12);
  }
}

TEST_CASE("subseq_distance sums the per-axis distances") {
  Trajectory p{{0, 1, 2}, {0, 0, 0}};
  Trajectory q{{0, 1, 2}, {1, 1, 1}};
  CHECK(subseq_distance(p, p) == 0.0);
  CHECK(subseq_distance(p, q) == dtw_distance(p.ys, q.ys));

  // A line from (0,0) to (2,2) over two seconds against a stationary point.
  Trajectory line{{0, 1, 2}, {0, 1, 2}};
  Trajectory point{{0}, {0}};
  CHECK(subseq_distance(line, point) == 6.0);
  CHECK(oracle::dtw_full_matrix(line.xs, point.xs) +
            oracle::dtw_full_matrix(line.ys, point.ys) ==
        6.0);
}

TEST_CASE("interpolation samples each second plus the final anchor") {
  auto traj = interpolate(single_pass(0.0, {0, 0}, {10, 0}, 2.0));
  REQUIRE(traj.size() == 3);
  CHECK(traj.xs == std::vector<double>{0, 5, 10});
  CHECK(traj.ys == std::vector<double>{0, 0, 0});

  // Fractional duration: the end anchor is appended.
  auto frac = interpolate(single_pass(0.0, {0, 0}, {10, 0}, 2.5));
  REQUIRE(frac.size() == 4);
  CHECK(frac.xs[1] == doctest::Approx(4.0));
  CHECK(frac.xs[2] == doctest::Approx(8.0));
  CHECK(frac.xs[3] == 10.0);
}

TEST_CASE("zero-duration subsequences pad to the two anchors") {
  auto traj = interpolate(single_pass(3.0, {4, 5}, {9, 9}, 3.0));
  REQUIRE(traj.size() == 2);
  CHECK(traj.xs == std::vector<double>{4, 9});
  CHECK(traj.ys == std::vector<double>{5, 9});
}

TEST_CASE("a stationary ball yields a constant trajectory") {
  auto traj = interpolate(single_pass(0.0, {7, 7}, {7, 7}, 4.0));
  REQUIRE(traj.size() == 5);
  for (double x : traj.xs) CHECK(x == 7.0);
}

TEST_CASE("non-monotone timestamps are rejected") {
  Subsequence sub;
  sub.events = {pass_event(5.0, {0, 0}, {1, 1}), pass_event(3.0, {1, 1}, {2, 2})};
  sub.final_arrival = 6.0;
  CHECK_THROWS_AS(interpolate(sub), ValidationError);
  CHECK_THROWS_AS(interpolate(single_pass(5.0, {0, 0}, {1, 1}, 4.0)),
                  ValidationError);
}

TEST_CASE("multi-event interpolation follows the event chain") {
  Subsequence sub;
  sub.events = {pass_event(0.0, {0, 0}, {4, 0}), pass_event(2.0, {4, 0}, {8, 0})};
  sub.final_arrival = 4.0;
  auto traj = interpolate(sub);
  REQUIRE(traj.size() == 5);
  CHECK(traj.xs == std::vector<double>{0, 2, 4, 6, 8});
}
