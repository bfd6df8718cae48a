#include <doctest.h>

#include <cmath>

#include "gluepour/generator.hpp"
#include "gluepour/scenario.hpp"
#include "oracles.hpp"

using namespace gluepour;
using doctest::Approx;

TEST_CASE("merge builds the reference timeline") {
  const Scenario s = oracle::reference_scenario(1.0);
  REQUIRE(s.size() == 5);
  const double tau[] = {0.5, 3.5, 1.1, 1.9, 3.0};
  const double h[] = {0.7, 0.2, 0.4, 0.3, 0.7};
  const double e[] = {1.1, 3.2, 2.8, 1.4, 3.1};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s.epochs[i].duration == Approx(tau[i]).epsilon(1e-12));
    CHECK(s.epochs[i].gain == h[i]);
    CHECK(s.epochs[i].arrival == e[i]);
  }
  CHECK(s.epochs.back().end() == Approx(10.0));
}

TEST_CASE("single arrival and single gain give one epoch") {
  const Scenario s = merge_event_streams({{0, 2.0}}, {{0, 0.5}}, 4.0, 3.0, 0.1);
  REQUIRE(s.size() == 1);
  CHECK(s.epochs[0].duration == 4.0);
  CHECK(s.epochs[0].arrival == 2.0);
}

TEST_CASE("merge carries gains forward and leaves silent epochs empty") {
  const Scenario s =
      merge_event_streams({{0, 1.0}, {2, 0.5}}, {{0, 0.3}, {3, 0.9}}, 5.0, 2.0, 0.0);
  REQUIRE(s.size() == 3);
  CHECK(s.epochs[0].start == 0.0);
  CHECK(s.epochs[1].start == 2.0);
  CHECK(s.epochs[2].start == 3.0);
  CHECK(s.epochs[1].gain == 0.3);
  CHECK(s.epochs[2].gain == 0.9);
  CHECK(s.epochs[2].arrival == 0.0);
  CHECK(s.epochs[1].arrival == 0.5);
}

TEST_CASE("merge rejects bad streams") {
  CHECK_THROWS_AS(merge_event_streams({{0, 1}}, {{1, 0.3}}, 5, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{0, 3}}, {{0, 0.3}}, 5, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{0, NAN}}, {{0, 0.3}}, 5, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{0, 1}}, {{0, 0.3}}, INFINITY, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{6, 1}}, {{0, 0.3}}, 5, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{0, 1}}, {{0, 0.0}}, 5, 2, 0), InvalidInput);
  CHECK_THROWS_AS(merge_event_streams({{0, 1}}, {{0, 0.3}}, 5, 2, -1), InvalidInput);
}

TEST_CASE("clipping caps packets at the battery size") {
  std::vector<Arrival> a{{0, 3.0}, {1, 1.0}};
  CHECK(clip_arrivals(a, 2.0) == 1);
  CHECK(a[0].energy == 2.0);
  CHECK(a[1].energy == 1.0);
}

TEST_CASE("merge is idempotent on extracted streams") {
  auto rng = oracle::rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario s = random_scenario(rng, 1 + trial % 7);
    const Scenario t = merge_event_streams(extract_arrivals(s), extract_gain_changes(s),
                                           s.horizon, s.battery_capacity,
                                           s.processing_cost);
    REQUIRE(t.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(t.epochs[i].start == s.epochs[i].start);
      CHECK(t.epochs[i].duration == s.epochs[i].duration);
      CHECK(t.epochs[i].gain == s.epochs[i].gain);
      CHECK(t.epochs[i].arrival == s.epochs[i].arrival);
    }
  }
}

TEST_CASE("rounded reference policy is feasible at the rounding tolerance") {
  const Scenario s = oracle::reference_scenario(1.0);
  const FeasibilityReport r = validate_policy(s, oracle::rounded_policy_eps1(), 0.1);
  CHECK(r.causality_ok);
  CHECK(r.overflow_ok);
  CHECK(r.feasible());
}

TEST_CASE("idle policy is feasible when the battery holds everything") {
  const Scenario s = merge_event_streams({{0, 1.0}, {1, 0.5}}, {{0, 1.0}}, 2.0, 2.0, 0.5);
  const FeasibilityReport r = validate_policy(s, TransmissionPolicy(2));
  CHECK(r.feasible());
  CHECK(r.trace.before_arrival.back() == Approx(1.5));
}

TEST_CASE("spending more than harvested violates causality by the excess") {
  const Scenario s = merge_event_streams({{0, 1.0}}, {{0, 1.0}}, 2.0, 2.0, 1.0);
  const FeasibilityReport r =
      validate_policy(s, TransmissionPolicy(std::vector<EpochPolicy>{{1.0, 1.0}}));
  CHECK_FALSE(r.causality_ok);
  CHECK(r.worst_causality_residual == Approx(-1.0));
}

TEST_CASE("overflow is reported separately from causality") {
  const Scenario s = merge_event_streams({{0, 2.0}, {1, 2.0}}, {{0, 1.0}}, 2.0, 2.0, 0.0);
  const FeasibilityReport r = validate_policy(s, TransmissionPolicy(2));
  CHECK(r.causality_ok);
  CHECK_FALSE(r.overflow_ok);
  CHECK(r.worst_overflow_residual == Approx(2.0));
}

TEST_CASE("policy shape errors") {
  const Scenario s = oracle::reference_scenario(1.0);
  CHECK_THROWS_AS(validate_policy(s, TransmissionPolicy(4)), InvalidInput);
  TransmissionPolicy p(5);
  p[0] = {-0.1, 1.0};
  CHECK_THROWS_AS(validate_policy(s, p), InvalidInput);
  p[0] = {0.1, -1.0};
  CHECK_THROWS_AS(validate_policy(s, p), InvalidInput);
  p[0] = {0.6, 1.0};
  CHECK_THROWS_AS(validate_policy(s, p), InvalidInput);
}

TEST_CASE("throughput of simple policies") {
  const Scenario one = merge_event_streams({{0, 10.0}}, {{0, 1.0}}, 2.0, 10.0, 0.0);
  CHECK(evaluate_throughput(one, TransmissionPolicy(std::vector<EpochPolicy>{
                                     {2.0, std::exp(1.0) - 1.0}})) == Approx(1.0));
  CHECK(evaluate_throughput(one, TransmissionPolicy(1)) == 0.0);
  const double b =
      evaluate_throughput(oracle::reference_scenario(1.0), oracle::rounded_policy_eps1());
  CHECK(std::abs(b - 1.38) <= 0.01);
}

TEST_CASE("throughput is invariant under splitting an epoch") {
  auto rng = oracle::rng(2);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario s = random_scenario(rng, 1 + trial % 5);
    TransmissionPolicy p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      p[i] = {u(rng) * s.epochs[i].duration, 3.0 * u(rng)};
    const std::size_t k = static_cast<std::size_t>(trial) % s.size();
    const double frac = u(rng);

    Scenario split = s;
    Epoch tail = s.epochs[k];
    split.epochs[k].duration = frac * tail.duration;
    tail.start = split.epochs[k].end();
    tail.duration = s.epochs[k].end() - tail.start;
    tail.arrival = 0.0;
    split.epochs.insert(split.epochs.begin() + static_cast<long>(k) + 1, tail);

    std::vector<EpochPolicy> entries(p.begin(), p.end());
    const EpochPolicy whole = entries[k];
    entries[k] = {frac * whole.on_duration, whole.power};
    entries.insert(entries.begin() + static_cast<long>(k) + 1,
                   {(1.0 - frac) * whole.on_duration, whole.power});
    CHECK(evaluate_throughput(split, TransmissionPolicy(entries)) ==
          Approx(evaluate_throughput(s, p)).epsilon(1e-12));
  }
}

TEST_CASE("feasible policies never spend more than was harvested") {
  auto rng = oracle::rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Scenario s = random_scenario(rng, 1 + trial % 5);
    TransmissionPolicy p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      p[i] = {u(rng) * s.epochs[i].duration, u(rng)};
    const FeasibilityReport r = validate_policy(s, p);
    if (!r.causality_ok) continue;
    ++feasible;
    CHECK(total_consumed(s, p) <= s.total_energy() + 1e-12);
  }
  CHECK(feasible > 0);
}
