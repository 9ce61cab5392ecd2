#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cogshare/sim.hpp"

using namespace cogshare;

namespace {

const ChannelModel kMpr(0.9, 0.8, 0.6, 0.5);

Scenario scenario(const ChannelModel& channel, const EnergyModel& energy,
                  double l1, double l2, double p) {
  return Scenario{channel, energy, ArrivalRates(l1, l2), AccessPolicy(p)};
}

// Draws that trigger (1) or suppress (0) each event deterministically.
SlotDraws draws(double a1, double a2, double h, double acc, double s1,
                double s2) {
  return SlotDraws{a1, a2, h, acc, s1, s2};
}

}  // namespace

TEST_CASE("idle primary lets the secondary transmit with probability one") {
  SystemState state{0, 1, 5};
  const Scenario sc = scenario(kMpr, EnergyModel(0.4), 0.0, 0.0, 0.0);
  // p-draw of 0.99 would suppress a probability-p transmission; with the
  // primary idle it must be ignored.
  const SlotEvents ev =
      step(state, sc, SimMode::Original, draws(1, 1, 1, 0.99, 0.99, 0.0));
  CHECK(!ev.primary_tx);
  CHECK(ev.secondary_tx);
  CHECK(ev.secondary_success);
  CHECK(ev.secondary_departure);
  CHECK(state.q2 == 0);
}

TEST_CASE("an empty battery silences the primary") {
  SystemState state{1, 0, 0};
  const Scenario sc = scenario(kMpr, EnergyModel(0.4), 0.0, 0.0, 1.0);
  SUBCASE("harvest arrives") {
    const SlotEvents ev =
        step(state, sc, SimMode::Original, draws(1, 1, 0.1, 0, 0, 0));
    CHECK(!ev.primary_tx);
    CHECK(!ev.secondary_tx);  // q2 = 0 and no dummy mode: nothing to send
    CHECK(ev.harvested);
    CHECK(state.b1 == 1);
    CHECK(state.q1 == 1);
  }
  SUBCASE("no harvest") {
    const SlotEvents ev =
        step(state, sc, SimMode::Original, draws(1, 1, 0.9, 0, 0, 0));
    CHECK(!ev.harvested);
    CHECK(state.b1 == 0);
  }
}

TEST_CASE("one contended slot, traced by hand") {
  // q1=3, q2=2, b1=1; secondary joins (access draw below p); the primary
  // fails, the secondary succeeds; energy is consumed; harvest and arrivals
  // land afterwards.
  SystemState state{3, 2, 1};
  const Scenario sc = scenario(kMpr, EnergyModel(1.0), 1.0, 1.0, 0.5);
  const SlotEvents ev = step(state, sc, SimMode::Original,
                             draws(0.0, 0.0, 0.0, 0.2, 0.95, 0.05));
  CHECK(ev.primary_tx);
  CHECK(ev.secondary_tx);
  CHECK(!ev.primary_success);   // 0.95 >= q112 = 0.6
  CHECK(ev.secondary_success);  // 0.05 < q212 = 0.5
  CHECK(state.q1 == 4);         // 3 - 0 + arrival
  CHECK(state.q2 == 2);         // 2 - 1 + arrival
  CHECK(state.b1 == 1);         // 1 - 1 consumed + harvest stored
}

TEST_CASE("harvest is rejected only when the battery is full") {
  const Scenario sc = scenario(kMpr, EnergyModel(1.0, 2), 0.0, 0.0, 0.0);
  SystemState state{0, 0, 2};
  const SlotEvents ev =
      step(state, sc, SimMode::Original, draws(1, 1, 0.0, 0, 0, 0));
  CHECK(!ev.harvested);
  CHECK(ev.overflow);
  CHECK(state.b1 == 2);
}

TEST_CASE("dummy packets transmit but do not drain real queues") {
  const Scenario sc = scenario(kMpr, EnergyModel(1.0), 0.0, 0.0, 1.0);
  SystemState state{0, 0, 3};
  const SlotEvents ev = step(state, sc, SimMode::SaturatedBoth,
                             draws(1, 1, 1, 0.0, 0.0, 0.0));
  CHECK(ev.primary_tx);
  CHECK(ev.secondary_tx);
  CHECK(ev.primary_success);
  CHECK(ev.secondary_success);
  CHECK(!ev.primary_departure);
  CHECK(!ev.secondary_departure);
  CHECK(state.q1 == 0);
  CHECK(state.q2 == 0);
  CHECK(state.b1 == 2);
}

TEST_CASE("slot invariants hold along random trajectories") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const double q11 = u01(rng), q22 = u01(rng);
    const ChannelModel channel(q11, q22, q11 * u01(rng), q22 * u01(rng));
    std::optional<int64_t> capacity;
    if (trial % 2 == 0) {
      capacity = 1 + static_cast<int64_t>(rng() % 4);
    }
    const EnergyModel energy(u01(rng), capacity);
    const SimMode mode = static_cast<SimMode>(trial % 4);
    const Scenario sc =
        scenario(channel, energy, u01(rng), u01(rng), u01(rng));

    SystemState state;
    int64_t arrivals1 = 0, arrivals2 = 0, departures1 = 0, departures2 = 0;
    int64_t stored = 0, consumed = 0;
    for (int slot = 0; slot < 20'000; ++slot) {
      const SystemState before = state;
      const SlotDraws d = {u01(rng), u01(rng), u01(rng),
                           u01(rng), u01(rng), u01(rng)};
      const SlotEvents ev = step(state, sc, mode, d);

      // No transmission ever starts on an empty battery; dummies only in
      // the forcing modes; no phantom secondary transmissions.
      if (ev.primary_tx) {
        CHECK(before.b1 > 0);
      }
      if (mode == SimMode::Original) {
        if (ev.primary_tx) CHECK(before.q1 > 0);
        if (ev.secondary_tx) CHECK(before.q2 > 0);
      }
      if (capacity) {
        CHECK(state.b1 <= *capacity);
      }
      CHECK(state.q1 >= 0);
      CHECK(state.q2 >= 0);
      CHECK(state.b1 >= 0);

      arrivals1 += ev.arrival1;
      arrivals2 += ev.arrival2;
      departures1 += ev.primary_departure;
      departures2 += ev.secondary_departure;
      stored += ev.harvested;
      consumed += ev.primary_tx;
    }
    CHECK(arrivals1 - departures1 == state.q1);
    CHECK(arrivals2 - departures2 == state.q2);
    CHECK(stored - consumed == state.b1);
  }
}

TEST_CASE("run reports exact conservation counters") {
  SimConfig config{scenario(kMpr, EnergyModel(0.4, 3), 0.3, 0.4, 0.5)};
  config.horizon = 50'000;
  config.burn_in = 5'000;
  config.seed = 99;
  config.replications = 3;
  const SimReport report = run(config);
  for (const auto& row : report.replications) {
    CHECK(row.arrivals1 - row.departures1 == row.final_q1);
    CHECK(row.arrivals2 - row.departures2 == row.final_q2);
    CHECK(row.harvested - row.consumed == row.final_b1);
  }
}

TEST_CASE("identical configurations reproduce bit-identical reports") {
  SimConfig config{scenario(kMpr, EnergyModel(0.5, 2), 0.2, 0.3, 0.5)};
  config.horizon = 30'000;
  config.burn_in = 3'000;
  config.seed = 1234;
  config.replications = 4;
  const SimReport a = run(config);
  const SimReport b = run(config);
  REQUIRE(a.replications.size() == b.replications.size());
  for (size_t i = 0; i < a.replications.size(); ++i) {
    CHECK(a.replications[i].throughput1 == b.replications[i].throughput1);
    CHECK(a.replications[i].throughput2 == b.replications[i].throughput2);
    CHECK(a.replications[i].queue_slope1 == b.replications[i].queue_slope1);
    CHECK(a.replications[i].final_q2 == b.replications[i].final_q2);
    CHECK(a.replications[i].battery_nonempty_fraction ==
          b.replications[i].battery_nonempty_fraction);
  }
  CHECK(a.mean.mu1_hat == b.mean.mu1_hat);
  CHECK(a.ci95.mu2_hat == b.ci95.mu2_hat);
}

TEST_CASE("a saturated battery never holds more than one unit") {
  // With the queue forced nonempty the battery is drained every slot it is
  // charged, so its level alternates in {0, 1} no matter the capacity and
  // the occupied fraction converges to delta.
  for (const auto& energy :
       {EnergyModel(0.5, 1), EnergyModel(0.5, 5), EnergyModel(0.5)}) {
    SimConfig config{scenario(kMpr, energy, 0.0, 0.0, 0.5)};
    config.mode = SimMode::SaturatedBoth;
    config.horizon = 200'000;
    config.burn_in = 20'000;
    config.seed = 7;
    config.replications = 1;
    int64_t max_level = 0;
    const SimReport report = run(
        config,
        [&](int64_t, const SystemState& s) {
          max_level = std::max(max_level, s.b1);
        },
        1);
    CHECK(max_level <= 1);
    CHECK(report.mean.battery_nonempty_fraction ==
          doctest::Approx(0.5).epsilon(0.02));
  }
}

TEST_CASE("saturated service rates track the dominant-system formulas") {
  const auto [mu1, mu2] = saturated_service_rates(
      scenario(kMpr, EnergyModel(0.4), 0.0, 0.0, 0.5), SimMode::SaturatedBoth,
      400'000, 21);
  CHECK(mu1 == doctest::Approx(0.3).epsilon(0.02));
  CHECK(mu2 == doctest::Approx(0.58).epsilon(0.02));
  CHECK_THROWS_AS(saturated_service_rates(
                      scenario(kMpr, EnergyModel(0.4), 0.0, 0.0, 0.5),
                      SimMode::Original, 1000, 1),
                  InvalidConfig);
}

TEST_CASE("dominant-one active fraction follows the rate balance") {
  // lambda1 / (q112 p + q11 (1-p)) = 0.2 / 0.75
  SimConfig config{scenario(kMpr, EnergyModel(0.4), 0.2, 0.0, 0.5)};
  config.mode = SimMode::Dominant1;
  config.horizon = 500'000;
  config.burn_in = 50'000;
  config.seed = 17;
  config.replications = 3;
  const SimReport report = run(config);
  CHECK(report.mean.active_fraction1 ==
        doctest::Approx(0.2 / 0.75).epsilon(0.03));
  CHECK(report.mean.throughput1 == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("stability probe verdicts at easy points") {
  CHECK(stability_probe(scenario(kMpr, EnergyModel(0.4), 0.0, 0.0, 0.5),
                        100'000, 3, 3) == std::pair{true, true});
  // lambda1 far beyond the primary extent delta * q11 = 0.36.
  const auto clogged = stability_probe(
      scenario(kMpr, EnergyModel(0.4), 0.9, 0.1, 0.0), 100'000, 3, 3);
  CHECK(!clogged.first);
}

TEST_CASE("config validation") {
  const Scenario sc = scenario(kMpr, EnergyModel(0.4), 0.1, 0.1, 0.5);
  SimConfig config{sc};
  config.burn_in = config.horizon;
  CHECK_THROWS_AS(run(config), InvalidConfig);
  SimConfig zero_reps{sc};
  zero_reps.replications = 0;
  CHECK_THROWS_AS(run(zero_reps), InvalidConfig);
  SimConfig bad_horizon{sc};
  bad_horizon.horizon = 0;
  bad_horizon.burn_in = -1;
  CHECK_THROWS_AS(run(bad_horizon), InvalidConfig);
}
