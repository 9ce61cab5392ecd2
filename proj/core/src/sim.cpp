#include "cogshare/sim.hpp"

#include <cmath>
#include <string>

namespace cogshare {

std::string to_string(SimMode mode) {
  switch (mode) {
    case SimMode::Original:
      return "original";
    case SimMode::Dominant1:
      return "dominant1";
    case SimMode::Dominant2:
      return "dominant2";
    case SimMode::SaturatedBoth:
      return "saturated";
  }
  return "?";
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SlotEvents step(SystemState& state, const Scenario& scenario, SimMode mode,
                const SlotDraws& draws) {
  const ChannelModel& ch = scenario.channel;
  const EnergyModel& en = scenario.energy;
  SlotEvents ev;

  const bool primary_forced =
      mode == SimMode::Dominant2 || mode == SimMode::SaturatedBoth;
  const bool secondary_forced =
      mode == SimMode::Dominant1 || mode == SimMode::SaturatedBoth;

  const bool primary_has_packet = primary_forced || state.q1 > 0;
  const bool primary_active = primary_has_packet && state.b1 > 0;
  const bool secondary_has_packet = secondary_forced || state.q2 > 0;

  ev.primary_tx = primary_active;
  ev.secondary_tx = primary_active
                        ? (secondary_has_packet &&
                           draws.access < scenario.policy.p)
                        : secondary_has_packet;

  if (ev.primary_tx && ev.secondary_tx) {
    ev.primary_success = draws.success1 < ch.q112;
    ev.secondary_success = draws.success2 < ch.q212;
  } else if (ev.primary_tx) {
    ev.primary_success = draws.success1 < ch.q11;
  } else if (ev.secondary_tx) {
    ev.secondary_success = draws.success2 < ch.q22;
  }

  if (ev.primary_success && state.q1 > 0) {
    --state.q1;
    ev.primary_departure = true;
  }
  if (ev.secondary_success && state.q2 > 0) {
    --state.q2;
    ev.secondary_departure = true;
  }

  if (ev.primary_tx) {
    --state.b1;  // energy burned regardless of the outcome
  }

  if (draws.harvest < en.delta) {
    if (en.unbounded() || state.b1 < *en.capacity) {
      ++state.b1;
      ev.harvested = true;
    } else {
      ev.overflow = true;
    }
  }

  if (draws.arrival1 < scenario.arrivals.lambda1) {
    ++state.q1;
    ev.arrival1 = true;
  }
  if (draws.arrival2 < scenario.arrivals.lambda2) {
    ++state.q2;
    ev.arrival2 = true;
  }

  return ev;
}

namespace {

void validate(const SimConfig& config) {
  if (config.horizon < 1) {
    throw InvalidConfig("horizon must be >= 1");
  }
  if (config.burn_in < 0 || config.burn_in >= config.horizon) {
    throw InvalidConfig("burn_in must satisfy 0 <= burn_in < horizon");
  }
  if (config.replications < 1) {
    throw InvalidConfig("replications must be >= 1");
  }
}

ReplicationStats run_replication(const SimConfig& config, int replication,
                                 const TrajectorySink& trajectory,
                                 int64_t trajectory_stride) {
  std::mt19937_64 rng(splitmix64(
      config.seed ^
      (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(replication + 1))));

  SystemState state;
  const int64_t measured = config.horizon - config.burn_in;

  int64_t deliveries1 = 0, deliveries2 = 0;
  int64_t successes1 = 0, successes2 = 0;
  int64_t active1 = 0, battery_nonempty = 0, secondary_busy = 0;
  int64_t arrivals1 = 0, arrivals2 = 0, departures1 = 0, departures2 = 0;
  int64_t harvested = 0, consumed = 0, overflow = 0;

  // Least-squares drift of the queue lengths over the measured window,
  // accumulated against a centered slot index to keep the sums small.
  const double t_center = 0.5 * static_cast<double>(measured - 1);
  double sum_tq1 = 0.0, sum_tq2 = 0.0, sum_tt = 0.0;

  for (int64_t slot = 0; slot < config.horizon; ++slot) {
    if (trajectory && slot % trajectory_stride == 0) {
      trajectory(slot, state);
    }
    if (slot >= config.burn_in) {
      if (state.q1 > 0 && state.b1 > 0) ++active1;
      if (state.b1 > 0) ++battery_nonempty;
      if (state.q2 > 0) ++secondary_busy;
      const double tc = static_cast<double>(slot - config.burn_in) - t_center;
      sum_tq1 += tc * static_cast<double>(state.q1);
      sum_tq2 += tc * static_cast<double>(state.q2);
      sum_tt += tc * tc;
    }

    SlotDraws draws;
    draws.arrival1 = u01(rng);
    draws.arrival2 = u01(rng);
    draws.harvest = u01(rng);
    draws.access = u01(rng);
    draws.success1 = u01(rng);
    draws.success2 = u01(rng);

    const SlotEvents ev = step(state, config.scenario, config.mode, draws);

    if (slot >= config.burn_in) {
      deliveries1 += ev.primary_departure;
      deliveries2 += ev.secondary_departure;
      successes1 += ev.primary_tx && ev.primary_success;
      successes2 += ev.secondary_tx && ev.secondary_success;
    }
    arrivals1 += ev.arrival1;
    arrivals2 += ev.arrival2;
    departures1 += ev.primary_departure;
    departures2 += ev.secondary_departure;
    harvested += ev.harvested;
    consumed += ev.primary_tx;
    overflow += ev.overflow;
  }

  ReplicationStats stats;
  const double m = static_cast<double>(measured);
  stats.throughput1 = static_cast<double>(deliveries1) / m;
  stats.throughput2 = static_cast<double>(deliveries2) / m;
  stats.mu1_hat = static_cast<double>(successes1) / m;
  stats.mu2_hat = static_cast<double>(successes2) / m;
  stats.active_fraction1 = static_cast<double>(active1) / m;
  stats.battery_nonempty_fraction = static_cast<double>(battery_nonempty) / m;
  stats.secondary_busy_fraction = static_cast<double>(secondary_busy) / m;
  stats.queue_slope1 = sum_tq1 / sum_tt;
  stats.queue_slope2 = sum_tq2 / sum_tt;
  stats.final_q1 = static_cast<double>(state.q1);
  stats.final_q2 = static_cast<double>(state.q2);
  stats.final_b1 = static_cast<double>(state.b1);
  stats.arrivals1 = static_cast<double>(arrivals1);
  stats.arrivals2 = static_cast<double>(arrivals2);
  stats.departures1 = static_cast<double>(departures1);
  stats.departures2 = static_cast<double>(departures2);
  stats.harvested = static_cast<double>(harvested);
  stats.consumed = static_cast<double>(consumed);
  stats.overflow = static_cast<double>(overflow);

  const double q_cap =
      kQueueCapFactor * std::sqrt(static_cast<double>(config.horizon));
  stats.stable1 = stats.queue_slope1 < kSlopeTol && stats.final_q1 < q_cap;
  stats.stable2 = stats.queue_slope2 < kSlopeTol && stats.final_q2 < q_cap;
  return stats;
}

// 97.5% Student-t quantiles for n-1 degrees of freedom, n = 2..10.
constexpr double kT975[] = {12.706, 4.303, 3.182, 2.776, 2.571,
                            2.447,  2.365, 2.306, 2.262};

double t975(int n) {
  if (n <= 1) return 0.0;
  if (n - 1 <= 9) return kT975[n - 2];
  return 1.96 + 4.0 / static_cast<double>(n - 1);  // adequate beyond n = 10
}

void aggregate_field(const std::vector<ReplicationStats>& rows,
                     ReplicationStats& mean, ReplicationStats& ci,
                     double ReplicationStats::*field) {
  const int n = static_cast<int>(rows.size());
  double sum = 0.0;
  for (const auto& row : rows) sum += row.*field;
  const double avg = sum / n;
  mean.*field = avg;
  if (n < 2) {
    ci.*field = 0.0;
    return;
  }
  double ss = 0.0;
  for (const auto& row : rows) {
    const double d = row.*field - avg;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1));
  ci.*field = t975(n) * sd / std::sqrt(static_cast<double>(n));
}

}  // namespace

SimReport run(const SimConfig& config, const TrajectorySink& trajectory,
              int64_t trajectory_stride) {
  validate(config);
  if (trajectory && trajectory_stride < 1) {
    throw InvalidConfig("trajectory stride must be >= 1");
  }

  SimReport report;
  report.replications.reserve(config.replications);
  for (int r = 0; r < config.replications; ++r) {
    report.replications.push_back(run_replication(
        config, r, r == 0 ? trajectory : TrajectorySink{}, trajectory_stride));
  }

  static constexpr double ReplicationStats::*kFields[] = {
      &ReplicationStats::throughput1,
      &ReplicationStats::throughput2,
      &ReplicationStats::mu1_hat,
      &ReplicationStats::mu2_hat,
      &ReplicationStats::active_fraction1,
      &ReplicationStats::battery_nonempty_fraction,
      &ReplicationStats::secondary_busy_fraction,
      &ReplicationStats::queue_slope1,
      &ReplicationStats::queue_slope2,
      &ReplicationStats::final_q1,
      &ReplicationStats::final_q2,
      &ReplicationStats::final_b1,
      &ReplicationStats::arrivals1,
      &ReplicationStats::arrivals2,
      &ReplicationStats::departures1,
      &ReplicationStats::departures2,
      &ReplicationStats::harvested,
      &ReplicationStats::consumed,
      &ReplicationStats::overflow,
  };
  for (auto field : kFields) {
    aggregate_field(report.replications, report.mean, report.ci95, field);
  }

  int votes1 = 0, votes2 = 0;
  for (const auto& row : report.replications) {
    votes1 += row.stable1;
    votes2 += row.stable2;
  }
  report.stable1 = 2 * votes1 > config.replications;
  report.stable2 = 2 * votes2 > config.replications;
  report.mean.stable1 = report.stable1;
  report.mean.stable2 = report.stable2;
  return report;
}

std::pair<double, double> saturated_service_rates(const Scenario& scenario,
                                                  SimMode mode,
                                                  int64_t horizon,
                                                  uint64_t seed) {
  if (mode == SimMode::Original) {
    throw InvalidConfig(
        "saturated_service_rates requires a dominant or saturated mode");
  }
  SimConfig config{scenario};
  config.mode = mode;
  config.horizon = horizon;
  config.burn_in = horizon / 10;
  config.seed = seed;
  config.replications = 1;
  const SimReport report = run(config);
  return {report.mean.mu1_hat, report.mean.mu2_hat};
}

std::pair<bool, bool> stability_probe(const Scenario& scenario,
                                      int64_t horizon, uint64_t seed,
                                      int replications) {
  SimConfig config{scenario};
  config.mode = SimMode::Original;
  config.horizon = horizon;
  config.burn_in = horizon / 10;
  config.seed = seed;
  config.replications = replications;
  const SimReport report = run(config);
  return {report.stable1, report.stable2};
}

}  // namespace cogshare
