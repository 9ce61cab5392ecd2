#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cogshare/model.hpp"

// Slotted Monte Carlo engine for the cognitive access protocol. Within one
// slot the events run in this order:
//
//   1. primary is active iff its queue (or dominant-mode forcing) and its
//      battery are both nonempty, and transmits iff active
//   2. secondary transmits with probability 1 when the primary is idle and
//      with probability p when it is active (given a real or dummy packet)
//   3. successes resolve: a sole transmitter i succeeds w.p. q_{i/i};
//      simultaneous transmitters succeed independently w.p. q_{i/1,2}
//   4. each successful real packet leaves its queue
//   5. every primary transmission consumes one energy unit, successful,
//      failed, or dummy alike
//   6. a Bernoulli(delta) harvest arrives, stored only if the battery is not
//      full
//   7. Bernoulli(lambda_i) packet arrivals join the queues
//
// Arrivals and harvests of slot t become usable in slot t+1 (late-arrival
// convention). Six uniform draws are consumed every slot, in the fixed order
// arrival1, arrival2, harvest, access, success1, success2, even when unused,
// so streams stay aligned across modes.

namespace cogshare {

enum class SimMode {
  Original,       // protocol as specified
  Dominant1,      // secondary transmits dummy packets when its queue is empty
  Dominant2,      // primary transmits dummy packets when its queue is empty
  SaturatedBoth,  // both queues held nonempty
};

std::string to_string(SimMode mode);

// Queue lengths and battery level at a slot boundary.
struct SystemState {
  int64_t q1 = 0;
  int64_t q2 = 0;
  int64_t b1 = 0;
};

// The six per-slot uniform draws, in consumption order.
struct SlotDraws {
  double arrival1;
  double arrival2;
  double harvest;
  double access;
  double success1;
  double success2;
};

struct SlotEvents {
  bool primary_tx = false;
  bool secondary_tx = false;
  bool primary_success = false;    // includes dummy transmissions
  bool secondary_success = false;  // includes dummy transmissions
  bool primary_departure = false;  // a real packet left q1
  bool secondary_departure = false;
  bool arrival1 = false;
  bool arrival2 = false;
  bool harvested = false;  // energy unit stored
  bool overflow = false;   // harvest rejected by a full battery
};

// Executes one slot in place and reports what happened.
SlotEvents step(SystemState& state, const Scenario& scenario, SimMode mode,
                const SlotDraws& draws);

struct SimConfig {
  Scenario scenario;
  SimMode mode = SimMode::Original;
  int64_t horizon = 2'000'000;
  int64_t burn_in = 200'000;
  uint64_t seed = 1;
  int replications = 5;
};

// Per-replication statistics. Fractions and rates are measured over the
// slots after burn_in; the conservation counters cover the whole run.
struct ReplicationStats {
  double throughput1 = 0.0;  // real deliveries per slot
  double throughput2 = 0.0;
  double mu1_hat = 0.0;  // successful transmissions per slot, dummies counted
  double mu2_hat = 0.0;
  double active_fraction1 = 0.0;  // slots with q1 != 0 and b1 != 0
  double battery_nonempty_fraction = 0.0;
  double secondary_busy_fraction = 0.0;
  double queue_slope1 = 0.0;  // least-squares drift of q1, packets per slot
  double queue_slope2 = 0.0;
  double final_q1 = 0.0;
  double final_q2 = 0.0;
  double final_b1 = 0.0;
  double arrivals1 = 0.0;  // whole-run conservation counters
  double arrivals2 = 0.0;
  double departures1 = 0.0;
  double departures2 = 0.0;
  double harvested = 0.0;
  double consumed = 0.0;
  double overflow = 0.0;
  bool stable1 = false;
  bool stable2 = false;
};

struct SimReport {
  std::vector<ReplicationStats> replications;
  ReplicationStats mean;
  ReplicationStats ci95;  // 95% half-widths across replications
  bool stable1 = false;   // majority verdict
  bool stable2 = false;
};

// Stability verdict thresholds: a queue counts as stable when its fitted
// drift stays below kSlopeTol and its final length below 10 sqrt(horizon).
inline constexpr double kSlopeTol = 1e-3;
inline constexpr double kQueueCapFactor = 10.0;

using TrajectorySink =
    std::function<void(int64_t slot, const SystemState& state)>;

// Runs `replications` independent streams and aggregates. Replication r uses
// an engine seeded with splitmix64(seed ^ (r+1) * 0x9e3779b97f4a7c15), so a
// SimConfig determines the report bit for bit. The optional sink observes
// replication 0 at slot starts every `trajectory_stride` slots.
SimReport run(const SimConfig& config, const TrajectorySink& trajectory = {},
              int64_t trajectory_stride = 1000);

// Empirical service rates with the designated queue(s) forced nonempty;
// successful dummy transmissions count as departures.
std::pair<double, double> saturated_service_rates(const Scenario& scenario,
                                                  SimMode mode,
                                                  int64_t horizon,
                                                  uint64_t seed);

// Majority stability verdict for both queues under the original protocol.
std::pair<bool, bool> stability_probe(const Scenario& scenario,
                                      int64_t horizon, uint64_t seed,
                                      int replications);

// 64-bit mixing function used to derive per-replication seeds.
uint64_t splitmix64(uint64_t x);

// Uniform double in [0, 1) with 53 random bits.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cogshare
