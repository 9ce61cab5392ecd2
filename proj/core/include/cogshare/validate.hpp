#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cogshare/regions.hpp"
#include "cogshare/sim.hpp"

// Validation campaigns pitting every closed-form quantity against an
// independent route: the slotted simulator for rates, occupancies, and
// stability verdicts, and the exhaustive grid maximizer for p*. Campaign
// points run on a small worker pool; results are assembled in grid order, so
// a (suite, seed) pair determines the report bit for bit.

namespace cogshare {

// Statistical comparisons pass within max(3 * CI, kStatAbsTol); deterministic
// identities within kDetTol.
inline constexpr double kStatAbsTol = 5e-3;
inline constexpr double kDetTol = 1e-9;

struct ValidationPoint {
  std::string params;
  double analytic = 0.0;
  double simulated = 0.0;
  double ci_halfwidth = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::string suite;
  uint64_t seed = 0;
  std::vector<ValidationPoint> points;
  double worst_deviation = 0.0;
  double pass_rate = 1.0;
  bool all_pass = true;

  void finalize();
};

void write_validation_csv(std::ostream& out, const ValidationReport& report);

// Reference channels used across campaigns: one with positive multipacket
// reception index, one with a negative index, and the pure collision channel.
struct ChannelArchetype {
  std::string name;
  ChannelModel channel;
};
const std::vector<ChannelArchetype>& channel_archetypes();

// One cell of the saturated-simulation grid shared by the service-rate and
// battery campaigns: archetypes x delta {0.2, 0.5, 0.8} x capacity
// {1, 2, 5, inf} x p {0, 0.5, 1}, simulated with both queues held nonempty.
struct SaturatedCell {
  std::string params;
  ChannelModel channel;
  EnergyModel energy;
  double p;
  SimReport report;
};

std::vector<SaturatedCell> run_saturated_grid(uint64_t seed,
                                              int64_t horizon = 1'000'000,
                                              int replications = 5);

// Empirical service rates vs mu1_dominant1 and mu2_dominant2.
ValidationReport service_rate_report(const std::vector<SaturatedCell>& grid);
// Empirical battery occupancy vs battery_nonempty_prob.
ValidationReport battery_report(const std::vector<SaturatedCell>& grid);

ValidationReport validate_service_rates(uint64_t seed,
                                        int64_t horizon = 1'000'000,
                                        int replications = 5);
ValidationReport validate_battery(uint64_t seed, int64_t horizon = 1'000'000,
                                  int replications = 5);

// Primary active-slot fraction in the first dominant system vs the rate
// balance lambda1 / (q112 p + q11 (1-p)), plus delivered throughput.
ValidationReport validate_active_fraction(uint64_t seed,
                                          int64_t horizon = 1'000'000,
                                          int replications = 5);

// Stability probes at points inset inside and outside the analytic frontier,
// each simulated with the boundary-achieving p*. Inside points must report
// both queues stable; outside points must flag at least one queue unstable.
ValidationReport validate_boundary(uint64_t seed, double inset = 0.05,
                                   int64_t horizon = 2'000'000,
                                   int replications = 5,
                                   int points_per_side = 42);

// Closed-form p* against the exhaustive grid oracle on random valid
// configurations, both boundary directions.
ValidationReport validate_pstar(uint64_t seed, int n_configs = 200,
                                int p_grid = 1001);

// Deterministic geometry identities of the region construction.
struct GeometryCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<GeometryCheck> validate_geometry(uint64_t seed,
                                             int samples = 10'000,
                                             int polyline_points = 257);

// Runs fn(0..n-1) on a small worker pool; rethrows the first failure.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace cogshare
