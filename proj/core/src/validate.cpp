#include "cogshare/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "cogshare/artifacts.hpp"
#include "cogshare/version.hpp"

namespace cogshare {

void ValidationReport::finalize() {
  worst_deviation = 0.0;
  size_t passed = 0;
  for (const auto& point : points) {
    worst_deviation =
        std::max(worst_deviation, std::abs(point.analytic - point.simulated));
    passed += point.pass;
  }
  pass_rate = points.empty()
                  ? 1.0
                  : static_cast<double>(passed) / static_cast<double>(points.size());
  all_pass = passed == points.size();
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  write_csv_header_comments(
      out, {{"suite", report.suite}, {"seed", std::to_string(report.seed)}});
  out << "index,params,analytic,simulated,ci_halfwidth,tolerance,pass\n";
  for (size_t i = 0; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    out << i << ',' << p.params << ',' << format_double(p.analytic) << ','
        << format_double(p.simulated) << ',' << format_double(p.ci_halfwidth)
        << ',' << format_double(p.tolerance) << ',' << (p.pass ? 1 : 0)
        << "\n";
  }
  out << "# worst_deviation = " << format_double(report.worst_deviation)
      << "\n";
  out << "# pass_rate = " << format_double(report.pass_rate) << "\n";
}

const std::vector<ChannelArchetype>& channel_archetypes() {
  static const std::vector<ChannelArchetype> archetypes = {
      {"strong_mpr", ChannelModel(0.9, 0.8, 0.6, 0.5)},  // eta = 0.21
      {"weak_mpr", ChannelModel(0.9, 0.8, 0.2, 0.1)},    // eta = -0.47
      {"collision", ChannelModel(1.0, 1.0, 0.0, 0.0)},   // eta = -1
  };
  return archetypes;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  if (n == 0) {
    return;
  }
  size_t workers = std::thread::hardware_concurrency();
  workers = std::min(std::max<size_t>(workers, 1), n);
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back(worker);
  }
  for (auto& thread : threads) {
    thread.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

namespace {

const double kDeltas[] = {0.2, 0.5, 0.8};
const double kAccessProbs[] = {0.0, 0.5, 1.0};

std::vector<EnergyModel> battery_grid() {
  return {EnergyModel(0.2, 1),  EnergyModel(0.2, 2), EnergyModel(0.2, 5),
          EnergyModel(0.2),     EnergyModel(0.5, 1), EnergyModel(0.5, 2),
          EnergyModel(0.5, 5),  EnergyModel(0.5),    EnergyModel(0.8, 1),
          EnergyModel(0.8, 2),  EnergyModel(0.8, 5), EnergyModel(0.8)};
}

}  // namespace

std::vector<SaturatedCell> run_saturated_grid(uint64_t seed, int64_t horizon,
                                              int replications) {
  std::vector<SaturatedCell> cells;
  for (const auto& archetype : channel_archetypes()) {
    for (const auto& energy : battery_grid()) {
      for (double p : kAccessProbs) {
        std::ostringstream params;
        params << "channel=" << archetype.name
               << ";delta=" << format_double(energy.delta) << ";capacity="
               << (energy.capacity ? std::to_string(*energy.capacity)
                                   : std::string("inf"))
               << ";p=" << format_double(p);
        cells.push_back(SaturatedCell{params.str(), archetype.channel, energy,
                                      p, SimReport{}});
      }
    }
  }

  parallel_for(cells.size(), [&](size_t i) {
    SaturatedCell& cell = cells[i];
    Scenario scenario{cell.channel, cell.energy, ArrivalRates(0.0, 0.0),
                      AccessPolicy(cell.p)};
    SimConfig config{scenario};
    config.mode = SimMode::SaturatedBoth;
    config.horizon = horizon;
    config.burn_in = horizon / 10;
    config.seed = splitmix64(seed ^ (i + 1));
    config.replications = replications;
    cell.report = run(config);
  });
  return cells;
}

ValidationReport service_rate_report(const std::vector<SaturatedCell>& grid) {
  ValidationReport report;
  report.suite = "service-rates";
  for (const auto& cell : grid) {
    const double mu1 = mu1_dominant1(cell.channel, cell.energy, cell.p);
    const double mu2 = mu2_dominant2(cell.channel, cell.energy, cell.p);

    ValidationPoint point1;
    point1.params = cell.params + ";stat=mu1";
    point1.analytic = mu1;
    point1.simulated = cell.report.mean.mu1_hat;
    point1.ci_halfwidth = cell.report.ci95.mu1_hat;
    point1.tolerance = std::max(3.0 * point1.ci_halfwidth, kStatAbsTol);
    point1.pass =
        std::abs(point1.analytic - point1.simulated) <= point1.tolerance;
    report.points.push_back(point1);

    ValidationPoint point2;
    point2.params = cell.params + ";stat=mu2";
    point2.analytic = mu2;
    point2.simulated = cell.report.mean.mu2_hat;
    point2.ci_halfwidth = cell.report.ci95.mu2_hat;
    point2.tolerance = std::max(3.0 * point2.ci_halfwidth, kStatAbsTol);
    point2.pass =
        std::abs(point2.analytic - point2.simulated) <= point2.tolerance;
    report.points.push_back(point2);
  }
  report.finalize();
  return report;
}

ValidationReport battery_report(const std::vector<SaturatedCell>& grid) {
  ValidationReport report;
  report.suite = "battery";
  for (const auto& cell : grid) {
    ValidationPoint point;
    point.params = cell.params + ";stat=battery_nonempty";
    point.analytic = cell.energy.battery_nonempty_prob();
    point.simulated = cell.report.mean.battery_nonempty_fraction;
    point.ci_halfwidth = cell.report.ci95.battery_nonempty_fraction;
    point.tolerance = std::max(3.0 * point.ci_halfwidth, kStatAbsTol);
    point.pass = std::abs(point.analytic - point.simulated) <= point.tolerance;
    report.points.push_back(point);
  }
  report.finalize();
  return report;
}

ValidationReport validate_service_rates(uint64_t seed, int64_t horizon,
                                        int replications) {
  ValidationReport report =
      service_rate_report(run_saturated_grid(seed, horizon, replications));
  report.seed = seed;
  return report;
}

ValidationReport validate_battery(uint64_t seed, int64_t horizon,
                                  int replications) {
  ValidationReport report =
      battery_report(run_saturated_grid(seed, horizon, replications));
  report.seed = seed;
  return report;
}

ValidationReport validate_active_fraction(uint64_t seed, int64_t horizon,
                                          int replications) {
  struct Cell {
    std::string params;
    ChannelModel channel;
    EnergyModel energy;
    double p;
    double lambda1;
    SimReport report;
  };
  std::vector<Cell> cells;
  const std::vector<EnergyModel> energies = {EnergyModel(0.5),
                                             EnergyModel(0.5, 2)};
  for (const auto& archetype : channel_archetypes()) {
    for (const auto& energy : energies) {
      for (double p : kAccessProbs) {
        const double service =
            archetype.channel.q112 * p + archetype.channel.q11 * (1.0 - p);
        const double bound = energy.battery_nonempty_prob() * service;
        if (bound < 0.04) {
          continue;  // no room for a strictly interior arrival rate
        }
        const double lambda1 = 0.5 * bound;
        std::ostringstream params;
        params << "channel=" << archetype.name
               << ";delta=" << format_double(energy.delta) << ";capacity="
               << (energy.capacity ? std::to_string(*energy.capacity)
                                   : std::string("inf"))
               << ";p=" << format_double(p)
               << ";lambda1=" << format_double(lambda1);
        cells.push_back(Cell{params.str(), archetype.channel, energy, p,
                             lambda1, SimReport{}});
      }
    }
  }

  parallel_for(cells.size(), [&](size_t i) {
    Cell& cell = cells[i];
    Scenario scenario{cell.channel, cell.energy,
                      ArrivalRates(cell.lambda1, 0.0), AccessPolicy(cell.p)};
    SimConfig config{scenario};
    config.mode = SimMode::Dominant1;
    config.horizon = horizon;
    config.burn_in = horizon / 10;
    config.seed = splitmix64(seed ^ (0xACF0ULL + i));
    config.replications = replications;
    cell.report = run(config);
  });

  ValidationReport report;
  report.suite = "active-fraction";
  report.seed = seed;
  for (const auto& cell : cells) {
    const double service =
        cell.channel.q112 * cell.p + cell.channel.q11 * (1.0 - cell.p);

    ValidationPoint fraction;
    fraction.params = cell.params + ";stat=active_fraction1";
    fraction.analytic = cell.lambda1 / service;
    fraction.simulated = cell.report.mean.active_fraction1;
    fraction.ci_halfwidth = cell.report.ci95.active_fraction1;
    fraction.tolerance = std::max(3.0 * fraction.ci_halfwidth, kStatAbsTol);
    fraction.pass =
        std::abs(fraction.analytic - fraction.simulated) <= fraction.tolerance;
    report.points.push_back(fraction);

    ValidationPoint throughput;
    throughput.params = cell.params + ";stat=throughput1";
    throughput.analytic = cell.lambda1;
    throughput.simulated = cell.report.mean.throughput1;
    throughput.ci_halfwidth = cell.report.ci95.throughput1;
    throughput.tolerance =
        std::max(3.0 * throughput.ci_halfwidth, kStatAbsTol);
    throughput.pass = std::abs(throughput.analytic - throughput.simulated) <=
                      throughput.tolerance;
    report.points.push_back(throughput);
  }
  report.finalize();
  return report;
}

ValidationReport validate_boundary(uint64_t seed, double inset,
                                   int64_t horizon, int replications,
                                   int points_per_side) {
  struct Probe {
    std::string params;
    Scenario scenario;
    bool expected_stable;
    bool observed = false;
  };
  std::vector<Probe> probes;
  const std::vector<EnergyModel> energies = {EnergyModel(0.5),
                                             EnergyModel(0.5, 2)};
  for (const auto& archetype : channel_archetypes()) {
    for (const auto& energy : energies) {
      const StabilityRegion region = build_region(archetype.channel, energy);
      const double extent = region.lambda1_extent();
      for (int i = 0; i < points_per_side; ++i) {
        const double frac =
            0.02 + 0.96 * static_cast<double>(i) /
                       static_cast<double>(points_per_side - 1);
        const double lambda1 = frac * extent;
        const double lambda2 = *region.max_lambda2(lambda1);
        const double p = optimal_p(archetype.channel, energy, lambda1).value;
        for (int side = 0; side < 2; ++side) {
          const double scale = side == 0 ? 1.0 - inset : 1.0 + inset;
          const double l1 = std::min(scale * lambda1, 1.0);
          const double l2 = std::min(scale * lambda2, 1.0);
          std::ostringstream params;
          params << "channel=" << archetype.name << ";capacity="
                 << (energy.capacity ? std::to_string(*energy.capacity)
                                     : std::string("inf"))
                 << ";lambda1=" << format_double(l1)
                 << ";lambda2=" << format_double(l2)
                 << ";p=" << format_double(p)
                 << ";side=" << (side == 0 ? "inside" : "outside");
          probes.push_back(
              Probe{params.str(),
                    Scenario{archetype.channel, energy, ArrivalRates(l1, l2),
                             AccessPolicy(p)},
                    side == 0});
        }
      }
    }
  }

  std::vector<std::pair<bool, bool>> verdicts(probes.size());
  parallel_for(probes.size(), [&](size_t i) {
    verdicts[i] = stability_probe(probes[i].scenario, horizon,
                                  splitmix64(seed ^ (0xB0D1ULL + i)),
                                  replications);
  });

  ValidationReport report;
  report.suite = "boundary";
  report.seed = seed;
  for (size_t i = 0; i < probes.size(); ++i) {
    const auto [stable1, stable2] = verdicts[i];
    const bool both_stable = stable1 && stable2;
    ValidationPoint point;
    point.params = probes[i].params;
    point.analytic = probes[i].expected_stable ? 1.0 : 0.0;
    point.simulated = both_stable ? 1.0 : 0.0;
    point.tolerance = 0.0;
    point.pass = both_stable == probes[i].expected_stable;
    report.points.push_back(point);
  }
  report.finalize();
  return report;
}

namespace {

// The dominant-system bounds evaluated without the stability precondition;
// the comparison route for the oracle checks.
double lambda2_bound(const ChannelModel& ch, double lambda1, double p) {
  const double service = ch.q112 * p + ch.q11 * (1.0 - p);
  return (ch.q212 * p - ch.q22) / service * lambda1 + ch.q22;
}

double lambda1_bound(const ChannelModel& ch, double beta, double lambda2,
                     double p) {
  const double service = ch.q22 * (1.0 - beta) + ch.q212 * beta * p;
  return beta * p * (ch.q112 - ch.q11) / service * lambda2 + beta * ch.q11;
}

}  // namespace

ValidationReport validate_pstar(uint64_t seed, int n_configs, int p_grid) {
  ValidationReport report;
  report.suite = "pstar";
  report.seed = seed;
  std::mt19937_64 rng(splitmix64(seed ^ 0x70737461ULL));
  const double step = 1.0 / static_cast<double>(p_grid - 1);
  const std::optional<int64_t> capacities[] = {
      std::optional<int64_t>(1), std::optional<int64_t>(2),
      std::optional<int64_t>(5), std::optional<int64_t>(64), std::nullopt};

  for (int k = 0; k < n_configs; ++k) {
    const double q11 = 0.2 + 0.8 * u01(rng);
    const double q22 = 0.2 + 0.8 * u01(rng);
    const double q112 = q11 * u01(rng);
    const double q212 = q22 * u01(rng);
    const double delta = 0.1 + 0.8 * u01(rng);
    const auto capacity = capacities[rng() % 5];
    const ChannelModel channel(q11, q22, q112, q212);
    const EnergyModel energy(delta, capacity);
    const double beta = energy.battery_nonempty_prob();

    std::ostringstream base;
    base << "config=" << k << ";q11=" << format_double(q11)
         << ";q22=" << format_double(q22) << ";q112=" << format_double(q112)
         << ";q212=" << format_double(q212)
         << ";delta=" << format_double(delta) << ";capacity="
         << (capacity ? std::to_string(*capacity) : std::string("inf"));

    {
      const double lambda1 = u01(rng) * beta * q11;
      const PStar closed = optimal_p(channel, energy, lambda1);
      const GridPStar oracle =
          grid_pstar_oracle(channel, energy, lambda1, p_grid);
      ValidationPoint point;
      point.params = base.str() + ";side=primary;lambda1=" +
                     format_double(lambda1) + ";branch=" +
                     to_string(closed.branch);
      point.analytic = closed.value;
      point.simulated = oracle.p_best;
      point.tolerance = step + 1e-12;
      const bool p_close =
          std::abs(closed.value - oracle.p_best) <= point.tolerance;
      const bool bound_dominates = lambda2_bound(channel, lambda1,
                                                 closed.value) >=
                                   oracle.bound_best - kDetTol;
      point.pass = p_close && bound_dominates;
      report.points.push_back(point);
    }
    {
      const double cap = (1.0 - beta) * q22 + beta * q212;
      const double lambda2 = u01(rng) * cap;
      const PStar closed = optimal_p_secondary_axis(channel, energy, lambda2);
      const GridPStar oracle =
          grid_pstar_oracle_secondary(channel, energy, lambda2, p_grid);
      ValidationPoint point;
      point.params = base.str() + ";side=secondary;lambda2=" +
                     format_double(lambda2) + ";branch=" +
                     to_string(closed.branch);
      point.analytic = closed.value;
      point.simulated = oracle.p_best;
      point.tolerance = step + 1e-12;
      const bool p_close =
          std::abs(closed.value - oracle.p_best) <= point.tolerance;
      const bool bound_dominates = lambda1_bound(channel, beta, lambda2,
                                                 closed.value) >=
                                   oracle.bound_best - kDetTol;
      point.pass = p_close && bound_dominates;
      report.points.push_back(point);
    }
  }
  report.finalize();
  return report;
}

namespace {

bool branch_in_r2(Branch branch) {
  return branch == Branch::R2Prime || branch == Branch::R2DoublePrime ||
         branch == Branch::CollisionR2;
}

bool member_of_group(const StabilityRegion& region, double l1, double l2,
                     bool r2_group) {
  if (l1 < 0.0 || l2 < 0.0) {
    return false;
  }
  for (const auto& sub : region.subregions) {
    if (branch_in_r2(sub.name) == r2_group && sub.contains(l1, l2)) {
      return true;
    }
  }
  return false;
}

std::optional<double> closure_bound(const StabilityRegion& region,
                                    double l1) {
  std::optional<double> best;
  for (const auto& sub : region.subregions) {
    if (auto sup = sub.lambda2_closure_sup(l1)) {
      if (!best || *sup > *best) {
        best = sup;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<GeometryCheck> validate_geometry(uint64_t seed, int samples,
                                             int polyline_points) {
  std::vector<GeometryCheck> checks;
  std::mt19937_64 rng(splitmix64(seed ^ 0x67656f6dULL));

  // R2 contained in R1 whenever eta > 0.
  {
    const ChannelModel& channel = channel_archetypes()[0].channel;
    for (const auto& energy :
         {EnergyModel(0.2), EnergyModel(0.5), EnergyModel(0.8),
          EnergyModel(0.5, 2)}) {
      const StabilityRegion region = build_region(channel, energy);
      const double extent = region.lambda1_extent();
      int violations = 0;
      for (int i = 0; i < samples; ++i) {
        const double l1 = u01(rng) * extent;
        const double l2 = u01(rng);
        if (member_of_group(region, l1, l2, true) &&
            !member_of_group(region, l1, l2, false)) {
          ++violations;
        }
      }
      GeometryCheck check;
      check.name = "eta_pos_r2_subset_r1;delta=" +
                   format_double(energy.delta) + ";capacity=" +
                   (energy.capacity ? std::to_string(*energy.capacity)
                                    : std::string("inf"));
      check.measured = violations;
      check.tolerance = 0.0;
      check.pass = violations == 0;
      checks.push_back(check);
    }
  }

  // Finite-battery region contained in the unbounded-battery region.
  for (const auto& archetype : channel_archetypes()) {
    for (double delta : kDeltas) {
      for (int64_t c : {1, 2, 5}) {
        const StabilityRegion finite =
            build_region(archetype.channel, EnergyModel(delta, c));
        const StabilityRegion infinite =
            build_region(archetype.channel, EnergyModel(delta));
        const double extent = finite.lambda1_extent();
        int violations = 0;
        for (int i = 0; i < samples; ++i) {
          const double l1 = u01(rng) * extent;
          const double l2 = u01(rng);
          if (finite.contains(l1, l2) && !infinite.contains(l1, l2)) {
            ++violations;
          }
        }
        GeometryCheck check;
        check.name = "finite_subset_infinite;channel=" + archetype.name +
                     ";delta=" + format_double(delta) +
                     ";capacity=" + std::to_string(c);
        check.measured = violations;
        check.tolerance = 0.0;
        check.pass = violations == 0;
        checks.push_back(check);
      }
    }
  }

  // The collision-channel region equals the eta <= 0 construction: compare
  // the built polyline against the directly coded erasure-channel frontier.
  for (double delta : kDeltas) {
    const ChannelModel collision(1.0, 1.0, 0.0, 0.0);
    const EnergyModel energy(delta);
    const StabilityRegion region = build_region(collision, energy);
    const BoundaryPolyline polyline =
        boundary_polyline(region, polyline_points);
    double worst = 0.0;
    for (const auto& vertex : polyline.vertices) {
      const double direct =
          collision.q22 * (1.0 - vertex.lambda1 / collision.q11);
      worst = std::max(worst, std::abs(vertex.lambda2 - direct));
    }
    GeometryCheck check;
    check.name = "collision_matches_eta_le0;delta=" + format_double(delta);
    check.measured = worst;
    check.tolerance = 1e-12;
    check.pass = worst <= check.tolerance;
    checks.push_back(check);
  }

  // Corner continuity where the two positive-eta boundary pieces meet.
  {
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double q11 = 0.2 + 0.8 * u01(rng);
      const double q22 = 0.2 + 0.8 * u01(rng);
      const double q112 = q11 * u01(rng);
      const double q212 = q22 * u01(rng);
      const ChannelModel channel(q11, q22, q112, q212);
      if (!channel.eta_positive() || channel.delta1() <= 0.0) {
        continue;
      }
      const EnergyModel energy(0.1 + 0.8 * u01(rng));
      const StabilityRegion region = build_region(channel, energy);
      const double corner = energy.battery_nonempty_prob() * q112;
      std::optional<double> sup1, sup2;
      for (const auto& sub : region.subregions) {
        if (sub.name == Branch::R1Prime) {
          sup1 = sub.lambda2_closure_sup(corner);
        } else if (sub.name == Branch::R1DoublePrime) {
          sup2 = sub.lambda2_closure_sup(corner);
        }
      }
      if (sup1 && sup2) {
        worst = std::max(worst, std::abs(*sup1 - *sup2));
      }
    }
    GeometryCheck check;
    check.name = "corner_continuity_at_beta_q112";
    check.measured = worst;
    check.tolerance = 1e-12;
    check.pass = worst <= check.tolerance;
    checks.push_back(check);
  }

  // Finite c = 64 frontier against the unbounded frontier, compared on a
  // shared lambda1 grid covering both regions.
  for (const auto& archetype : channel_archetypes()) {
    for (double delta : {0.2, 0.5, 0.8, 0.9}) {
      const StabilityRegion finite =
          build_region(archetype.channel, EnergyModel(delta, 64));
      const StabilityRegion infinite =
          build_region(archetype.channel, EnergyModel(delta));
      const double extent =
          std::min(finite.lambda1_extent(), infinite.lambda1_extent());
      double worst = 0.0;
      for (int i = 0; i < polyline_points; ++i) {
        const double l1 = extent * static_cast<double>(i) /
                          static_cast<double>(polyline_points - 1);
        const auto bound_f = closure_bound(finite, l1);
        const auto bound_i = closure_bound(infinite, l1);
        if (bound_f && bound_i) {
          worst = std::max(worst, std::abs(*bound_f - *bound_i));
        }
      }
      GeometryCheck check;
      check.name = "c64_matches_unbounded;channel=" + archetype.name +
                   ";delta=" + format_double(delta);
      check.measured = worst;
      check.tolerance = 1e-6;
      check.pass = worst <= check.tolerance;
      checks.push_back(check);
    }
  }

  return checks;
}

}  // namespace cogshare
