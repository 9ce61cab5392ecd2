#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

#include "cogshare/regions.hpp"
#include "cogshare/sim.hpp"

using namespace cogshare;

namespace {

const ChannelModel kMpr(0.9, 0.8, 0.6, 0.5);      // eta = 0.21
const ChannelModel kWeakMpr(0.9, 0.8, 0.2, 0.1);  // eta = -0.47
const ChannelModel kCollision(1.0, 1.0, 0.0, 0.0);

// The dominant-system lambda2 bound without the stability precondition;
// independent route used to cross-check the optimizing p.
double lambda2_bound(const ChannelModel& ch, double lambda1, double p) {
  const double service = ch.q112 * p + ch.q11 * (1.0 - p);
  return (ch.q212 * p - ch.q22) / service * lambda1 + ch.q22;
}

ChannelModel random_channel(std::mt19937_64& rng) {
  const double q11 = 0.05 + 0.95 * u01(rng);
  const double q22 = 0.05 + 0.95 * u01(rng);
  return ChannelModel(q11, q22, q11 * u01(rng), q22 * u01(rng));
}

}  // namespace

TEST_CASE("primary service rate in the first dominant system") {
  CHECK(mu1_dominant1(kMpr, EnergyModel(0.4), 0.5) == doctest::Approx(0.3));
  CHECK(mu1_dominant1(kMpr, EnergyModel(0.0), 0.7) == 0.0);
  CHECK(mu1_dominant1(kMpr, EnergyModel(0.5, 1), 0.0) ==
        doctest::Approx(0.9 / 3.0));
}

TEST_CASE("secondary service rate in the first dominant system") {
  CHECK(mu2_dominant1(kMpr, EnergyModel(0.4), 1.0, 0.2) ==
        doctest::Approx(0.7));
  CHECK(mu2_dominant1(kMpr, EnergyModel(0.4), 0.3, 0.0) ==
        doctest::Approx(0.8));
  CHECK(mu2_dominant1(kCollision, EnergyModel(0.5), 0.0, 0.3) ==
        doctest::Approx(0.7));
  CHECK_THROWS_AS(mu2_dominant1(kMpr, EnergyModel(0.4), 0.5, 0.31),
                  PreconditionViolated);
  const double mu1 = mu1_dominant1(kMpr, EnergyModel(0.4), 0.5);
  CHECK_THROWS_AS(mu2_dominant1(kMpr, EnergyModel(0.4), 0.5, mu1),
                  PreconditionViolated);  // boundary is excluded
}

TEST_CASE("secondary service rate in the second dominant system") {
  CHECK(mu2_dominant2(kMpr, EnergyModel(0.4), 0.0) == doctest::Approx(0.48));
  CHECK(mu2_dominant2(kMpr, EnergyModel(1.0), 1.0) == doctest::Approx(0.5));
  CHECK(mu2_dominant2(kMpr, EnergyModel(0.4), 1.0) == doctest::Approx(0.68));
}

TEST_CASE("primary service rate in the second dominant system") {
  CHECK(mu1_dominant2(kMpr, EnergyModel(0.4), 0.0, 0.3) ==
        doctest::Approx(0.36));
  CHECK(mu1_dominant2(kMpr, EnergyModel(0.4), 1.0, 0.5) ==
        doctest::Approx(0.36 - 0.12 / 0.68 * 0.5));
  const ChannelModel flat(0.7, 0.8, 0.7, 0.5);  // q112 = q11 kills the slope
  CHECK(mu1_dominant2(flat, EnergyModel(0.4), 0.8, 0.2) ==
        doctest::Approx(0.4 * 0.7));
  CHECK_THROWS_AS(mu1_dominant2(kMpr, EnergyModel(0.4), 0.0, 0.48),
                  PreconditionViolated);
}

TEST_CASE("region membership on the collision channel") {
  const StabilityRegion region = build_region(kCollision, EnergyModel(0.5));
  CHECK(region.contains(0.3, 0.3));
  CHECK(!region.contains(0.3, 0.8));
  CHECK(!region.contains(0.5, 0.1));   // lambda1 extent is open
  CHECK(!region.contains(0.3, -0.1));  // negative rates are outside
}

TEST_CASE("region membership with multipacket reception") {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.4));
  CHECK(region.contains(0.2, 0.3));
  CHECK(region.contains(0.24, 0.67));
  CHECK(!region.contains(0.24, 0.69));
  CHECK(region.contains(0.0, 0.79));
  CHECK(!region.contains(0.0, 0.81));
}

TEST_CASE("zero harvesting collapses the region onto the lambda2 axis") {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.0));
  CHECK(region.contains(0.0, 0.0));
  CHECK(region.contains(0.0, 0.79));
  CHECK(!region.contains(0.0, 0.8));  // lambda2 < q22 is strict
  CHECK(!region.contains(0.01, 0.1));
  CHECK(region.lambda1_extent() == 0.0);
  CHECK(*region.max_lambda2(0.0) == doctest::Approx(0.8));
}

TEST_CASE("largest stable lambda2 for a fixed lambda1") {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.4));
  CHECK(*region.max_lambda2(0.0) == doctest::Approx(0.8));
  CHECK(*region.max_lambda2(0.24) == doctest::Approx(0.68));
  // The extent itself is excluded by the strict bound.
  CHECK(!region.max_lambda2(region.lambda1_extent()).has_value());
  CHECK(!region.max_lambda2(0.5).has_value());
  CHECK_THROWS_AS(region.max_lambda2(-0.1), InvalidParameter);
}

TEST_CASE("max_lambda2 agrees with raw membership") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ChannelModel channel = random_channel(rng);
    std::optional<int64_t> capacity;
    if (trial % 2 == 0) {
      capacity = 1 + trial % 5;
    }
    const EnergyModel energy(u01(rng), capacity);
    const StabilityRegion region = build_region(channel, energy);
    const double extent = region.lambda1_extent();
    if (extent <= 1e-9) {
      continue;
    }
    const double l1 = 0.9 * extent * u01(rng);
    const auto sup = region.max_lambda2(l1);
    REQUIRE(sup.has_value());
    if (*sup > 1e-9) {
      CHECK(region.contains(l1, *sup - 1e-9));
    }
    CHECK(!region.contains(l1, *sup + 1e-9));
  }
}

TEST_CASE("optimal access probability on the primary axis") {
  const PStar mid = optimal_p(kMpr, EnergyModel(0.4), 0.3);
  CHECK(mid.value == doctest::Approx(0.5));
  CHECK(mid.branch == Branch::R1DoublePrime);

  const PStar low = optimal_p(kMpr, EnergyModel(0.4), 0.1);
  CHECK(low.value == 1.0);
  CHECK(low.branch == Branch::R1Prime);

  const PStar collision = optimal_p(kCollision, EnergyModel(0.5), 0.3);
  CHECK(collision.value == 0.0);
  CHECK(collision.branch == Branch::CollisionR1);

  const PStar weak = optimal_p(kWeakMpr, EnergyModel(0.4), 0.2);
  CHECK(weak.value == 0.0);
  CHECK(weak.branch == Branch::R1EtaLe0);

  CHECK_THROWS_AS(optimal_p(kMpr, EnergyModel(0.4), 0.4 * 0.9), OutOfRegion);
  CHECK_THROWS_AS(optimal_p(kMpr, EnergyModel(0.4), -0.01), OutOfRegion);
}

TEST_CASE("optimal access probability on the secondary axis") {
  const PStar idle = optimal_p_secondary_axis(kMpr, EnergyModel(0.4), 0.3);
  CHECK(idle.value == 0.0);
  CHECK(idle.branch == Branch::R2Prime);

  const PStar mid = optimal_p_secondary_axis(kMpr, EnergyModel(0.4), 0.58);
  CHECK(mid.value == doctest::Approx(0.5));
  CHECK(mid.branch == Branch::R2DoublePrime);

  const PStar top =
      optimal_p_secondary_axis(kMpr, EnergyModel(0.4), 0.68 - 1e-9);
  CHECK(top.value == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(optimal_p_secondary_axis(kMpr, EnergyModel(0.4), 0.68),
                  OutOfRegion);
  // q212 = 0 leaves no upper branch at all: the interval is empty.
  CHECK_THROWS_AS(optimal_p_secondary_axis(kCollision, EnergyModel(0.5), 0.6),
                  OutOfRegion);
}

TEST_CASE("p star always lands in [0, 1]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const ChannelModel channel = random_channel(rng);
    const EnergyModel energy(0.05 + 0.9 * u01(rng));
    const double beta = energy.battery_nonempty_prob();
    const double extent = beta * channel.q11;
    if (extent > 0.0) {
      const PStar p = optimal_p(channel, energy, u01(rng) * extent);
      CHECK(p.value >= 0.0);
      CHECK(p.value <= 1.0);
    }
    const double cap = (1.0 - beta) * channel.q22 + beta * channel.q212;
    if (cap > 0.0) {
      const PStar p =
          optimal_p_secondary_axis(channel, energy, u01(rng) * cap);
      CHECK(p.value >= 0.0);
      CHECK(p.value <= 1.0);
    }
  }
}

TEST_CASE("boundary polyline of the collision channel") {
  const StabilityRegion region = build_region(kCollision, EnergyModel(0.5));
  const BoundaryPolyline polyline = boundary_polyline(region, 3);
  REQUIRE(polyline.vertices.size() == 3);
  CHECK(polyline.vertices[0].lambda1 == 0.0);
  CHECK(polyline.vertices[0].lambda2 == doctest::Approx(1.0));
  CHECK(polyline.vertices[1].lambda1 == doctest::Approx(0.25));
  CHECK(polyline.vertices[1].lambda2 == doctest::Approx(0.75));
  CHECK(polyline.vertices[2].lambda1 == doctest::Approx(0.5));
  CHECK(polyline.vertices[2].lambda2 == doctest::Approx(0.5));
  CHECK(polyline.vertices[0].branch == Branch::CollisionR1);
}

TEST_CASE("boundary polyline carries the exact handover corner") {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.4));
  for (int n : {2, 5, 64}) {
    const BoundaryPolyline polyline = boundary_polyline(region, n);
    bool corner_found = false;
    for (const auto& vertex : polyline.vertices) {
      if (vertex.lambda1 == doctest::Approx(0.24).epsilon(1e-14)) {
        corner_found = true;
        CHECK(vertex.lambda2 == doctest::Approx(0.68).epsilon(1e-12));
      }
    }
    CHECK(corner_found);
  }
  CHECK_THROWS_AS(boundary_polyline(region, 1), InvalidParameter);
}

TEST_CASE("boundary polylines are monotone and in the region closure") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const ChannelModel channel = random_channel(rng);
    const EnergyModel energy(u01(rng));
    const StabilityRegion region = build_region(channel, energy);
    const BoundaryPolyline polyline = boundary_polyline(region, 33);
    for (size_t i = 1; i < polyline.vertices.size(); ++i) {
      CHECK(polyline.vertices[i].lambda1 >=
            polyline.vertices[i - 1].lambda1);
      CHECK(polyline.vertices[i].lambda2 <=
            polyline.vertices[i - 1].lambda2 + 1e-12);
    }
    for (const auto& vertex : polyline.vertices) {
      if (vertex.lambda1 > 1e-9 && vertex.lambda2 > 1e-9) {
        CHECK(region.contains(vertex.lambda1 * (1.0 - 1e-9),
                              vertex.lambda2 * (1.0 - 1e-9)));
      }
    }
  }
}

TEST_CASE("grid oracle matches the closed-form optimizer") {
  const GridPStar mid = grid_pstar_oracle(kMpr, EnergyModel(0.4), 0.3, 1001);
  CHECK(std::abs(mid.p_best - 0.5) <= 1e-3);

  const GridPStar weak =
      grid_pstar_oracle(kWeakMpr, EnergyModel(0.4), 0.2, 1001);
  CHECK(weak.p_best == 0.0);

  const GridPStar origin =
      grid_pstar_oracle(kMpr, EnergyModel(0.4), 0.0, 1001);
  CHECK(origin.bound_best == doctest::Approx(0.8));

  CHECK_THROWS_AS(grid_pstar_oracle(kMpr, EnergyModel(0.4), 0.4 * 0.9, 1001),
                  OutOfRegion);
  CHECK_THROWS_AS(grid_pstar_oracle(kMpr, EnergyModel(0.4), 0.1, 1),
                  InvalidParameter);
}

TEST_CASE("closed-form p star beats every grid point") {
  std::mt19937_64 rng(43);
  const int grid = 401;
  const double step = 1.0 / (grid - 1);
  for (int trial = 0; trial < 60; ++trial) {
    const ChannelModel channel = random_channel(rng);
    const EnergyModel energy(0.1 + 0.8 * u01(rng));
    const double extent =
        energy.battery_nonempty_prob() * channel.q11;
    if (extent <= 1e-6) {
      continue;
    }
    const double lambda1 = u01(rng) * extent;
    const PStar closed = optimal_p(channel, energy, lambda1);
    const GridPStar oracle =
        grid_pstar_oracle(channel, energy, lambda1, grid);
    CHECK(std::abs(closed.value - oracle.p_best) <= step + 1e-12);
    CHECK(lambda2_bound(channel, lambda1, closed.value) >=
          oracle.bound_best - 1e-9);
  }
}

TEST_CASE("the chosen p maximizes the secondary bound over feasible p") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const ChannelModel channel = random_channel(rng);
    const EnergyModel energy(0.1 + 0.8 * u01(rng));
    const double beta = energy.battery_nonempty_prob();
    const double extent = beta * channel.q11;
    if (extent <= 1e-6) {
      continue;
    }
    const double lambda1 = u01(rng) * extent;
    const PStar closed = optimal_p(channel, energy, lambda1);
    const double achieved = lambda2_bound(channel, lambda1, closed.value);
    for (int k = 0; k < 25; ++k) {
      const double p = u01(rng);
      if (lambda1 < mu1_dominant1(channel, energy, p)) {
        CHECK(achieved >= mu2_dominant1(channel, energy, p, lambda1) - 1e-12);
      }
    }
  }
}

TEST_CASE("regions are downward closed") {
  std::mt19937_64 rng(53);
  const std::vector<std::pair<ChannelModel, EnergyModel>> configs = {
      {kMpr, EnergyModel(0.4)},
      {kMpr, EnergyModel(0.5, 2)},
      {kWeakMpr, EnergyModel(0.7)},
      {kCollision, EnergyModel(0.5)},
      {kCollision, EnergyModel(0.3, 1)},
  };
  for (const auto& [channel, energy] : configs) {
    const StabilityRegion region = build_region(channel, energy);
    for (int i = 0; i < 10'000; ++i) {
      const double l1 = u01(rng);
      const double l2 = u01(rng);
      if (region.contains(l1, l2)) {
        CHECK(region.contains(l1 * u01(rng), l2 * u01(rng)));
      }
    }
  }
}

TEST_CASE("with positive eta the secondary subregion is contained in the "
          "primary one") {
  std::mt19937_64 rng(59);
  for (const auto& energy :
       {EnergyModel(0.2), EnergyModel(0.5), EnergyModel(0.8),
        EnergyModel(0.5, 2)}) {
    const StabilityRegion region = build_region(kMpr, energy);
    auto in_group = [&](double l1, double l2, bool r2) {
      for (const auto& sub : region.subregions) {
        const bool is_r2 = sub.name == Branch::R2Prime ||
                           sub.name == Branch::R2DoublePrime ||
                           sub.name == Branch::CollisionR2;
        if (is_r2 == r2 && sub.contains(l1, l2)) {
          return true;
        }
      }
      return false;
    };
    for (int i = 0; i < 10'000; ++i) {
      const double l1 = u01(rng) * region.lambda1_extent();
      const double l2 = u01(rng);
      if (in_group(l1, l2, true)) {
        CHECK(in_group(l1, l2, false));
      }
    }
  }
}

TEST_CASE("a finite battery never enlarges the region") {
  std::mt19937_64 rng(61);
  for (const ChannelModel& channel : {kMpr, kWeakMpr, kCollision}) {
    for (double delta : {0.2, 0.5, 0.8}) {
      for (int64_t c : {1, 2, 5}) {
        const StabilityRegion finite =
            build_region(channel, EnergyModel(delta, c));
        const StabilityRegion infinite =
            build_region(channel, EnergyModel(delta));
        for (int i = 0; i < 10'000; ++i) {
          const double l1 = u01(rng) * finite.lambda1_extent();
          const double l2 = u01(rng);
          if (finite.contains(l1, l2)) {
            CHECK(infinite.contains(l1, l2));
          }
        }
      }
    }
  }
}

TEST_CASE("collision channel reproduces the generic eta <= 0 frontier") {
  for (double delta : {0.2, 0.5, 0.8}) {
    const StabilityRegion region =
        build_region(kCollision, EnergyModel(delta));
    const BoundaryPolyline polyline = boundary_polyline(region, 101);
    for (const auto& vertex : polyline.vertices) {
      // Direct erasure-channel frontier: lambda1/q11 + lambda2/q22 = 1.
      const double direct = 1.0 - vertex.lambda1;
      CHECK(std::abs(vertex.lambda2 - direct) <= 1e-12);
    }
  }
}

TEST_CASE("the two positive-eta boundary pieces meet continuously") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const ChannelModel channel = random_channel(rng);
    if (!channel.eta_positive() || channel.delta1() <= 0.0) {
      continue;
    }
    const EnergyModel energy(0.05 + 0.9 * u01(rng));
    const StabilityRegion region = build_region(channel, energy);
    const double corner = energy.battery_nonempty_prob() * channel.q112;
    std::optional<double> first, second;
    for (const auto& sub : region.subregions) {
      if (sub.name == Branch::R1Prime) {
        first = sub.lambda2_closure_sup(corner);
      } else if (sub.name == Branch::R1DoublePrime) {
        second = sub.lambda2_closure_sup(corner);
      }
    }
    if (first && second) {
      CHECK(std::abs(*first - *second) <= 1e-12);
    }
  }
}
