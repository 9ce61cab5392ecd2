#include "cogshare/regions.hpp"

#include <algorithm>
#include <cmath>

namespace cogshare {

namespace {

void check_access_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("p must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::R1Prime:
      return "R1'";
    case Branch::R1DoublePrime:
      return "R1''";
    case Branch::R1EtaLe0:
      return "R1_eta_le_0";
    case Branch::CollisionR1:
      return "collision_R1";
    case Branch::R2Prime:
      return "R2'";
    case Branch::R2DoublePrime:
      return "R2''";
    case Branch::CollisionR2:
      return "collision_R2";
  }
  return "?";
}

std::optional<double> SubregionSpec::lambda2_sup(double l1) const {
  if (!lambda1.contains(l1)) {
    return std::nullopt;
  }
  double sup = lambda2.hi;
  if (b > 0.0) {
    sup = std::min(sup, (t - a * l1) / b);
  } else if (!(a * l1 < t)) {
    return std::nullopt;  // affine constraint unsatisfiable at this lam1
  }
  if (sup < lambda2.lo) {
    return std::nullopt;
  }
  if (sup == lambda2.lo) {
    // The section collapses to the single point lam2 = lo; it is a member
    // only if lo is admitted by every (strict) constraint.
    const bool affine_ok = a * l1 + b * lambda2.lo < t || b == 0.0;
    const bool interval_ok =
        lambda2.lo_closed && (lambda2.hi_closed || lambda2.lo < lambda2.hi);
    if (!(affine_ok && interval_ok)) {
      return std::nullopt;
    }
  }
  return sup;
}

std::optional<double> SubregionSpec::lambda2_closure_sup(double l1) const {
  if (l1 < lambda1.lo || l1 > lambda1.hi) {
    return std::nullopt;
  }
  double sup = lambda2.hi;
  if (b > 0.0) {
    sup = std::min(sup, (t - a * l1) / b);
  } else if (a * l1 > t) {
    return std::nullopt;
  }
  if (sup < lambda2.lo) {
    return std::nullopt;
  }
  return sup;
}

bool StabilityRegion::contains(double lambda1, double lambda2) const {
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    return false;
  }
  for (const SubregionSpec& sub : subregions) {
    if (sub.contains(lambda1, lambda2)) {
      return true;
    }
  }
  return false;
}

std::optional<double> StabilityRegion::max_lambda2(double lambda1) const {
  if (lambda1 < 0.0) {
    throw InvalidParameter("max_lambda2 requires lambda1 >= 0");
  }
  std::optional<double> best;
  for (const SubregionSpec& sub : subregions) {
    if (auto sup = sub.lambda2_sup(lambda1)) {
      if (!best || *sup > *best) {
        best = sup;
      }
    }
  }
  return best;
}

double mu1_dominant1(const ChannelModel& channel, const EnergyModel& energy,
                     double p) {
  check_access_probability(p);
  const double beta = energy.battery_nonempty_prob();
  return beta * (channel.q112 * p + channel.q11 * (1.0 - p));
}

double mu2_dominant1(const ChannelModel& channel, const EnergyModel& energy,
                     double p, double lambda1) {
  const double mu1 = mu1_dominant1(channel, energy, p);
  if (!(lambda1 < mu1)) {
    throw PreconditionViolated(
        "mu2_dominant1 requires lambda1 < mu1_dominant1 (" +
        std::to_string(lambda1) + " >= " + std::to_string(mu1) + ")");
  }
  const double denom = channel.q112 * p + channel.q11 * (1.0 - p);
  return (channel.q212 * p - channel.q22) / denom * lambda1 + channel.q22;
}

double mu2_dominant2(const ChannelModel& channel, const EnergyModel& energy,
                     double p) {
  check_access_probability(p);
  const double beta = energy.battery_nonempty_prob();
  return channel.q22 * (1.0 - beta) + channel.q212 * beta * p;
}

double mu1_dominant2(const ChannelModel& channel, const EnergyModel& energy,
                     double p, double lambda2) {
  const double mu2 = mu2_dominant2(channel, energy, p);
  if (!(lambda2 < mu2)) {
    throw PreconditionViolated(
        "mu1_dominant2 requires lambda2 < mu2_dominant2 (" +
        std::to_string(lambda2) + " >= " + std::to_string(mu2) + ")");
  }
  const double beta = energy.battery_nonempty_prob();
  return beta * p * (channel.q112 - channel.q11) / mu2 * lambda2 +
         beta * channel.q11;
}

StabilityRegion build_region(const ChannelModel& channel,
                             const EnergyModel& energy) {
  const double beta = energy.battery_nonempty_prob();
  const double q11 = channel.q11;
  const double q22 = channel.q22;
  const double q112 = channel.q112;
  const double q212 = channel.q212;
  const double d1 = channel.delta1();
  const double eta = channel.eta();
  const bool collision = channel.collision_structured();

  StabilityRegion region{{}, RegionMeta{channel, energy, beta, eta}};
  const double extent = beta * q11;

  if (extent <= 0.0) {
    // Primary can never deliver (delta = 0 or q11 = 0): the region collapses
    // to the lam1 = 0 axis with lam2 < q22.
    SubregionSpec axis;
    axis.name = collision ? Branch::CollisionR1
                          : (channel.eta_positive() ? Branch::R1Prime
                                                    : Branch::R1EtaLe0);
    axis.a = 0.0;
    axis.b = 1.0;
    axis.t = q22;
    axis.lambda1 = Interval{0.0, 0.0, true, true};
    region.subregions.push_back(axis);
    return region;
  }

  if (channel.eta_positive()) {
    SubregionSpec r1p;
    r1p.name = Branch::R1Prime;
    r1p.a = channel.delta2();
    r1p.b = q112;
    r1p.t = q112 * q22;
    r1p.lambda1 = Interval{0.0, beta * q112, true, true};
    region.subregions.push_back(r1p);

    if (d1 > 0.0) {  // otherwise the (beta q112, beta q11) interval is empty
      SubregionSpec r1pp;
      r1pp.name = Branch::R1DoublePrime;
      r1pp.a = q212;
      r1pp.b = d1;
      r1pp.t = beta * q11 * q212 + d1 * q22 * (1.0 - beta);
      r1pp.lambda1 = Interval{beta * q112, extent, false, false};
      region.subregions.push_back(r1pp);
    }
  } else {
    SubregionSpec r1;
    r1.name = collision ? Branch::CollisionR1 : Branch::R1EtaLe0;
    r1.a = q22;
    r1.b = q11;
    r1.t = q11 * q22;
    r1.lambda1 = Interval{0.0, extent, true, false};
    region.subregions.push_back(r1);
  }

  SubregionSpec r2p;
  r2p.name = collision ? Branch::CollisionR2 : Branch::R2Prime;
  r2p.lambda1 = Interval{0.0, extent, true, false};
  r2p.lambda2 = Interval{0.0, (1.0 - beta) * q22, true, true};
  region.subregions.push_back(r2p);

  const double r2pp_denominator = beta * q11 * q212 + d1 * q22 * (1.0 - beta);
  if (beta * q212 > 0.0 && r2pp_denominator > 0.0) {
    SubregionSpec r2pp;
    r2pp.name = Branch::R2DoublePrime;
    r2pp.a = q212;
    r2pp.b = d1;
    r2pp.t = r2pp_denominator;
    // The affine constraint already implies lambda1 < beta q11; stating the
    // interval keeps the section at the extent exactly empty.
    r2pp.lambda1 = Interval{0.0, extent, true, false};
    r2pp.lambda2 = Interval{(1.0 - beta) * q22,
                            (1.0 - beta) * q22 + beta * q212, false, false};
    region.subregions.push_back(r2pp);
  }

  return region;
}

BoundaryPolyline boundary_polyline(const StabilityRegion& region,
                                   int n_points) {
  if (n_points < 2) {
    throw InvalidParameter("boundary_polyline requires n_points >= 2");
  }
  const double extent = region.lambda1_extent();
  const double beta = region.meta.beta;
  const ChannelModel& channel = region.meta.channel;

  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(n_points) + 1);
  for (int i = 0; i < n_points; ++i) {
    grid.push_back(extent * static_cast<double>(i) /
                   static_cast<double>(n_points - 1));
  }
  // Exact corner where the R1' piece hands over to R1''.
  if (channel.eta_positive()) {
    const double corner = beta * channel.q112;
    if (corner > 0.0 && corner < extent) {
      grid.push_back(corner);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  BoundaryPolyline polyline;
  polyline.vertices.reserve(grid.size());
  for (double l1 : grid) {
    std::optional<double> best;
    Branch branch = Branch::R1Prime;
    for (const SubregionSpec& sub : region.subregions) {
      if (auto sup = sub.lambda2_closure_sup(l1)) {
        if (!best || *sup > *best) {
          best = sup;
          branch = sub.name;
        }
      }
    }
    if (best) {
      polyline.vertices.push_back({l1, *best, branch});
    }
  }
  return polyline;
}

PStar optimal_p(const ChannelModel& channel, const EnergyModel& energy,
                double lambda1) {
  const double beta = energy.battery_nonempty_prob();
  const double extent = beta * channel.q11;
  if (!(lambda1 >= 0.0 && lambda1 < extent)) {
    throw OutOfRegion("optimal_p requires 0 <= lambda1 < beta*q11 = " +
                      std::to_string(extent) + ", got " +
                      std::to_string(lambda1));
  }
  if (channel.eta_positive()) {
    if (lambda1 <= beta * channel.q112) {
      return {1.0, Branch::R1Prime};
    }
    // delta1 > 0 here, otherwise beta*q112 = beta*q11 > lambda1.
    return {(extent - lambda1) / (beta * channel.delta1()),
            Branch::R1DoublePrime};
  }
  return {0.0, channel.collision_structured() ? Branch::CollisionR1
                                              : Branch::R1EtaLe0};
}

PStar optimal_p_secondary_axis(const ChannelModel& channel,
                               const EnergyModel& energy, double lambda2) {
  const double beta = energy.battery_nonempty_prob();
  const double idle_cap = (1.0 - beta) * channel.q22;
  const double full_cap = idle_cap + beta * channel.q212;
  if (!(lambda2 >= 0.0 && lambda2 < full_cap)) {
    throw OutOfRegion(
        "optimal_p_secondary_axis requires 0 <= lambda2 < (1-beta)*q22 + "
        "beta*q212 = " +
        std::to_string(full_cap) + ", got " + std::to_string(lambda2));
  }
  if (lambda2 <= idle_cap) {
    return {0.0, channel.collision_structured() ? Branch::CollisionR2
                                                : Branch::R2Prime};
  }
  if (channel.q212 == 0.0) {
    throw DegenerateChannel(
        "the upper secondary branch is empty when q212 = 0");
  }
  return {(lambda2 - idle_cap) / (beta * channel.q212),
          Branch::R2DoublePrime};
}

GridPStar grid_pstar_oracle(const ChannelModel& channel,
                            const EnergyModel& energy, double lambda1,
                            int p_grid_size) {
  if (p_grid_size < 2) {
    throw InvalidParameter("grid_pstar_oracle requires p_grid_size >= 2");
  }
  const double beta = energy.battery_nonempty_prob();
  const double extent = beta * channel.q11;
  if (!(lambda1 >= 0.0 && lambda1 < extent)) {
    throw OutOfRegion("grid_pstar_oracle requires 0 <= lambda1 < beta*q11");
  }
  GridPStar best{0.0, -1.0};
  for (int i = 0; i < p_grid_size; ++i) {
    const double p =
        static_cast<double>(i) / static_cast<double>(p_grid_size - 1);
    const double service = channel.q112 * p + channel.q11 * (1.0 - p);
    if (!(lambda1 < beta * service)) {
      continue;
    }
    const double bound =
        (channel.q212 * p - channel.q22) / service * lambda1 + channel.q22;
    if (bound > best.bound_best) {
      best = {p, bound};
    }
  }
  return best;  // p = 0 is always feasible, so best is populated
}

GridPStar grid_pstar_oracle_secondary(const ChannelModel& channel,
                                      const EnergyModel& energy,
                                      double lambda2, int p_grid_size) {
  if (p_grid_size < 2) {
    throw InvalidParameter(
        "grid_pstar_oracle_secondary requires p_grid_size >= 2");
  }
  const double beta = energy.battery_nonempty_prob();
  const double full_cap = (1.0 - beta) * channel.q22 + beta * channel.q212;
  if (!(lambda2 >= 0.0 && lambda2 < full_cap)) {
    throw OutOfRegion(
        "grid_pstar_oracle_secondary requires 0 <= lambda2 < (1-beta)*q22 + "
        "beta*q212");
  }
  GridPStar best{0.0, -1.0};
  for (int i = 0; i < p_grid_size; ++i) {
    const double p =
        static_cast<double>(i) / static_cast<double>(p_grid_size - 1);
    const double service =
        channel.q22 * (1.0 - beta) + channel.q212 * beta * p;
    if (!(lambda2 < service)) {
      continue;
    }
    const double bound =
        beta * p * (channel.q112 - channel.q11) / service * lambda2 +
        beta * channel.q11;
    if (bound > best.bound_best) {
      best = {p, bound};
    }
  }
  return best;
}

}  // namespace cogshare
