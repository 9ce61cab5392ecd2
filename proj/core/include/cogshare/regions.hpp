#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cogshare/model.hpp"

// Closed-form stability regions for the cognitive access protocol, the
// dominant-system service-rate formulas behind them, and the optimal
// secondary access probability p* on each boundary piece.
//
// Notation: beta = Pr[battery nonempty] of the saturated primary
// (EnergyModel::battery_nonempty_prob), D1 = q11 - q112, D2 = q22 - q212.
//
// First dominant system (secondary sends dummies):
//   mu1(p)          = beta (q112 p + q11 (1-p))
//   mu2(p, lam1)    = (q212 p - q22) / (q112 p + q11 (1-p)) lam1 + q22
// Second dominant system (primary sends dummies):
//   mu2(p)          = (1-beta) q22 + beta q212 p
//   mu1(p, lam2)    = beta p (q112 - q11) / ((1-beta) q22 + beta q212 p) lam2
//                     + beta q11
//
// Region pieces over (lam1, lam2), all affine constraints strict:
//   R1'  : D2 lam1 + q112 lam2 < q112 q22,            0 <= lam1 <= beta q112
//   R1'' : q212 lam1 + D1 lam2 < beta q11 q212
//                               + D1 q22 (1-beta),    beta q112 < lam1 < beta q11
//   R1 (eta <= 0): q22 lam1 + q11 lam2 < q11 q22,     lam1 < beta q11
//   R2'  : lam1 < beta q11,                           0 <= lam2 <= (1-beta) q22
//   R2'' : same affine constraint as R1'',
//          (1-beta) q22 < lam2 < (1-beta) q22 + beta q212
//
// The channel with q112 = q212 = 0 degenerates to a collision channel with
// erasures; its region coincides with the eta <= 0 construction and is
// labeled collision_R1 / collision_R2.

namespace cogshare {

enum class Branch {
  R1Prime,
  R1DoublePrime,
  R1EtaLe0,
  CollisionR1,
  R2Prime,
  R2DoublePrime,
  CollisionR2,
};

std::string to_string(Branch branch);

// Closed interval endpoints with explicit openness; hi may be +infinity.
struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = false;

  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
};

// One conjunction of an affine constraint a*lam1 + b*lam2 < t with interval
// constraints on lam1 and lam2. Membership is decided by direct evaluation.
struct SubregionSpec {
  Branch name;
  double a = 0.0;
  double b = 0.0;
  double t = 1.0;
  Interval lambda1;
  Interval lambda2;

  bool contains(double l1, double l2) const {
    return a * l1 + b * l2 < t && lambda1.contains(l1) && lambda2.contains(l2);
  }

  // Supremum of lam2 admitted at lam1, honoring strict bounds; nullopt when
  // the section is empty.
  std::optional<double> lambda2_sup(double l1) const;

  // Same but with every bound treated as closed; used for boundary tracing.
  std::optional<double> lambda2_closure_sup(double l1) const;
};

struct RegionMeta {
  ChannelModel channel;
  EnergyModel energy;
  double beta;  // battery_nonempty_prob
  double eta;
};

// Union of subregions; membership is the disjunction.
struct StabilityRegion {
  std::vector<SubregionSpec> subregions;
  RegionMeta meta;

  bool contains(double lambda1, double lambda2) const;

  // Supremum of lam2 keeping (lam1, lam2) in the region, or nullopt when the
  // section at lam1 is empty (in particular at and beyond lam1 = beta q11).
  std::optional<double> max_lambda2(double lambda1) const;

  // Largest lam1 with a nonempty section in the region closure.
  double lambda1_extent() const { return meta.beta * meta.channel.q11; }
};

// Pareto frontier of the region, traced from the lam2 axis to the lam1
// extent. Vertices have nondecreasing lam1 and nonincreasing lam2.
struct BoundaryPolyline {
  struct Vertex {
    double lambda1;
    double lambda2;
    Branch branch;
  };
  std::vector<Vertex> vertices;
};

// Optimal secondary access probability and the boundary piece it achieves.
struct PStar {
  double value;
  Branch branch;
};

// Result of the exhaustive grid maximization used as the p* oracle.
struct GridPStar {
  double p_best;
  double bound_best;  // the maximized arrival-rate bound for the other queue
};

// ---- Dominant-system service rates ----

// Service rate of the primary when the secondary always has (possibly dummy)
// packets: beta (q112 p + q11 (1-p)).
double mu1_dominant1(const ChannelModel& channel, const EnergyModel& energy,
                     double p);

// Service rate of the secondary in the same dominant system, valid while the
// primary queue is stable (lambda1 < mu1_dominant1); throws
// PreconditionViolated otherwise.
double mu2_dominant1(const ChannelModel& channel, const EnergyModel& energy,
                     double p, double lambda1);

// Service rate of the secondary when the primary transmits whenever its
// battery is nonempty: (1-beta) q22 + beta q212 p.
double mu2_dominant2(const ChannelModel& channel, const EnergyModel& energy,
                     double p);

// Service rate of the primary in the second dominant system, valid while the
// secondary queue is stable (lambda2 < mu2_dominant2); throws
// PreconditionViolated otherwise.
double mu1_dominant2(const ChannelModel& channel, const EnergyModel& energy,
                     double p, double lambda2);

// ---- Region construction and queries ----

StabilityRegion build_region(const ChannelModel& channel,
                             const EnergyModel& energy);

BoundaryPolyline boundary_polyline(const StabilityRegion& region,
                                   int n_points);

// Optimal p for a given primary arrival rate (first dominant system):
//   eta > 0, lambda1 <= beta q112 : p* = 1                    (R1')
//   eta > 0, lambda1 >  beta q112 : p* = (beta q11 - lambda1)
//                                        / (beta D1)          (R1'')
//   eta <= 0                      : p* = 0
// Throws OutOfRegion unless 0 <= lambda1 < beta q11.
PStar optimal_p(const ChannelModel& channel, const EnergyModel& energy,
                double lambda1);

// Optimal p for a given secondary arrival rate (second dominant system):
//   lambda2 <= (1-beta) q22 : p* = 0                          (R2')
//   otherwise               : p* = (lambda2 - (1-beta) q22)
//                                  / (beta q212)              (R2'')
// Throws OutOfRegion unless 0 <= lambda2 < (1-beta) q22 + beta q212, and
// DegenerateChannel if the R2'' branch is reached with q212 = 0.
PStar optimal_p_secondary_axis(const ChannelModel& channel,
                               const EnergyModel& energy, double lambda2);

// Independent numerical oracle for optimal_p: exhaustively maximizes the
// dominant-system lambda2 bound over a uniform p grid of the given size,
// restricted to p with lambda1 < mu1_dominant1. Ties keep the smallest p.
GridPStar grid_pstar_oracle(const ChannelModel& channel,
                            const EnergyModel& energy, double lambda1,
                            int p_grid_size);

// Counterpart oracle for optimal_p_secondary_axis: maximizes the lambda1
// bound of the second dominant system over the p grid.
GridPStar grid_pstar_oracle_secondary(const ChannelModel& channel,
                                      const EnergyModel& energy,
                                      double lambda2, int p_grid_size);

}  // namespace cogshare
