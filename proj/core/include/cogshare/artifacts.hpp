#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cogshare/regions.hpp"
#include "cogshare/sim.hpp"

// CSV and SVG emission. All writers are deterministic: fixed number
// formatting, no timestamps, version string only. Header metadata is echoed
// as '# key = value' comment lines before the CSV header row.

namespace cogshare {

using HeaderKVs = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip-safe decimal representation.
std::string format_double(double value);

void write_csv_header_comments(std::ostream& out, const HeaderKVs& meta);

// Region metadata block: eta, delta, capacity, battery_nonempty_prob.
HeaderKVs region_meta_kvs(const RegionMeta& meta);

// Header 'lambda1,lambda2,branch', one row per vertex.
void write_boundary_csv(std::ostream& out, const BoundaryPolyline& polyline,
                        const HeaderKVs& meta);

// One row per replication plus 'mean' and 'ci95' rows.
void write_sim_report_csv(std::ostream& out, const SimReport& report,
                          const HeaderKVs& meta);

void write_trajectory_header(std::ostream& out, const HeaderKVs& meta);
void write_trajectory_row(std::ostream& out, int64_t slot,
                          const SystemState& state);

// A frontier curve for the SVG plot; solid for the primary curve, dotted for
// overlays (the finite-battery comparison).
struct SvgCurve {
  BoundaryPolyline polyline;
  std::string label;
  bool dotted = false;
};

// Fixed 800x600 viewport, annotated axes, corner vertices labeled A, B, C
// for the first curve and D, E for the overlay.
void write_region_svg(std::ostream& out, const std::vector<SvgCurve>& curves);

}  // namespace cogshare
