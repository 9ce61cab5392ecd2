#include "cogshare/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "cogshare/version.hpp"

namespace cogshare {

std::string format_double(double value) {
  char buffer[40];
  // %.17g round-trips any double; prefer the shortest representation that
  // still round-trips so the CSVs stay readable.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) {
      break;
    }
  }
  return buffer;
}

void write_csv_header_comments(std::ostream& out, const HeaderKVs& meta) {
  out << "# cogshare " << kVersion << "\n";
  for (const auto& [key, value] : meta) {
    out << "# " << key << " = " << value << "\n";
  }
}

HeaderKVs region_meta_kvs(const RegionMeta& meta) {
  return {
      {"eta", format_double(meta.eta)},
      {"delta", format_double(meta.energy.delta)},
      {"capacity", meta.energy.capacity
                       ? std::to_string(*meta.energy.capacity)
                       : std::string("inf")},
      {"battery_nonempty_prob", format_double(meta.beta)},
  };
}

void write_boundary_csv(std::ostream& out, const BoundaryPolyline& polyline,
                        const HeaderKVs& meta) {
  write_csv_header_comments(out, meta);
  out << "lambda1,lambda2,branch\n";
  for (const auto& vertex : polyline.vertices) {
    out << format_double(vertex.lambda1) << ','
        << format_double(vertex.lambda2) << ',' << to_string(vertex.branch)
        << "\n";
  }
}

namespace {

void write_stats_row(std::ostream& out, const std::string& label,
                     const ReplicationStats& s, bool with_verdicts) {
  out << label << ',' << format_double(s.throughput1) << ','
      << format_double(s.throughput2) << ',' << format_double(s.mu1_hat)
      << ',' << format_double(s.mu2_hat) << ','
      << format_double(s.active_fraction1) << ','
      << format_double(s.battery_nonempty_fraction) << ','
      << format_double(s.secondary_busy_fraction) << ','
      << format_double(s.queue_slope1) << ',' << format_double(s.queue_slope2)
      << ',' << format_double(s.final_q1) << ',' << format_double(s.final_q2)
      << ',' << format_double(s.final_b1) << ','
      << format_double(s.arrivals1) << ',' << format_double(s.arrivals2)
      << ',' << format_double(s.departures1) << ','
      << format_double(s.departures2) << ',' << format_double(s.harvested)
      << ',' << format_double(s.consumed) << ',' << format_double(s.overflow);
  if (with_verdicts) {
    out << ',' << (s.stable1 ? 1 : 0) << ',' << (s.stable2 ? 1 : 0);
  } else {
    out << ",,";
  }
  out << "\n";
}

}  // namespace

void write_sim_report_csv(std::ostream& out, const SimReport& report,
                          const HeaderKVs& meta) {
  write_csv_header_comments(out, meta);
  out << "replication,throughput1,throughput2,mu1_hat,mu2_hat,"
         "active_fraction1,battery_nonempty_fraction,secondary_busy_fraction,"
         "queue_slope1,queue_slope2,final_q1,final_q2,final_b1,arrivals1,"
         "arrivals2,departures1,departures2,harvested,consumed,overflow,"
         "stable1,stable2\n";
  for (size_t i = 0; i < report.replications.size(); ++i) {
    write_stats_row(out, std::to_string(i), report.replications[i], true);
  }
  write_stats_row(out, "mean", report.mean, true);
  write_stats_row(out, "ci95", report.ci95, false);
}

void write_trajectory_header(std::ostream& out, const HeaderKVs& meta) {
  write_csv_header_comments(out, meta);
  out << "slot,q1,q2,b1\n";
}

void write_trajectory_row(std::ostream& out, int64_t slot,
                          const SystemState& state) {
  out << slot << ',' << state.q1 << ',' << state.q2 << ',' << state.b1
      << "\n";
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 40.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 70.0;

struct Mapper {
  double xmax, ymax;
  double x(double lambda1) const {
    return kMarginLeft +
           (kWidth - kMarginLeft - kMarginRight) * (lambda1 / xmax);
  }
  double y(double lambda2) const {
    return kHeight - kMarginBottom -
           (kHeight - kMarginTop - kMarginBottom) * (lambda2 / ymax);
  }
};

std::string svg_num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

// Vertices worth labeling: the axis intercept, branch switches, and the end.
std::vector<size_t> corner_indices(const BoundaryPolyline& polyline) {
  std::vector<size_t> corners;
  const auto& v = polyline.vertices;
  if (v.empty()) {
    return corners;
  }
  corners.push_back(0);
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i].branch != v[i - 1].branch) {
      corners.push_back(i);
    }
  }
  if (corners.back() != v.size() - 1) {
    corners.push_back(v.size() - 1);
  }
  return corners;
}

}  // namespace

void write_region_svg(std::ostream& out,
                      const std::vector<SvgCurve>& curves) {
  double xmax = 0.0, ymax = 0.0;
  for (const auto& curve : curves) {
    for (const auto& v : curve.polyline.vertices) {
      xmax = std::max(xmax, v.lambda1);
      ymax = std::max(ymax, v.lambda2);
    }
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  xmax *= 1.08;
  ymax *= 1.08;
  const Mapper m{xmax, ymax};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<!-- cogshare " << kVersion << " -->\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";

  // Axes.
  out << "<line x1=\"" << svg_num(m.x(0)) << "\" y1=\"" << svg_num(m.y(0))
      << "\" x2=\"" << svg_num(m.x(xmax)) << "\" y2=\"" << svg_num(m.y(0))
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << svg_num(m.x(0)) << "\" y1=\"" << svg_num(m.y(0))
      << "\" x2=\"" << svg_num(m.x(0)) << "\" y2=\"" << svg_num(m.y(ymax))
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tx = xmax * i / 5.0;
    const double ty = ymax * i / 5.0;
    out << "<line x1=\"" << svg_num(m.x(tx)) << "\" y1=\"" << svg_num(m.y(0))
        << "\" x2=\"" << svg_num(m.x(tx)) << "\" y2=\""
        << svg_num(m.y(0) + 6) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_num(m.x(tx)) << "\" y=\""
        << svg_num(m.y(0) + 22) << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">" << format_double(tx) << "</text>\n";
    out << "<line x1=\"" << svg_num(m.x(0)) << "\" y1=\"" << svg_num(m.y(ty))
        << "\" x2=\"" << svg_num(m.x(0) - 6) << "\" y2=\""
        << svg_num(m.y(ty)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_num(m.x(0) - 10) << "\" y=\""
        << svg_num(m.y(ty) + 4) << "\" font-size=\"12\" "
        << "text-anchor=\"end\">" << format_double(ty) << "</text>\n";
  }
  out << "<text x=\"" << svg_num(m.x(xmax / 2)) << "\" y=\""
      << svg_num(kHeight - 20)
      << "\" font-size=\"14\" text-anchor=\"middle\">lambda1 "
         "(packets/slot)</text>\n";
  out << "<text x=\"20\" y=\"" << svg_num(m.y(ymax / 2))
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "20 "
      << svg_num(m.y(ymax / 2)) << ")\">lambda2 (packets/slot)</text>\n";

  const char* colors[] = {"#1f5fa8", "#c03028"};
  char label = 'A';
  for (size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    if (curve.polyline.vertices.empty()) {
      continue;
    }
    out << "<polyline fill=\"none\" stroke=\"" << colors[c % 2]
        << "\" stroke-width=\"2\"";
    if (curve.dotted) {
      out << " stroke-dasharray=\"3 5\"";
    }
    out << " points=\"";
    for (const auto& v : curve.polyline.vertices) {
      out << svg_num(m.x(v.lambda1)) << ',' << svg_num(m.y(v.lambda2)) << ' ';
    }
    out << "\"/>\n";

    for (size_t idx : corner_indices(curve.polyline)) {
      const auto& v = curve.polyline.vertices[idx];
      // The overlay shares the lambda2-axis intercept with the first curve;
      // label it only once.
      if (c > 0 && idx == 0) {
        continue;
      }
      out << "<circle cx=\"" << svg_num(m.x(v.lambda1)) << "\" cy=\""
          << svg_num(m.y(v.lambda2)) << "\" r=\"3\" fill=\"" << colors[c % 2]
          << "\"/>\n";
      out << "<text x=\"" << svg_num(m.x(v.lambda1) + 7) << "\" y=\""
          << svg_num(m.y(v.lambda2) - 7) << "\" font-size=\"13\">" << label
          << "</text>\n";
      ++label;
    }

    out << "<text x=\"" << svg_num(kWidth - kMarginRight - 240) << "\" y=\""
        << svg_num(kMarginTop + 20.0 * (c + 1)) << "\" font-size=\"13\" "
        << "fill=\"" << colors[c % 2] << "\">"
        << (curve.dotted ? "- - " : "--- ") << curve.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cogshare
