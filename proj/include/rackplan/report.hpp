#ifndef RACKPLAN_REPORT_HPP
#define RACKPLAN_REPORT_HPP

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "rackplan/anomaly.hpp"
#include "rackplan/simulator.hpp"

namespace rackplan {

enum class ReportFormat { table, delimited };

inline constexpr std::array<const char*, 11> kReportColumns{
    "Name", "Time", "#Pick", "#Place", "#MoveTorso", "#MoveBase", "#Handover", "Cost", "Replans", "Goal", "Anomalies"};

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::vector<std::string> report_cells(const MetricsRow& r) {
  return {r.name.empty() ? std::string("-") : r.name,
          fixed(r.plan_time, 3),
          std::to_string(r.picks),
          std::to_string(r.places),
          std::to_string(r.move_torso),
          std::to_string(r.move_base),
          std::to_string(r.handovers),
          fixed(r.cost, 1),
          std::to_string(r.replans),
          r.goal_reached ? "yes" : "no",
          render_anomalies(r.anomalies)};
}

}  // namespace detail

/// Table-style summary. `table` pads columns with spaces (numbers right
/// aligned); `delimited` separates fields with tabs.
inline std::string render_report(std::span<const MetricsRow> rows, ReportFormat format = ReportFormat::table) {
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(kReportColumns.begin(), kReportColumns.end());
  for (const auto& r : rows) grid.push_back(detail::report_cells(r));

  std::string out;
  if (format == ReportFormat::delimited) {
    for (const auto& line : grid) {
      for (std::size_t c = 0; c < line.size(); ++c) out += (c ? "\t" : "") + line[c];
      out += '\n';
    }
    return out;
  }

  std::array<std::size_t, kReportColumns.size()> width{};
  for (const auto& line : grid)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  auto left_aligned = [](std::size_t c) { return c == 0 || c == 9 || c == 10; };
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) text += "  ";
      std::string pad(width[c] - line[c].size(), ' ');
      text += left_aligned(c) ? line[c] + pad : pad + line[c];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + '\n';
  }
  return out;
}

}  // namespace rackplan

#endif  // RACKPLAN_REPORT_HPP
