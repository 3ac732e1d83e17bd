#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spherebot/metrics.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

/// Fixed trace columns; solver columns follow when the planner is on.
const std::vector<std::string>& trace_columns();
const std::vector<std::string>& solver_columns();

void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Parses a trace written by write_trace_csv. Columns not in the CSV are
/// left at their defaults. Throws Error with the path on malformed input.
Trace read_trace_csv(const std::filesystem::path& path);
Trace read_trace_csv(std::istream& in, const std::string& origin = "<stream>");

/// Wall-clock solver time per planning step: t, solve_time_ms.
void write_timing_csv(const Trace& trace, const std::filesystem::path& path);

struct SummaryRow {
  std::string experiment;
  std::string controller;
  MetricsReport report;
};

const std::vector<std::string>& summary_columns();

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace spherebot
