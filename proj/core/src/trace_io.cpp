#include "spherebot/trace_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw Error("write failed for " + path.string());
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

void join(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{
      "t",     "X",     "Y",     "phi", "v",  "alpha", "beta", "q_r", "q_r_cmd",
      "v_cmd", "tau_p", "tau_r", "S1",  "S2", "S",     "beta_d", "L",  "Ldot"};
  return cols;
}

const std::vector<std::string>& solver_columns() {
  static const std::vector<std::string> cols{"sqp_iters", "kkt_residual", "objective", "flagged"};
  return cols;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  std::vector<std::string> header = trace_columns();
  if (trace.planner_on) {
    header.insert(header.end(), solver_columns().begin(), solver_columns().end());
  }
  join(out, header);
  // Solver stats are held between planning steps.
  SolverStats held;
  for (const TraceSample& s : trace.samples) {
    const SimState& x = s.state;
    std::vector<std::string> row{num(s.t),          num(x.pose.X),    num(x.pose.Y),
                                 num(x.pose.phi),   num(x.pitch.x_dot), num(x.pitch.alpha),
                                 num(x.roll.beta),  num(x.roll.q_r),  num(s.command.q_r),
                                 num(s.command.v),  num(s.tau_p),     num(s.tau_r),
                                 num(s.S1),         num(s.S2),        num(s.S),
                                 num(s.beta_d),     num(s.L),         num(s.L_dot)};
    if (trace.planner_on) {
      if (s.solver) {
        held = *s.solver;
      }
      row.push_back(std::to_string(held.iterations));
      row.push_back(num(held.kkt_residual));
      row.push_back(num(held.objective));
      row.push_back(held.flagged ? "1" : "0");
    }
    join(out, row);
  }
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_trace_csv(trace, out);
  check_written(out, path);
}

Trace read_trace_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(origin + ": empty trace file");
  }
  const std::vector<std::string> header = split(line);
  const auto& base = trace_columns();
  if (header.size() < base.size() ||
      !std::equal(base.begin(), base.end(), header.begin())) {
    throw Error(origin + ": header does not match the trace column list");
  }
  Trace trace;
  trace.planner_on = header.size() == base.size() + solver_columns().size();
  if (!trace.planner_on && header.size() != base.size()) {
    throw Error(origin + ": unexpected trace column count");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(origin + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        v[i] = std::stod(cells[i], &used);
        if (used != cells[i].size()) {
          throw std::invalid_argument(cells[i]);
        }
      } catch (const std::exception&) {
        throw Error(origin + ":" + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
      }
    }
    TraceSample s;
    s.t = v[0];
    s.state.t = v[0];
    s.state.pose = {v[1], v[2], v[3]};
    s.state.pitch.x_dot = v[4];
    s.state.pitch.alpha = v[5];
    s.state.roll.beta = v[6];
    s.state.roll.q_r = v[7];
    s.command = {v[9], v[8]};
    s.tau_p = v[10];
    s.tau_r = v[11];
    s.S1 = v[12];
    s.S2 = v[13];
    s.S = v[14];
    s.beta_d = v[15];
    s.L = v[16];
    s.L_dot = v[17];
    if (trace.planner_on) {
      SolverStats st;
      st.iterations = static_cast<int>(v[18]);
      st.kkt_residual = v[19];
      st.objective = v[20];
      st.flagged = v[21] != 0.0;
      s.solver = st;
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() >= 2) {
    trace.dt = trace.samples[1].t - trace.samples[0].t;
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open trace " + path.string());
  }
  return read_trace_csv(in, path.string());
}

void write_timing_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "t,solve_time_ms\n";
  for (const TraceSample& s : trace.samples) {
    if (s.solver) {
      out << num(s.t) << ',' << num(s.solver->solve_time_ms) << '\n';
    }
  }
  check_written(out, path);
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "experiment", "controller", "t_r",          "t_s",       "e_m",     "e_rmse",
      "e_mae",      "dh_lo",      "dh_hi",        "steady_start", "path_mean", "path_max"};
  return cols;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  join(out, summary_columns());
  for (const SummaryRow& r : rows) {
    const MetricsReport& m = r.report;
    join(out, {r.experiment, r.controller, opt(m.t_r), opt(m.t_s), num(m.e_m), num(m.e_rmse),
               num(m.e_mae), num(m.dh_lo), num(m.dh_hi), opt(m.steady_start), opt(m.path_mean),
               opt(m.path_max)});
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_summary_csv(rows, out);
  check_written(out, path);
}

}  // namespace spherebot
