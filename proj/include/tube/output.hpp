#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tube/geometry.hpp"
#include "tube/simulator.hpp"

namespace tube {

// Row-table view of a run used by the CSV writers and SVG renderers.
// Trajectory rows n = 0..steps-1 hold the state at t = n*dt together with the
// command that advanced it; metric rows n = 0..steps hold the state distances
// (+inf once fewer than two active agents remain / all agents arrived).
struct TraceTable {
  int agent_count = 0;
  double dt = 0.0;
  std::vector<double> step_times;        // one per trajectory row group
  std::vector<Vec2> positions;           // [row * agent_count + i]
  std::vector<Vec2> commands;
  std::vector<std::uint8_t> arrived;
  std::vector<double> metric_times;
  std::vector<double> min_pair;
  std::vector<double> min_wall;
};

TraceTable to_table(const SimulationTrace& trace);

// trajectory.csv: t,id,x,y,vx,vy,arrived with fixed decimal formatting.
// metrics.csv: t,min_pair_dist,min_boundary_dist ("inf" sentinel).
// Identical tables produce byte-identical files.
void write_trajectory_csv(const TraceTable& table, const std::string& path);
void write_metrics_csv(const TraceTable& table, const std::string& path);

// Reads trajectory.csv + metrics.csv back from a directory written by the
// writers above.  Raises IoError on a missing file, ParseError on malformed
// rows or a trace with no steps.
TraceTable read_trace_dir(const std::string& dir);

// summary.json: outcome, arrival times (null when never arrived), validation
// violations, overall distance minima, and the mean wall-clock seconds spent
// computing one step's commands (informative only; it varies run to run, so
// byte-identity claims cover the CSV trace files, not the summary).
void write_summary_json(const ScenarioConfig& cfg, const SimulationTrace& trace,
                        const std::string& path);

// Deterministic vector images: same inputs, same bytes.
std::string render_trajectory_svg(const QuadrangleChain& chain, const TraceTable& table,
                                  double r_s);
std::string render_metrics_svg(const TraceTable& table, double r_s);
std::string render_snapshot_svg(const QuadrangleChain& chain, const TraceTable& table, double r_s,
                                double when);

}  // namespace tube
