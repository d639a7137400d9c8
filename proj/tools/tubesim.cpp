#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tube/output.hpp"
#include "tube/scenario_io.hpp"
#include "tube/verification.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 2 scenario read/parse failure, 3 validation failure,
// 4 safety stop during a run, 5 oracle failure, 1 anything else.
enum ExitCode { kOk = 0, kOther = 1, kParse = 2, kValidation = 3, kSafety = 4, kOracle = 5 };

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) tube::raise(tube::Errc::IoError, "cannot write " + path);
  out << text;
  if (!out.flush()) tube::raise(tube::Errc::IoError, "cannot write " + path);
}

bool load_cfg(const std::string& path, tube::ScenarioConfig& cfg) {
  try {
    cfg = tube::load_scenario(path);
    return true;
  } catch (const tube::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return false;
  }
}

int report_validation(const tube::ValidationReport& rep) {
  if (rep.ok()) {
    std::printf("validation: PASS\n");
    return kOk;
  }
  std::fprintf(stderr, "scenario invalid:\n");
  for (const std::string& v : rep.violations) std::fprintf(stderr, "  - %s\n", v.c_str());
  return kValidation;
}

void print_report(const tube::OracleReport& r) {
  std::printf("%-44s %s  cases=%-6d max_abs=%.3e  max_rel=%.3e\n", r.name.c_str(),
              r.pass ? "PASS" : "FAIL", r.cases, r.max_abs_err, r.max_rel_err);
  if (!r.pass && !r.worst_input.empty()) std::printf("    worst: %s\n", r.worst_input.c_str());
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::vector<double>& dt_override,
                 const std::vector<std::string>& logic_override,
                 const std::vector<double>& snapshot_times, int threads) {
  tube::ScenarioConfig cfg;
  if (!load_cfg(scenario_path, cfg)) return kParse;
  if (!dt_override.empty()) cfg.dt = dt_override.back();
  if (!logic_override.empty()) {
    try {
      cfg.logic = tube::parse_logic(logic_override.back());
    } catch (const tube::Error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kParse;
    }
  }

  if (int rc = report_validation(tube::validate_scenario(cfg)); rc != kOk) return rc;

  tube::SimulationTrace trace;
  try {
    trace = tube::run(cfg, threads);
  } catch (const tube::Error& e) {
    if (e.code() == tube::Errc::InvalidScenario) {
      std::fprintf(stderr, "scenario invalid: %s\n", e.what());
      return kValidation;
    }
    std::fprintf(stderr, "safety stop: %s\n", e.what());
    return kSafety;
  }

  fs::create_directories(out_dir);
  tube::TraceTable table = tube::to_table(trace);
  tube::write_trajectory_csv(table, out_dir + "/trajectory.csv");
  tube::write_metrics_csv(table, out_dir + "/metrics.csv");
  tube::write_summary_json(cfg, trace, out_dir + "/summary.json");
  tube::save_scenario(cfg, out_dir + "/scenario.json");
  for (double ts : snapshot_times) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%.3f.svg", ts);
    write_text(out_dir + "/" + name,
               tube::render_snapshot_svg(cfg.chain, table, cfg.params.r_s, ts));
  }

  int arrived = 0;
  for (double a : trace.arrival_time)
    if (std::isfinite(a)) ++arrived;
  double mean_cmd = 0.0;
  for (double s : trace.command_seconds) mean_cmd += s;
  if (!trace.command_seconds.empty()) mean_cmd /= double(trace.command_seconds.size());
  std::printf("outcome: %s\n",
              trace.outcome == tube::RunOutcome::AllArrived ? "all_arrived" : "timeout");
  std::printf("steps: %d (sim time %.3f s)\n", trace.steps, trace.sim_time);
  std::printf("arrived: %d/%d\n", arrived, trace.agent_count);
  std::printf("mean command time: %.3f us/step\n", mean_cmd * 1e6);
  std::printf("wrote %s/{trajectory.csv,metrics.csv,summary.json,scenario.json}\n",
              out_dir.c_str());
  return kOk;
}

int cmd_check(const std::string& scenario_path) {
  tube::ScenarioConfig cfg;
  if (!load_cfg(scenario_path, cfg)) return kParse;
  if (int rc = report_validation(tube::validate_scenario(cfg)); rc != kOk) return rc;

  std::vector<tube::OracleReport> reports;
  try {
    for (int q = 1; q <= cfg.chain.count(); ++q) {
      tube::TrapezoidTube tq = cfg.chain.decomposition(q).circumscribed;
      tube::OracleReport ws = tube::wall_safety_oracle(tq, cfg.params.r_s, 10000, 1000 + q);
      ws.name += " (quadrangle " + std::to_string(q) + ")";
      reports.push_back(std::move(ws));
      tube::ExtendedBoundary ext =
          tube::extend_boundaries(tq, cfg.params.lambda0, cfg.params.r_s, cfg.params.k3);
      tube::OracleReport dir = tube::direction_constraint_sampler(tq, ext, 50);
      dir.name += " (quadrangle " + std::to_string(q) + ")";
      reports.push_back(std::move(dir));
    }
  } catch (const tube::Error& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return kOracle;
  }
  for (tube::OracleReport& r : tube::gradient_oracle_suite(1000, 2026))
    reports.push_back(std::move(r));
  reports.push_back(tube::goal_term_quadrature_oracle(500, 2026));

  const tube::OracleReport* first_fail = nullptr;
  for (const tube::OracleReport& r : reports) {
    print_report(r);
    if (!r.pass && !first_fail) first_fail = &r;
  }
  if (first_fail) {
    std::fprintf(stderr, "first failing oracle: %s\n", first_fail->name.c_str());
    return kOracle;
  }
  std::printf("all oracles: PASS\n");
  return kOk;
}

int cmd_plot(const std::string& trace_dir, const std::string& out_dir) {
  tube::TraceTable table;
  tube::ScenarioConfig cfg;
  try {
    table = tube::read_trace_dir(trace_dir);
    cfg = tube::load_scenario(trace_dir + "/scenario.json");
  } catch (const tube::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParse;
  }
  fs::create_directories(out_dir);
  write_text(out_dir + "/trajectory.svg",
             tube::render_trajectory_svg(cfg.chain, table, cfg.params.r_s));
  write_text(out_dir + "/metrics.svg", tube::render_metrics_svg(table, cfg.params.r_s));
  std::printf("wrote %s/{trajectory.svg,metrics.svg}\n", out_dir.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarm passing through a 2-D virtual tube: simulate, check, plot"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", trace_dir;
  std::vector<double> dt_override, snapshot_times;
  std::vector<std::string> logic_override;
  int threads = 1;

  CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write trace files");
  sim->add_option("--scenario", scenario_path, "scenario JSON path")->required();
  sim->add_option("--out", out_dir, "output directory (default: out)");
  sim->add_option("--dt-override", dt_override, "replace the scenario's time step [s]");
  sim->add_option("--logic-override", logic_override,
                  "replace the scenario's logic "
                  "(direct|modified|single_trapezoid_v1|single_trapezoid_v2)");
  sim->add_option("--snapshot-times", snapshot_times, "comma-separated times [s] to render")
      ->delimiter(',');
  sim->add_option("--threads", threads, "worker threads (result is identical for any count)")
      ->check(CLI::PositiveNumber);

  CLI::App* chk = app.add_subcommand("check", "validate a scenario and run the oracle suite");
  chk->add_option("--scenario", scenario_path, "scenario JSON path")->required();

  CLI::App* plt = app.add_subcommand("plot", "render SVG plots from a trace directory");
  plt->add_option("--trace-dir", trace_dir, "directory written by simulate")->required();
  plt->add_option("--out", out_dir, "output directory (default: out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(scenario_path, out_dir, dt_override, logic_override, snapshot_times,
                          threads);
    if (chk->parsed()) return cmd_check(scenario_path);
    return cmd_plot(trace_dir, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
}
