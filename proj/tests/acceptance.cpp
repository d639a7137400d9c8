// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tube/output.hpp"
#include "tube/scenario_io.hpp"
#include "tube/verification.hpp"

using namespace tube;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Rng = std::mt19937_64;
double unif(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double unif(Rng& rng, double lo, double hi) { return lo + (hi - lo) * unif(rng); }

int g_failures = 0;

void report(int num, bool pass, const char* what, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("criterion %2d: %s  %s (%s)\n", num, pass ? "PASS" : "FAIL", what, detail.c_str());
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double finite_min(const std::vector<double>& v) {
  double m = kInf;
  for (double x : v)
    if (std::isfinite(x)) m = std::min(m, x);
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Independent random trapezoid: random pose, parallel bases, legs no steeper
// than the supported wall-angle floor.
TrapezoidTube rand_trapezoid(Rng& rng) {
  for (;;) {
    double th = unif(rng, 0.0, 6.283185307179586);
    Vec2 a{std::cos(th), std::sin(th)}, n{-a.y, a.x};
    Vec2 c0{unif(rng, -10.0, 10.0), unif(rng, -10.0, 10.0)};
    double len = unif(rng, 2.0, 7.0);
    double wf = unif(rng, 0.7, 2.0), ws = unif(rng, 0.7, 2.0);
    Vec2 c1 = c0 + len * a;
    try {
      TrapezoidTube t = build_trapezoid(c1 - wf * n, c1 + wf * n, c0 + ws * n, c0 - ws * n);
      if (std::min(t.cos_l, t.cos_r) >= 0.6) return t;
    } catch (const Error&) {
    }
  }
}

// Four-base chain: the first joint is exactly colinear, the second bends by
// 5..30 degrees, so one decomposition must drop its bottom region and one
// must keep it.
QuadrangleChain colinear_chain(Rng& rng) {
  for (;;) {
    double th = unif(rng, 0.0, 6.283185307179586);
    Vec2 a{std::cos(th), std::sin(th)}, n{-a.y, a.x};
    Vec2 c0{unif(rng, -5.0, 5.0), unif(rng, -5.0, 5.0)};
    double l1 = unif(rng, 2.0, 5.0), l2 = unif(rng, 2.0, 5.0), l3 = unif(rng, 2.0, 5.0);
    double w0 = unif(rng, 0.9, 1.8), w1 = unif(rng, 0.9, 1.8);
    double w2 = unif(rng, 0.9, 1.8), w3 = unif(rng, 0.9, 1.8);
    double bend = (unif(rng) < 0.5 ? -1.0 : 1.0) * unif(rng, 0.0873, 0.5236);
    Vec2 c1 = c0 + l1 * a, c2 = c1 + l2 * a;
    Vec2 a3{std::cos(th + bend), std::sin(th + bend)};
    Vec2 n3{-a3.y, a3.x};
    Vec2 c3 = c2 + l3 * a3;
    try {
      return QuadrangleChain::build({{c0 - w0 * n, c0 + w0 * n},
                                     {c1 - w1 * n, c1 + w1 * n},
                                     {c2 - w2 * n, c2 + w2 * n},
                                     {c3 - w3 * n3, c3 + w3 * n3}});
    } catch (const Error&) {
    }
  }
}

double vertex_gap(const TrapezoidTube& a, const TrapezoidTube& b) {
  return std::max({norm(a.p_fr - b.p_fr), norm(a.p_fl - b.p_fl), norm(a.p_sl - b.p_sl),
                   norm(a.p_sr - b.p_sr)});
}

}  // namespace

int main() {
  const std::string dir = SCENARIO_DIR;

  // Criteria 1 and 2: the 20-agent four-quadrangle scenario holds both
  // distance invariants at every step, finishes in time, and everyone arrives.
  ScenarioConfig c20 = load_scenario(dir + "/chain20.json");
  auto t0 = std::chrono::steady_clock::now();
  SimulationTrace tr20 = run(c20, 1);
  double run20_secs = seconds_since(t0);
  double pair_min = finite_min(tr20.min_pair_dist);
  double wall_min = finite_min(tr20.min_boundary_dist);
  report(1, tr20.steps >= 15000 && pair_min > 1.0 && wall_min > 0.5 && run20_secs <= 120.0,
         "heterogeneous 20-agent swarm keeps pair > 1.0 and wall > 0.5 at every step",
         fmt("min pair %.4f, min wall %.4f, steps %d, run %.1f s", pair_min, wall_min, tr20.steps,
             run20_secs));
  double cmd_mean = 0.0;
  for (double s : tr20.command_seconds) cmd_mean += s;
  if (!tr20.command_seconds.empty()) cmd_mean /= double(tr20.command_seconds.size());
  std::printf("              mean command time %.2f us/step over %d agents (informative only)\n",
              cmd_mean * 1e6, tr20.agent_count);

  double last_arrival = 0.0;
  bool all20 = tr20.outcome == RunOutcome::AllArrived;
  for (double a : tr20.arrival_time) {
    all20 = all20 && std::isfinite(a) && a < 60.0;
    if (std::isfinite(a)) last_arrival = std::max(last_arrival, a);
  }
  report(2, all20, "all 20 agents arrive before t = 60 s",
         fmt("last arrival %.3f s", last_arrival));

  // Criterion 3: the small four-quadrangle scenario at desk scale.
  ScenarioConfig c4 = load_scenario(dir + "/quad4.json");
  SimulationTrace tr4 = run(c4, 1);
  double pair4 = finite_min(tr4.min_pair_dist);
  double wall4 = finite_min(tr4.min_boundary_dist);
  bool all4 = tr4.outcome == RunOutcome::AllArrived;
  double last4 = 0.0;
  for (double a : tr4.arrival_time) {
    all4 = all4 && std::isfinite(a) && a <= 60.0;
    if (std::isfinite(a)) last4 = std::max(last4, a);
  }
  report(3, pair4 > 0.4 && wall4 > 0.2 && all4,
         "4-agent swarm keeps pair > 0.4 and wall > 0.2 and arrives within 60 s",
         fmt("min pair %.4f, min wall %.4f, last arrival %.3f s", pair4, wall4, last4));

  // Criterion 4: the single-trapezoid gradient-flow run never increases the
  // swarm energy; negating the avoidance term breaks that immediately.
  ScenarioConfig c5v = load_scenario(dir + "/trapezoid5.json");
  SimulationTrace tr5 = run(c5v, 1);
  OracleReport mono = lyapunov_monotonicity_check(tr5);
  ScenarioConfig c5bad = c5v;
  c5bad.params.flip_avoidance = true;
  c5bad.t_end = 0.04;
  SimulationTrace tr5bad = run(c5bad, 1);
  OracleReport mono_bad = lyapunov_monotonicity_check(tr5bad);
  report(4, mono.pass && !tr5.energy.empty() && !mono_bad.pass,
         "energy rate <= 1e-6 at 100% of samples; flipped avoidance fails the same check",
         fmt("%d samples, worst rate %.3e; flipped worst %.3e", mono.cases,
             mono.max_abs_err > 0 ? mono.max_abs_err : 0.0, mono_bad.max_abs_err));

  // Criterion 5: four analytic gradients vs finite differences, 1000 random
  // states each, within 1e-5 relative, under 30 s, and a skewed copy fails.
  t0 = std::chrono::steady_clock::now();
  std::vector<OracleReport> suite = gradient_oracle_suite(1000, 42);
  double suite_secs = seconds_since(t0);
  bool suite_ok = suite.size() == 4 && suite_secs <= 30.0;
  double worst_rel = 0.0;
  for (const OracleReport& r : suite) {
    suite_ok = suite_ok && r.pass && r.cases == 1000;
    worst_rel = std::max(worst_rel, r.max_rel_err);
  }
  for (const OracleReport& r : gradient_oracle_suite(1000, 42, true))
    suite_ok = suite_ok && !r.pass;
  report(5, suite_ok, "gradient oracles within 1e-5 relative; skewed variant fails all four",
         fmt("worst rel %.3e, %.2f s", worst_rel, suite_secs));

  // Criterion 6: tube-metric safety vs exact wall distance on random
  // trapezoids; the un-inflated radius must disagree somewhere.
  Rng rng6(606);
  bool agree_ok = true;
  int wrong_disagreements = 0;
  long total_cases = 0;
  for (int k = 0; k < 20; ++k) {
    TrapezoidTube tube = rand_trapezoid(rng6);
    double half = std::min(norm(tube.p_fl - tube.p_fr), norm(tube.p_sl - tube.p_sr)) / 2.0;
    double r_s = unif(rng6, 0.15, 0.4) * half;
    OracleReport r = wall_safety_oracle(tube, r_s, 10000, 6000 + k);
    agree_ok = agree_ok && r.pass;
    total_cases += r.cases;
    OracleReport w = wall_safety_oracle(tube, r_s, 10000, 6000 + k, true);
    if (!w.pass) ++wrong_disagreements;
  }
  report(6, agree_ok && wrong_disagreements >= 1,
         "safety predicates agree on 20 random trapezoids; raw radius control disagrees",
         fmt("%ld points, 0 disagreements, control disagrees on %d/20 tubes", total_cases,
             wrong_disagreements));

  // Criterion 7: a colinear joint drops the bottom region and collapses the
  // decomposition; the bent joint in the same chain keeps its bottom region.
  Rng rng7(707);
  int good_chains = 0;
  double worst_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    QuadrangleChain chain = colinear_chain(rng7);
    const QuadrangleDecomposition& straight = chain.decomposition(2);
    const QuadrangleDecomposition& bent = chain.decomposition(3);
    double gap = vertex_gap(straight.inscribed, straight.circumscribed);
    worst_gap = std::max(worst_gap, gap);
    if (!straight.bottom.has_value() && gap <= 1e-9 && bent.bottom.has_value()) ++good_chains;
  }
  report(7, good_chains == 50,
         "50 chains with a colinear joint: no bottom region and matching trapezoids",
         fmt("%d/50, worst vertex gap %.3e", good_chains, worst_gap));

  // Criterion 8: boundary extension succeeds and the 50x50 direction sweep
  // passes on every bundled quadrangle; un-extended walls fail the sweep.
  bool ext_ok = true;
  std::string ext_detail = "all bundled quadrangles certified";
  int quads_checked = 0;
  try {
    for (const char* name : {"chain20", "quad4", "trapezoid5", "deadlock_elbow"}) {
      ScenarioConfig cfg = load_scenario(dir + "/" + std::string(name) + ".json");
      for (int q = 1; q <= cfg.chain.count(); ++q) {
        TrapezoidTube tq = cfg.chain.decomposition(q).circumscribed;
        ExtendedBoundary ext =
            extend_boundaries(tq, cfg.params.lambda0, cfg.params.r_s, cfg.params.k3);
        OracleReport rep = direction_constraint_sampler(tq, ext, 50);
        ext_ok = ext_ok && rep.pass;
        ++quads_checked;
      }
    }
  } catch (const Error& e) {
    ext_ok = false;
    ext_detail = e.what();
  }
  {
    ScenarioConfig cfg = load_scenario(dir + "/trapezoid5.json");
    TrapezoidTube tq = cfg.chain.decomposition(1).circumscribed;
    ExtendedBoundary stub{tq.p_fl,
                          tq.p_sl,
                          tq.p_fr,
                          tq.p_sr,
                          0.0,
                          PanelField(tq.p_fl, tq.p_sl, cfg.params.r_s, cfg.params.k3),
                          PanelField(tq.p_fr, tq.p_sr, cfg.params.r_s, cfg.params.k3)};
    OracleReport stub_rep = direction_constraint_sampler(tq, stub, 50);
    ext_ok = ext_ok && !stub_rep.pass;
    report(8, ext_ok, "auto-extension certifies every bundled tube; bare walls fail the sweep",
           fmt("%d quadrangles, stub violation %.3e (%s)", quads_checked, stub_rep.max_abs_err,
               ext_detail.c_str()));
  }

  // Criterion 9: the opposed pair deadlocks under per-quadrangle dispatch and
  // clears under the modified switching rule.
  ScenarioConfig dl = load_scenario(dir + "/deadlock_elbow.json");
  SimulationTrace trd = run(dl, 1);
  std::vector<DeadlockEvent> stalls = detect_deadlock(trd);
  bool direct_stalls = !stalls.empty() && trd.outcome == RunOutcome::Timeout;
  dl.logic = Logic::Modified;
  SimulationTrace trm = run(dl, 1);
  std::vector<DeadlockEvent> cleared = detect_deadlock(trm);
  bool modified_clears = cleared.empty() && trm.outcome == RunOutcome::AllArrived;
  report(9, direct_stalls && modified_clears,
         "direct dispatch stalls for >= 2 s; modified switching arrives with no stall",
         fmt("direct: %zu stall(s); modified: %zu stall(s), outcome %s", stalls.size(),
             cleared.size(), trm.outcome == RunOutcome::AllArrived ? "all arrived" : "timeout"));

  // Criterion 10: closed-form goal integral vs independent quadrature.
  OracleReport goal = goal_term_quadrature_oracle(500, 11);
  OracleReport goal_bad = goal_term_quadrature_oracle(500, 11, true);
  report(10, goal.pass && !goal_bad.pass,
         "goal-term closed form matches quadrature within 1e-8; wrong form fails",
         fmt("max rel %.3e over %d cases", goal.max_rel_err, goal.cases));

  // Criterion 11: identical trace files across reruns and thread counts.
  fs::path tmp = fs::temp_directory_path() / "tube_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp / "a");
  fs::create_directories(tmp / "b");
  fs::create_directories(tmp / "c");
  auto write_pair = [&](const SimulationTrace& tr, const fs::path& d) {
    TraceTable table = to_table(tr);
    write_trajectory_csv(table, (d / "trajectory.csv").string());
    write_metrics_csv(table, (d / "metrics.csv").string());
  };
  write_pair(tr20, tmp / "a");
  write_pair(run(c20, 1), tmp / "b");
  write_pair(run(c20, 4), tmp / "c");
  bool identical = slurp(tmp / "a" / "trajectory.csv") == slurp(tmp / "b" / "trajectory.csv") &&
                   slurp(tmp / "a" / "trajectory.csv") == slurp(tmp / "c" / "trajectory.csv") &&
                   slurp(tmp / "a" / "metrics.csv") == slurp(tmp / "b" / "metrics.csv") &&
                   slurp(tmp / "a" / "metrics.csv") == slurp(tmp / "c" / "metrics.csv");
  report(11, identical, "rerun and 4-thread trace files are byte-identical",
         fmt("trajectory %.1f MB compared", double(slurp(tmp / "a" / "trajectory.csv").size()) /
                                                1048576.0));
  fs::remove_all(tmp);

  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria PASS\n");
    return 0;
  }
  std::printf("acceptance: %d criterion/criteria FAILED\n", g_failures);
  return 1;
}
