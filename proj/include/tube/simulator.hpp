#pragma once
// Fixed-step synchronous integration of the single-integrator swarm, with
// per-step metric extraction, energy-function tracing, and deadlock scanning.

#include <cstdint>
#include <string>
#include <vector>

#include "tube/controller.hpp"
#include "tube/geometry.hpp"

namespace tube {

enum class Logic { Direct, Modified, SingleTrapezoidV1, SingleTrapezoidV2 };

const char* logic_name(Logic l);          // "direct" | "modified" | ...
Logic parse_logic(const std::string& s);  // raises ParseError on unknown names

struct ScenarioConfig {
  QuadrangleChain chain;
  std::vector<AgentState> agents;
  ControllerParams params;
  double dt = 1e-3;     // seconds
  double t_end = 15.0;  // seconds
  Logic logic = Logic::Modified;
  std::uint64_t seed = 0;  // reserved for placement helpers; not used by run
};

// Report-valued initial-condition check: safety disks inside the tube and
// pairwise disjoint, corridor wide enough for the widened per-quadrangle
// radii, and the logic compatible with the tube shape. Never throws.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
ValidationReport validate_scenario(const ScenarioConfig& cfg);

struct SwarmState {
  double t = 0.0;
  int step = 0;
  std::vector<AgentState> agents;
};

// One synchronous explicit-Euler update: every command is computed from the
// incoming snapshot, all non-arrived agents move together, and arrival flags
// are applied after the move. Controller errors are re-raised with the step
// index and agent id. threads > 1 fans the command loop out by index stride;
// the result is bit-identical for any thread count.
SwarmState step(const SwarmState& state, const ScenarioConfig& cfg, int threads = 1);

enum class RunOutcome { AllArrived, Timeout };

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;  // total energy V at t
  double rate = 0.0;   // (V(t + dt) - V(t)) / dt
};

// Step-major trace. positions/arrived hold steps + 1 rows (the state at
// t = n dt, n = 0..steps); commands and command_seconds hold steps rows (the
// command computed from row n). Entry [n * agent_count + i] is agent i.
// Metric rows mirror positions, restricted to agents still active then.
struct SimulationTrace {
  Logic logic = Logic::Modified;
  double dt = 1e-3;
  int agent_count = 0;
  int steps = 0;
  std::vector<Vec2> positions;
  std::vector<Vec2> commands;
  std::vector<std::uint8_t> arrived;
  std::vector<double> min_pair_dist;      // +inf with fewer than two active agents
  std::vector<double> min_boundary_dist;  // +inf with no active agent
  std::vector<LyapunovSample> energy;     // every 10th step, SingleTrapezoidV1 only
  std::vector<double> command_seconds;    // wall-clock command time per step
  std::vector<double> arrival_time;       // per agent; +inf when never arrived
  std::vector<AgentState> final_agents;
  RunOutcome outcome = RunOutcome::Timeout;
  double sim_time = 0.0;  // simulated seconds covered
};

// Iterates step until t_end or every agent has arrived. Arrival is measured
// against the midpoint of the chain's finishing base along the final axis.
// Timeout is an outcome, not an error; controller errors propagate.
SimulationTrace run(const ScenarioConfig& cfg, int threads = 1);

// Scans a completed trace for stalls: intervals of at least `window` seconds
// during which a non-arrived agent's commanded speed stays below v_eps.
struct DeadlockEvent {
  int agent = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
};
std::vector<DeadlockEvent> detect_deadlock(const SimulationTrace& trace, double window = 2.0,
                                           double v_eps_scale = 1e-3);

// Total closed-loop energy of a swarm state on a single trapezoid: per agent
// the line-integral goal term plus both extended-panel wall terms, plus one
// pairwise barrier per active pair. Used by the SingleTrapezoidV1 trace.
double swarm_energy(const TrapezoidTube& tube, const ExtendedBoundary& extended,
                    const std::vector<AgentState>& agents, const ControllerParams& params);

}  // namespace tube
