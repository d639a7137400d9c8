#include "tube/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>

namespace tube {

const char* logic_name(Logic l) {
  switch (l) {
    case Logic::Direct: return "direct";
    case Logic::Modified: return "modified";
    case Logic::SingleTrapezoidV1: return "single_trapezoid_v1";
    case Logic::SingleTrapezoidV2: return "single_trapezoid_v2";
  }
  return "unknown";
}

Logic parse_logic(const std::string& s) {
  if (s == "direct") return Logic::Direct;
  if (s == "modified") return Logic::Modified;
  if (s == "single_trapezoid_v1") return Logic::SingleTrapezoidV1;
  if (s == "single_trapezoid_v2") return Logic::SingleTrapezoidV2;
  raise(Errc::ParseError, "unknown logic \"" + s +
                              "\" (expected direct, modified, single_trapezoid_v1, or "
                              "single_trapezoid_v2)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-run immutable inputs shared by every step: the arrival line and, for the
// single-trapezoid logics, the dispatched trapezoid with its wall machinery.
struct StepContext {
  Vec2 p_f{0, 0};  // midpoint of the finishing base
  Vec2 t_f{1, 0};  // final travel direction
  std::optional<TrapezoidTube> tube;
  std::optional<ExtendedBoundary> extended;
  double r1 = 0.0;  // wall threshold for SingleTrapezoidV2
};

StepContext make_context(const ScenarioConfig& cfg) {
  StepContext ctx;
  int n = cfg.chain.count();
  const QuadrangleChain::BaseSegment& fin = cfg.chain.base(n);
  ctx.p_f = 0.5 * (fin.right + fin.left);
  ctx.t_f = cfg.chain.axis(n);
  if (cfg.logic == Logic::SingleTrapezoidV1 || cfg.logic == Logic::SingleTrapezoidV2) {
    if (n != 1)
      raise(Errc::WrongLogic, "single-trapezoid logic needs a one-quadrangle tube");
    ctx.tube = cfg.chain.decomposition(1).circumscribed;
    if (cfg.logic == Logic::SingleTrapezoidV1)
      ctx.extended =
          extend_boundaries(*ctx.tube, cfg.params.lambda0, cfg.params.r_s, cfg.params.k3);
    else
      ctx.r1 = quad_safety_radius(cfg.chain, 1, cfg.params.r_s);
  }
  return ctx;
}

Vec2 command_for(const ScenarioConfig& cfg, const StepContext& ctx, const AgentState& self,
                 const std::vector<AgentState>& swarm) {
  switch (cfg.logic) {
    case Logic::Direct:
      return switch_direct(cfg.chain, self, swarm, cfg.params);
    case Logic::Modified:
      return switch_modified(cfg.chain, self, swarm, cfg.params);
    case Logic::SingleTrapezoidV1:
      return controller1(*ctx.tube, self, swarm, cfg.params, *ctx.extended);
    case Logic::SingleTrapezoidV2:
      return controller2(*ctx.tube, self, swarm, cfg.params, ctx.r1);
  }
  raise(Errc::WrongLogic, "unknown logic");
}

// Adds the step and agent to a controller error; anything else propagates.
[[noreturn]] void rethrow_with_context(std::exception_ptr ep, int step_index, int agent_id) {
  try {
    std::rethrow_exception(ep);
  } catch (const Error& e) {
    std::string msg = e.what();
    std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    raise(e.code(), "step " + std::to_string(step_index) + " agent " +
                        std::to_string(agent_id) + ": " + msg);
  }
}

// Computes every command from the immutable snapshot. threads > 1 strides the
// agent index across workers; each slot is written by exactly one worker, so
// the result does not depend on the thread count. The lowest-index failure is
// reported no matter which worker hit it first.
void compute_commands(const SwarmState& state, const ScenarioConfig& cfg,
                      const StepContext& ctx, int threads, std::vector<Vec2>& out) {
  int m = static_cast<int>(state.agents.size());
  std::vector<std::exception_ptr> errors(m);
  auto worker = [&](int first) {
    for (int i = first; i < m; i += threads) {
      try {
        out[i] = command_for(cfg, ctx, state.agents[i], state.agents);
      } catch (...) {
        errors[i] = std::current_exception();
        out[i] = {0, 0};
      }
    }
  };
  if (threads <= 1) {
    threads = 1;
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker, k);
    worker(0);
    for (std::thread& th : pool) th.join();
  }
  for (int i = 0; i < m; ++i)
    if (errors[i]) rethrow_with_context(errors[i], state.step, state.agents[i].id);
}

SwarmState advance(const SwarmState& state, const ScenarioConfig& cfg, const StepContext& ctx,
                   const std::vector<Vec2>& cmds) {
  SwarmState next = state;
  next.step = state.step + 1;
  next.t = next.step * cfg.dt;
  for (size_t i = 0; i < next.agents.size(); ++i) {
    AgentState& a = next.agents[i];
    if (a.arrived) continue;
    a.p += cfg.dt * cmds[i];
    if (arrival_check(a.p, ctx.p_f, ctx.t_f, cfg.params.eps_0)) a.arrived = true;
  }
  return next;
}

bool all_arrived(const SwarmState& state) {
  return std::all_of(state.agents.begin(), state.agents.end(),
                     [](const AgentState& a) { return a.arrived; });
}

}  // namespace

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  ValidationReport rep;
  auto add = [&](std::string s) { rep.violations.push_back(std::move(s)); };

  try {
    cfg.params.validate();
  } catch (const Error& e) {
    add(std::string("parameters: ") + e.what());
  }
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) add("dt must be positive and finite");
  if (!(cfg.t_end > 0) || !std::isfinite(cfg.t_end)) add("t_end must be positive and finite");
  if (cfg.agents.empty()) add("no agents");

  for (const AgentState& a : cfg.agents) {
    if (!isfinite(a.p)) add("agent " + std::to_string(a.id) + ": position is not finite");
    if (!(a.v_max > 0) || !std::isfinite(a.v_max))
      add("agent " + std::to_string(a.id) + ": v_max must be positive and finite");
  }
  {
    std::vector<int> ids;
    ids.reserve(cfg.agents.size());
    for (const AgentState& a : cfg.agents) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    for (size_t k = 1; k < ids.size(); ++k)
      if (ids[k] == ids[k - 1]) add("duplicate agent id " + std::to_string(ids[k]));
  }

  if ((cfg.logic == Logic::SingleTrapezoidV1 || cfg.logic == Logic::SingleTrapezoidV2) &&
      cfg.chain.count() != 1)
    add(std::string(logic_name(cfg.logic)) + " needs a one-quadrangle tube, got " +
        std::to_string(cfg.chain.count()));

  bool params_usable = rep.violations.empty();
  for (const AgentState& a : cfg.agents) {
    if (!isfinite(a.p)) continue;
    Located loc = cfg.chain.locate(a.p);
    if (loc.region == Region::Outside) {
      add("disk outside tube: agent " + std::to_string(a.id) +
          " is outside every quadrangle");
      continue;
    }
    double wd = cfg.chain.wall_distance(a.p);
    if (!(wd > cfg.params.r_s))
      add("disk outside tube: agent " + std::to_string(a.id) + " has wall clearance " +
          std::to_string(wd) + " <= r_s");
  }
  for (size_t i = 0; i < cfg.agents.size(); ++i) {
    for (size_t j = i + 1; j < cfg.agents.size(); ++j) {
      if (!isfinite(cfg.agents[i].p) || !isfinite(cfg.agents[j].p)) continue;
      double d = norm(cfg.agents[i].p - cfg.agents[j].p);
      if (!(d > 2.0 * cfg.params.r_s))
        add("initial overlap: agents " + std::to_string(cfg.agents[i].id) + " and " +
            std::to_string(cfg.agents[j].id) + " at distance " + std::to_string(d));
    }
  }
  if (params_usable) {
    for (int q = 1; q <= cfg.chain.count(); ++q) {
      double need = std::max({quad_safety_radius(cfg.chain, q - 1, cfg.params.r_s),
                              quad_safety_radius(cfg.chain, q, cfg.params.r_s),
                              quad_safety_radius(cfg.chain, q + 1, cfg.params.r_s)});
      double have = tube_width(cfg.chain.decomposition(q).circumscribed);
      if (!(have > need))
        add("width condition: quadrangle " + std::to_string(q) + " is not wide enough for at "
            "least one agent to pass (width " + std::to_string(have) +
            " does not exceed the required clearance " + std::to_string(need) + ")");
    }
  }
  return rep;
}

SwarmState step(const SwarmState& state, const ScenarioConfig& cfg, int threads) {
  StepContext ctx = make_context(cfg);
  std::vector<Vec2> cmds(state.agents.size());
  compute_commands(state, cfg, ctx, threads, cmds);
  return advance(state, cfg, ctx, cmds);
}

double swarm_energy(const TrapezoidTube& tube, const ExtendedBoundary& extended,
                    const std::vector<AgentState>& agents, const ControllerParams& params) {
  BarrierParams bp(params.k2, params.r_s, params.r_a, params.eps_m, params.eps_s);
  double v = 0.0;
  for (const AgentState& a : agents) {
    if (a.arrived) continue;
    Vec2 y = dot(tube.t_c, a.p - tube.p_fr) * tube.t_c;
    v += line_integral_lyapunov(y, params.k1, a.v_max);
    v += wall_potential(a.p, extended.left);
    v += wall_potential(a.p, extended.right);
  }
  for (size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].arrived) continue;
    for (size_t j = i + 1; j < agents.size(); ++j) {
      if (agents[j].arrived) continue;
      v += barrier_vm(norm(agents[i].p - agents[j].p), bp);
    }
  }
  return v;
}

SimulationTrace run(const ScenarioConfig& cfg, int threads) {
  cfg.params.validate();
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt))
    raise(Errc::InvalidScenario, "dt must be positive and finite");
  if (!(cfg.t_end > 0) || !std::isfinite(cfg.t_end))
    raise(Errc::InvalidScenario, "t_end must be positive and finite");
  if (cfg.agents.empty()) raise(Errc::InvalidScenario, "no agents");
  if (threads < 1) threads = 1;

  StepContext ctx = make_context(cfg);
  const int m = static_cast<int>(cfg.agents.size());
  const int max_steps = static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-12));

  SimulationTrace trace;
  trace.logic = cfg.logic;
  trace.dt = cfg.dt;
  trace.agent_count = m;
  trace.arrival_time.assign(m, kInf);
  trace.positions.reserve(static_cast<size_t>(m) * (max_steps + 1));
  trace.commands.reserve(static_cast<size_t>(m) * max_steps);
  trace.arrived.reserve(static_cast<size_t>(m) * (max_steps + 1));
  trace.min_pair_dist.reserve(max_steps + 1);
  trace.min_boundary_dist.reserve(max_steps + 1);
  trace.command_seconds.reserve(max_steps);

  SwarmState cur{0.0, 0, cfg.agents};
  for (int i = 0; i < m; ++i)
    if (cur.agents[i].arrived) trace.arrival_time[i] = 0.0;

  auto record_state = [&](const SwarmState& s) {
    double pair_min = kInf;
    double wall_min = kInf;
    for (int i = 0; i < m; ++i) {
      const AgentState& a = s.agents[i];
      trace.positions.push_back(a.p);
      trace.arrived.push_back(a.arrived ? 1 : 0);
      if (a.arrived) continue;
      wall_min = std::min(wall_min, cfg.chain.wall_distance(a.p));
      for (int j = i + 1; j < m; ++j)
        if (!s.agents[j].arrived) pair_min = std::min(pair_min, norm(a.p - s.agents[j].p));
    }
    trace.min_pair_dist.push_back(pair_min);
    trace.min_boundary_dist.push_back(wall_min);
  };
  record_state(cur);

  std::vector<Vec2> cmds(m);
  int n = 0;
  while (n < max_steps && !all_arrived(cur)) {
    bool sample = cfg.logic == Logic::SingleTrapezoidV1 && n % 10 == 0;
    double v_before = sample ? swarm_energy(*ctx.tube, *ctx.extended, cur.agents, cfg.params)
                             : 0.0;

    auto t0 = std::chrono::steady_clock::now();
    compute_commands(cur, cfg, ctx, threads, cmds);
    auto t1 = std::chrono::steady_clock::now();
    trace.command_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    trace.commands.insert(trace.commands.end(), cmds.begin(), cmds.end());

    SwarmState next = advance(cur, cfg, ctx, cmds);
    if (sample) {
      // Rate along the continuous flow: the agent set is frozen across the
      // difference so an arrival inside the step cannot fake a jump.
      std::vector<AgentState> post = next.agents;
      for (int i = 0; i < m; ++i) post[i].arrived = cur.agents[i].arrived;
      double v_after;
      try {
        v_after = swarm_energy(*ctx.tube, *ctx.extended, post, cfg.params);
      } catch (const Error& e) {
        std::string msg = e.what();
        const std::string prefix = std::string(errc_name(e.code())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        raise(e.code(), "step " + std::to_string(n) + " energy sample: " + msg);
      }
      trace.energy.push_back({cur.t, v_before, (v_after - v_before) / cfg.dt});
    }
    for (int i = 0; i < m; ++i)
      if (!cur.agents[i].arrived && next.agents[i].arrived) trace.arrival_time[i] = next.t;

    cur = std::move(next);
    record_state(cur);
    ++n;
  }

  trace.steps = n;
  trace.final_agents = cur.agents;
  trace.sim_time = cur.t;
  trace.outcome = all_arrived(cur) ? RunOutcome::AllArrived : RunOutcome::Timeout;
  return trace;
}

std::vector<DeadlockEvent> detect_deadlock(const SimulationTrace& trace, double window,
                                           double v_eps_scale) {
  std::vector<DeadlockEvent> events;
  if (trace.steps <= 0 || trace.agent_count <= 0) return events;
  double top_speed = 0.0;
  for (const AgentState& a : trace.final_agents) top_speed = std::max(top_speed, a.v_max);
  const double v_eps = v_eps_scale * top_speed;
  const int need = std::max(1, static_cast<int>(std::ceil(window / trace.dt - 1e-9)));
  const int m = trace.agent_count;

  for (int i = 0; i < m; ++i) {
    int quiet = 0;
    auto flush = [&](int end_row) {
      if (quiet >= need)
        events.push_back({i, (end_row - quiet) * trace.dt, end_row * trace.dt});
      quiet = 0;
    };
    for (int n = 0; n < trace.steps; ++n) {
      size_t k = static_cast<size_t>(n) * m + i;
      if (!trace.arrived[k] && norm(trace.commands[k]) < v_eps)
        ++quiet;
      else
        flush(n);
    }
    flush(trace.steps);
  }
  return events;
}

}  // namespace tube
