#pragma once

#include <vector>

#include "tube/geometry.hpp"
#include "tube/potentials.hpp"

namespace tube {

struct ControllerParams {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;
  double eps_m = 1e-6;
  double eps_s = 1e-6;
  double eps_t = 1e-6;
  double eps_0 = 0.02;   // arrival threshold, meters
  double r_s = 0.2;      // agent safety radius
  double r_a = 0.4;      // avoidance radius, r_a > r_s
  double lambda0 = 3.0;  // initial start-side panel extension factor

  // Diagnostic switch: negates the inter-agent avoidance term, deliberately
  // breaking the closed-loop energy decrease. Never read from scenario files.
  bool flip_avoidance = false;

  void validate() const;  // raises DomainViolation on a bad combination
};

struct AgentState {
  int id = 0;
  Vec2 p{0, 0};
  double v_max = 1.0;
  bool arrived = false;  // monotone: set once, never cleared
};

// Pre-saturation command components: f1 drives toward the finishing line,
// f2 away from neighbors, f3 away from the walls (orthogonal to t_c).
// The assembled command is -sat_vec(-f1 - f2 - f3, v_max).
struct ForceBreakdown {
  Vec2 f1{0, 0};
  Vec2 f2{0, 0};
  Vec2 f3{0, 0};
};

// Indices j != self.id with ||p_self - p_j|| <= r_a + r_s, arrived excluded.
std::vector<int> neighbor_set(const AgentState& self, const std::vector<AgentState>& swarm,
                              double r_s, double r_a);

// Gradient-form command for a single trapezoid: saturated line-approaching
// term plus pairwise avoidance plus the two extended-panel wall gradients.
// Arrived agents get the zero command. Raises OutsideTube if self is not in
// the tube, SafetyBreach if an active neighbor sits at or below 2 r_s.
Vec2 controller1(const TrapezoidTube& tube, const AgentState& self,
                 const std::vector<AgentState>& swarm, const ControllerParams& params,
                 const ExtendedBoundary& extended);

// Components of the modified command on one trapezoid with wall clearance
// threshold r_s_prime. Raises TubeBreach when the clearance is at or below
// r_s_prime, SafetyBreach on pair distance at or below 2 r_s.
ForceBreakdown force_breakdown(const TrapezoidTube& tube, const AgentState& self,
                               const std::vector<AgentState>& swarm,
                               const ControllerParams& params, double r_s_prime);

// Modified command: -sat_vec(-f1 - f2 - f3, v_max), bit-identical to
// assembling force_breakdown by hand. Arrived agents get the zero command.
Vec2 controller2(const TrapezoidTube& tube, const AgentState& self,
                 const std::vector<AgentState>& swarm, const ControllerParams& params,
                 double r_s_prime);

// True once the signed distance past the finishing line through p_f with
// travel direction t_c is within eps_0.
bool arrival_check(Vec2 p, Vec2 p_f, Vec2 t_c, double eps_0);

// Wall-clearance threshold for quadrangle q: r_s grown by the slant of the
// quad's legs. Zero outside [1, count] so the boundary maxima collapse.
double quad_safety_radius(const QuadrangleChain& chain, int q, double r_s);

// Per-quadrangle switching that always runs controller2 on the circumscribed
// trapezoid of the quad containing self. Kept for the deadlock comparison.
Vec2 switch_direct(const QuadrangleChain& chain, const AgentState& self,
                   const std::vector<AgentState>& swarm, const ControllerParams& params);

// Region-aware switching: the bottom trapezoid with the previous quad's axis
// while crossing a joint, the inscribed trapezoid elsewhere; thresholds take
// the max over the adjacent quads so agents stay inside through the switch.
Vec2 switch_modified(const QuadrangleChain& chain, const AgentState& self,
                     const std::vector<AgentState>& swarm, const ControllerParams& params);

}  // namespace tube
