#include "tube/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tube {

void ControllerParams::validate() const {
  if (!(k1 > 0) || !(k2 > 0) || !(k3 > 0))
    raise(Errc::DomainViolation, "gains must be positive");
  if (!(eps_m > 0) || !(eps_s > 0) || !(eps_t > 0))
    raise(Errc::DomainViolation, "epsilons must be positive");
  if (!(eps_s < 0.1)) raise(Errc::DomainViolation, "eps_s must be below 0.1");
  if (!(r_s > 0) || !(r_a > r_s)) raise(Errc::DomainViolation, "need r_a > r_s > 0");
  if (!(eps_0 > 0)) raise(Errc::DomainViolation, "eps_0 must be positive");
  if (!(lambda0 >= 1.0)) raise(Errc::DomainViolation, "lambda0 must be at least 1");
}

std::vector<int> neighbor_set(const AgentState& self, const std::vector<AgentState>& swarm,
                              double r_s, double r_a) {
  std::vector<int> out;
  for (size_t k = 0; k < swarm.size(); ++k) {
    const AgentState& other = swarm[k];
    if (other.id == self.id || other.arrived) continue;
    if (norm(self.p - other.p) <= r_a + r_s) out.push_back(static_cast<int>(k));
  }
  return out;
}

namespace {

// Sum of b_ij (p_i - p_j) over active neighbors; the barrier domain check is
// hoisted so a contact distance surfaces as SafetyBreach, not a math error.
Vec2 avoidance_sum(const AgentState& self, const std::vector<AgentState>& swarm,
                   const ControllerParams& params) {
  BarrierParams bp(params.k2, params.r_s, params.r_a, params.eps_m, params.eps_s);
  Vec2 acc{0, 0};
  for (int k : neighbor_set(self, swarm, params.r_s, params.r_a)) {
    Vec2 diff = self.p - swarm[k].p;
    if (norm(diff) <= 2.0 * params.r_s)
      raise(Errc::SafetyBreach, "agents " + std::to_string(self.id) + " and " +
                                    std::to_string(swarm[k].id) + " within 2 r_s");
    acc += b_coefficient(self.p, swarm[k].p, bp) * diff;
  }
  return params.flip_avoidance ? -acc : acc;
}

}  // namespace

Vec2 controller1(const TrapezoidTube& tube, const AgentState& self,
                 const std::vector<AgentState>& swarm, const ControllerParams& params,
                 const ExtendedBoundary& extended) {
  params.validate();
  if (self.arrived) return {0, 0};
  if (!tube.contains(self.p, 1e-9)) raise(Errc::OutsideTube, "agent outside the tube");

  // Displacement to the finishing line is axial because the bases are
  // perpendicular to t_c; saturation keeps its direction, so the axial
  // projector is already applied.
  Vec2 p_line = dot(tube.t_c, self.p - tube.p_fr) * tube.t_c;
  Vec2 arg = sat_vec(params.k1 * p_line, self.v_max);
  arg -= avoidance_sum(self, swarm, params);
  arg += wall_potential_gradient(self.p, extended.left);
  arg += wall_potential_gradient(self.p, extended.right);
  return -sat_vec(arg, self.v_max);
}

ForceBreakdown force_breakdown(const TrapezoidTube& tube, const AgentState& self,
                               const std::vector<AgentState>& swarm,
                               const ControllerParams& params, double r_s_prime) {
  params.validate();
  if (self.arrived) return {};
  double d_t = section_clearance(tube, self.p);
  if (d_t <= r_s_prime) raise(Errc::TubeBreach, "wall clearance at or below its threshold");

  ForceBreakdown out;
  out.f1 = self.v_max * tube.t_c;
  out.f2 = avoidance_sum(self, swarm, params);
  out.f3 = modified_keeping_term(tube, self.p, r_s_prime, params.r_a, params.k3,
                                 params.eps_t, params.eps_s);
  return out;
}

Vec2 controller2(const TrapezoidTube& tube, const AgentState& self,
                 const std::vector<AgentState>& swarm, const ControllerParams& params,
                 double r_s_prime) {
  if (self.arrived) return {0, 0};
  ForceBreakdown f = force_breakdown(tube, self, swarm, params, r_s_prime);
  return -sat_vec(-f.f1 - f.f2 - f.f3, self.v_max);
}

bool arrival_check(Vec2 p, Vec2 p_f, Vec2 t_c, double eps_0) {
  return -dot(t_c, p - p_f) <= eps_0;
}

double quad_safety_radius(const QuadrangleChain& chain, int q, double r_s) {
  if (q < 1 || q > chain.count()) return 0.0;
  return r_s / chain.min_leg_cos(q);
}

Vec2 switch_direct(const QuadrangleChain& chain, const AgentState& self,
                   const std::vector<AgentState>& swarm, const ControllerParams& params) {
  if (self.arrived) return {0, 0};
  Located loc = chain.locate(self.p);
  if (loc.region == Region::Outside)
    raise(Errc::OutsideTube, "agent outside every quadrangle");
  return controller2(chain.decomposition(loc.q).circumscribed, self, swarm, params,
                     quad_safety_radius(chain, loc.q, params.r_s));
}

Vec2 switch_modified(const QuadrangleChain& chain, const AgentState& self,
                     const std::vector<AgentState>& swarm, const ControllerParams& params) {
  if (self.arrived) return {0, 0};
  Located loc = chain.locate(self.p);
  if (loc.region == Region::Outside)
    raise(Errc::OutsideTube, "agent outside every quadrangle");
  const QuadrangleDecomposition& dec = chain.decomposition(loc.q);
  if (loc.region == Region::BottomRegion) {
    double rp = std::max(quad_safety_radius(chain, loc.q - 1, params.r_s),
                         quad_safety_radius(chain, loc.q, params.r_s));
    return controller2(*dec.bottom, self, swarm, params, rp);
  }
  double rp = std::max(quad_safety_radius(chain, loc.q, params.r_s),
                       quad_safety_radius(chain, loc.q + 1, params.r_s));
  return controller2(dec.inscribed, self, swarm, params, rp);
}

}  // namespace tube
