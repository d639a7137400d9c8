#pragma once
// Scalar potentials and barriers with analytic derivatives, the panel-method
// wall field, and the boundary-extension policy that keeps the wall field
// pointing forward everywhere inside a tube.

#include <vector>

#include "tube/geometry.hpp"

namespace tube {

// Velocity capped at v_max, direction preserved. sat_vec(v) == kappa(v) * v exactly.
Vec2 sat_vec(Vec2 v, double v_max);
double kappa(Vec2 v, double v_max);

// Cubic fade: 1 for x <= d1, 0 for x >= d2, C1 cubic in between.
struct SmoothBumpParams {
  double d1, d2;
  double A, B, C, D;  // cached coefficients of the cubic on [d1, d2]
  SmoothBumpParams(double d1, double d2);
};
double smooth_bump(double x, const SmoothBumpParams& p);
double smooth_bump_deriv(double x, const SmoothBumpParams& p);

// Saturation-shaped ramp: identity up to x1, circular-arc blend on [x1, x2],
// constant 1 beyond. C1 at both knots.
struct ArcBlendParams {
  double eps_s;
  double x1, x2;  // cached knots; x2 = 1 + eps_s * (sqrt(2) - 1)
  explicit ArcBlendParams(double eps_s);
};
double arc_blend(double x, const ArcBlendParams& p);
double arc_blend_deriv(double x, const ArcBlendParams& p);

// Path integral of the saturated radial field min(k1 * r, a): quadratic near
// the origin, linear growth beyond a/k1. Radially unbounded with bounded slope.
double line_integral_lyapunov(Vec2 y, double k1, double a);

// Inter-agent barrier: supported on (2 r_s, r_a + r_s), steep near 2 r_s.
struct BarrierParams {
  double k2, r_s, r_a, eps_m, eps_s;
  BarrierParams(double k2, double r_s, double r_a, double eps_m, double eps_s);
};
double barrier_vm(double dist, const BarrierParams& p);
double barrier_vm_deriv(double dist, const BarrierParams& p);
// Avoidance coefficient: -(dV_m/ddist)/dist, nonnegative, zero beyond the
// outer knot. Depends only on |p_i - p_j|.
double b_coefficient(Vec2 p_i, Vec2 p_j, const BarrierParams& p);

// Wall barrier in the cross-section frame with knots (r_s_prime, r_a).
double barrier_vt(double d_t, double r_s_prime, double r_a, double k3, double eps_t,
                  double eps_s);
double barrier_vt_deriv(double d_t, double r_s_prime, double r_a, double k3, double eps_t,
                        double eps_s);

// Straight wall panel of logarithmic sources. The potential is the panel-length
// integral of ln(dist_to_source - d), evaluated with fixed-order
// Gauss-Legendre quadrature (deterministic for a fixed order).
struct PanelField {
  Vec2 a, b;   // panel endpoints
  double d;    // log threshold distance
  double k3;   // gain applied by wall-potential users
  int order;
  std::vector<double> nodes, weights;  // Gauss-Legendre on [-1, 1]
  PanelField(Vec2 a, Vec2 b, double d, double k3, int order = 32);
};

// Raw panel integral and its gradient (differentiation under the integral
// sign, same quadrature nodes). Unscaled by k3.
double panel_potential(Vec2 p, const PanelField& f);
Vec2 panel_gradient(Vec2 p, const PanelField& f);

// Wall potential used by the gradient controller: positive barrier growing as
// p approaches within d of the panel. wall_potential = k3 * (-panel_potential);
// its gradient points toward the panel, so the commanded -gradient repels.
double wall_potential(Vec2 p, const PanelField& f);
Vec2 wall_potential_gradient(Vec2 p, const PanelField& f);

// Directional audit of the wall fields on an n-by-n interior grid: the
// commanded keeping direction -grad(wall_potential) must never point backward.
// Nodes closer than wall_margin to a leg line are inside the barrier's own
// exclusion zone (unreachable states) and are skipped.
struct DirectionGridResult {
  double min_left = 0.0;   // min over nodes of t_c . (-grad V_tl)
  double min_right = 0.0;  // min over nodes of t_c . (-grad V_tr)
  int evaluated = 0;
  int skipped = 0;
  bool pass(double tol = 1e-12) const { return min_left >= -tol && min_right >= -tol; }
};
DirectionGridResult direction_grid(const TrapezoidTube& tube, const PanelField& left,
                                   const PanelField& right, int grid_n, double wall_margin);

// Leg lines extended beyond the starting base until the directional audit
// passes; lambda doubles from lambda0 and caps at 64.
struct ExtendedBoundary {
  Vec2 p_fle, p_sle;  // extended left leg, finish end first
  Vec2 p_fre, p_sre;  // extended right leg
  double lambda = 0.0;
  PanelField left, right;  // ready-to-use wall fields (d = r_s, gain k3)
};
ExtendedBoundary extend_boundaries(const TrapezoidTube& tube, double lambda0, double r_s,
                                   double k3, int grid_n = 50, int order = 32);

// Gradient of the wall barrier V_t(section_clearance(p)) with respect to p.
// Points toward the nearer wall; zero on the centerline (convention) and
// wherever d_t >= r_a. Throws DomainViolation when d_t <= r_s_prime.
Vec2 keeping_gradient(const TrapezoidTube& tube, Vec2 p, double r_s_prime, double r_a,
                      double k3, double eps_t, double eps_s);

// Wall-keeping velocity component of the modified controller:
// -(I - t_c t_c^T) * keeping_gradient. Orthogonal to t_c; points away from the
// nearer wall.
Vec2 modified_keeping_term(const TrapezoidTube& tube, Vec2 p, double r_s_prime, double r_a,
                           double k3, double eps_t, double eps_s);

}  // namespace tube
