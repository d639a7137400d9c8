#include "tube/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tube {

Vec2 sat_vec(Vec2 v, double v_max) { return kappa(v, v_max) * v; }

double kappa(Vec2 v, double v_max) {
  if (v_max <= 0) raise(Errc::DomainViolation, "v_max must be positive");
  double n = norm(v);
  return (n <= v_max) ? 1.0 : v_max / n;
}

SmoothBumpParams::SmoothBumpParams(double d1_, double d2_) : d1(d1_), d2(d2_) {
  if (!(d1 > 0.0) || !(d2 > d1)) raise(Errc::DomainViolation, "need 0 < d1 < d2");
  double c = (d1 - d2) * (d1 - d2) * (d1 - d2);
  A = -2.0 / c;
  B = 3.0 * (d1 + d2) / c;
  C = -6.0 * d1 * d2 / c;
  D = d2 * d2 * (3.0 * d1 - d2) / c;
}

double smooth_bump(double x, const SmoothBumpParams& p) {
  if (x <= p.d1) return 1.0;
  if (x >= p.d2) return 0.0;
  return ((p.A * x + p.B) * x + p.C) * x + p.D;
}

double smooth_bump_deriv(double x, const SmoothBumpParams& p) {
  if (x <= p.d1 || x >= p.d2) return 0.0;
  return (3.0 * p.A * x + 2.0 * p.B) * x + p.C;
}

ArcBlendParams::ArcBlendParams(double eps) : eps_s(eps) {
  if (!(eps_s > 0.0) || !(eps_s < 0.1)) raise(Errc::DomainViolation, "need 0 < eps_s < 0.1");
  x2 = 1.0 + eps_s * (std::sqrt(2.0) - 1.0);
  x1 = x2 - eps_s * std::sqrt(2.0) / 2.0;
}

double arc_blend(double x, const ArcBlendParams& p) {
  if (x < 0.0) raise(Errc::DomainViolation, "arc_blend argument must be nonnegative");
  if (x <= p.x1) return x;
  if (x >= p.x2) return 1.0;
  double dx = x - p.x2;
  return (1.0 - p.eps_s) + std::sqrt(p.eps_s * p.eps_s - dx * dx);
}

double arc_blend_deriv(double x, const ArcBlendParams& p) {
  if (x < 0.0) raise(Errc::DomainViolation, "arc_blend argument must be nonnegative");
  if (x <= p.x1) return 1.0;
  if (x >= p.x2) return 0.0;
  double dx = x - p.x2;
  return -dx / std::sqrt(p.eps_s * p.eps_s - dx * dx);
}

double line_integral_lyapunov(Vec2 y, double k1, double a) {
  if (k1 <= 0 || a <= 0) raise(Errc::DomainViolation, "gains must be positive");
  double n = norm(y);
  if (k1 * n <= a) return 0.5 * k1 * n * n;
  return a * a / (2.0 * k1) + a * (n - a / k1);
}

BarrierParams::BarrierParams(double k2_, double r_s_, double r_a_, double eps_m_, double eps_s_)
    : k2(k2_), r_s(r_s_), r_a(r_a_), eps_m(eps_m_), eps_s(eps_s_) {
  if (!(r_s > 0.0) || !(r_a > r_s)) raise(Errc::DomainViolation, "need r_a > r_s > 0");
  if (!(k2 > 0.0) || !(eps_m > 0.0) || !(eps_s > 0.0))
    raise(Errc::DomainViolation, "gains and epsilons must be positive");
}

namespace {

// Shared structure of both barriers: k * bump(x; lo, hi) / ((1+eps) x - lo * s(x/lo)).
// The denominator is at least eps * x for all x > lo, so the value is finite
// but grows like 1/eps near the inner knot.
double barrier_core(double x, double lo, double hi, double k, double eps, double eps_s) {
  double num = k * smooth_bump(x, SmoothBumpParams(lo, hi));
  double den = (1.0 + eps) * x - lo * arc_blend(x / lo, ArcBlendParams(eps_s));
  return num / den;
}

double barrier_core_deriv(double x, double lo, double hi, double k, double eps, double eps_s) {
  SmoothBumpParams bump(lo, hi);
  ArcBlendParams blend(eps_s);
  double num = k * smooth_bump(x, bump);
  double dnum = k * smooth_bump_deriv(x, bump);
  double den = (1.0 + eps) * x - lo * arc_blend(x / lo, blend);
  double dden = (1.0 + eps) - arc_blend_deriv(x / lo, blend);
  return (dnum * den - num * dden) / (den * den);
}

}  // namespace

double barrier_vm(double dist, const BarrierParams& p) {
  double lo = 2.0 * p.r_s, hi = p.r_a + p.r_s;
  if (dist <= lo) raise(Errc::DomainViolation, "distance at or below 2 r_s");
  if (dist >= hi) return 0.0;
  return barrier_core(dist, lo, hi, p.k2, p.eps_m, p.eps_s);
}

double barrier_vm_deriv(double dist, const BarrierParams& p) {
  double lo = 2.0 * p.r_s, hi = p.r_a + p.r_s;
  if (dist <= lo) raise(Errc::DomainViolation, "distance at or below 2 r_s");
  if (dist >= hi) return 0.0;
  return barrier_core_deriv(dist, lo, hi, p.k2, p.eps_m, p.eps_s);
}

double b_coefficient(Vec2 p_i, Vec2 p_j, const BarrierParams& p) {
  double dist = norm(p_i - p_j);
  if (dist >= p.r_a + p.r_s) return 0.0;
  return -barrier_vm_deriv(dist, p) / dist;
}

double barrier_vt(double d_t, double r_s_prime, double r_a, double k3, double eps_t,
                  double eps_s) {
  if (!(r_s_prime > 0.0) || !(r_a > r_s_prime))
    raise(Errc::DomainViolation, "need r_a > r_s_prime > 0");
  if (d_t <= r_s_prime) raise(Errc::DomainViolation, "clearance at or below r_s_prime");
  if (d_t >= r_a) return 0.0;
  return barrier_core(d_t, r_s_prime, r_a, k3, eps_t, eps_s);
}

double barrier_vt_deriv(double d_t, double r_s_prime, double r_a, double k3, double eps_t,
                        double eps_s) {
  if (!(r_s_prime > 0.0) || !(r_a > r_s_prime))
    raise(Errc::DomainViolation, "need r_a > r_s_prime > 0");
  if (d_t <= r_s_prime) raise(Errc::DomainViolation, "clearance at or below r_s_prime");
  if (d_t >= r_a) return 0.0;
  return barrier_core_deriv(d_t, r_s_prime, r_a, k3, eps_t, eps_s);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double z1 = 2.0, pp = 0.0;
    while (std::abs(z - z1) > 1e-15) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

PanelField::PanelField(Vec2 a_, Vec2 b_, double d_, double k3_, int order_)
    : a(a_), b(b_), d(d_), k3(k3_), order(order_) {
  if (!isfinite(a) || !isfinite(b)) raise(Errc::NonFinite, "panel endpoint not finite");
  if (norm(b - a) < 1e-12) raise(Errc::DegenerateTube, "zero-length panel");
  if (d < 0.0) raise(Errc::DomainViolation, "panel threshold must be nonnegative");
  if (order < 16) raise(Errc::DomainViolation, "quadrature order must be at least 16");
  gauss_legendre(order, nodes, weights);
}

namespace {

// The integrand varies on the scale of the gap between p and the log
// threshold, so a single rule over a long panel loses all accuracy near the
// walls. Split the panel at the foot of the perpendicular from p and grade
// the intervals geometrically toward it; the subdivision depends only on p
// and the panel, so results stay deterministic, and the gradient reuses the
// exact same nodes.
constexpr int kGradeLevels = 24;

template <typename Accum>
void panel_walk(Vec2 p, const PanelField& f, Accum&& add) {
  double len = norm(f.b - f.a);
  Vec2 u = (f.b - f.a) / len;
  double t0 = std::clamp(dot(p - f.a, u), 0.0, len);
  auto span = [&](double sgn, double length) {
    if (length <= 0.0) return;
    double hi = length;
    for (int k = 0; k < kGradeLevels; ++k) {
      double lo = (k + 1 == kGradeLevels) ? 0.0 : 0.5 * hi;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int i = 0; i < f.order; ++i) {
        double t = t0 + sgn * (mid + half * f.nodes[i]);
        add(half * f.weights[i], p - (f.a + t * u));
      }
      hi = lo;
    }
  };
  span(-1.0, t0);
  span(+1.0, len - t0);
}

}  // namespace

double panel_potential(Vec2 p, const PanelField& f) {
  if (segment_distance(p, f.a, f.b) - f.d <= 1e-12)
    raise(Errc::LogDomain, "point within the panel's log threshold");
  double acc = 0.0;
  panel_walk(p, f, [&](double w, Vec2 r) { acc += w * std::log(norm(r) - f.d); });
  return acc;
}

Vec2 panel_gradient(Vec2 p, const PanelField& f) {
  if (segment_distance(p, f.a, f.b) - f.d <= 1e-12)
    raise(Errc::LogDomain, "point within the panel's log threshold");
  Vec2 acc{0, 0};
  panel_walk(p, f, [&](double w, Vec2 r) {
    double rn = norm(r);
    acc += (w / (rn * (rn - f.d))) * r;
  });
  return acc;
}

double wall_potential(Vec2 p, const PanelField& f) { return -f.k3 * panel_potential(p, f); }

Vec2 wall_potential_gradient(Vec2 p, const PanelField& f) {
  return -f.k3 * panel_gradient(p, f);
}

DirectionGridResult direction_grid(const TrapezoidTube& tube, const PanelField& left,
                                   const PanelField& right, int grid_n, double wall_margin) {
  DirectionGridResult res;
  res.min_left = res.min_right = std::numeric_limits<double>::infinity();
  Vec2 dl = normalized(tube.p_sl - tube.p_fl);
  Vec2 dr = normalized(tube.p_sr - tube.p_fr);
  double height = dot(tube.t_c, 0.5 * (tube.p_fr + tube.p_fl) - 0.5 * (tube.p_sr + tube.p_sl));
  for (int i = 0; i < grid_n; ++i) {
    double xi = height * (i + 0.5) / grid_n;
    CrossSection cs = cross_section(tube, tube.p_sr + xi * tube.t_c);
    Vec2 across = normalized(cs.p_r - cs.p_l);
    for (int j = 0; j < grid_n; ++j) {
      double eta = -1.0 + 2.0 * (j + 0.5) / grid_n;
      Vec2 p = cs.m + (eta * cs.r_t) * across;
      double wall = std::min(std::abs(cross(dl, p - tube.p_fl)),
                             std::abs(cross(dr, p - tube.p_fr)));
      if (wall <= wall_margin) {
        ++res.skipped;
        continue;
      }
      ++res.evaluated;
      res.min_left = std::min(res.min_left, dot(tube.t_c, -wall_potential_gradient(p, left)));
      res.min_right = std::min(res.min_right, dot(tube.t_c, -wall_potential_gradient(p, right)));
    }
  }
  return res;
}

ExtendedBoundary extend_boundaries(const TrapezoidTube& tube, double lambda0, double r_s,
                                   double k3, int grid_n, int order) {
  if (!(lambda0 >= 1.0)) raise(Errc::DomainViolation, "lambda0 must be at least 1");
  if (!(r_s > 0.0)) raise(Errc::DomainViolation, "r_s must be positive");
  Vec2 ul = normalized(tube.p_sl - tube.p_fl);
  Vec2 ur = normalized(tube.p_sr - tube.p_fr);
  double len_l = norm(tube.p_sl - tube.p_fl);
  double len_r = norm(tube.p_sr - tube.p_fr);
  double lambda = lambda0;
  const double cap = 64.0;
  for (;;) {
    ExtendedBoundary ext{
        tube.p_fl, tube.p_sl + (lambda * len_l) * ul,
        tube.p_fr, tube.p_sr + (lambda * len_r) * ur,
        lambda,
        PanelField(tube.p_fl, tube.p_sl + (lambda * len_l) * ul, r_s, k3, order),
        PanelField(tube.p_fr, tube.p_sr + (lambda * len_r) * ur, r_s, k3, order),
    };
    DirectionGridResult grid = direction_grid(tube, ext.left, ext.right, grid_n, r_s + 1e-6);
    if (grid.evaluated == 0)
      raise(Errc::ConstraintUnsatisfiable, "no interior nodes outside the wall margin");
    if (grid.pass()) return ext;
    if (lambda >= cap)
      raise(Errc::ConstraintUnsatisfiable,
            "directional constraints still fail at the extension cap");
    lambda = std::min(2.0 * lambda, cap);
  }
}

Vec2 keeping_gradient(const TrapezoidTube& tube, Vec2 p, double r_s_prime, double r_a,
                      double k3, double eps_t, double eps_s) {
  CrossSection cs = cross_section(tube, p);
  double dist_m = norm(p - cs.m);
  double d_t = cs.r_t - dist_m;
  if (d_t <= r_s_prime) raise(Errc::DomainViolation, "clearance at or below r_s_prime");
  if (d_t >= r_a) return {0, 0};
  if (dist_m <= 1e-12) return {0, 0};  // centerline: kink of |p - m|, zero by convention

  double dv = barrier_vt_deriv(d_t, r_s_prime, r_a, k3, eps_t, eps_s);

  // r_t and m are affine in the axis coordinate; differentiate the leg-line
  // intersections directly.
  Vec2 leg_l = tube.p_sl - tube.p_fl;
  Vec2 leg_r = tube.p_sr - tube.p_fr;
  Vec2 dpl = leg_l / dot(tube.t_c, leg_l);
  Vec2 dpr = leg_r / dot(tube.t_c, leg_r);
  Vec2 mprime = 0.5 * (dpl + dpr);
  Vec2 across = normalized(cs.p_r - cs.p_l);
  double rtprime = 0.5 * dot(across, dpr - dpl);

  Vec2 e = (p - cs.m) / dist_m;
  // grad d_t = grad r_t - grad |p - m|
  Vec2 g = rtprime * tube.t_c - (e - dot(e, mprime) * tube.t_c);
  return dv * g;
}

Vec2 modified_keeping_term(const TrapezoidTube& tube, Vec2 p, double r_s_prime, double r_a,
                           double k3, double eps_t, double eps_s) {
  Vec2 c = keeping_gradient(tube, p, r_s_prime, r_a, k3, eps_t, eps_s);
  Vec2 projected = c - dot(tube.t_c, c) * tube.t_c;
  return -projected;
}

}  // namespace tube
