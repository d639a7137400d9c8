#include "tube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tube {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonParallelBases: return "NonParallelBases";
    case Errc::DegenerateTube: return "DegenerateTube";
    case Errc::DegenerateLegAngle: return "DegenerateLegAngle";
    case Errc::OutOfSlab: return "OutOfSlab";
    case Errc::OutsideTube: return "OutsideTube";
    case Errc::InvalidIndex: return "InvalidIndex";
    case Errc::InvalidChain: return "InvalidChain";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::LogDomain: return "LogDomain";
    case Errc::ConstraintUnsatisfiable: return "ConstraintUnsatisfiable";
    case Errc::SafetyBreach: return "SafetyBreach";
    case Errc::TubeBreach: return "TubeBreach";
    case Errc::WrongLogic: return "WrongLogic";
    case Errc::NonFinite: return "NonFinite";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

constexpr double kParallelTol = 1e-6;  // rad
constexpr double kAreaTol = 1e-12;     // m^2

// Signed double-area of a simple quadrilateral; also checks strict convexity
// (no collinear corners, no crossing edges).
double convex_quad_area2(const std::array<Vec2, 4>& v, Errc on_fail, const char* what) {
  double area2 = 0.0;
  for (int i = 0; i < 4; ++i) area2 += cross(v[i], v[(i + 1) % 4]);
  if (std::abs(area2) < 2.0 * kAreaTol) raise(on_fail, std::string(what) + ": zero area");
  double sgn = area2 > 0 ? 1.0 : -1.0;
  for (int i = 0; i < 4; ++i) {
    Vec2 e0 = v[(i + 1) % 4] - v[i];
    Vec2 e1 = v[(i + 2) % 4] - v[(i + 1) % 4];
    if (sgn * cross(e0, e1) <= 0.0)
      raise(on_fail, std::string(what) + ": not strictly convex");
  }
  return area2;
}

}  // namespace

TrapezoidTube build_trapezoid(Vec2 p_fr, Vec2 p_fl, Vec2 p_sl, Vec2 p_sr) {
  std::array<Vec2, 4> v{p_fr, p_fl, p_sl, p_sr};
  for (const Vec2& p : v)
    if (!isfinite(p)) raise(Errc::NonFinite, "trapezoid vertex not finite");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (norm(v[i] - v[j]) < 1e-12) raise(Errc::DegenerateTube, "coincident vertices");

  Vec2 u_f = p_fl - p_fr;
  Vec2 u_s = p_sl - p_sr;
  double len_f = norm(u_f), len_s = norm(u_s);
  if (len_f < 1e-12 || len_s < 1e-12) raise(Errc::DegenerateTube, "zero-length base");
  Vec2 uf = u_f / len_f, us = u_s / len_s;
  if (std::abs(cross(uf, us)) > kParallelTol)
    raise(Errc::NonParallelBases, "bases not parallel");

  convex_quad_area2(v, Errc::DegenerateTube, "trapezoid");

  TrapezoidTube t;
  t.p_fr = p_fr;
  t.p_fl = p_fl;
  t.p_sl = p_sl;
  t.p_sr = p_sr;

  Vec2 n = perp(uf);  // unit, orthogonal to both bases
  Vec2 cf = 0.5 * (p_fr + p_fl), cs = 0.5 * (p_sr + p_sl);
  double h = dot(n, cf - cs);
  if (std::abs(h) < 1e-12) raise(Errc::DegenerateTube, "bases on one line");
  t.t_c = (h > 0) ? n : -n;

  Vec2 centroid = 0.25 * (p_fr + p_fl + p_sl + p_sr);
  Vec2 dl = p_sl - p_fl, dr = p_sr - p_fr;
  t.n_l = normalized(perp(dl));
  if (dot(t.n_l, centroid - p_fl) < 0) t.n_l = -t.n_l;
  t.n_r = normalized(perp(dr));
  if (dot(t.n_r, centroid - p_fr) < 0) t.n_r = -t.n_r;

  t.cos_l = std::abs(dot(t.t_c, normalized(dl)));
  t.cos_r = std::abs(dot(t.t_c, normalized(dr)));
  return t;
}

bool TrapezoidTube::contains(const Vec2& p, double tol) const {
  return dot(n_l, p - p_fl) >= -tol && dot(n_r, p - p_fr) >= -tol &&
         dot(t_c, p - p_fr) <= tol && dot(t_c, p - p_sr) >= -tol;
}

CrossSection cross_section(const TrapezoidTube& tube, const Vec2& p) {
  if (dot(tube.t_c, p - tube.p_sr) < -1e-9 || dot(tube.t_c, p - tube.p_fr) > 1e-9)
    raise(Errc::OutOfSlab, "point outside the base-to-base slab");
  Vec2 dl = tube.p_sl - tube.p_fl, dr = tube.p_sr - tube.p_fr;
  double s_l = dot(tube.t_c, p - tube.p_fl) / dot(tube.t_c, dl);
  double s_r = dot(tube.t_c, p - tube.p_fr) / dot(tube.t_c, dr);
  CrossSection cs;
  cs.p_l = tube.p_fl + s_l * dl;
  cs.p_r = tube.p_fr + s_r * dr;
  cs.m = 0.5 * (cs.p_l + cs.p_r);
  cs.r_t = 0.5 * norm(cs.p_r - cs.p_l);
  return cs;
}

double tube_width(const TrapezoidTube& tube) {
  return 0.5 * std::min(norm(tube.p_fl - tube.p_fr), norm(tube.p_sl - tube.p_sr));
}

double boundary_distance(const TrapezoidTube& tube, const Vec2& p) {
  if (!tube.contains(p, 1e-9)) raise(Errc::OutsideTube, "point outside the tube");
  double d_l = std::abs(cross(normalized(tube.p_sl - tube.p_fl), p - tube.p_fl));
  double d_r = std::abs(cross(normalized(tube.p_sr - tube.p_fr), p - tube.p_fr));
  return std::min(d_l, d_r);
}

double revised_safety_radius(const TrapezoidTube& tube, double r_s) {
  double mc = std::min(tube.cos_l, tube.cos_r);
  if (mc <= 1e-9) raise(Errc::DegenerateLegAngle, "leg nearly orthogonal to the axis");
  return r_s / mc;
}

double section_clearance(const TrapezoidTube& tube, const Vec2& p) {
  CrossSection cs = cross_section(tube, p);
  return cs.r_t - norm(p - cs.m);
}

namespace {

// Intersect the line through `through` orthogonal to `axis` with the line
// through `anchor` in direction `dir`. dot(axis, dir) must be nonzero.
Vec2 axis_cut(Vec2 axis, Vec2 through, Vec2 anchor, Vec2 dir) {
  double denom = dot(axis, dir);
  double s = dot(axis, through - anchor) / denom;
  return anchor + s * dir;
}

// Separating-axis test for two convex polygons. Returns true when some edge
// normal separates them with at most `tol` interpenetration.
bool convex_separated(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b, double tol) {
  auto try_axes = [&](const std::array<Vec2, 4>& poly) {
    for (int i = 0; i < 4; ++i) {
      Vec2 n = normalized(perp(poly[(i + 1) % 4] - poly[i]));
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (int k = 0; k < 4; ++k) {
        amin = std::min(amin, dot(n, a[k]));
        amax = std::max(amax, dot(n, a[k]));
        bmin = std::min(bmin, dot(n, b[k]));
        bmax = std::max(bmax, dot(n, b[k]));
      }
      if (bmin >= amax - tol || amin >= bmax - tol) return true;
    }
    return false;
  };
  return try_axes(a) || try_axes(b);
}

}  // namespace

QuadrangleChain QuadrangleChain::build(const std::vector<BaseSegment>& bases) {
  if (bases.size() < 2) raise(Errc::InvalidChain, "need at least two base segments");
  for (const auto& b : bases) {
    if (!isfinite(b.right) || !isfinite(b.left))
      raise(Errc::NonFinite, "base endpoint not finite");
    if (norm(b.left - b.right) < 1e-12) raise(Errc::InvalidChain, "zero-length base");
  }

  QuadrangleChain chain;
  chain.bases_ = bases;
  const int n = static_cast<int>(bases.size()) - 1;
  chain.quads_.resize(n);

  for (int q = 1; q <= n; ++q) {
    Quad& quad = chain.quads_[q - 1];
    quad.v = {bases[q].right, bases[q].left, bases[q - 1].left, bases[q - 1].right};
    double area2 =
        convex_quad_area2(quad.v, Errc::InvalidChain, ("quadrangle " + std::to_string(q)).c_str());
    if (area2 < 0)
      raise(Errc::InvalidChain,
            "quadrangle " + std::to_string(q) + " is clockwise; left/right endpoints swapped");

    Vec2 uf = normalized(bases[q].left - bases[q].right);
    Vec2 t = perp(uf);
    Vec2 cf = 0.5 * (bases[q].right + bases[q].left);
    Vec2 cp = 0.5 * (bases[q - 1].right + bases[q - 1].left);
    double h = dot(t, cf - cp);
    if (std::abs(h) < 1e-12) raise(Errc::InvalidChain, "consecutive bases on one line");
    quad.t_c = (h > 0) ? t : -t;

    // The previous base must sit strictly behind the finishing base line.
    if (dot(quad.t_c, bases[q - 1].left - bases[q].right) > -1e-9 ||
        dot(quad.t_c, bases[q - 1].right - bases[q].right) > -1e-9)
      raise(Errc::InvalidChain,
            "base " + std::to_string(q - 1) + " reaches past the finishing base of quadrangle " +
                std::to_string(q));
  }

  // Quadrangle 1 must be a trapezoid.
  {
    Vec2 u0 = normalized(bases[0].left - bases[0].right);
    Vec2 u1 = normalized(bases[1].left - bases[1].right);
    if (std::abs(cross(u0, u1)) > kParallelTol)
      raise(Errc::InvalidChain, "first quadrangle must have parallel bases");
  }

  for (int q = 1; q <= n; ++q)
    for (int r = q + 2; r <= n; ++r)
      if (!convex_separated(chain.quads_[q - 1].v, chain.quads_[r - 1].v, 1e-9))
        raise(Errc::InvalidChain, "quadrangles " + std::to_string(q) + " and " +
                                      std::to_string(r) + " overlap");

  for (int q = 1; q <= n; ++q) {
    Quad& quad = chain.quads_[q - 1];
    QuadrangleDecomposition& d = quad.decomp;
    const Vec2 r_q = bases[q].right, l_q = bases[q].left;
    const Vec2 r_p = bases[q - 1].right, l_p = bases[q - 1].left;

    if (q == 1) {
      TrapezoidTube t = build_trapezoid(r_q, l_q, l_p, r_p);
      d.inscribed = t;
      d.circumscribed = t;
      d.bottom.reset();
      d.p_sl_cut = l_p;
      d.p_sr_cut = r_p;
    } else {
      const Vec2 t = quad.t_c;
      const Vec2 t_prev = chain.quads_[q - 2].t_c;
      const Vec2 dl = l_p - l_q, dr = r_p - r_q;  // leg directions, finish -> start
      double da = dot(t, l_p - r_q);
      double db = dot(t, r_p - r_q);
      Vec2 shallow = (da >= db) ? l_p : r_p;
      Vec2 deep = (da >= db) ? r_p : l_p;

      d.p_sl_cut = axis_cut(t, shallow, l_q, dl);
      d.p_sr_cut = axis_cut(t, shallow, r_q, dr);
      d.inscribed = build_trapezoid(r_q, l_q, d.p_sl_cut, d.p_sr_cut);
      d.circumscribed =
          build_trapezoid(r_q, l_q, axis_cut(t, deep, l_q, dl), axis_cut(t, deep, r_q, dr));

      bool same_axis = std::abs(cross(t, t_prev)) <= 1e-9 && dot(t, t_prev) > 0;
      if (same_axis) {
        d.bottom.reset();
      } else {
        double dsl = dot(t_prev, d.p_sl_cut), dsr = dot(t_prev, d.p_sr_cut);
        Vec2 far_cut = (dsl >= dsr) ? d.p_sl_cut : d.p_sr_cut;
        Vec2 near_cut = (dsl >= dsr) ? d.p_sr_cut : d.p_sl_cut;
        Vec2 f_l = axis_cut(t_prev, far_cut, l_q, dl);
        Vec2 f_r = axis_cut(t_prev, far_cut, r_q, dr);
        Vec2 n_l = axis_cut(t_prev, near_cut, l_q, dl);
        Vec2 n_r = axis_cut(t_prev, near_cut, r_q, dr);
        // Legs pair (f_l, n_l) on the quadrangle's left leg line and
        // (f_r, n_r) on the right one; the far slab line is the finishing
        // base, so the derived axis points along +t_prev.
        d.bottom = build_trapezoid(f_l, f_r, n_r, n_l);
      }
    }
    quad.min_cos = std::min(d.circumscribed.cos_l, d.circumscribed.cos_r);
  }

  return chain;
}

const QuadrangleChain::BaseSegment& QuadrangleChain::base(int q) const {
  if (q < 0 || q >= static_cast<int>(bases_.size()))
    raise(Errc::InvalidIndex, "base index out of range");
  return bases_[q];
}

const std::array<Vec2, 4>& QuadrangleChain::quad_vertices(int q) const {
  if (q < 1 || q > count()) raise(Errc::InvalidIndex, "quadrangle index out of range");
  return quads_[q - 1].v;
}

Vec2 QuadrangleChain::axis(int q) const {
  if (q < 1 || q > count()) raise(Errc::InvalidIndex, "quadrangle index out of range");
  return quads_[q - 1].t_c;
}

bool QuadrangleChain::quad_contains(int q, const Vec2& p, double tol) const {
  if (q < 1 || q > count()) raise(Errc::InvalidIndex, "quadrangle index out of range");
  const auto& v = quads_[q - 1].v;
  for (int i = 0; i < 4; ++i) {
    Vec2 e = normalized(v[(i + 1) % 4] - v[i]);
    if (cross(e, p - v[i]) < -tol) return false;
  }
  return true;
}

const QuadrangleDecomposition& QuadrangleChain::decomposition(int q) const {
  if (q < 1 || q > count()) raise(Errc::InvalidIndex, "quadrangle index out of range");
  return quads_[q - 1].decomp;
}

double QuadrangleChain::min_leg_cos(int q) const {
  if (q < 1 || q > count()) raise(Errc::InvalidIndex, "quadrangle index out of range");
  return quads_[q - 1].min_cos;
}

Located QuadrangleChain::locate(const Vec2& p, double tol) const {
  for (int q = count(); q >= 1; --q) {
    if (!quad_contains(q, p, tol)) continue;
    const QuadrangleDecomposition& d = quads_[q - 1].decomp;
    if (!d.bottom || d.inscribed.contains(p, tol)) return {q, Region::InscribedRegion};
    return {q, Region::BottomRegion};
  }
  return {0, Region::Outside};
}

double QuadrangleChain::wall_distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (int q = 1; q <= count(); ++q) {
    best = std::min(best, segment_distance(p, bases_[q - 1].left, bases_[q].left));
    best = std::min(best, segment_distance(p, bases_[q - 1].right, bases_[q].right));
  }
  return best;
}

}  // namespace tube
