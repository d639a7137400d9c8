#pragma once
// Planar corridor geometry: trapezoid tubes, cross sections, quadrangle chains,
// and the per-quadrangle trapezoid decomposition used by the guidance logic.
// All values are immutable after construction and safe to share across threads.

#include <array>
#include <optional>
#include <vector>

#include "tube/errors.hpp"
#include "tube/vec2.hpp"

namespace tube {

// Convex corridor segment with two parallel bases. The finishing base is the
// goal line [p_fr, p_fl]; the starting base is [p_sr, p_sl]. The unit axis t_c
// is orthogonal to both bases and points from the starting base toward the
// finishing base, so interior points satisfy t_c.(x - p_fr) <= 0. n_l and n_r
// are the unit inward normals of the left and right legs.
struct TrapezoidTube {
  Vec2 p_fr, p_fl, p_sl, p_sr;
  Vec2 t_c;
  Vec2 n_l, n_r;
  double cos_l = 1.0;  // |cos| of the left leg's angle against t_c
  double cos_r = 1.0;

  // Halfplane membership, boundary inclusive; tol widens the set by tol meters.
  bool contains(const Vec2& p, double tol = 0.0) const;
};

// Validates vertices (distinct, parallel bases within 1e-6 rad, convex, area
// > 1e-12 m^2) and derives the axis and inward normals. Never clamps inputs.
TrapezoidTube build_trapezoid(Vec2 p_fr, Vec2 p_fl, Vec2 p_sl, Vec2 p_sr);

// Tube slice through p, orthogonal to t_c.
struct CrossSection {
  Vec2 p_l, p_r;  // intersections with the left/right leg lines
  Vec2 m;         // midpoint
  double r_t;     // half-width
};

CrossSection cross_section(const TrapezoidTube& tube, const Vec2& p);

// Infimum of the section half-width: the smaller base half-length.
double tube_width(const TrapezoidTube& tube);

// Distance from an interior point to the nearer leg supporting line.
double boundary_distance(const TrapezoidTube& tube, const Vec2& p);

// r_s inflated by the worst leg angle: r_s / min(cos_l, cos_r). A clearance
// test in the cross-section frame against this radius implies true Euclidean
// wall clearance of at least r_s.
double revised_safety_radius(const TrapezoidTube& tube, double r_s);

// Clearance in the cross-section frame: r_t(p) - |p - m(p)|.
double section_clearance(const TrapezoidTube& tube, const Vec2& p);

// The three trapezoids a chain quadrangle is split into so the trapezoid
// controller can be reused across turns. bottom is absent exactly when the
// quadrangle's axis equals the previous one (within 1e-9 rad).
struct QuadrangleDecomposition {
  TrapezoidTube inscribed;
  TrapezoidTube circumscribed;
  std::optional<TrapezoidTube> bottom;
  Vec2 p_sl_cut, p_sr_cut;  // inscribed starting-base endpoints on the leg lines
};

enum class Region { InscribedRegion, BottomRegion, Outside };

struct Located {
  int q = 0;  // 1-based quadrangle index; 0 when outside
  Region region = Region::Outside;
};

// Chain of convex quadrangles sharing bases end to end. Base q is the segment
// [right(q), left(q)] for q = 0..N; quadrangle q (1-based) is spanned by bases
// q-1 and q. Quadrangle 1 must be a trapezoid. Left/right are as seen facing
// the travel direction, which makes each quadrangle's vertex loop
// (right_q, left_q, left_{q-1}, right_{q-1}) counterclockwise.
class QuadrangleChain {
 public:
  struct BaseSegment {
    Vec2 right, left;
  };

  static QuadrangleChain build(const std::vector<BaseSegment>& bases);

  int count() const { return static_cast<int>(quads_.size()); }  // N
  const BaseSegment& base(int q) const;                          // q = 0..N
  const std::array<Vec2, 4>& quad_vertices(int q) const;         // ccw, q = 1..N
  Vec2 axis(int q) const;                                        // t_c of quadrangle q
  bool quad_contains(int q, const Vec2& p, double tol = 0.0) const;
  const QuadrangleDecomposition& decomposition(int q) const;
  // min leg |cos| of quadrangle q's legs against axis(q); shared by the
  // inscribed and circumscribed trapezoids, which reuse those legs.
  double min_leg_cos(int q) const;

  // Finds the quadrangle containing p and whether p lies in its inscribed
  // trapezoid or in the remainder. A point on a shared base belongs to the
  // later quadrangle (the scan runs from N down to 1).
  Located locate(const Vec2& p, double tol = 1e-9) const;

  // Distance from p to the nearest leg segment over all quadrangles (the
  // chain's side walls; the start/finish bases are not walls).
  double wall_distance(const Vec2& p) const;

 private:
  std::vector<BaseSegment> bases_;
  struct Quad {
    std::array<Vec2, 4> v;  // ccw: right_q, left_q, left_{q-1}, right_{q-1}
    Vec2 t_c;
    double min_cos = 1.0;
    QuadrangleDecomposition decomp;
  };
  std::vector<Quad> quads_;
};

}  // namespace tube
