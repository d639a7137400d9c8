#include "tube/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace tube {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double unif(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double unif(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unif(rng); }

std::string fmt_point(Vec2 p) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", p.x, p.y);
  return buf;
}

// Random rotated/translated trapezoid with bounded leg slant, so the revised
// radius stays within a factor ~2 of r_s and clearances are exercisable.
TrapezoidTube random_trapezoid(std::mt19937_64& rng) {
  for (;;) {
    double len = unif(rng, 3.0, 8.0);
    double w_f = unif(rng, 0.8, 2.0);
    double w_s = unif(rng, 0.8, 2.0);
    double ang = unif(rng, 0.0, 6.283185307179586);
    Vec2 shift{unif(rng, -5.0, 5.0), unif(rng, -5.0, 5.0)};
    double c = std::cos(ang), s = std::sin(ang);
    auto place = [&](double x, double y) -> Vec2 {
      return {shift.x + c * x - s * y, shift.y + s * x + c * y};
    };
    TrapezoidTube tube = build_trapezoid(place(len, -w_f), place(len, w_f), place(0, w_s),
                                         place(0, -w_s));
    if (std::min(tube.cos_l, tube.cos_r) >= 0.6) return tube;
  }
}

// Uniform interior sample by rejection from the vertex bounding box.
Vec2 interior_sample(const TrapezoidTube& tube, std::mt19937_64& rng) {
  double lo_x = std::min({tube.p_fr.x, tube.p_fl.x, tube.p_sl.x, tube.p_sr.x});
  double hi_x = std::max({tube.p_fr.x, tube.p_fl.x, tube.p_sl.x, tube.p_sr.x});
  double lo_y = std::min({tube.p_fr.y, tube.p_fl.y, tube.p_sl.y, tube.p_sr.y});
  double hi_y = std::max({tube.p_fr.y, tube.p_fl.y, tube.p_sl.y, tube.p_sr.y});
  for (;;) {
    Vec2 p{unif(rng, lo_x, hi_x), unif(rng, lo_y, hi_y)};
    if (tube.contains(p, 0.0)) return p;
  }
}

struct WorstRel {
  double rel = 0.0;
  double abs = 0.0;
  std::string input;
  void feed(double abs_err, double rel_err, const std::string& where) {
    abs = std::max(abs, abs_err);
    if (rel_err > rel) {
      rel = rel_err;
      input = where;
    }
  }
};

OracleReport finish(std::string name, int cases, const WorstRel& w, double rel_tol) {
  OracleReport rep;
  rep.name = std::move(name);
  rep.cases = cases;
  rep.max_abs_err = w.abs;
  rep.max_rel_err = w.rel;
  rep.worst_input = w.input;
  rep.pass = w.rel <= rel_tol;
  return rep;
}

}  // namespace

Vec2 fd_gradient_oracle(const std::function<double(Vec2)>& field, Vec2 p, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) raise(Errc::DomainViolation, "step must be positive");
  double fxp = field({p.x + h, p.y});
  double fxm = field({p.x - h, p.y});
  double fyp = field({p.x, p.y + h});
  double fym = field({p.x, p.y - h});
  if (!std::isfinite(fxp) || !std::isfinite(fxm) || !std::isfinite(fyp) ||
      !std::isfinite(fym))
    raise(Errc::NonFinite, "field not finite within a step of " + fmt_point(p));
  return {(fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)};
}

OracleReport wall_safety_oracle(const TrapezoidTube& tube, double r_s, int n_samples,
                                std::uint64_t seed, bool seeded_wrong, double band) {
  if (!(r_s > 0.0)) raise(Errc::DomainViolation, "r_s must be positive");
  std::mt19937_64 rng(seed);
  const double threshold = seeded_wrong ? r_s : revised_safety_radius(tube, r_s);

  OracleReport rep;
  rep.name = seeded_wrong ? "wall-safety (seeded wrong radius)" : "wall-safety";
  int disagreements = 0;
  for (int k = 0; k < n_samples; ++k) {
    Vec2 p = interior_sample(tube, rng);
    double d_t = section_clearance(tube, p);
    double exact = std::min(segment_distance(p, tube.p_fl, tube.p_sl),
                            segment_distance(p, tube.p_fr, tube.p_sr));
    if (std::abs(d_t - threshold) <= band || std::abs(exact - r_s) <= band) continue;
    ++rep.cases;
    if (d_t > threshold && exact < r_s) {
      ++disagreements;
      double depth = r_s - exact;
      if (depth > rep.max_abs_err) {
        rep.max_abs_err = depth;
        rep.worst_input = "p=" + fmt_point(p);
      }
    }
  }
  rep.max_rel_err = rep.cases > 0 ? static_cast<double>(disagreements) / rep.cases : 0.0;
  rep.pass = disagreements == 0;
  return rep;
}

OracleReport direction_constraint_sampler(const TrapezoidTube& tube,
                                          const ExtendedBoundary& extended, int grid_n) {
  if (grid_n < 2) raise(Errc::DomainViolation, "grid must be at least 2 per side");
  OracleReport rep;
  rep.name = "direction-constraints";
  const double margin = extended.left.d + 1e-6;
  const double height =
      dot(tube.t_c, 0.5 * (tube.p_fr + tube.p_fl) - 0.5 * (tube.p_sr + tube.p_sl));
  double worst = kInf;
  for (int i = 0; i < grid_n; ++i) {
    double xi = height * (i + 0.5) / grid_n;
    CrossSection cs = cross_section(tube, tube.p_sr + xi * tube.t_c);
    Vec2 across = normalized(cs.p_r - cs.p_l);
    for (int j = 0; j < grid_n; ++j) {
      double eta = -1.0 + 2.0 * (j + 0.5) / grid_n;
      Vec2 p = cs.m + (eta * cs.r_t) * across;
      if (std::min(segment_distance(p, extended.left.a, extended.left.b),
                   segment_distance(p, extended.right.a, extended.right.b)) <= margin)
        continue;
      ++rep.cases;
      double fwd_l = dot(tube.t_c, -wall_potential_gradient(p, extended.left));
      double fwd_r = dot(tube.t_c, -wall_potential_gradient(p, extended.right));
      double local = std::min(fwd_l, fwd_r);
      if (local < worst) {
        worst = local;
        rep.worst_input = "p=" + fmt_point(p);
      }
    }
  }
  if (rep.cases == 0) {
    rep.pass = false;
    rep.worst_input = "no nodes outside the exclusion zone";
    return rep;
  }
  rep.max_abs_err = std::max(0.0, -worst);
  rep.pass = worst >= -1e-12;
  return rep;
}

OracleReport lyapunov_monotonicity_check(const SimulationTrace& trace) {
  if (trace.logic != Logic::SingleTrapezoidV1)
    raise(Errc::WrongLogic, "energy scan needs a gradient-flow trace");
  OracleReport rep;
  rep.name = "energy-monotonicity";
  rep.cases = static_cast<int>(trace.energy.size());
  if (rep.cases == 0) {
    rep.pass = false;
    rep.worst_input = "no samples";
    return rep;
  }
  double worst = -kInf;
  for (const LyapunovSample& s : trace.energy) {
    if (s.rate > worst) {
      worst = s.rate;
      char buf[64];
      std::snprintf(buf, sizeof buf, "t=%.6f rate=%.6e", s.t, s.rate);
      rep.worst_input = buf;
    }
  }
  rep.max_abs_err = std::max(0.0, worst);
  rep.pass = worst <= 1e-6;
  return rep;
}

std::vector<OracleReport> gradient_oracle_suite(int cases, std::uint64_t seed,
                                                bool seeded_wrong) {
  const double skew = seeded_wrong ? 1.01 : 1.0;
  std::vector<OracleReport> out;
  const double h = 1e-6;
  const double rel_tol = 1e-5;

  // Pair-barrier coefficient: b(p_i, p_j) (p_i - p_j) must equal the negative
  // gradient of the pair barrier in the first argument.
  {
    std::mt19937_64 rng(seed);
    WorstRel w;
    for (int k = 0; k < cases; ++k) {
      double r_s = unif(rng, 0.1, 0.5);
      double r_a = unif(rng, 1.6 * r_s, 3.0 * r_s);
      BarrierParams bp(unif(rng, 0.5, 2.0), r_s, r_a, 1e-6, 1e-6);
      Vec2 p_j{unif(rng, -3.0, 3.0), unif(rng, -3.0, 3.0)};
      double support = (r_a + r_s) - 2.0 * r_s;
      double dist = unif(rng, 2.0 * r_s + 0.05 * support, 2.0 * r_s + 0.85 * support);
      double ang = unif(rng, 0.0, 6.283185307179586);
      Vec2 p_i = p_j + dist * Vec2{std::cos(ang), std::sin(ang)};

      Vec2 analytic = -skew * b_coefficient(p_i, p_j, bp) * (p_i - p_j);
      Vec2 fd = fd_gradient_oracle(
          [&](Vec2 q) { return barrier_vm(norm(q - p_j), bp); }, p_i, h);
      double abs_err = norm(fd - analytic);
      w.feed(abs_err, abs_err / std::max(norm(analytic), 1e-9),
             "p_i=" + fmt_point(p_i) + " p_j=" + fmt_point(p_j));
    }
    out.push_back(finish("pair-barrier-gradient", cases, w, rel_tol));
  }

  // Panel gradient: differentiation under the integral sign versus central
  // differences of the panel potential.
  {
    std::mt19937_64 rng(seed + 1);
    WorstRel w;
    for (int k = 0; k < cases; ++k) {
      Vec2 a{unif(rng, -4.0, 4.0), unif(rng, -4.0, 4.0)};
      double ang = unif(rng, 0.0, 6.283185307179586);
      Vec2 b = a + unif(rng, 1.0, 6.0) * Vec2{std::cos(ang), std::sin(ang)};
      PanelField f(a, b, unif(rng, 0.1, 0.4), unif(rng, 0.5, 2.0));
      Vec2 p;
      do {
        p = {unif(rng, std::min(a.x, b.x) - 2.0, std::max(a.x, b.x) + 2.0),
             unif(rng, std::min(a.y, b.y) - 2.0, std::max(a.y, b.y) + 2.0)};
      } while (segment_distance(p, a, b) < f.d + 0.05);

      Vec2 analytic = skew * panel_gradient(p, f);
      Vec2 fd = fd_gradient_oracle([&](Vec2 q) { return panel_potential(q, f); }, p, h);
      double abs_err = norm(fd - analytic);
      w.feed(abs_err, abs_err / std::max(norm(analytic), 1e-9), "p=" + fmt_point(p));
    }
    out.push_back(finish("panel-gradient", cases, w, rel_tol));
  }

  // Wall-barrier derivative, checked through the same 2-D stencil with the
  // clearance riding on the x coordinate.
  {
    std::mt19937_64 rng(seed + 2);
    WorstRel w;
    for (int k = 0; k < cases; ++k) {
      double rp = unif(rng, 0.1, 0.6);
      double r_a = rp + unif(rng, 0.2, 1.0);
      double k3 = unif(rng, 0.5, 2.0);
      double span = r_a - rp;
      double d_t = rp + unif(rng, 0.03, 0.95) * span;

      double analytic = skew * barrier_vt_deriv(d_t, rp, r_a, k3, 1e-6, 1e-6);
      Vec2 fd = fd_gradient_oracle(
          [&](Vec2 q) { return barrier_vt(q.x, rp, r_a, k3, 1e-6, 1e-6); }, {d_t, 0.0}, h);
      double abs_err = std::abs(fd.x - analytic);
      char buf[96];
      std::snprintf(buf, sizeof buf, "d_t=%.17g rp=%.6g r_a=%.6g", d_t, rp, r_a);
      w.feed(abs_err, abs_err / std::max(std::abs(analytic), 1e-9), buf);
    }
    out.push_back(finish("wall-barrier-derivative", cases, w, rel_tol));
  }

  // Unprojected wall-keeping gradient on random tubes, versus differencing
  // the barrier of the section clearance directly.
  {
    std::mt19937_64 rng(seed + 3);
    WorstRel w;
    for (int k = 0; k < cases; ++k) {
      TrapezoidTube tube = random_trapezoid(rng);
      double rp = revised_safety_radius(tube, unif(rng, 0.1, 0.3));
      double r_a = rp + unif(rng, 0.3, 0.8);
      double k3 = unif(rng, 0.5, 2.0);

      // Aim for a clearance well inside the barrier support, off-centerline.
      Vec2 p;
      double d_t;
      for (;;) {
        p = interior_sample(tube, rng);
        CrossSection cs = cross_section(tube, p);
        double off = norm(p - cs.m);
        d_t = cs.r_t - off;
        double span = r_a - rp;
        if (off > 0.05 && d_t > rp + 0.05 * span && d_t < r_a - 0.05 * span) break;
      }

      Vec2 analytic = skew * keeping_gradient(tube, p, rp, r_a, k3, 1e-6, 1e-6);
      Vec2 fd = fd_gradient_oracle(
          [&](Vec2 q) {
            return barrier_vt(section_clearance(tube, q), rp, r_a, k3, 1e-6, 1e-6);
          },
          p, h);
      double abs_err = norm(fd - analytic);
      w.feed(abs_err, abs_err / std::max(norm(analytic), 1e-9), "p=" + fmt_point(p));
    }
    out.push_back(finish("keeping-gradient", cases, w, rel_tol));
  }

  return out;
}

OracleReport goal_term_quadrature_oracle(int cases, std::uint64_t seed, bool seeded_wrong) {
  std::mt19937_64 rng(seed);
  WorstRel w;
  for (int k = 0; k < cases; ++k) {
    double k1 = unif(rng, 0.3, 3.0);
    double a = unif(rng, 0.5, 3.0);
    double len = unif(rng, 0.0, 3.0) * a / k1;
    double ang = unif(rng, 0.0, 6.283185307179586);
    Vec2 y = len * Vec2{std::cos(ang), std::sin(ang)};

    // Composite Simpson on each smooth piece of min(k1 s, a); both pieces are
    // polynomial, so the rule is exact up to rounding.
    auto simpson = [](double lo, double hi, const std::function<double(double)>& f) {
      const int n = 64;
      double sum = f(lo) + f(hi);
      double step = (hi - lo) / n;
      for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * step);
      return sum * step / 3.0;
    };
    auto speed = [&](double s) { return std::min(k1 * s, a); };
    double split = std::min(a / k1, len);
    double quad = simpson(0.0, split, speed) + simpson(split, len, speed);

    double closed =
        seeded_wrong ? 0.5 * k1 * len * len : line_integral_lyapunov(y, k1, a);
    double abs_err = std::abs(closed - quad);
    char buf[96];
    std::snprintf(buf, sizeof buf, "|y|=%.17g k1=%.6g a=%.6g", len, k1, a);
    w.feed(abs_err, abs_err / std::max(std::abs(closed), 1.0), buf);
  }
  return finish(seeded_wrong ? "goal-term-quadrature (seeded wrong closed form)"
                             : "goal-term-quadrature",
                cases, w, 1e-8);
}

}  // namespace tube
