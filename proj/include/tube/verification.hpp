#pragma once
// Independent cross-checks with teeth: central-difference gradient audits, an
// exact-geometry wall-safety audit, a forward-direction sweep of the wall
// fields, energy monotonicity scanning, and a quadrature replay of the goal
// term. Each check either takes a seeded-wrong switch or pairs with a sibling
// that demonstrates failure, so a pass is never vacuous.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tube/potentials.hpp"
#include "tube/simulator.hpp"

namespace tube {

// Shared result shape. The two error fields carry oracle-specific meanings
// (documented per operation); pass is authoritative either way.
struct OracleReport {
  std::string name;
  int cases = 0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::string worst_input;
  bool pass = false;
};

// Central differences per coordinate with step h. Raises NonFinite when the
// field is not finite at a stencil point, DomainViolation on a bad step.
Vec2 fd_gradient_oracle(const std::function<double(Vec2)>& field, Vec2 p, double h);

// Samples interior points uniformly and checks that the cross-section
// predicate (clearance above the revised radius) never claims safety the
// exact leg-segment distance refutes. Samples within `band` of either
// threshold are skipped as ties; max_abs_err is the deepest refuted claim.
// seeded_wrong swaps the revised radius for the plain r_s, which must produce
// disagreements on any tube with slanted legs.
OracleReport wall_safety_oracle(const TrapezoidTube& tube, double r_s, int n_samples,
                                std::uint64_t seed, bool seeded_wrong = false,
                                double band = 1e-9);

// Evaluates the forward component of both wall-keeping directions,
// t_c . (-grad V), over an n-by-n interior sweep, skipping nodes inside the
// fields' own exclusion zone. pass iff every value >= -1e-12; max_abs_err is
// the worst violation depth.
OracleReport direction_constraint_sampler(const TrapezoidTube& tube,
                                          const ExtendedBoundary& extended, int grid_n);

// pass iff the trace holds at least one energy sample and every sampled rate
// is <= 1e-6; max_abs_err is the worst positive rate. Raises WrongLogic
// unless the trace came from the gradient-flow logic.
OracleReport lyapunov_monotonicity_check(const SimulationTrace& trace);

// Audits the four closed-form derivative paths the controllers rely on
// against central differences, `cases` random states each: the pair-barrier
// coefficient, the panel gradient, the wall-barrier derivative, and the
// unprojected wall-keeping gradient. pass iff max_rel_err <= 1e-5.
// seeded_wrong inflates every analytic value by 1%, which must fail all four.
std::vector<OracleReport> gradient_oracle_suite(int cases, std::uint64_t seed,
                                                bool seeded_wrong = false);

// Replays the closed-form goal term with composite quadrature of the
// saturated speed profile at `cases` random inputs. pass iff the worst
// mismatch (relative above 1, absolute below) is <= 1e-8. seeded_wrong swaps
// in the unsaturated quadratic, which must fail past the saturation knee.
OracleReport goal_term_quadrature_oracle(int cases, std::uint64_t seed,
                                         bool seeded_wrong = false);

}  // namespace tube
