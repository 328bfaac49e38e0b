#ifndef PREVLAB_PREDICATES_HPP
#define PREVLAB_PREDICATES_HPP

#include <memory>
#include <string>

#include "prevlab/engine.hpp"
#include "prevlab/interval_set.hpp"

namespace prevlab {

// Holds when the quadrature integral of the (scalar, 1-D) element over [0, 1]
// is nonzero beyond tol: |integral| > tol. Composite Gauss-Legendre on a
// fixed grid.
PropertyPredicate integral_nonzero_predicate(double tol = 1e-10);

// Holds when every fixed point of the (1-D) polynomial element inside
// [box_lo, box_hi] is hyperbolic. Roots of f(x) - x come from the companion
// matrix, so no fixed point is missed; the hyperbolicity margin uses the same
// (1e-8, 1e-6) band as the dynamics module, with the band reported as
// undecided.
PropertyPredicate fixed_points_hyperbolic_predicate(double box_lo = -2.0, double box_hi = 2.0);

// Parameter-space predicates for monomial probes (constant / polynomial /
// linear), where each coefficient of the element recovers one lambda_i
// exactly as coefficient-minus-base.

// Fails iff the recovered coefficient exceeds base_value (an open half-space;
// decidedly not shy).
PropertyPredicate coefficient_halfspace_predicate(const MultiIndex& alpha, int out,
                                                  double base_value = 0.0);

// Fails iff the recovered coefficient lies in S.
PropertyPredicate coefficient_set_predicate(const MultiIndex& alpha, int out,
                                            IntervalSet S, double base_value = 0.0);

// Fails iff either operand fails; undecided when neither fails and one is
// undecided.
PropertyPredicate predicate_union(const PropertyPredicate& a, const PropertyPredicate& b);

PropertyPredicate always_holds_predicate();
PropertyPredicate always_fails_predicate();

}  // namespace prevlab

#endif
