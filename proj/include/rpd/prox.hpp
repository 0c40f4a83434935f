#pragma once

/// Library of proximable convex functions and their metric proximity
/// operators.  Conjugate proxes are always routed through the generalized
/// Moreau decomposition; closed-form conjugates exist only in tests.

#include "rpd/common.hpp"

namespace rpd {

enum class ProxKind { Zero, L1, SqDistance, Box, Point };

/// Proper lower-semicontinuous convex function with a closed-form metric prox.
struct ProxFn {
  ProxKind kind = ProxKind::Zero;
  int dim = 0;
  double weight = 1.0;  // L1 / SqDistance weight tau > 0
  Vec center;           // SqDistance center or Point location
  Vec lo, hi;           // Box bounds, entrywise lo <= hi

  static ProxFn zero(int dim);
  static ProxFn l1(int dim, double tau);
  static ProxFn sq_distance(Vec center, double tau);
  static ProxFn box(Vec lo, Vec hi);
  static ProxFn box_uniform(int dim, double lo, double hi);
  static ProxFn point(Vec c);

  /// Function value (may be +inf for indicator kinds off their domain).
  double eval(const Vec& x) const;
};

/// prox of f in the metric diag(1/w): unique minimizer of
///   f(y) + (1/2) sum_i (x_i - y_i)^2 / w_i,
/// i.e. the resolvent of w-scaled subdifferential.  w is a positive diagonal.
Vec prox_metric(const ProxFn& f, const Vec& w, const Vec& x);

/// Resolvent of the u-scaled inverse subdifferential, via the generalized
/// Moreau decomposition:  v - u .* prox_metric(f, 1/u, v ./ u).
Vec prox_conjugate(const ProxFn& f, const Vec& u, const Vec& v);

}  // namespace rpd
