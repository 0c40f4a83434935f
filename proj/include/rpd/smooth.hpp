#pragma once

/// Lipschitz-differentiable convex functions entering the forward steps, with
/// user-supplied smoothness constants and a finite-difference gradient check.

#include "rpd/linalg.hpp"

namespace rpd {

enum class SmoothKind { Zero, Quadratic };

/// Either the zero function or x -> (weight/2) ||M x - b||^2 + <lin, x>.
/// `lipschitz` is the Lipschitz constant of the gradient on the unscaled
/// space (the inverse of the cocoercivity constant).
struct SmoothFn {
  SmoothKind kind = SmoothKind::Zero;
  int dim = 0;
  LinearBlock M;  // may be zero-tagged (affine case)
  Vec b;
  double weight = 1.0;
  Vec lin;  // optional linear term; empty means absent
  double lipschitz = 0.0;

  static SmoothFn zero(int dim) {
    SmoothFn f;
    f.dim = dim;
    return f;
  }

  /// (weight/2)||M x - b||^2; the Lipschitz constant weight*||M||^2 is
  /// computed once with a tight power iteration.
  static SmoothFn quadratic(LinearBlock m, Vec rhs, double weight = 1.0);

  /// Quadratic plus a linear term <lin, x>.
  static SmoothFn quadratic_affine(LinearBlock m, Vec rhs, Vec lin, double weight = 1.0);

  bool is_zero() const { return kind == SmoothKind::Zero; }

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;
};

/// Max over coordinates of the relative mismatch between central finite
/// differences with step h and the analytic gradient at x.
double gradient_check(const SmoothFn& f, const Vec& x, double h);

}  // namespace rpd
