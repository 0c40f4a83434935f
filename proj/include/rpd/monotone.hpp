#pragma once

/// Maximally monotone operators used by the engines: the zero operator,
/// subdifferentials of the prox library, and the normal cone to a consensus
/// subspace.  Resolvents of scaled inverses are always obtained through the
/// generalized Moreau decomposition.

#include "rpd/prox.hpp"

namespace rpd {

enum class MonotoneKind { Zero, Subdifferential, Consensus };

struct MonotoneOp {
  MonotoneKind kind = MonotoneKind::Zero;
  int dim = 0;
  ProxFn fn;       // Subdifferential payload
  int copies = 0;  // Consensus: dim = copies * base dimension
  /// Strong-monotonicity constant when known (metadata for condition checks).
  double strong_monotonicity = 0.0;

  static MonotoneOp zero(int dim) {
    MonotoneOp a;
    a.dim = dim;
    return a;
  }

  static MonotoneOp subdifferential(ProxFn f, double strong = 0.0) {
    MonotoneOp a;
    a.kind = MonotoneKind::Subdifferential;
    a.dim = f.dim;
    a.fn = std::move(f);
    a.strong_monotonicity = strong;
    return a;
  }

  /// Normal cone to the diagonal of a `copies`-fold product space.
  static MonotoneOp consensus(int copies, int base_dim) {
    MonotoneOp a;
    a.kind = MonotoneKind::Consensus;
    a.copies = copies;
    a.dim = copies * base_dim;
    return a;
  }

  bool is_zero() const { return kind == MonotoneKind::Zero; }
};

/// Replace each of the `copies` stacked sub-vectors of z by their mean.
Vec project_consensus(const Vec& z, int copies);

/// J_{WA}(x) for a per-block positive diagonal w.  Dispatches on kind:
/// identity for the zero operator, metric prox for subdifferentials, and the
/// consensus projection (which requires a uniform scalar block).
Vec resolvent(const MonotoneOp& A, const Vec& w, const Vec& x);

/// J_{UB^{-1}}(z), the resolvent of the u-scaled inverse, through the
/// generalized Moreau decomposition z - u .* J_{u^{-1}B}(z ./ u).  The zero
/// operator's inverse has the constant-zero resolvent.
Vec dual_resolvent(const MonotoneOp& B, const Vec& u, const Vec& z);

}  // namespace rpd
