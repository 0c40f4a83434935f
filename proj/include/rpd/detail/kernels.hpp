#pragma once

/// Shared arithmetic kernels for the primal-dual step maps.  The distributed
/// specializations reuse these so that a distributed run and the equivalent
/// run on the materialized product-space problem execute identical
/// floating-point operations.

#include "rpd/monotone.hpp"
#include "rpd/smooth.hpp"

namespace rpd::detail {

/// acc += grad C(x) (skipped entirely for the zero function), then acc += cerr.
inline void accumulate_forward(Vec& acc, const SmoothFn& C, const Vec& x, const Vec* cerr) {
  if (!C.is_zero()) add_into(acc, C.grad(x));
  if (cerr) add_into(acc, *cerr);
}

/// base - w .* acc, entrywise.
inline Vec metric_backward(const Vec& base, const Vec& w, const Vec& acc) {
  Vec r(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) r[i] = base[i] - w[i] * acc[i];
  return r;
}

/// v + u .* (acc - grad Dinv(v) + derr), entrywise; zero terms are skipped.
inline Vec dual_argument(const Vec& v, const Vec& u, Vec acc, const SmoothFn& dinv,
                         const Vec* derr) {
  if (!dinv.is_zero()) sub_into(acc, dinv.grad(v));
  if (derr) add_into(acc, *derr);
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] + u[i] * acc[i];
  return r;
}

/// 2a - b, entrywise (the reflected update read by the opposite phase).
inline Vec reflected(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = 2.0 * a[i] - b[i];
  return r;
}

}  // namespace rpd::detail
