#pragma once

/// Spectral-norm estimation for metric-scaled coupling operators, used by the
/// step-size condition checkers.

#include <string>

#include "rpd/linalg.hpp"

namespace rpd {

/// Power iteration failed to reach the requested accuracy; carries the last
/// bracketing interval on the squared norm.
struct NormEstimateError : std::runtime_error {
  double last = 0.0;
  double previous = 0.0;
  NormEstimateError(double prev, double cur, const std::string& what)
      : std::runtime_error(what), last(cur), previous(prev) {}
};

/// Estimate of || U^{1/2} L W^{1/2} || with relative accuracy tol, by power
/// iteration on the Gram operator.  The start vector is the normalized
/// all-ones vector (deterministic); if that lies in the kernel a fixed ramp
/// vector is used instead.  Iteration cap 10000.
double scaled_norm(const BlockOperatorMatrix& L, const DiagonalMetric& W,
                   const DiagonalMetric& U, double tol);

/// Spectral norm of a single scaled block || diag(us)^{1/2} M diag(ws)^{1/2} ||,
/// computed by power iteration to near machine accuracy.
double scaled_block_norm(const LinearBlock& M, const Vec& ws, const Vec& us);

/// Frobenius-style upper bound (sum over blocks of squared scaled block
/// norms)^{1/2}; always at least the spectral estimate up to tolerance.
double scaled_norm_bound(const BlockOperatorMatrix& L, const DiagonalMetric& W,
                         const DiagonalMetric& U);

}  // namespace rpd
