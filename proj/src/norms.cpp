#include "rpd/norms.hpp"

#include <cmath>

namespace rpd {
namespace {

constexpr int kPowerIterationCap = 10000;

// One application of M^T M where M = U^{1/2} L W^{1/2}.
BlockVector gram_apply(const BlockOperatorMatrix& L, const std::vector<Vec>& wsqrt,
                       const std::vector<Vec>& usqrt, const BlockVector& x) {
  BlockVector t = x;
  for (std::size_t j = 0; j < t.blocks.size(); ++j) t.blocks[j] = mul(wsqrt[j], t.blocks[j]);
  BlockVector y = L.apply(t);
  for (std::size_t k = 0; k < y.blocks.size(); ++k) y.blocks[k] = mul(usqrt[k], y.blocks[k]);
  // adjoint leg
  for (std::size_t k = 0; k < y.blocks.size(); ++k) y.blocks[k] = mul(usqrt[k], y.blocks[k]);
  BlockVector z = L.apply_adjoint(y);
  for (std::size_t j = 0; j < z.blocks.size(); ++j) z.blocks[j] = mul(wsqrt[j], z.blocks[j]);
  return z;
}

void normalize(BlockVector& v) {
  const double n = v.norm();
  if (n == 0.0) return;
  for (auto& b : v.blocks) scale(b, 1.0 / n);
}

BlockVector ones_start(const std::vector<int>& dims) {
  BlockVector v;
  for (int d : dims) v.blocks.emplace_back(static_cast<std::size_t>(d), 1.0);
  normalize(v);
  return v;
}

// Generic fallback direction for the rare case where the all-ones vector is
// annihilated (e.g. difference operators).
BlockVector ramp_start(const std::vector<int>& dims) {
  BlockVector v;
  int i = 0, total = 0;
  for (int d : dims) total += d;
  for (int d : dims) {
    Vec b(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r, ++i) b[r] = 1.0 + static_cast<double>(i) / total;
    v.blocks.push_back(std::move(b));
  }
  normalize(v);
  return v;
}

double power_iterate(const BlockOperatorMatrix& L, const std::vector<Vec>& wsqrt,
                     const std::vector<Vec>& usqrt, double tol) {
  BlockVector v = ones_start(L.col_dims());
  BlockVector g = gram_apply(L, wsqrt, usqrt, v);
  if (g.norm() == 0.0) {
    v = ramp_start(L.col_dims());
    g = gram_apply(L, wsqrt, usqrt, v);
    if (g.norm() == 0.0) return 0.0;
  }
  double lambda_prev = v.inner(g);  // Rayleigh quotient for the squared norm
  for (int it = 0; it < kPowerIterationCap; ++it) {
    v = g;
    normalize(v);
    g = gram_apply(L, wsqrt, usqrt, v);
    const double lambda = v.inner(g);
    if (std::abs(lambda - lambda_prev) < tol * std::max(lambda, 1e-300))
      return std::sqrt(std::max(lambda, 0.0));
    lambda_prev = lambda;
  }
  const double lambda = lambda_prev;
  throw NormEstimateError(std::sqrt(std::max(lambda, 0.0)), std::sqrt(std::max(lambda, 0.0)),
                          "scaled_norm: power iteration did not converge within cap");
}

}  // namespace

double scaled_norm(const BlockOperatorMatrix& L, const DiagonalMetric& W,
                   const DiagonalMetric& U, double tol) {
  require(tol > 0.0 && tol < 1.0, "scaled_norm: tol must lie in (0,1)");
  require(static_cast<int>(W.diag.size()) == L.p(), "scaled_norm: W block count mismatch");
  require(static_cast<int>(U.diag.size()) == L.q(), "scaled_norm: U block count mismatch");
  std::vector<Vec> wsqrt, usqrt;
  for (const auto& b : W.diag) wsqrt.push_back(sqrt_vec(b));
  for (const auto& b : U.diag) usqrt.push_back(sqrt_vec(b));
  // the Rayleigh quotient tracks the squared norm; halve the tolerance
  return power_iterate(L, wsqrt, usqrt, 0.5 * tol);
}

double scaled_block_norm(const LinearBlock& M, const Vec& ws, const Vec& us) {
  if (M.is_zero()) return 0.0;
  std::map<std::pair<int, int>, LinearBlock> one{{{0, 0}, M}};
  BlockOperatorMatrix L({M.rows}, {M.cols}, one);
  DiagonalMetric W({ws}), U({us});
  return scaled_norm(L, W, U, 1e-13);
}

double scaled_norm_bound(const BlockOperatorMatrix& L, const DiagonalMetric& W,
                         const DiagonalMetric& U) {
  require(static_cast<int>(W.diag.size()) == L.p(), "scaled_norm_bound: W mismatch");
  require(static_cast<int>(U.diag.size()) == L.q(), "scaled_norm_bound: U mismatch");
  double s = 0.0;
  for (int k = 0; k < L.q(); ++k)
    for (int j : L.row_support(k)) {
      const double n = scaled_block_norm(L.block(k, j), W.diag[j], U.diag[k]);
      s += n * n;
    }
  return std::sqrt(s);
}

}  // namespace rpd
