#include "rpd/smooth.hpp"

#include <cmath>

#include "rpd/norms.hpp"

namespace rpd {

SmoothFn SmoothFn::quadratic(LinearBlock m, Vec rhs, double weight) {
  return quadratic_affine(std::move(m), std::move(rhs), Vec{}, weight);
}

SmoothFn SmoothFn::quadratic_affine(LinearBlock m, Vec rhs, Vec lin, double weight) {
  require(weight >= 0.0, "SmoothFn: weight must be nonnegative");
  require(static_cast<int>(rhs.size()) == m.rows, "SmoothFn: rhs dimension mismatch");
  SmoothFn f;
  f.kind = SmoothKind::Quadratic;
  f.dim = m.cols;
  if (!lin.empty())
    require(static_cast<int>(lin.size()) == m.cols, "SmoothFn: linear term dimension mismatch");
  const Vec ones_c(static_cast<std::size_t>(m.cols), 1.0);
  const Vec ones_r(static_cast<std::size_t>(m.rows), 1.0);
  const double opnorm = m.is_zero() ? 0.0 : scaled_block_norm(m, ones_c, ones_r);
  f.lipschitz = weight * opnorm * opnorm;
  f.M = std::move(m);
  f.b = std::move(rhs);
  f.lin = std::move(lin);
  f.weight = weight;
  return f;
}

double SmoothFn::eval(const Vec& x) const {
  if (kind == SmoothKind::Zero) return 0.0;
  Vec r(static_cast<std::size_t>(M.rows), 0.0);
  M.apply_add(x, r);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - b[i];
    s += d * d;
  }
  double v = 0.5 * weight * s;
  if (!lin.empty()) v += dot(lin, x);
  return v;
}

Vec SmoothFn::grad(const Vec& x) const {
  require(static_cast<int>(x.size()) == dim, "SmoothFn::grad: dimension mismatch");
  if (kind == SmoothKind::Zero) return Vec(x.size(), 0.0);
  Vec r(static_cast<std::size_t>(M.rows), 0.0);
  M.apply_add(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = weight * (r[i] - b[i]);
  Vec g(x.size(), 0.0);
  M.apply_adjoint_add(r, g);
  if (!lin.empty()) add_into(g, lin);
  return g;
}

double gradient_check(const SmoothFn& f, const Vec& x, double h) {
  require(h > 0.0, "gradient_check: step must be positive");
  const Vec g = f.grad(x);
  double worst = 0.0;
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (f.eval(xp) - f.eval(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return worst;
}

}  // namespace rpd
