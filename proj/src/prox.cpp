#include "rpd/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpd/linalg.hpp"

namespace rpd {

ProxFn ProxFn::zero(int dim) {
  ProxFn f;
  f.kind = ProxKind::Zero;
  f.dim = dim;
  return f;
}

ProxFn ProxFn::l1(int dim, double tau) {
  require(tau > 0.0, "ProxFn::l1: weight must be positive");
  ProxFn f;
  f.kind = ProxKind::L1;
  f.dim = dim;
  f.weight = tau;
  return f;
}

ProxFn ProxFn::sq_distance(Vec center, double tau) {
  require(tau > 0.0, "ProxFn::sq_distance: weight must be positive");
  ProxFn f;
  f.kind = ProxKind::SqDistance;
  f.dim = static_cast<int>(center.size());
  f.weight = tau;
  f.center = std::move(center);
  return f;
}

ProxFn ProxFn::box(Vec lo, Vec hi) {
  require(lo.size() == hi.size(), "ProxFn::box: bound sizes differ");
  for (std::size_t i = 0; i < lo.size(); ++i)
    require(lo[i] <= hi[i], "ProxFn::box: lo must not exceed hi");
  ProxFn f;
  f.kind = ProxKind::Box;
  f.dim = static_cast<int>(lo.size());
  f.lo = std::move(lo);
  f.hi = std::move(hi);
  return f;
}

ProxFn ProxFn::box_uniform(int dim, double lo, double hi) {
  return box(Vec(static_cast<std::size_t>(dim), lo), Vec(static_cast<std::size_t>(dim), hi));
}

ProxFn ProxFn::point(Vec c) {
  ProxFn f;
  f.kind = ProxKind::Point;
  f.dim = static_cast<int>(c.size());
  f.center = std::move(c);
  return f;
}

double ProxFn::eval(const Vec& x) const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ProxKind::Zero:
      return 0.0;
    case ProxKind::L1: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return weight * s;
    }
    case ProxKind::SqDistance: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        s += d * d;
      }
      return 0.5 * weight * s;
    }
    case ProxKind::Box:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return inf;
      return 0.0;
    case ProxKind::Point:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != center[i]) return inf;
      return 0.0;
  }
  return 0.0;
}

Vec prox_metric(const ProxFn& f, const Vec& w, const Vec& x) {
  require(static_cast<int>(x.size()) == f.dim, "prox_metric: dimension mismatch");
  require(w.size() == x.size(), "prox_metric: metric dimension mismatch");
  switch (f.kind) {
    case ProxKind::Zero:
      return x;
    case ProxKind::L1: {
      // entrywise soft threshold at tau * w_i
      Vec y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = f.weight * w[i];
        if (x[i] > t)
          y[i] = x[i] - t;
        else if (x[i] < -t)
          y[i] = x[i] + t;
        else
          y[i] = 0.0;
      }
      return y;
    }
    case ProxKind::SqDistance: {
      // argmin (tau/2)(y-z)^2 + (x-y)^2/(2w)  =>  y = (x + tau w z)/(1 + tau w)
      Vec y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double tw = f.weight * w[i];
        y[i] = (x[i] + tw * f.center[i]) / (1.0 + tw);
      }
      return y;
    }
    case ProxKind::Box: {
      // projection onto the box; independent of a diagonal metric
      Vec y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], f.lo[i], f.hi[i]);
      return y;
    }
    case ProxKind::Point:
      return f.center;
  }
  return x;
}

Vec prox_conjugate(const ProxFn& f, const Vec& u, const Vec& v) {
  require(static_cast<int>(v.size()) == f.dim, "prox_conjugate: dimension mismatch");
  require(u.size() == v.size(), "prox_conjugate: metric dimension mismatch");
  const Vec t = div(v, u);
  const Vec p = prox_metric(f, inv_vec(u), t);
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] - u[i] * p[i];
  return r;
}

}  // namespace rpd
