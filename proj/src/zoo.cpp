#include "rpd/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpd/rng.hpp"

namespace rpd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearBlock random_design(int rows, int cols, Rng& rng) {
  std::vector<double> a(static_cast<std::size_t>(rows) * cols);
  const double s = 1.0 / std::sqrt(static_cast<double>(rows));
  for (auto& v : a) v = s * rng.normal();
  return LinearBlock(rows, cols, std::move(a));
}

LinearBlock first_difference(int n) {
  std::vector<double> a(static_cast<std::size_t>(n - 1) * n, 0.0);
  for (int i = 0; i < n - 1; ++i) {
    a[static_cast<std::size_t>(i) * n + i] = -1.0;
    a[static_cast<std::size_t>(i) * n + i + 1] = 1.0;
  }
  return LinearBlock(n - 1, n, std::move(a));
}

// [A ; sqrt(reg) I] with right-hand side [b ; 0]
SmoothFn tikhonov_quadratic(const LinearBlock& A, const Vec& b, double reg) {
  if (reg <= 0.0) return SmoothFn::quadratic(A, b);
  const int d = A.cols;
  std::vector<double> st(static_cast<std::size_t>(A.rows + d) * d, 0.0);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < d; ++c) st[static_cast<std::size_t>(r) * d + c] = A.at(r, c);
  const double sr = std::sqrt(reg);
  for (int t = 0; t < d; ++t) st[static_cast<std::size_t>(A.rows + t) * d + t] = sr;
  Vec rhs = b;
  rhs.resize(b.size() + static_cast<std::size_t>(d), 0.0);
  return SmoothFn::quadratic(LinearBlock(A.rows + d, d, std::move(st)), std::move(rhs));
}


}  // namespace

// ---------------------------------------------------------------------------
// data generators

LassoData make_lasso(int features, int samples, double tau, std::uint64_t seed) {
  require(features >= 1 && samples >= 1, "make_lasso: bad dimensions");
  Rng rng(seed);
  LassoData data;
  data.A = random_design(samples, features, rng);
  Vec x_true(static_cast<std::size_t>(features), 0.0);
  for (auto& v : x_true)
    if (rng.uniform() < 0.2) v = rng.uniform() < 0.5 ? 1.0 : -1.0;
  data.b = data.A.apply(x_true);
  for (auto& v : data.b) v += 0.01 * rng.normal();
  data.tau = tau;
  return data;
}

Tv1dData make_tv1d(int size, double tau, std::uint64_t seed) {
  require(size >= 2, "make_tv1d: need at least two samples");
  Rng rng(seed);
  Tv1dData data;
  data.b.resize(static_cast<std::size_t>(size));
  double level = 0.0;
  for (int i = 0; i < size; ++i) {
    if (i % (size / 4 + 1) == 0) level = 2.0 * rng.uniform() - 1.0;
    data.b[i] = level + 0.05 * rng.normal();
  }
  data.D = first_difference(size);
  data.tau = tau;
  return data;
}

BoxLsData make_box_ls(int features, int samples, double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  BoxLsData data;
  data.A = random_design(samples, features, rng);
  Vec x_true(static_cast<std::size_t>(features));
  for (auto& v : x_true) v = lo + (hi - lo) * rng.uniform();
  data.b = data.A.apply(x_true);
  for (auto& v : data.b) v += 0.01 * rng.normal();
  data.lo = lo;
  data.hi = hi;
  return data;
}

RidgeConsensusData make_ridge_consensus(int agents, int d, int rows_per_agent, double reg,
                                        std::uint64_t seed) {
  Rng rng(seed);
  RidgeConsensusData data;
  data.d = d;
  data.reg = reg;
  Vec x_true(static_cast<std::size_t>(d));
  for (auto& v : x_true) v = rng.normal();
  for (int i = 0; i < agents; ++i) {
    data.A.push_back(random_design(rows_per_agent, d, rng));
    Vec b = data.A.back().apply(x_true);
    for (auto& v : b) v += 0.05 * rng.normal();
    data.b.push_back(std::move(b));
  }
  return data;
}

// ---------------------------------------------------------------------------
// assembly

PDProblem lasso_problem(const LassoData& data, double w, double u) {
  const int n = data.A.cols;
  SmoothFn h = SmoothFn::quadratic(data.A, data.b);
  PrimalBlock pb{n, MonotoneOp::subdifferential(ProxFn::l1(n, data.tau)), h, 1.0 / h.lipschitz};
  DualBlock db{n, MonotoneOp::zero(n), SmoothFn::zero(n), kInf};
  std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::identity(n)}};
  BlockOperatorMatrix L({n}, {n}, blocks);
  return PDProblem({pb}, {db}, std::move(L), DiagonalMetric::uniform(w, {n}),
                   DiagonalMetric::uniform(u, {n}));
}

PDProblem tv1d_problem(const Tv1dData& data, double w, double u) {
  const int n = static_cast<int>(data.b.size());
  SmoothFn h = SmoothFn::quadratic(LinearBlock::identity(n), data.b);
  PrimalBlock pb{n, MonotoneOp::zero(n), h, 1.0 / h.lipschitz};
  DualBlock db{n - 1, MonotoneOp::subdifferential(ProxFn::l1(n - 1, data.tau)),
               SmoothFn::zero(n - 1), kInf};
  std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, data.D}};
  BlockOperatorMatrix L({n - 1}, {n}, blocks);
  return PDProblem({pb}, {db}, std::move(L), DiagonalMetric::uniform(w, {n}),
                   DiagonalMetric::uniform(u, {n - 1}));
}

PDProblem box_ls_problem(const BoxLsData& data, double w, double u) {
  const int n = data.A.cols;
  SmoothFn h = SmoothFn::quadratic(data.A, data.b);
  PrimalBlock pb{
      n, MonotoneOp::subdifferential(ProxFn::box_uniform(n, data.lo, data.hi)), h,
      1.0 / h.lipschitz};
  DualBlock db{n, MonotoneOp::zero(n), SmoothFn::zero(n), kInf};
  std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::identity(n)}};
  BlockOperatorMatrix L({n}, {n}, blocks);
  return PDProblem({pb}, {db}, std::move(L), DiagonalMetric::uniform(w, {n}),
                   DiagonalMetric::uniform(u, {n}));
}

namespace {

// metric for the vacuous dual channel; kept tiny so the coupling term it
// contributes to chi is negligible
constexpr double kDeadDualMetric = 1e-8;

DistAgent consensus_agent(int d, MonotoneOp A, SmoothFn C, double w) {
  DistAgent ag;
  ag.A = std::move(A);
  ag.C = std::move(C);
  ag.mu_tilde = ag.C.is_zero() ? kInf : 1.0 / ag.C.lipschitz;
  ag.B = MonotoneOp::zero(d);
  ag.Dinv = SmoothFn::zero(d);
  ag.nu_tilde = kInf;
  ag.M = LinearBlock::identity(d);
  ag.w.assign(static_cast<std::size_t>(d), w);
  ag.u.assign(static_cast<std::size_t>(d), kDeadDualMetric);
  return ag;
}

}  // namespace

DistProblem ridge_consensus_problem(const RidgeConsensusData& data, const Hypergraph& g,
                                    double w, double theta) {
  std::vector<DistAgent> agents;
  for (int i = 0; i < g.m(); ++i)
    agents.push_back(consensus_agent(data.d, MonotoneOp::zero(data.d),
                                     tikhonov_quadratic(data.A[i], data.b[i], data.reg), w));
  return DistProblem(data.d, g, std::move(agents),
                     Vec(static_cast<std::size_t>(g.r()), theta));
}

DistProblem lasso_consensus_problem(const std::vector<LinearBlock>& A, const std::vector<Vec>& b,
                                    double tau, const Hypergraph& g, double w, double theta) {
  require(static_cast<int>(A.size()) == g.m(), "lasso_consensus_problem: agent count mismatch");
  const int d = A[0].cols;
  const double share = tau / g.m();
  std::vector<DistAgent> agents;
  for (int i = 0; i < g.m(); ++i)
    agents.push_back(consensus_agent(
        d, MonotoneOp::subdifferential(ProxFn::l1(d, share)), SmoothFn::quadratic(A[i], b[i]), w));
  return DistProblem(d, g, std::move(agents), Vec(static_cast<std::size_t>(g.r()), theta));
}

// ---------------------------------------------------------------------------
// objectives and residuals

double lasso_objective(const LassoData& data, const Vec& x) {
  Vec r = data.A.apply(x);
  sub_into(r, data.b);
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return 0.5 * dot(r, r) + data.tau * s;
}

double lasso_residual(const LassoData& data, const Vec& x) {
  Vec r = data.A.apply(x);
  sub_into(r, data.b);
  const Vec g = data.A.apply_adjoint(r);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double viol = x[i] > 0.0   ? g[i] + data.tau
                        : x[i] < 0.0 ? g[i] - data.tau
                                     : std::max(0.0, std::abs(g[i]) - data.tau);
    s += viol * viol;
  }
  return std::sqrt(s);
}

double tv1d_objective(const Tv1dData& data, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - data.b[i];
    s += d * d;
  }
  const Vec dx = data.D.apply(x);
  double tv = 0.0;
  for (double v : dx) tv += std::abs(v);
  return 0.5 * s + data.tau * tv;
}

double tv1d_residual(const Tv1dData& data, const Vec& x, const Vec& v) {
  // stationarity of the data term plus distance of v to the subdifferential
  // of the scaled l1 norm at Dx (zero-pattern tolerance 1e-7)
  Vec r = x;
  sub_into(r, data.b);
  Vec dtv(x.size(), 0.0);
  data.D.apply_adjoint_add(v, dtv);
  add_into(r, dtv);
  double s = dot(r, r);
  const Vec dx = data.D.apply(x);
  for (std::size_t i = 0; i < dx.size(); ++i) {
    double viol;
    if (dx[i] > 1e-7)
      viol = v[i] - data.tau;
    else if (dx[i] < -1e-7)
      viol = v[i] + data.tau;
    else
      viol = std::max(0.0, std::abs(v[i]) - data.tau);
    s += viol * viol;
  }
  return std::sqrt(s);
}

double box_ls_objective(const BoxLsData& data, const Vec& x) {
  Vec r = data.A.apply(x);
  sub_into(r, data.b);
  return 0.5 * dot(r, r);
}

double box_ls_residual(const BoxLsData& data, const Vec& x) {
  Vec r = data.A.apply(x);
  sub_into(r, data.b);
  const Vec g = data.A.apply_adjoint(r);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double viol;
    if (x[i] <= data.lo)
      viol = std::max(0.0, -g[i]);
    else if (x[i] >= data.hi)
      viol = std::max(0.0, g[i]);
    else
      viol = std::abs(g[i]);
    s += viol * viol;
  }
  return std::sqrt(s);
}

double ridge_consensus_objective(const RidgeConsensusData& data, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.A.size(); ++i) {
    Vec r = data.A[i].apply(x);
    sub_into(r, data.b[i]);
    s += 0.5 * dot(r, r) + 0.5 * data.reg * dot(x, x);
  }
  return s;
}

double ridge_consensus_residual(const RidgeConsensusData& data, const Vec& x) {
  Vec g(x.size(), 0.0);
  for (std::size_t i = 0; i < data.A.size(); ++i) {
    Vec r = data.A[i].apply(x);
    sub_into(r, data.b[i]);
    data.A[i].apply_adjoint_add(r, g);
    for (std::size_t t = 0; t < x.size(); ++t) g[t] += data.reg * x[t];
  }
  return norm2(g);
}

// ---------------------------------------------------------------------------
// reference solvers

Vec solve_spd(const std::vector<double>& G, const Vec& rhs) {
  const int n = static_cast<int>(rhs.size());
  require(static_cast<int>(G.size()) == n * n, "solve_spd: shape mismatch");
  std::vector<double> L(G);
  for (int j = 0; j < n; ++j) {
    double diag = L[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double v = L[static_cast<std::size_t>(j) * n + k];
      diag -= v * v;
    }
    require(diag > 0.0, "solve_spd: matrix is not positive definite");
    diag = std::sqrt(diag);
    L[static_cast<std::size_t>(j) * n + j] = diag;
    for (int i = j + 1; i < n; ++i) {
      double v = L[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        v -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
      L[static_cast<std::size_t>(i) * n + j] = v / diag;
    }
  }
  Vec y(rhs);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) y[i] -= L[static_cast<std::size_t>(i) * n + k] * y[k];
    y[i] /= L[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) y[i] -= L[static_cast<std::size_t>(k) * n + i] * y[k];
    y[i] /= L[static_cast<std::size_t>(i) * n + i];
  }
  return y;
}

namespace {

constexpr long kReferenceCap = 1000000;

ReferenceSolution prox_gradient_reference(const LinearBlock& A, const Vec& b,
                                          const ProxFn& f, double target,
                                          const std::function<double(const Vec&)>& residual,
                                          const std::function<double(const Vec&)>& objective) {
  const SmoothFn h = SmoothFn::quadratic(A, b);
  const double step = 1.0 / h.lipschitz;
  const Vec w(static_cast<std::size_t>(A.cols), step);
  Vec x(static_cast<std::size_t>(A.cols), 0.0);
  for (long n = 0; n < kReferenceCap; ++n) {
    const Vec g = h.grad(x);
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - step * g[i];
    x = prox_metric(f, w, z);
    if (n % 50 == 0 && residual(x) < target) {
      ReferenceSolution ref;
      ref.x = x;
      ref.objective = objective(x);
      ref.method = "proximal_gradient";
      ref.residual = residual(x);
      return ref;
    }
  }
  throw ReferenceUnavailable("reference solver hit the iteration cap");
}

}  // namespace

ReferenceSolution lasso_reference(const LassoData& data, double target) {
  return prox_gradient_reference(
      data.A, data.b, ProxFn::l1(data.A.cols, data.tau), target,
      [&](const Vec& x) { return lasso_residual(data, x); },
      [&](const Vec& x) { return lasso_objective(data, x); });
}

ReferenceSolution box_ls_reference(const BoxLsData& data, double target) {
  return prox_gradient_reference(
      data.A, data.b, ProxFn::box_uniform(data.A.cols, data.lo, data.hi), target,
      [&](const Vec& x) { return box_ls_residual(data, x); },
      [&](const Vec& x) { return box_ls_objective(data, x); });
}

ReferenceSolution tv1d_reference(const Tv1dData& data, double target) {
  // projected gradient on the strongly convex dual; the primal is recovered
  // through the stationarity relation x = b - D^T v, so the certified
  // residual reduces to the complementarity terms
  const int n = static_cast<int>(data.b.size());
  Vec v(static_cast<std::size_t>(n - 1), 0.0);
  const double step = 0.45;  // 1.8 / ||D||^2 with ||D||^2 <= 4
  Vec x = data.b;
  for (long it = 0; it < kReferenceCap; ++it) {
    const Vec dx = data.D.apply(x);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::clamp(v[i] + step * dx[i], -data.tau, data.tau);
    Vec dtv(x.size(), 0.0);
    data.D.apply_adjoint_add(v, dtv);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = data.b[i] - dtv[i];
    if (it % 50 == 0 && tv1d_residual(data, x, v) < target) break;
  }
  ReferenceSolution ref;
  ref.residual = tv1d_residual(data, x, v);
  if (ref.residual >= target)
    throw ReferenceUnavailable("tv1d reference solver hit the iteration cap");
  ref.objective = tv1d_objective(data, x);
  ref.x = std::move(x);
  ref.v = std::move(v);
  ref.method = "dual_projected_gradient";
  return ref;
}

ReferenceSolution ridge_consensus_reference(const RidgeConsensusData& data) {
  const int d = data.d;
  const int m = static_cast<int>(data.A.size());
  std::vector<double> G(static_cast<std::size_t>(d) * d, 0.0);
  Vec rhs(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto& A = data.A[i];
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int r = 0; r < A.rows; ++r) s += A.at(r, a) * A.at(r, c);
        G[static_cast<std::size_t>(a) * d + c] += s;
      }
    A.apply_adjoint_add(data.b[i], rhs);
  }
  for (int t = 0; t < d; ++t) G[static_cast<std::size_t>(t) * d + t] += m * data.reg;
  ReferenceSolution ref;
  ref.x = solve_spd(G, rhs);
  ref.objective = ridge_consensus_objective(data, ref.x);
  ref.method = "normal_equations";
  ref.residual = ridge_consensus_residual(data, ref.x);
  return ref;
}

double calibrate_scale(const std::function<bool(double)>& ok, double margin) {
  double lo = 1e-8;
  require(ok(lo), "calibrate_scale: condition fails even at the smallest scale");
  double hi = lo;
  while (hi < 1e8 && ok(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= 1e8) return margin * lo;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return margin * lo;
}

}  // namespace rpd
