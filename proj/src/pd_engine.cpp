#include "rpd/pd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "rpd/detail/kernels.hpp"

namespace rpd {

using detail::accumulate_forward;
using detail::dual_argument;
using detail::metric_backward;
using detail::reflected;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pattern(const PDProblem& prob, const ActivationPattern& eps, CouplingRule rule) {
  require(static_cast<int>(eps.size()) == prob.p() + prob.q(),
          "step: activation pattern length mismatch");
  const CouplingStructure st = prob.coupling();
  const std::string bad = ActivationSchedule::closure_violation(eps, rule, st);
  if (!bad.empty()) throw ClosureError("step: " + bad);
}

const Vec* channel_block(const BlockVector* bv, int i) {
  return bv ? &bv->blocks[i] : nullptr;
}

std::optional<BlockVector> make_block_error(const ErrorInjector& inj, long n,
                                            const std::vector<int>& dims, Rng& rng) {
  if (!inj.active()) return std::nullopt;
  BlockVector e;
  e.blocks.reserve(dims.size());
  for (int d : dims) e.blocks.push_back(inj.sample(n, d, rng));
  const double nrm = e.norm();
  if (nrm > 0.0) {
    const double target = inj.bound(n);
    for (auto& b : e.blocks) scale(b, target / nrm);
  }
  return e;
}

}  // namespace

PDProblem::PDProblem(std::vector<PrimalBlock> pb, std::vector<DualBlock> db,
                     BlockOperatorMatrix l, DiagonalMetric w, DiagonalMetric u)
    : primal(std::move(pb)), dual(std::move(db)), L(std::move(l)), W(std::move(w)),
      U(std::move(u)) {
  require(static_cast<int>(primal.size()) == L.p(), "PDProblem: primal block count mismatch");
  require(static_cast<int>(dual.size()) == L.q(), "PDProblem: dual block count mismatch");
  require(W.dims() == L.col_dims(), "PDProblem: W layout mismatch");
  require(U.dims() == L.row_dims(), "PDProblem: U layout mismatch");
  for (int j = 0; j < p(); ++j) {
    const auto& b = primal[j];
    require(b.dim == L.col_dims()[j], "PDProblem: primal dim mismatch");
    require(b.A.dim == b.dim, "PDProblem: primal operator dim mismatch");
    require(b.C.dim == b.dim, "PDProblem: smooth term dim mismatch");
    require(b.mu_tilde > 0.0, "PDProblem: cocoercivity constant must be positive");
  }
  for (int k = 0; k < q(); ++k) {
    const auto& b = dual[k];
    require(b.dim == L.row_dims()[k], "PDProblem: dual dim mismatch");
    require(b.B.dim == b.dim, "PDProblem: dual operator dim mismatch");
    require(b.Dinv.dim == b.dim, "PDProblem: Dinv dim mismatch");
    require(b.nu_tilde > 0.0, "PDProblem: strong-monotonicity constant must be positive");
  }
}

bool PDProblem::dinv_all_zero() const {
  for (const auto& b : dual)
    if (!b.Dinv.is_zero()) return false;
  return true;
}

bool PDProblem::resolvents_all_zero() const {
  for (const auto& b : primal)
    if (!b.A.is_zero()) return false;
  return true;
}

CouplingStructure PDProblem::coupling() const {
  CouplingStructure st;
  st.p = p();
  st.q = q();
  st.col_support.resize(st.p);
  st.row_support.resize(st.q);
  for (int j = 0; j < st.p; ++j) st.col_support[j] = L.col_support(j);
  for (int k = 0; k < st.q; ++k) st.row_support[k] = L.row_support(k);
  return st;
}

// ---------------------------------------------------------------------------
// condition checkers

std::pair<double, double> effective_constants(const PDProblem& prob) {
  double mu = kInf, nu = kInf;
  for (int j = 0; j < prob.p(); ++j) {
    const double term = std::isinf(prob.primal[j].mu_tilde)
                            ? kInf
                            : prob.primal[j].mu_tilde / prob.W.max_entry(j);
    mu = std::min(mu, term);
  }
  for (int k = 0; k < prob.q(); ++k) {
    const auto& b = prob.dual[k];
    const double term =
        b.Dinv.is_zero() || std::isinf(b.nu_tilde) ? kInf : b.nu_tilde / prob.U.max_entry(k);
    nu = std::min(nu, term);
  }
  return {mu, nu};
}

double theta_alpha(double norm, double mu, double nu, double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "theta_alpha: alpha must be positive");
  const double shrink = 1.0 - norm * norm;
  double best = kInf;
  if (std::isfinite(mu)) best = std::min(best, mu / (1.0 + alpha * norm));
  if (std::isfinite(nu)) best = std::min(best, nu / (1.0 + norm / alpha));
  if (std::isinf(best)) return norm < 1.0 ? kInf : -kInf;
  return shrink * best;
}

double alpha_hat(double norm, double mu, double nu) {
  require(norm > 0.0 && norm < 1.0, "alpha_hat: norm must lie in (0,1)");
  require(std::isfinite(mu) && std::isfinite(nu), "alpha_hat: constants must be finite");
  const double diff = mu - nu;
  return (diff + std::sqrt(diff * diff + 4.0 * mu * nu * norm * norm)) / (2.0 * nu * norm);
}

namespace {

// sup over alpha of theta_alpha, with the alpha that achieves it (0 / inf
// sentinels mark the limiting branches for infinite nu / mu).
std::pair<double, double> theta_best(double norm, double mu, double nu) {
  const double shrink = 1.0 - norm * norm;
  if (norm <= 0.0) return {std::min(mu, nu), 1.0};
  if (std::isinf(mu) && std::isinf(nu)) return {norm < 1.0 ? kInf : -kInf, 1.0};
  if (std::isinf(nu)) return {shrink * mu, 0.0};
  if (std::isinf(mu)) return {shrink * nu, kInf};
  if (norm >= 1.0) return {theta_alpha(norm, mu, nu, 1.0), 1.0};
  const double ah = alpha_hat(norm, mu, nu);
  return {theta_alpha(norm, mu, nu, ah), ah};
}

}  // namespace

ConditionReport check_alg1(const PDProblem& prob, std::optional<double> alpha, double norm_tol) {
  ConditionReport rep;
  rep.norm_estimate = scaled_norm(prob.L, prob.W, prob.U, norm_tol);
  rep.norm_bound = scaled_norm_bound(prob.L, prob.W, prob.U);
  std::tie(rep.mu, rep.nu) = effective_constants(prob);
  if (rep.norm_estimate > 0.0 && rep.norm_estimate < 1.0 && std::isfinite(rep.mu) &&
      std::isfinite(rep.nu))
    rep.alpha_hat = alpha_hat(rep.norm_estimate, rep.mu, rep.nu);
  if (alpha) {
    rep.alpha = *alpha;
    rep.theta = theta_alpha(rep.norm_estimate, rep.mu, rep.nu, rep.alpha);
  } else {
    std::tie(rep.theta, rep.alpha) = theta_best(rep.norm_estimate, rep.mu, rep.nu);
  }
  if (rep.norm_estimate >= 1.0) {
    rep.pass = false;
    rep.detail = "norm: ||U^(1/2) L W^(1/2)|| >= 1";
  } else {
    rep.pass = 2.0 * rep.theta > 1.0;
    rep.detail = rep.pass ? "2*theta > 1" : "2*theta <= 1";
  }
  if (prob.dinv_all_zero()) {
    const double b2 = rep.norm_bound * rep.norm_bound;
    rep.sufficient_block_sum = (1.0 - b2) * rep.mu > 0.5;
  } else {
    rep.sufficient_block_sum = (1.0 - rep.norm_bound) * std::min(rep.mu, rep.nu) > 0.5;
  }
  return rep;
}

ConditionReport check_alg2(const PDProblem& prob, double norm_tol) {
  if (!prob.resolvents_all_zero())
    throw UnsupportedOperation("check_alg2: every primal resolvent operator must be zero");
  ConditionReport rep;
  rep.norm_estimate = scaled_norm(prob.L, prob.W, prob.U, norm_tol);
  rep.norm_bound = scaled_norm_bound(prob.L, prob.W, prob.U);
  std::tie(rep.mu, rep.nu) = effective_constants(prob);
  const double shrink = 1.0 - rep.norm_estimate * rep.norm_estimate;
  double theta;
  if (std::isinf(rep.nu))
    theta = rep.norm_estimate < 1.0 ? rep.mu : -kInf;
  else
    theta = std::min(rep.mu, rep.nu * shrink);
  rep.theta = theta;
  rep.alpha = 0.0;
  rep.pass = rep.norm_estimate < 1.0 && theta > 0.5;
  rep.detail = rep.pass ? "min{mu, nu(1-norm^2)} > 1/2" : "min{mu, nu(1-norm^2)} <= 1/2";
  const double b2 = rep.norm_bound * rep.norm_bound;
  if (prob.dinv_all_zero())
    rep.sufficient_block_sum = b2 < 1.0 && rep.mu > 0.5;
  else
    rep.sufficient_block_sum = std::min(rep.mu, rep.nu * (1.0 - b2)) > 0.5;
  return rep;
}

// ---------------------------------------------------------------------------
// step maps

PDState step_alg1(const PDProblem& prob, const PDState& st, const ActivationPattern& eps,
                  const PDErrors& err, double lambda) {
  check_pattern(prob, eps, CouplingRule::PrimalFollowsDual);
  const int p = prob.p(), q = prob.q();
  PDState out = st;

  // primal phase; the closure guarantees y_j exists for every coupled block
  // an active dual will read
  std::vector<Vec> y(p);
  for (int j = 0; j < p; ++j) {
    if (!eps[j]) continue;
    Vec acc(st.x.blocks[j].size(), 0.0);
    for (int k : prob.L.col_support(j))
      prob.L.block(k, j).apply_adjoint_add(st.v.blocks[k], acc);
    accumulate_forward(acc, prob.primal[j].C, st.x.blocks[j], channel_block(err.c, j));
    const Vec arg = metric_backward(st.x.blocks[j], prob.W.diag[j], acc);
    y[j] = resolvent(prob.primal[j].A, prob.W.diag[j], arg);
    if (err.a) add_into(y[j], err.a->blocks[j]);
    out.x.blocks[j] = relaxed(st.x.blocks[j], y[j], lambda);
  }

  // dual phase reads the reflected intermediate against the pre-update primal
  for (int k = 0; k < q; ++k) {
    if (!eps[p + k]) continue;
    Vec acc(st.v.blocks[k].size(), 0.0);
    for (int j : prob.L.row_support(k)) {
      const Vec t = reflected(y[j], st.x.blocks[j]);
      prob.L.block(k, j).apply_add(t, acc);
    }
    const Vec arg = dual_argument(st.v.blocks[k], prob.U.diag[k], std::move(acc),
                                  prob.dual[k].Dinv, channel_block(err.d, k));
    Vec u = dual_resolvent(prob.dual[k].B, prob.U.diag[k], arg);
    if (err.b) add_into(u, err.b->blocks[k]);
    out.v.blocks[k] = relaxed(st.v.blocks[k], u, lambda);
  }
  return out;
}

PDState step_alg1_sym(const PDProblem& prob, const PDState& st, const ActivationPattern& eps,
                      const PDErrors& err, double lambda) {
  check_pattern(prob, eps, CouplingRule::DualFollowsPrimal);
  const int p = prob.p(), q = prob.q();
  PDState out = st;

  std::vector<Vec> u(q);
  for (int k = 0; k < q; ++k) {
    if (!eps[p + k]) continue;
    Vec acc(st.v.blocks[k].size(), 0.0);
    for (int j : prob.L.row_support(k)) prob.L.block(k, j).apply_add(st.x.blocks[j], acc);
    const Vec arg = dual_argument(st.v.blocks[k], prob.U.diag[k], std::move(acc),
                                  prob.dual[k].Dinv, channel_block(err.d, k));
    u[k] = dual_resolvent(prob.dual[k].B, prob.U.diag[k], arg);
    if (err.b) add_into(u[k], err.b->blocks[k]);
    out.v.blocks[k] = relaxed(st.v.blocks[k], u[k], lambda);
  }

  for (int j = 0; j < p; ++j) {
    if (!eps[j]) continue;
    Vec acc(st.x.blocks[j].size(), 0.0);
    for (int k : prob.L.col_support(j)) {
      const Vec t = reflected(u[k], st.v.blocks[k]);
      prob.L.block(k, j).apply_adjoint_add(t, acc);
    }
    accumulate_forward(acc, prob.primal[j].C, st.x.blocks[j], channel_block(err.c, j));
    const Vec arg = metric_backward(st.x.blocks[j], prob.W.diag[j], acc);
    Vec yj = resolvent(prob.primal[j].A, prob.W.diag[j], arg);
    if (err.a) add_into(yj, err.a->blocks[j]);
    out.x.blocks[j] = relaxed(st.x.blocks[j], yj, lambda);
  }
  return out;
}

PDState step_alg2(const PDProblem& prob, const PDState& st, const ActivationPattern& eps,
                  const PDErrors& err, double lambda) {
  check_pattern(prob, eps, CouplingRule::DualFollowsPrimal);
  if (!prob.resolvents_all_zero())
    throw UnsupportedOperation("step_alg2: every primal resolvent operator must be zero");
  const int p = prob.p(), q = prob.q();
  PDState out = st;

  // forward intermediates, computed only where an active dual (or the block's
  // own commit, which the closure folds into the same set) will read them
  std::vector<Vec> w(p), wt(p);
  std::vector<char> have(p, 0);
  for (int j = 0; j < p; ++j) {
    bool needed = false;
    for (int k : prob.L.col_support(j)) needed = needed || eps[p + k];
    if (!needed) continue;
    have[j] = 1;
    Vec facc(st.x.blocks[j].size(), 0.0);
    accumulate_forward(facc, prob.primal[j].C, st.x.blocks[j], channel_block(err.c, j));
    w[j] = metric_backward(st.x.blocks[j], prob.W.diag[j], facc);
    Vec cacc(st.x.blocks[j].size(), 0.0);
    for (int k : prob.L.col_support(j))
      prob.L.block(k, j).apply_adjoint_add(st.v.blocks[k], cacc);
    wt[j] = metric_backward(w[j], prob.W.diag[j], cacc);
  }

  std::vector<Vec> u(q);
  for (int k = 0; k < q; ++k) {
    if (!eps[p + k]) continue;
    Vec acc(st.v.blocks[k].size(), 0.0);
    for (int j : prob.L.row_support(k)) prob.L.block(k, j).apply_add(wt[j], acc);
    const Vec arg = dual_argument(st.v.blocks[k], prob.U.diag[k], std::move(acc),
                                  prob.dual[k].Dinv, channel_block(err.d, k));
    u[k] = dual_resolvent(prob.dual[k].B, prob.U.diag[k], arg);
    if (err.b) add_into(u[k], err.b->blocks[k]);
    out.v.blocks[k] = relaxed(st.v.blocks[k], u[k], lambda);
  }

  for (int j = 0; j < p; ++j) {
    if (!eps[j]) continue;
    require(have[j] != 0, "step_alg2: internal activation bookkeeping failure");
    Vec acc(st.x.blocks[j].size(), 0.0);
    for (int k : prob.L.col_support(j)) prob.L.block(k, j).apply_adjoint_add(u[k], acc);
    const Vec target = metric_backward(w[j], prob.W.diag[j], acc);
    out.x.blocks[j] = relaxed(st.x.blocks[j], target, lambda);
  }
  return out;
}

PDState step(PDAlgorithm alg, const PDProblem& prob, const PDState& st,
             const ActivationPattern& eps, const PDErrors& err, double lambda) {
  switch (alg) {
    case PDAlgorithm::Alg1:
      return step_alg1(prob, st, eps, err, lambda);
    case PDAlgorithm::Alg1Sym:
      return step_alg1_sym(prob, st, eps, err, lambda);
    case PDAlgorithm::Alg2:
      return step_alg2(prob, st, eps, err, lambda);
  }
  throw UnsupportedOperation("step: unknown algorithm");
}

ConditionReport check(PDAlgorithm alg, const PDProblem& prob) {
  return alg == PDAlgorithm::Alg2 ? check_alg2(prob) : check_alg1(prob);
}

CouplingRule required_rule(PDAlgorithm alg) {
  return alg == PDAlgorithm::Alg1 ? CouplingRule::PrimalFollowsDual
                                  : CouplingRule::DualFollowsPrimal;
}

// ---------------------------------------------------------------------------
// run loop

PDRunResult run_pd(const PDProblem& prob, PDAlgorithm alg, const PDRunConfig& cfg,
                   const ActivationSchedule& schedule, std::uint64_t seed,
                   const PDState* start, const std::function<double(const PDState&)>& objective) {
  require(cfg.lambda > 0.0 && cfg.lambda <= 1.0, "run_pd: lambda must lie in (0,1]");
  require(schedule.length() == prob.p() + prob.q(), "run_pd: schedule length mismatch");

  PDRunResult res;
  res.condition = check(alg, prob);
  if (!res.condition.pass) {
    if (!cfg.force)
      throw ConditionError("run_pd: step-size condition failed (" + res.condition.detail +
                           "); pass force to run anyway");
    res.condition_forced = true;
  }

  Rng pattern_rng(Rng::derive(seed, 0));
  Rng rng_a(Rng::derive(seed, 1));
  Rng rng_b(Rng::derive(seed, 2));
  Rng rng_c(Rng::derive(seed, 3));
  Rng rng_d(Rng::derive(seed, 4));

  PDState state = start ? *start : PDState::zeros(prob);
  const std::vector<int> pdims = prob.primal_dims();
  const std::vector<int> ddims = prob.dual_dims();

  auto row_of = [&](long n, const PDState& s, double px, double dv, long act, long cum,
                    double en) {
    PDRunRow row;
    row.n = n;
    row.objective = objective ? objective(s) : 0.0;
    row.primal_residual = px;
    row.dual_residual = dv;
    row.active_blocks = act;
    row.cum_block_evals = cum;
    row.err_norm = en;
    return row;
  };

  res.rows.push_back(row_of(0, state, 0.0, 0.0, 0, 0, 0.0));
  long cum = 0;
  std::deque<double> window;
  for (long n = 0; n < cfg.stop.max_iters; ++n) {
    const ActivationPattern eps = schedule.sample(pattern_rng);
    const auto ea = make_block_error(cfg.err_a, n, pdims, rng_a);
    const auto eb = make_block_error(cfg.err_b, n, ddims, rng_b);
    const auto ec = make_block_error(cfg.err_c, n, pdims, rng_c);
    const auto ed = make_block_error(cfg.err_d, n, ddims, rng_d);
    PDErrors err;
    err.a = ea ? &*ea : nullptr;
    err.b = eb ? &*eb : nullptr;
    err.c = ec ? &*ec : nullptr;
    err.d = ed ? &*ed : nullptr;

    PDState next = step(alg, prob, state, eps, err, cfg.lambda);
    const double px = next.x.distance(state.x);
    const double dv = next.v.distance(state.v);
    long act = 0;
    for (auto b : eps) act += b;
    cum += act;
    double en2 = 0.0;
    for (const auto* e : {err.a, err.b, err.c, err.d})
      if (e) {
        const double nn = e->norm();
        en2 += nn * nn;
      }
    state = std::move(next);
    res.iterations = n + 1;
    res.rows.push_back(row_of(n + 1, state, px, dv, act, cum, std::sqrt(en2)));

    const double change = std::sqrt(px * px + dv * dv);
    window.push_back(change);
    if (static_cast<int>(window.size()) > cfg.stop.window) window.pop_front();
    if (static_cast<int>(window.size()) == cfg.stop.window &&
        *std::max_element(window.begin(), window.end()) < cfg.stop.tol) {
      res.stop_reason = "converged";
      res.final_state = std::move(state);
      return res;
    }
  }
  res.stop_reason = "max_iters";
  res.final_state = std::move(state);
  return res;
}

}  // namespace rpd
