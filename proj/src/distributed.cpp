#include "rpd/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rpd/detail/kernels.hpp"

namespace rpd {

using detail::accumulate_forward;
using detail::dual_argument;
using detail::metric_backward;
using detail::reflected;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void check_dist_pattern(const DistProblem& prob, const ActivationPattern& eps) {
  require(static_cast<int>(eps.size()) == 2 * prob.m() + prob.r(),
          "distributed step: pattern length mismatch");
  const CouplingStructure st = prob.coupling();
  const std::string bad =
      ActivationSchedule::closure_violation(eps, CouplingRule::Distributed, st);
  if (!bad.empty()) throw ClosureError("distributed step: " + bad);
}

void check_sum_zero(const DistProblem& prob, const DistState& st, const char* who) {
  const auto sums = st.edge_dual_sums(prob);
  for (int l = 0; l < prob.r(); ++l) {
    const double tol = 1e-8 * (1.0 + norm2(st.v_edge[l]));
    require(norm2(sums[l]) <= tol,
            std::string(who) + ": edge dual copies must sum to zero in this mode");
  }
}

Vec edge_average(const DistProblem& prob, const std::vector<Vec>& x, int l) {
  const auto& members = prob.graph.edge(l);
  const int d = prob.d;
  Vec out(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) {
    double s = 0.0;
    for (int i : members) s += x[i][t];
    out[t] = s / static_cast<double>(members.size());
  }
  return out;
}

void refresh_edge_averages(const DistProblem& prob, const ActivationPattern& eps,
                           const std::vector<Vec>& x_new, std::vector<Vec>& xbar) {
  for (int l = 0; l < prob.r(); ++l) {
    bool eta = false;
    for (int i : prob.graph.edge(l)) eta = eta || eps[i];
    if (eta) xbar[l] = edge_average(prob, x_new, l);
  }
}

const Vec* agent_channel(const std::vector<Vec>* ch, int i) {
  return ch ? &(*ch)[i] : nullptr;
}

// agent dual update shared by the resolvent-form steps: u_i from the range
// image of `through`, committed under eps[m+i]
Vec agent_dual_target(const DistProblem& prob, const DistState& st, int i, const Vec& through,
                      const DistErrors& err) {
  const DistAgent& ag = prob.agents[i];
  Vec acc(st.v_agent[i].size(), 0.0);
  ag.M.apply_add(through, acc);
  const Vec arg =
      dual_argument(st.v_agent[i], ag.u, std::move(acc), ag.Dinv, agent_channel(err.d, i));
  Vec u = dual_resolvent(ag.B, ag.u, arg);
  if (err.b) add_into(u, (*err.b)[i]);
  return u;
}

}  // namespace

bool check_connectivity(const Hypergraph& h) {
  std::vector<char> covered(static_cast<std::size_t>(h.m()), 0);
  std::vector<int> parent(static_cast<std::size_t>(h.m()));
  std::iota(parent.begin(), parent.end(), 0);
  for (int l = 0; l < h.r(); ++l) {
    const auto& e = h.edge(l);
    for (int i : e) covered[i] = 1;
    const int root = find_root(parent, e[0]);
    for (int i : e) parent[find_root(parent, i)] = root;
  }
  for (int i = 0; i < h.m(); ++i)
    if (!covered[i]) return false;
  const int root = find_root(parent, 0);
  for (int i = 1; i < h.m(); ++i)
    if (find_root(parent, i) != root) return false;
  return true;
}

DistProblem::DistProblem(int dim, Hypergraph g, std::vector<DistAgent> ag, Vec th)
    : d(dim), graph(std::move(g)), agents(std::move(ag)), theta(std::move(th)) {
  require(d >= 1, "DistProblem: dimension must be positive");
  require(static_cast<int>(agents.size()) == graph.m(), "DistProblem: agent count mismatch");
  require(static_cast<int>(theta.size()) == graph.r(), "DistProblem: edge weight count mismatch");
  for (double t : theta) require(t > 0.0, "DistProblem: edge weights must be positive");
  require(check_connectivity(graph), "DistProblem: hypergraph must be connected");
  for (const auto& a : agents) {
    require(!a.M.is_zero(), "DistProblem: agent coupling map must be nonzero");
    bool nonzero = false;
    for (double v : a.M.a) nonzero = nonzero || v != 0.0;
    require(nonzero, "DistProblem: agent coupling map must be nonzero");
    require(a.M.cols == d, "DistProblem: coupling map domain mismatch");
    require(static_cast<int>(a.w.size()) == d, "DistProblem: shared-space metric mismatch");
    require(static_cast<int>(a.u.size()) == a.M.rows, "DistProblem: range metric mismatch");
    require(a.A.dim == d && a.C.dim == d, "DistProblem: agent operator dims mismatch");
    require(a.B.dim == a.M.rows && a.Dinv.dim == a.M.rows,
            "DistProblem: agent dual operator dims mismatch");
    require(a.mu_tilde > 0.0 && a.nu_tilde > 0.0, "DistProblem: constants must be positive");
    for (double v : a.w) require(v > 0.0, "DistProblem: metrics must be positive");
    for (double v : a.u) require(v > 0.0, "DistProblem: metrics must be positive");
  }
}

double DistProblem::theta_bar(int i) const {
  double s = 0.0;
  for (const auto& [l, slot] : graph.slots(i)) s += theta[l];
  return s;
}

bool DistProblem::dinv_all_zero() const {
  for (const auto& a : agents)
    if (!a.Dinv.is_zero()) return false;
  return true;
}

bool DistProblem::resolvents_all_zero() const {
  for (const auto& a : agents)
    if (!a.A.is_zero()) return false;
  return true;
}

CouplingStructure DistProblem::coupling() const {
  CouplingStructure st;
  st.m = m();
  st.r = r();
  st.edges = graph.edges();
  return st;
}

DistState DistState::zeros(const DistProblem& prob) {
  DistState st;
  st.x.assign(prob.m(), Vec(static_cast<std::size_t>(prob.d), 0.0));
  for (int i = 0; i < prob.m(); ++i)
    st.v_agent.emplace_back(static_cast<std::size_t>(prob.agents[i].M.rows), 0.0);
  for (int l = 0; l < prob.r(); ++l)
    st.v_edge.emplace_back(static_cast<std::size_t>(prob.graph.kappa(l) * prob.d), 0.0);
  st.xbar.assign(prob.r(), Vec(static_cast<std::size_t>(prob.d), 0.0));
  return st;
}

DistState DistState::make(const DistProblem& prob, std::vector<Vec> x0,
                          std::vector<Vec> v_agent0, std::vector<Vec> v_edge0) {
  require(static_cast<int>(x0.size()) == prob.m(), "DistState: agent iterate count mismatch");
  DistState st;
  st.x = std::move(x0);
  st.v_agent = std::move(v_agent0);
  st.v_edge = std::move(v_edge0);
  for (int i = 0; i < prob.m(); ++i) {
    require(static_cast<int>(st.x[i].size()) == prob.d, "DistState: iterate dim mismatch");
    require(static_cast<int>(st.v_agent[i].size()) == prob.agents[i].M.rows,
            "DistState: agent dual dim mismatch");
  }
  require(static_cast<int>(st.v_edge.size()) == prob.r(), "DistState: edge dual count mismatch");
  for (int l = 0; l < prob.r(); ++l)
    require(static_cast<int>(st.v_edge[l].size()) == prob.graph.kappa(l) * prob.d,
            "DistState: edge dual dim mismatch");
  for (int l = 0; l < prob.r(); ++l) st.xbar.push_back(edge_average(prob, st.x, l));
  return st;
}

std::vector<Vec> DistState::edge_dual_sums(const DistProblem& prob) const {
  std::vector<Vec> sums;
  for (int l = 0; l < prob.r(); ++l) {
    const int kappa = prob.graph.kappa(l);
    Vec s(static_cast<std::size_t>(prob.d), 0.0);
    for (int j = 0; j < kappa; ++j)
      for (int t = 0; t < prob.d; ++t) s[t] += v_edge[l][static_cast<std::size_t>(j) * prob.d + t];
    sums.push_back(std::move(s));
  }
  return sums;
}

double chi(const DistProblem& prob) {
  double worst = 0.0;
  for (int i = 0; i < prob.m(); ++i) {
    const auto& a = prob.agents[i];
    const double n = scaled_block_norm(a.M, a.w, a.u);
    double wmax = 0.0;
    for (double v : a.w) wmax = std::max(wmax, v);
    worst = std::max(worst, n * n + prob.theta_bar(i) * wmax);
  }
  return worst;
}

namespace {

std::pair<double, double> dist_effective_constants(const DistProblem& prob) {
  double mu = kInf, nu = kInf;
  for (const auto& a : prob.agents) {
    double wmax = 0.0, umax = 0.0;
    for (double v : a.w) wmax = std::max(wmax, v);
    for (double v : a.u) umax = std::max(umax, v);
    mu = std::min(mu, std::isinf(a.mu_tilde) ? kInf : a.mu_tilde / wmax);
    nu = std::min(nu, a.Dinv.is_zero() || std::isinf(a.nu_tilde) ? kInf : a.nu_tilde / umax);
  }
  return {mu, nu};
}

}  // namespace

ConditionReport check_dist1(const DistProblem& prob) {
  ConditionReport rep;
  const double c = chi(prob);
  rep.norm_estimate = std::sqrt(c);
  rep.norm_bound = rep.norm_estimate;
  std::tie(rep.mu, rep.nu) = dist_effective_constants(prob);
  if (rep.norm_estimate > 0.0 && rep.norm_estimate < 1.0 && std::isfinite(rep.mu) &&
      std::isfinite(rep.nu)) {
    rep.alpha_hat = alpha_hat(rep.norm_estimate, rep.mu, rep.nu);
    rep.alpha = rep.alpha_hat;
    rep.theta = theta_alpha(rep.norm_estimate, rep.mu, rep.nu, rep.alpha);
  } else if (std::isinf(rep.nu)) {
    rep.theta = (1.0 - c) * rep.mu;
  } else if (std::isinf(rep.mu)) {
    rep.theta = (1.0 - c) * rep.nu;
  } else {
    rep.theta = std::min(rep.mu, rep.nu);
  }
  rep.pass = c < 1.0 && 2.0 * rep.theta > 1.0;
  rep.detail = "chi = " + std::to_string(c) + (rep.pass ? ", 2*theta > 1" : ", 2*theta <= 1");
  rep.sufficient_block_sum = (1.0 - rep.norm_estimate) * std::min(rep.mu, rep.nu) > 0.5;
  return rep;
}

ConditionReport check_dist2(const DistProblem& prob) {
  if (!prob.resolvents_all_zero())
    throw UnsupportedOperation("check_dist2: every agent resolvent operator must be zero");
  ConditionReport rep;
  const double c = chi(prob);
  rep.norm_estimate = std::sqrt(c);
  rep.norm_bound = rep.norm_estimate;
  std::tie(rep.mu, rep.nu) = dist_effective_constants(prob);
  rep.theta = std::isinf(rep.nu) ? (c < 1.0 ? rep.mu : -kInf)
                                 : std::min(rep.mu, rep.nu * (1.0 - c));
  rep.pass = c < 1.0 && rep.theta > 0.5;
  rep.detail = "chi = " + std::to_string(c) +
               (rep.pass ? ", min{mu, nu(1-chi)} > 1/2" : ", min{mu, nu(1-chi)} <= 1/2");
  rep.sufficient_block_sum = rep.pass;
  return rep;
}

// ---------------------------------------------------------------------------
// steps

DistState step_dist1(const DistProblem& prob, const DistState& st, const ActivationPattern& eps,
                     const DistErrors& err, double lambda, bool sum_zero_mode) {
  check_dist_pattern(prob, eps);
  if (sum_zero_mode) check_sum_zero(prob, st, "step_dist1");
  const int m = prob.m(), r = prob.r(), d = prob.d;
  DistState out = st;

  // edge phase: resolvent of the scaled consensus normal cone on the stacked
  // member iterates
  std::vector<Vec> w_edge(r);
  std::vector<Vec> u_edge(r);
  for (int l = 0; l < r; ++l) {
    if (!eps[2 * m + l]) continue;
    const auto& members = prob.graph.edge(l);
    const int kappa = static_cast<int>(members.size());
    Vec acc(static_cast<std::size_t>(kappa) * d);
    for (int j = 0; j < kappa; ++j)
      for (int t = 0; t < d; ++t) acc[static_cast<std::size_t>(j) * d + t] = st.x[members[j]][t];
    const Vec theta_vec(static_cast<std::size_t>(kappa) * d, prob.theta[l]);
    const SmoothFn no_dinv = SmoothFn::zero(kappa * d);
    const Vec arg = dual_argument(st.v_edge[l], theta_vec, std::move(acc), no_dinv, nullptr);
    u_edge[l] = dual_resolvent(MonotoneOp::consensus(kappa, d), theta_vec, arg);
    w_edge[l] = reflected(u_edge[l], st.v_edge[l]);
    out.v_edge[l] = relaxed(st.v_edge[l], u_edge[l], lambda);
  }

  // agent dual phase
  std::vector<Vec> u_agent(m);
  for (int i = 0; i < m; ++i) {
    if (!eps[m + i]) continue;
    u_agent[i] = agent_dual_target(prob, st, i, st.x[i], err);
    out.v_agent[i] = relaxed(st.v_agent[i], u_agent[i], lambda);
  }

  // agent primal phase; the closure guarantees every coupled dual above is live
  for (int i = 0; i < m; ++i) {
    if (!eps[i]) continue;
    const DistAgent& ag = prob.agents[i];
    Vec acc(static_cast<std::size_t>(d), 0.0);
    const Vec refl = reflected(u_agent[i], st.v_agent[i]);
    ag.M.apply_adjoint_add(refl, acc);
    for (const auto& [l, slot] : prob.graph.slots(i))
      for (int t = 0; t < d; ++t) acc[t] += w_edge[l][static_cast<std::size_t>(slot) * d + t];
    accumulate_forward(acc, ag.C, st.x[i], agent_channel(err.c, i));
    const Vec arg = metric_backward(st.x[i], ag.w, acc);
    Vec y = resolvent(ag.A, ag.w, arg);
    if (err.a) add_into(y, (*err.a)[i]);
    out.x[i] = relaxed(st.x[i], y, lambda);
  }

  refresh_edge_averages(prob, eps, out.x, out.xbar);
  return out;
}

DistState step_dist_opt(const DistProblem& prob, const DistState& st,
                        const ActivationPattern& eps, const DistErrors& err, double lambda) {
  check_dist_pattern(prob, eps);
  check_sum_zero(prob, st, "step_dist_opt");
  const int m = prob.m(), r = prob.r(), d = prob.d;
  DistState out = st;
  const double half_lambda = 0.5 * lambda;

  // edge phase reads the cached averages; for two-member edges the deviation
  // is computed as half the pairwise difference, which is exactly
  // antisymmetric in the two slots
  std::vector<Vec> w_edge(r);
  for (int l = 0; l < r; ++l) {
    if (!eps[2 * m + l]) continue;
    const auto& members = prob.graph.edge(l);
    const int kappa = static_cast<int>(members.size());
    const double two_theta = 2.0 * prob.theta[l];
    Vec w(static_cast<std::size_t>(kappa) * d);
    if (kappa == 2) {
      const Vec& xa = st.x[members[0]];
      const Vec& xb = st.x[members[1]];
      for (int t = 0; t < d; ++t) {
        const double dev = 0.5 * (xa[t] - xb[t]);
        w[t] = two_theta * dev + st.v_edge[l][t];
        w[static_cast<std::size_t>(d) + t] =
            two_theta * (-dev) + st.v_edge[l][static_cast<std::size_t>(d) + t];
      }
    } else {
      for (int j = 0; j < kappa; ++j)
        for (int t = 0; t < d; ++t) {
          const double dev = st.x[members[j]][t] - st.xbar[l][t];
          w[static_cast<std::size_t>(j) * d + t] =
              two_theta * dev + st.v_edge[l][static_cast<std::size_t>(j) * d + t];
        }
    }
    w_edge[l] = std::move(w);
    out.v_edge[l] = relaxed(st.v_edge[l], w_edge[l], half_lambda);
  }

  std::vector<Vec> u_agent(m);
  for (int i = 0; i < m; ++i) {
    if (!eps[m + i]) continue;
    u_agent[i] = agent_dual_target(prob, st, i, st.x[i], err);
    out.v_agent[i] = relaxed(st.v_agent[i], u_agent[i], lambda);
  }

  for (int i = 0; i < m; ++i) {
    if (!eps[i]) continue;
    const DistAgent& ag = prob.agents[i];
    Vec acc(static_cast<std::size_t>(d), 0.0);
    const Vec refl = reflected(u_agent[i], st.v_agent[i]);
    ag.M.apply_adjoint_add(refl, acc);
    for (const auto& [l, slot] : prob.graph.slots(i))
      for (int t = 0; t < d; ++t) acc[t] += w_edge[l][static_cast<std::size_t>(slot) * d + t];
    accumulate_forward(acc, ag.C, st.x[i], agent_channel(err.c, i));
    const Vec arg = metric_backward(st.x[i], ag.w, acc);
    Vec y = resolvent(ag.A, ag.w, arg);
    if (err.a) add_into(y, (*err.a)[i]);
    out.x[i] = relaxed(st.x[i], y, lambda);
  }

  refresh_edge_averages(prob, eps, out.x, out.xbar);
  return out;
}

DistState step_dist_pairwise(const DistProblem& prob, const DistState& st,
                             const ActivationPattern& eps, double lambda) {
  require(prob.graph.all_pairwise(), "step_dist_pairwise: every edge must have two members");
  for (const auto& a : prob.agents)
    require(a.B.is_zero() && a.Dinv.is_zero(),
            "step_dist_pairwise: the reduced scheme has no dual channel");
  check_dist_pattern(prob, eps);
  const int m = prob.m(), r = prob.r(), d = prob.d;
  for (int i = 0; i < m; ++i)
    require(eps[m + i] == eps[i], "step_dist_pairwise: requires the activation tie");
  for (int l = 0; l < r; ++l) {
    std::uint8_t eta = 0;
    for (int i : prob.graph.edge(l)) eta = std::max(eta, eps[i]);
    require(eps[2 * m + l] == eta, "step_dist_pairwise: requires the activation tie");
  }

  DistState out = st;
  const double half_lambda = 0.5 * lambda;
  std::vector<Vec> w_edge(r);
  for (int l = 0; l < r; ++l) {
    if (!eps[2 * m + l]) continue;
    const auto& members = prob.graph.edge(l);
    const double two_theta = 2.0 * prob.theta[l];
    const Vec& xa = st.x[members[0]];
    const Vec& xb = st.x[members[1]];
    Vec w(2 * static_cast<std::size_t>(d));
    for (int t = 0; t < d; ++t) {
      const double dev = 0.5 * (xa[t] - xb[t]);
      w[t] = two_theta * dev + st.v_edge[l][t];
      w[static_cast<std::size_t>(d) + t] =
          two_theta * (-dev) + st.v_edge[l][static_cast<std::size_t>(d) + t];
    }
    // relax the first copy, mirror the second exactly
    for (int t = 0; t < d; ++t) {
      out.v_edge[l][t] = st.v_edge[l][t] + half_lambda * (w[t] - st.v_edge[l][t]);
      out.v_edge[l][static_cast<std::size_t>(d) + t] = -out.v_edge[l][t];
    }
    w_edge[l] = std::move(w);
  }

  for (int i = 0; i < m; ++i) {
    if (!eps[i]) continue;
    const DistAgent& ag = prob.agents[i];
    Vec acc(static_cast<std::size_t>(d), 0.0);
    for (const auto& [l, slot] : prob.graph.slots(i))
      for (int t = 0; t < d; ++t) acc[t] += w_edge[l][static_cast<std::size_t>(slot) * d + t];
    accumulate_forward(acc, ag.C, st.x[i], nullptr);
    const Vec arg = metric_backward(st.x[i], ag.w, acc);
    const Vec y = resolvent(ag.A, ag.w, arg);
    out.x[i] = relaxed(st.x[i], y, lambda);
  }

  refresh_edge_averages(prob, eps, out.x, out.xbar);
  return out;
}

DistState step_dist2(const DistProblem& prob, const DistState& st, const ActivationPattern& eps,
                     const DistErrors& err, double lambda) {
  if (!prob.resolvents_all_zero())
    throw UnsupportedOperation("step_dist2: every agent resolvent operator must be zero");
  check_dist_pattern(prob, eps);
  check_sum_zero(prob, st, "step_dist2");
  const int m = prob.m(), r = prob.r(), d = prob.d;
  DistState out = st;

  // forward intermediates for every agent some live dual will read
  std::vector<Vec> w(m), wt(m);
  for (int i = 0; i < m; ++i) {
    bool eta = eps[m + i] != 0;
    for (const auto& [l, slot] : prob.graph.slots(i)) eta = eta || eps[2 * m + l];
    if (!eta) continue;
    const DistAgent& ag = prob.agents[i];
    Vec facc(static_cast<std::size_t>(d), 0.0);
    accumulate_forward(facc, ag.C, st.x[i], agent_channel(err.c, i));
    w[i] = metric_backward(st.x[i], ag.w, facc);
    Vec cacc(static_cast<std::size_t>(d), 0.0);
    ag.M.apply_adjoint_add(st.v_agent[i], cacc);
    for (const auto& [l, slot] : prob.graph.slots(i))
      for (int t = 0; t < d; ++t) cacc[t] += st.v_edge[l][static_cast<std::size_t>(slot) * d + t];
    wt[i] = metric_backward(w[i], ag.w, cacc);
  }

  std::vector<Vec> u_agent(m);
  for (int i = 0; i < m; ++i) {
    if (!eps[m + i]) continue;
    u_agent[i] = agent_dual_target(prob, st, i, wt[i], err);
    out.v_agent[i] = relaxed(st.v_agent[i], u_agent[i], lambda);
  }

  std::vector<Vec> u_edge(r);
  for (int l = 0; l < r; ++l) {
    if (!eps[2 * m + l]) continue;
    const auto& members = prob.graph.edge(l);
    const int kappa = static_cast<int>(members.size());
    const double theta = prob.theta[l];
    const double factor = theta / static_cast<double>(kappa);
    Vec wbar(static_cast<std::size_t>(d), 0.0);
    for (int i : members) add_into(wbar, wt[i]);
    for (int t = 0; t < d; ++t) wbar[t] = factor * wbar[t];
    Vec u(static_cast<std::size_t>(kappa) * d);
    for (int j = 0; j < kappa; ++j)
      for (int t = 0; t < d; ++t)
        u[static_cast<std::size_t>(j) * d + t] =
            st.v_edge[l][static_cast<std::size_t>(j) * d + t] + theta * wt[members[j]][t] -
            wbar[t];
    u_edge[l] = std::move(u);
    out.v_edge[l] = relaxed(st.v_edge[l], u_edge[l], lambda);
  }

  for (int i = 0; i < m; ++i) {
    if (!eps[i]) continue;
    const DistAgent& ag = prob.agents[i];
    Vec acc(static_cast<std::size_t>(d), 0.0);
    ag.M.apply_adjoint_add(u_agent[i], acc);
    for (const auto& [l, slot] : prob.graph.slots(i))
      for (int t = 0; t < d; ++t) acc[t] += u_edge[l][static_cast<std::size_t>(slot) * d + t];
    const Vec target = metric_backward(w[i], ag.w, acc);
    out.x[i] = relaxed(st.x[i], target, lambda);
  }

  refresh_edge_averages(prob, eps, out.x, out.xbar);
  return out;
}

// ---------------------------------------------------------------------------
// product-space materialization

PDProblem build_lifted(const DistProblem& prob) {
  const int m = prob.m(), r = prob.r(), d = prob.d;
  std::vector<int> col_dims(static_cast<std::size_t>(m), d);
  std::vector<int> row_dims;
  for (int i = 0; i < m; ++i) row_dims.push_back(prob.agents[i].M.rows);
  for (int l = 0; l < r; ++l) row_dims.push_back(prob.graph.kappa(l) * d);

  std::map<std::pair<int, int>, LinearBlock> blocks;
  for (int i = 0; i < m; ++i) blocks.emplace(std::make_pair(i, i), prob.agents[i].M);
  for (int l = 0; l < r; ++l) {
    const auto& members = prob.graph.edge(l);
    const int kappa = static_cast<int>(members.size());
    for (int j = 0; j < kappa; ++j) {
      std::vector<double> sel(static_cast<std::size_t>(kappa) * d * d, 0.0);
      for (int t = 0; t < d; ++t)
        sel[(static_cast<std::size_t>(j) * d + t) * d + t] = 1.0;
      blocks.emplace(std::make_pair(m + l, members[j]), LinearBlock(kappa * d, d, std::move(sel)));
    }
  }
  BlockOperatorMatrix L(row_dims, col_dims, blocks);

  std::vector<PrimalBlock> primal;
  std::vector<DualBlock> dual;
  std::vector<Vec> wdiag, udiag;
  for (int i = 0; i < m; ++i) {
    const auto& a = prob.agents[i];
    primal.push_back({d, a.A, a.C, a.mu_tilde});
    wdiag.push_back(a.w);
  }
  for (int i = 0; i < m; ++i) {
    const auto& a = prob.agents[i];
    dual.push_back({a.M.rows, a.B, a.Dinv, a.nu_tilde});
    udiag.push_back(a.u);
  }
  for (int l = 0; l < r; ++l) {
    const int kappa = prob.graph.kappa(l);
    dual.push_back({kappa * d, MonotoneOp::consensus(kappa, d), SmoothFn::zero(kappa * d),
                    std::numeric_limits<double>::infinity()});
    udiag.emplace_back(static_cast<std::size_t>(kappa) * d, prob.theta[l]);
  }
  return PDProblem(std::move(primal), std::move(dual), std::move(L), DiagonalMetric(wdiag),
                   DiagonalMetric(udiag));
}

PDState lift_state(const DistProblem& prob, const DistState& st) {
  PDState z;
  z.x.blocks = st.x;
  z.v.blocks = st.v_agent;
  for (int l = 0; l < prob.r(); ++l) z.v.blocks.push_back(st.v_edge[l]);
  return z;
}

DistState lower_state(const DistProblem& prob, const PDState& st) {
  std::vector<Vec> x(st.x.blocks.begin(), st.x.blocks.end());
  std::vector<Vec> va(st.v.blocks.begin(), st.v.blocks.begin() + prob.m());
  std::vector<Vec> ve(st.v.blocks.begin() + prob.m(), st.v.blocks.end());
  return DistState::make(prob, std::move(x), std::move(va), std::move(ve));
}

double consensus_disagreement(const DistProblem& prob, const DistState& st) {
  double worst = 0.0;
  for (int l = 0; l < prob.r(); ++l) {
    const auto& members = prob.graph.edge(l);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        Vec diff = st.x[members[a]];
        sub_into(diff, st.x[members[b]]);
        worst = std::max(worst, norm2(diff));
      }
  }
  return worst;
}

}  // namespace rpd
