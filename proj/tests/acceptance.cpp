// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Tolerances are pinned in code next to each check.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "rpd/runner.hpp"
#include "test_util.hpp"

using namespace rpd;
using namespace testutil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 means no stated bound
  std::function<bool(std::string&)> run;
};

bool approx_le(double value, double bound) { return value <= bound; }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. decomposition identity across the prox library

bool criterion_moreau(std::string& note) {
  Rng rng(1001);
  double worst = 0.0;
  const int n = 4;
  for (int metric_case = 0; metric_case < 3; ++metric_case) {
    Vec u(n, 1.0);
    if (metric_case == 1) u.assign(n, 0.3);
    if (metric_case == 2)
      for (auto& v : u) v = 0.2 + 2.0 * rng.uniform();
    std::vector<ProxFn> kinds{ProxFn::zero(n), ProxFn::l1(n, 0.7),
                              ProxFn::sq_distance(random_vec(n, rng), 1.3),
                              ProxFn::box_uniform(n, -0.5, 1.5),
                              ProxFn::point(random_vec(n, rng))};
    for (const auto& f : kinds)
      for (int trial = 0; trial < 50; ++trial) {
        const Vec v = random_vec(n, rng, 2.0);
        const Vec got = prox_conjugate(f, u, v);
        const Vec want = oracle_conj_prox(f, u, v);
        worst = std::max(worst, vec_max_diff(got, want));
      }
  }
  note = "worst deviation " + sci(worst);
  return approx_le(worst, 1e-10);
}

// ---------------------------------------------------------------------------
// 2. deterministic equivalence with a direct transcription

double soft(double x, double t) { return x > t ? x - t : (x < -t ? x + t : 0.0); }

bool criterion_deterministic_equivalence(std::string& note) {
  double worst = 0.0;
  {
    const LassoData lasso = make_lasso(20, 40, 0.1, 7);
    const double s = calibrate_scale(
        [&](double t) { return check_alg1(lasso_problem(lasso, t, t)).pass; });
    PDProblem prob = lasso_problem(lasso, s, s);
    const SmoothFn h = SmoothFn::quadratic(lasso.A, lasso.b);
    Vec x(20, 0.0), v(20, 0.0);
    PDState st = PDState::zeros(prob);
    const ActivationPattern full(2, 1);
    for (int n = 0; n < 500; ++n) {
      st = step_alg1(prob, st, full, {}, 0.9);
      // transcription: primal prox step, reflected dual step, relaxation
      const Vec grad = h.grad(x);
      Vec y(20);
      for (int i = 0; i < 20; ++i) y[i] = soft(x[i] - s * (v[i] + grad[i]), s * lasso.tau);
      Vec unew(20, 0.0);  // vacuous dual: conjugate prox of the zero function
      for (int i = 0; i < 20; ++i) x[i] += 0.9 * (y[i] - x[i]);
      for (int i = 0; i < 20; ++i) v[i] += 0.9 * (unew[i] - v[i]);
      worst = std::max(worst, vec_max_diff(st.x.blocks[0], x));
      worst = std::max(worst, vec_max_diff(st.v.blocks[0], v));
    }
  }
  {
    const Tv1dData tv = make_tv1d(50, 0.4, 9);
    const double s =
        calibrate_scale([&](double t) { return check_alg1(tv1d_problem(tv, t, t)).pass; });
    PDProblem prob = tv1d_problem(tv, s, s);
    Vec x(50, 0.0), v(49, 0.0);
    PDState st = PDState::zeros(prob);
    const ActivationPattern full(2, 1);
    for (int n = 0; n < 500; ++n) {
      st = step_alg1(prob, st, full, {}, 0.9);
      Vec y(50);
      Vec dtv(50, 0.0);
      tv.D.apply_adjoint_add(v, dtv);
      for (int i = 0; i < 50; ++i) y[i] = x[i] - s * (dtv[i] + (x[i] - tv.b[i]));
      Vec refl(50);
      for (int i = 0; i < 50; ++i) refl[i] = 2.0 * y[i] - x[i];
      const Vec dr = tv.D.apply(refl);
      Vec unew(49);
      for (int i = 0; i < 49; ++i) unew[i] = std::clamp(v[i] + s * dr[i], -tv.tau, tv.tau);
      for (int i = 0; i < 50; ++i) x[i] += 0.9 * (y[i] - x[i]);
      for (int i = 0; i < 49; ++i) v[i] += 0.9 * (unew[i] - v[i]);
      worst = std::max(worst, vec_max_diff(st.x.blocks[0], x));
      worst = std::max(worst, vec_max_diff(st.v.blocks[0], v));
    }
  }
  note = "worst deviation " + sci(worst);
  return approx_le(worst, 1e-12);
}

// ---------------------------------------------------------------------------
// 3. lifted product-space oracle, bitwise

bool criterion_lifted_oracle(std::string& note) {
  const int m = 4, d = 3;
  Rng data_rng(77);
  Hypergraph g = Hypergraph::ring(m);
  std::vector<DistAgent> agents;
  for (int i = 0; i < m; ++i) {
    DistAgent ag;
    ag.A = MonotoneOp::subdifferential(ProxFn::l1(d, 0.05));
    SmoothFn h = SmoothFn::quadratic(random_block(d + 1, d, data_rng, 0.5),
                                     random_vec(d + 1, data_rng));
    ag.mu_tilde = 1.0 / h.lipschitz;
    ag.C = std::move(h);
    ag.M = random_block(2, d, data_rng, 0.5);
    ag.B = MonotoneOp::subdifferential(ProxFn::sq_distance(random_vec(2, data_rng), 0.6));
    SmoothFn dinv = SmoothFn::quadratic(LinearBlock::identity(2), Vec(2, 0.0), 0.4);
    ag.nu_tilde = 1.0 / dinv.lipschitz;
    ag.Dinv = std::move(dinv);
    ag.w.assign(static_cast<std::size_t>(d), 0.05);
    ag.u.assign(2, 0.05);
    agents.push_back(std::move(ag));
  }
  const DistProblem prob(d, std::move(g), std::move(agents), Vec(4, 0.2));
  const PDProblem lifted = build_lifted(prob);
  auto schedule = ActivationSchedule::bernoulli(Vec(2 * m + prob.r(), 0.5),
                                                CouplingRule::Distributed, prob.coupling());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng init_rng(seed);
    DistState st = DistState::zeros(prob);
    for (int i = 0; i < m; ++i) st.x[i] = random_vec(d, init_rng);
    st = DistState::make(prob, st.x, st.v_agent, st.v_edge);
    PDState z = lift_state(prob, st);
    Rng pat(1000 + seed);
    for (int n = 0; n < 50; ++n) {
      const auto eps = schedule.sample(pat);
      st = step_dist1(prob, st, eps, {}, 0.85, false);
      z = step_alg1_sym(lifted, z, eps, {}, 0.85);
      const PDState lifted_state = lift_state(prob, st);
      for (int j = 0; j < lifted.p(); ++j)
        if (!vec_equal(lifted_state.x.blocks[j], z.x.blocks[j])) {
          note = "primal mismatch at iteration " + std::to_string(n);
          return false;
        }
      for (int k = 0; k < lifted.q(); ++k)
        if (!vec_equal(lifted_state.v.blocks[k], z.v.blocks[k])) {
          note = "dual mismatch at iteration " + std::to_string(n);
          return false;
        }
    }
  }
  note = "5 seeds x 50 iterations, exact match";
  return true;
}

// ---------------------------------------------------------------------------
// 4. convergence to references

bool criterion_convergence(std::string& note) {
  // (a) randomized lasso
  const LassoData lasso = make_lasso(20, 40, 0.1, 7);
  const ReferenceSolution lref = lasso_reference(lasso, 1e-11);
  const double s =
      calibrate_scale([&](double t) { return check_alg1(lasso_problem(lasso, t, t)).pass; });
  PDProblem prob = lasso_problem(lasso, s, s);
  auto schedule = ActivationSchedule::bernoulli(Vec(2, 0.5), CouplingRule::PrimalFollowsDual,
                                                prob.coupling());
  double worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PDRunConfig cfg;
    cfg.lambda = 1.0;
    cfg.stop.max_iters = 20000;
    cfg.stop.tol = 0.0;
    const LassoData data = lasso;
    const auto res = run_pd(prob, PDAlgorithm::Alg1, cfg, schedule, seed, nullptr,
                            [&data](const PDState& st) {
                              return lasso_objective(data, st.x.blocks[0]);
                            });
    worst_gap = std::max(worst_gap, res.rows.back().objective - lref.objective);
  }
  if (worst_gap >= 1e-4) {
    note = "lasso worst gap " + sci(worst_gap);
    return false;
  }

  // (b) distributed ridge with single-agent wake-ups
  const RidgeConsensusData data = make_ridge_consensus(5, 10, 12, 0.1, 21);
  const Hypergraph ring = Hypergraph::ring(5);
  const double w = calibrate_scale(
      [&](double t) { return check_dist1(ridge_consensus_problem(data, ring, t, 1e-9)).pass; });
  const double theta = calibrate_scale(
      [&](double t) { return check_dist1(ridge_consensus_problem(data, ring, w, t)).pass; });
  const DistProblem dprob = ridge_consensus_problem(data, ring, w, theta);
  const ReferenceSolution rref = ridge_consensus_reference(data);
  auto dschedule = ActivationSchedule::single_seed(CouplingRule::Distributed, dprob.coupling());
  double worst_dist = 0.0, worst_cons = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng pat(seed);
    DistState st = DistState::zeros(dprob);
    for (int n = 0; n < 60000; ++n) st = step_dist_opt(dprob, st, dschedule.sample(pat), {}, 1.0);
    for (int i = 0; i < 5; ++i) {
      Vec diff = st.x[i];
      sub_into(diff, rref.x);
      worst_dist = std::max(worst_dist, norm2(diff));
    }
    worst_cons = std::max(worst_cons, consensus_disagreement(dprob, st));
  }
  note = "lasso gap " + sci(worst_gap) + ", ridge dist " + sci(worst_dist) +
         ", consensus " + sci(worst_cons);
  return worst_dist < 1e-5 && worst_cons < 1e-5;
}

// ---------------------------------------------------------------------------
// 5. error tolerance

bool criterion_error_tolerance(std::string& note) {
  const LassoData lasso = make_lasso(20, 40, 0.1, 7);
  const ReferenceSolution lref = lasso_reference(lasso, 1e-11);
  const double s =
      calibrate_scale([&](double t) { return check_alg1(lasso_problem(lasso, t, t)).pass; });
  PDProblem prob = lasso_problem(lasso, s, s);
  auto schedule = ActivationSchedule::bernoulli(Vec(2, 0.5), CouplingRule::PrimalFollowsDual,
                                                prob.coupling());
  double worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PDRunConfig cfg;
    cfg.lambda = 1.0;
    cfg.stop.max_iters = 20000;
    cfg.stop.tol = 0.0;
    cfg.err_a = cfg.err_b = cfg.err_c = cfg.err_d = ErrorInjector::power(1.0, 2.0);
    const LassoData data = lasso;
    const auto res = run_pd(prob, PDAlgorithm::Alg1, cfg, schedule, seed, nullptr,
                            [&data](const PDState& st) {
                              return lasso_objective(data, st.x.blocks[0]);
                            });
    worst_gap = std::max(worst_gap, res.rows.back().objective - lref.objective);
  }
  note = "worst gap with decaying errors on all channels " + sci(worst_gap);
  return worst_gap < 1e-4;
}

// ---------------------------------------------------------------------------
// 6. condition-checker correctness

bool criterion_checker(std::string& note) {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = 0.1 + 10.0 * rng.uniform();
    const double nu = 0.1 + 10.0 * rng.uniform();
    const double norm = 0.05 + 0.9 * rng.uniform();
    const double best = theta_alpha(norm, mu, nu, alpha_hat(norm, mu, nu));
    const double oracle =
        oracle_theta_max([&](double a) { return theta_alpha(norm, mu, nu, a); });
    worst = std::max(worst, std::abs(best - oracle));
  }
  if (worst > 1e-8) {
    note = "maximizer deviation " + sci(worst);
    return false;
  }
  // boundary verdicts
  auto scalar = [&](double w, double u, double mu_t, double nu_t) {
    PrimalBlock pb{1, MonotoneOp::zero(1),
                   SmoothFn::quadratic(LinearBlock::scalar(1.0), {0.0}), mu_t};
    DualBlock db{1, MonotoneOp::zero(1),
                 SmoothFn::quadratic(LinearBlock::scalar(1.0), {0.0}), nu_t};
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::scalar(1.0)}};
    return PDProblem({pb}, {db}, BlockOperatorMatrix({1}, {1}, blocks),
                     DiagonalMetric::uniform(w, {1}), DiagonalMetric::uniform(u, {1}));
  };
  const bool norm_fail = !check_alg1(scalar(1.0, 1.0, 5.0, 5.0)).pass;          // norm = 1
  const bool mu_fail = !check_alg1(scalar(1e-8, 1e-8, 0.5e-8, 0.5e-8)).pass;    // mu = nu = 1/2
  note = "max deviation " + sci(worst) + ", boundary verdicts " +
         (norm_fail && mu_fail ? "fail as required" : "NOT failing");
  return norm_fail && mu_fail;
}

// ---------------------------------------------------------------------------
// 7. invariant suite

bool criterion_invariants(std::string& note) {
  Rng rng(31415);
  bool ok = true;
  std::string why;

  // inactive-block immutability on a randomized two-block problem
  {
    const Tv1dData tv = make_tv1d(16, 0.3, 3);
    const double s =
        calibrate_scale([&](double t) { return check_alg1(tv1d_problem(tv, t, t)).pass; });
    PDProblem prob = tv1d_problem(tv, s, s);
    PDState st = PDState::zeros(prob);
    st.x.blocks[0] = random_vec(16, rng);
    st.v.blocks[0] = random_vec(15, rng, 0.1);
    const PDState a = step_alg1(prob, st, {1, 0}, {}, 0.7);
    const PDState b = step_alg1_sym(prob, st, {0, 1}, {}, 0.7);
    ok = ok && vec_equal(a.v.blocks[0], st.v.blocks[0]) &&
         vec_equal(b.x.blocks[0], st.x.blocks[0]);
    if (!ok) why = "inactive-block immutability";
  }

  // sum-zero recursion and pairwise antisymmetry
  if (ok) {
    const int m = 4, d = 2;
    Hypergraph g = Hypergraph::ring(m);
    std::vector<DistAgent> agents;
    for (int i = 0; i < m; ++i) {
      DistAgent ag;
      ag.A = MonotoneOp::subdifferential(ProxFn::l1(d, 0.05));
      SmoothFn h = SmoothFn::quadratic(random_block(d, d, rng, 0.5), random_vec(d, rng));
      ag.mu_tilde = 1.0 / h.lipschitz;
      ag.C = std::move(h);
      ag.B = MonotoneOp::zero(d);
      ag.Dinv = SmoothFn::zero(d);
      ag.nu_tilde = kInf;
      ag.M = LinearBlock::identity(d);
      ag.w.assign(static_cast<std::size_t>(d), 0.05);
      ag.u.assign(static_cast<std::size_t>(d), 1e-8);
      agents.push_back(std::move(ag));
    }
    DistProblem prob(d, std::move(g), std::move(agents), Vec(4, 0.3));
    auto schedule = ActivationSchedule::single_seed(CouplingRule::Distributed, prob.coupling());
    DistState st = DistState::zeros(prob);
    for (int i = 0; i < m; ++i) st.x[i] = random_vec(d, rng);
    st = DistState::make(prob, st.x, st.v_agent, st.v_edge);
    DistState pair = st;
    Rng pat(8);
    for (int n = 0; n < 60 && ok; ++n) {
      const auto eps = schedule.sample(pat);
      st = step_dist1(prob, st, eps, {}, 0.9, true);
      for (const auto& sums : st.edge_dual_sums(prob))
        ok = ok && norm2(sums) < 1e-12;
      pair = step_dist_pairwise(prob, pair, eps, 0.9);
      for (int l = 0; l < prob.r(); ++l)
        for (int t = 0; t < d; ++t) ok = ok && pair.v_edge[l][d + t] == -pair.v_edge[l][t];
      if (!ok) why = "sum-zero or antisymmetry";
    }
  }

  // firm nonexpansiveness of every resolvent kind
  if (ok) {
    std::vector<MonotoneOp> ops{
        MonotoneOp::zero(3),
        MonotoneOp::subdifferential(ProxFn::l1(3, 0.6)),
        MonotoneOp::subdifferential(ProxFn::sq_distance(random_vec(3, rng), 1.1)),
        MonotoneOp::subdifferential(ProxFn::box_uniform(3, -1.0, 1.0)),
        MonotoneOp::subdifferential(ProxFn::point(random_vec(3, rng))),
        MonotoneOp::consensus(3, 1)};
    const Vec w(3, 0.8);
    for (const auto& op : ops)
      for (int trial = 0; trial < 100 && ok; ++trial) {
        const Vec x = random_vec(3, rng, 2.0), y = random_vec(3, rng, 2.0);
        const Vec jx = resolvent(op, w, x), jy = resolvent(op, w, y);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < 3; ++i) {
          lhs += (jx[i] - jy[i]) * (jx[i] - jy[i]);
          rhs += (x[i] - y[i]) * (jx[i] - jy[i]);
        }
        ok = ok && lhs <= rhs + 1e-10;
      }
    if (!ok) why = "firm nonexpansiveness";
  }

  // gradients against finite differences
  if (ok) {
    for (int trial = 0; trial < 10 && ok; ++trial) {
      const SmoothFn q = SmoothFn::quadratic(random_block(5, 4, rng), random_vec(5, rng));
      ok = ok && gradient_check(q, random_vec(4, rng), 1e-5) < 1e-5;
    }
    if (!ok) why = "gradient check";
  }

  // adjoint identity
  if (ok) {
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const LinearBlock M = random_block(4, 3, rng);
      std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, M}};
      BlockOperatorMatrix L({4}, {3}, blocks);
      BlockVector x(std::vector<Vec>{random_vec(3, rng)});
      BlockVector v(std::vector<Vec>{random_vec(4, rng)});
      const double lhs = L.apply(x).inner(v);
      const double rhs = x.inner(L.apply_adjoint(v));
      ok = ok && std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs));
    }
    if (!ok) why = "adjoint identity";
  }

  note = ok ? "all invariants hold" : ("failed: " + why);
  return ok;
}

// ---------------------------------------------------------------------------
// 8. activation statistics

bool criterion_activation_stats(std::string& note) {
  const int N = 100000;
  bool ok = true;
  std::string why;
  auto run_schedule = [&](const ActivationSchedule& s, CouplingRule rule,
                          const CouplingStructure& st, const char* label) {
    const Vec marg = s.marginals();
    std::vector<long> counts(marg.size(), 0);
    Rng rng(5152);
    for (int n = 0; n < N && ok; ++n) {
      const auto eps = s.sample(rng);
      bool any = false;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        any = any || eps[i];
        counts[i] += eps[i];
      }
      ok = ok && any && ActivationSchedule::closure_violation(eps, rule, st).empty();
    }
    for (std::size_t i = 0; i < marg.size() && ok; ++i) {
      const double freq = static_cast<double>(counts[i]) / N;
      const double sigma = std::sqrt(marg[i] * (1.0 - marg[i]) / N);
      ok = ok && std::abs(freq - marg[i]) <= 3.0 * sigma + 1e-12;
    }
    if (!ok && why.empty()) why = label;
  };

  CouplingStructure pd;
  pd.p = 3;
  pd.q = 2;
  pd.col_support = {{0}, {0, 1}, {1}};
  pd.row_support = {{0, 1}, {1, 2}};
  CouplingStructure dist;
  dist.m = 4;
  dist.r = 3;
  dist.edges = {{0, 1}, {1, 2}, {2, 3}};

  run_schedule(ActivationSchedule::full(CouplingRule::PrimalFollowsDual, pd),
               CouplingRule::PrimalFollowsDual, pd, "full");
  run_schedule(ActivationSchedule::bernoulli(Vec(5, 0.5), CouplingRule::PrimalFollowsDual, pd),
               CouplingRule::PrimalFollowsDual, pd, "bernoulli-pd");
  run_schedule(
      ActivationSchedule::bernoulli(Vec(11, 0.5), CouplingRule::Distributed, dist),
      CouplingRule::Distributed, dist, "bernoulli-dist");
  run_schedule(ActivationSchedule::single_seed(CouplingRule::DualFollowsPrimal, pd),
               CouplingRule::DualFollowsPrimal, pd, "single-seed-pd");
  run_schedule(ActivationSchedule::single_seed(CouplingRule::Distributed, dist),
               CouplingRule::Distributed, dist, "single-seed-dist");
  note = ok ? "zero strings never emitted; marginals within 3 sigma; closures hold"
            : ("failed: " + why);
  return ok;
}

// ---------------------------------------------------------------------------
// 9. byte-identical reruns

bool criterion_reproducibility(std::string& note) {
  Json doc;
  doc["version"] = 1;
  doc["family"] = "lasso";
  doc["dimensions"] = {{"features", 12}, {"samples", 24}};
  doc["tau"] = 0.1;
  doc["data_seed"] = 5;
  doc["algorithm"] = "alg1";
  doc["activation"] = {{"kind", "bernoulli"}, {"prob", 0.5}};
  doc["errors"] = {{"kind", "decay_power"}, {"c", 0.5}, {"s", 2.0}};
  doc["lambda"] = 0.9;
  doc["stop"] = {{"max_iters", 400}, {"tol", 0.0}, {"window", 10}};
  doc["seed"] = 11;
  const ProblemSpec spec = ProblemSpec::from_json(doc);
  const RunOutputs a = run_experiment(spec, 11);
  const RunOutputs b = run_experiment(spec, 11);
  const bool ok = a.csv == b.csv && a.sidecar.dump() == b.sidecar.dump();
  note = ok ? "csv and json byte-identical over reruns" : "outputs differ between reruns";
  return ok;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "moreau-decomposition-suite", 5.0, criterion_moreau},
      {2, "deterministic-equivalence", 10.0, criterion_deterministic_equivalence},
      {3, "lifted-oracle-equivalence", 10.0, criterion_lifted_oracle},
      {4, "convergence-to-reference", 60.0, criterion_convergence},
      {5, "error-tolerance", 0.0, criterion_error_tolerance},
      {6, "condition-checker", 0.0, criterion_checker},
      {7, "invariant-suite", 0.0, criterion_invariants},
      {8, "activation-statistics", 0.0, criterion_activation_stats},
      {9, "reproducibility", 0.0, criterion_reproducibility},
  };
  int failures = 0;
  for (auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string note;
    bool pass = false;
    try {
      pass = c.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      pass = false;
      note += " [over the " + sci(c.time_limit) + "s budget]";
    }
    std::printf("%s  %d  %-28s  (%.2fs)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                note.c_str());
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
