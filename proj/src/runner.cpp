#include "rpd/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <limits>

namespace rpd {
namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json json_number_or_inf(double v) {
  if (std::isinf(v)) return Json(v > 0 ? "inf" : "-inf");
  return Json(v);
}

Json condition_to_json(const ConditionReport& rep, bool forced) {
  Json j;
  j["pass"] = rep.pass;
  j["forced"] = forced;
  j["norm_estimate"] = rep.norm_estimate;
  j["norm_bound"] = rep.norm_bound;
  j["mu"] = json_number_or_inf(rep.mu);
  j["nu"] = json_number_or_inf(rep.nu);
  j["alpha"] = json_number_or_inf(rep.alpha);
  j["alpha_hat"] = rep.alpha_hat;
  j["theta"] = json_number_or_inf(rep.theta);
  j["sufficient_block_sum"] = rep.sufficient_block_sum;
  j["detail"] = rep.detail;
  return j;
}

std::optional<std::vector<Vec>> make_agent_errors(const ErrorInjector& inj, long n,
                                                  const std::vector<int>& dims, Rng& rng) {
  if (!inj.active()) return std::nullopt;
  std::vector<Vec> e;
  e.reserve(dims.size());
  double total2 = 0.0;
  for (int d : dims) {
    e.push_back(inj.sample(n, d, rng));
    total2 += dot(e.back(), e.back());
  }
  const double total = std::sqrt(total2);
  if (total > 0.0) {
    const double target = inj.bound(n);
    for (auto& b : e) scale(b, target / total);
  }
  return e;
}

struct DistRunResult {
  DistState final_state;
  std::vector<RecordRow> rows;
  std::string stop_reason;
  ConditionReport condition;
  bool condition_forced = false;
  long iterations = 0;
};

double state_change(const DistState& a, const DistState& b) {
  double s = 0.0;
  auto acc = [&s](const std::vector<Vec>& u, const std::vector<Vec>& v) {
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t t = 0; t < u[i].size(); ++t) {
        const double d = u[i][t] - v[i][t];
        s += d * d;
      }
  };
  acc(a.x, b.x);
  acc(a.v_agent, b.v_agent);
  acc(a.v_edge, b.v_edge);
  return std::sqrt(s);
}

DistRunResult run_dist(const DistProblem& prob, AlgorithmId alg, double lambda,
                       const StopRule& stop, bool force, const ErrorInjector injectors[4],
                       const ActivationSchedule& schedule, std::uint64_t seed,
                       const std::function<double(const Vec&)>& shared_objective) {
  DistRunResult res;
  res.condition = alg == AlgorithmId::Dist2 ? check_dist2(prob) : check_dist1(prob);
  if (!res.condition.pass) {
    if (!force)
      throw ConditionError("run: distributed step-size condition failed (" +
                           res.condition.detail + "); pass force to run anyway");
    res.condition_forced = true;
  }
  if (alg == AlgorithmId::DistPairwise)
    for (const auto& inj : {injectors[0], injectors[1], injectors[2], injectors[3]})
      require(!inj.active(), "run: the pairwise scheme takes no error injectors");

  Rng pattern_rng(Rng::derive(seed, 0));
  Rng rng_a(Rng::derive(seed, 1));
  Rng rng_b(Rng::derive(seed, 2));
  Rng rng_c(Rng::derive(seed, 3));
  Rng rng_d(Rng::derive(seed, 4));

  std::vector<int> shared_dims(static_cast<std::size_t>(prob.m()), prob.d);
  std::vector<int> range_dims;
  for (int i = 0; i < prob.m(); ++i) range_dims.push_back(prob.agents[i].M.rows);

  DistState state = DistState::zeros(prob);
  auto objective_at = [&](const DistState& st) {
    if (!shared_objective) return std::numeric_limits<double>::quiet_NaN();
    Vec mean(static_cast<std::size_t>(prob.d), 0.0);
    for (const auto& x : st.x) add_into(mean, x);
    scale(mean, 1.0 / prob.m());
    return shared_objective(mean);
  };

  RecordRow first;
  first.objective = objective_at(state);
  first.consensus_disagreement = consensus_disagreement(prob, state);
  res.rows.push_back(first);

  long cum = 0;
  std::deque<double> window;
  for (long n = 0; n < stop.max_iters; ++n) {
    const ActivationPattern eps = schedule.sample(pattern_rng);
    const auto ea = make_agent_errors(injectors[0], n, shared_dims, rng_a);
    const auto eb = make_agent_errors(injectors[1], n, range_dims, rng_b);
    const auto ec = make_agent_errors(injectors[2], n, shared_dims, rng_c);
    const auto ed = make_agent_errors(injectors[3], n, range_dims, rng_d);
    DistErrors err;
    err.a = ea ? &*ea : nullptr;
    err.b = eb ? &*eb : nullptr;
    err.c = ec ? &*ec : nullptr;
    err.d = ed ? &*ed : nullptr;

    DistState next = [&] {
      switch (alg) {
        case AlgorithmId::Dist1:
          return step_dist1(prob, state, eps, err, lambda, /*sum_zero_mode=*/true);
        case AlgorithmId::Dist2:
          return step_dist2(prob, state, eps, err, lambda);
        case AlgorithmId::DistOpt:
          return step_dist_opt(prob, state, eps, err, lambda);
        case AlgorithmId::DistPairwise:
          return step_dist_pairwise(prob, state, eps, lambda);
        default:
          throw UnsupportedOperation("run_dist: not a distributed algorithm");
      }
    }();

    double px = 0.0, dv = 0.0;
    for (int i = 0; i < prob.m(); ++i) {
      for (int t = 0; t < prob.d; ++t) {
        const double d = next.x[i][t] - state.x[i][t];
        px += d * d;
      }
      for (std::size_t t = 0; t < state.v_agent[i].size(); ++t) {
        const double d = next.v_agent[i][t] - state.v_agent[i][t];
        dv += d * d;
      }
    }
    for (int l = 0; l < prob.r(); ++l)
      for (std::size_t t = 0; t < state.v_edge[l].size(); ++t) {
        const double d = next.v_edge[l][t] - state.v_edge[l][t];
        dv += d * d;
      }
    const double change = state_change(next, state);
    long act = 0;
    for (auto b : eps) act += b;
    cum += act;
    double en2 = 0.0;
    for (const auto* e : {err.a, err.b, err.c, err.d})
      if (e)
        for (const auto& blk : *e) en2 += dot(blk, blk);

    state = std::move(next);
    res.iterations = n + 1;
    RecordRow row;
    row.n = n + 1;
    row.objective = objective_at(state);
    row.primal_residual = std::sqrt(px);
    row.dual_residual = std::sqrt(dv);
    row.consensus_disagreement = consensus_disagreement(prob, state);
    row.active_blocks = act;
    row.cum_block_evals = cum;
    row.err_norm = std::sqrt(en2);
    res.rows.push_back(row);

    window.push_back(change);
    if (static_cast<int>(window.size()) > stop.window) window.pop_front();
    if (static_cast<int>(window.size()) == stop.window &&
        *std::max_element(window.begin(), window.end()) < stop.tol) {
      res.stop_reason = "converged";
      res.final_state = std::move(state);
      return res;
    }
  }
  res.stop_reason = "max_iters";
  res.final_state = std::move(state);
  return res;
}

std::string render_csv(const std::vector<RecordRow>& rows, const std::string& stop_reason,
                       bool forced, const std::string& hash) {
  std::string out =
      "n,objective,primal_residual,dual_residual,consensus_disagreement,active_blocks,"
      "cum_block_evals,err_norm\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += fmt17(r.objective);
    out += ',';
    out += fmt17(r.primal_residual);
    out += ',';
    out += fmt17(r.dual_residual);
    out += ',';
    out += fmt17(r.consensus_disagreement);
    out += ',';
    out += std::to_string(r.active_blocks);
    out += ',';
    out += std::to_string(r.cum_block_evals);
    out += ',';
    out += fmt17(r.err_norm);
    out += '\n';
  }
  out += "# stop_reason=" + stop_reason + "\n";
  out += std::string("# condition_forced=") + (forced ? "true" : "false") + "\n";
  out += "# config_hash=" + hash + "\n";
  return out;
}

}  // namespace

std::string config_hash_of(const ProblemSpec& spec, std::uint64_t seed) {
  const std::string payload = spec.canonical() + ":" + std::to_string(seed);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunOutputs run_experiment(const ProblemSpec& spec, std::uint64_t seed, bool force) {
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltProblem built = build_problem(spec);
  const ActivationSchedule schedule = schedule_from_spec(spec, built);
  const ActivationReport schedule_report = schedule.validate();
  if (!schedule_report.valid) {
    std::string msg = "spec: activation schedule invalid:";
    for (const auto& p : schedule_report.problems) msg += " " + p + ";";
    throw SpecError(msg);
  }
  const ErrorInjector inj = injector_from_json(spec.errors());
  const AlgorithmId alg = spec.algorithm();

  RunOutputs out;
  out.seed = seed;
  out.config_hash = config_hash_of(spec, seed);

  Json condition_json;
  if (built.distributed()) {
    const ErrorInjector injectors[4] = {inj, inj, inj, inj};
    DistRunResult res = run_dist(*built.dist, alg, spec.lambda(), spec.stop(), force, injectors,
                                 schedule, seed, built.shared_objective);
    out.rows = std::move(res.rows);
    out.stop_reason = res.stop_reason;
    out.iterations = res.iterations;
    out.condition_forced = res.condition_forced;
    out.final_primal = res.final_state.x;
    out.final_objective = out.rows.back().objective;
    condition_json = condition_to_json(res.condition, res.condition_forced);
    Json fs;
    fs["x"] = res.final_state.x;
    fs["v_agent"] = res.final_state.v_agent;
    fs["v_edge"] = res.final_state.v_edge;
    out.sidecar["final_state"] = fs;
  } else {
    PDRunConfig cfg;
    cfg.lambda = spec.lambda();
    cfg.stop = spec.stop();
    cfg.force = force;
    cfg.err_a = cfg.err_b = cfg.err_c = cfg.err_d = inj;
    PDAlgorithm pd_alg = alg == AlgorithmId::Alg1      ? PDAlgorithm::Alg1
                         : alg == AlgorithmId::Alg1Sym ? PDAlgorithm::Alg1Sym
                                                       : PDAlgorithm::Alg2;
    PDRunResult res = run_pd(*built.pd, pd_alg, cfg, schedule, seed, nullptr,
                             built.pd_objective);
    out.rows.reserve(res.rows.size());
    for (const auto& r : res.rows) {
      RecordRow row;
      row.n = r.n;
      row.objective = r.objective;
      row.primal_residual = r.primal_residual;
      row.dual_residual = r.dual_residual;
      row.consensus_disagreement = 0.0;
      row.active_blocks = r.active_blocks;
      row.cum_block_evals = r.cum_block_evals;
      row.err_norm = r.err_norm;
      out.rows.push_back(row);
    }
    out.stop_reason = res.stop_reason;
    out.iterations = res.iterations;
    out.condition_forced = res.condition_forced;
    out.final_primal.assign(res.final_state.x.blocks.begin(), res.final_state.x.blocks.end());
    out.final_objective = out.rows.back().objective;
    condition_json = condition_to_json(res.condition, res.condition_forced);
    Json fs;
    fs["x"] = res.final_state.x.blocks;
    fs["v"] = res.final_state.v.blocks;
    out.sidecar["final_state"] = fs;
  }

  Json sidecar;
  sidecar["format"] = "rpd-run-record";
  sidecar["version"] = 1;
  sidecar["spec"] = spec.doc();
  sidecar["seed"] = seed;
  sidecar["config_hash"] = out.config_hash;
  sidecar["algorithm"] = to_string(alg);
  sidecar["condition"] = condition_json;
  sidecar["stop_reason"] = out.stop_reason;
  sidecar["iterations"] = out.iterations;
  sidecar["final_objective"] = out.final_objective;
  sidecar["expected_active_fraction"] = schedule_report.expected_active_fraction;
  sidecar["final_state"] = out.sidecar["final_state"];
  Json env;
  env["compiler"] = __VERSION__;
  env["float_format"] = "ieee754-binary64";
  sidecar["environment"] = env;
  out.sidecar = std::move(sidecar);
  out.csv = render_csv(out.rows, out.stop_reason, out.condition_forced, out.config_hash);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_outputs(const RunOutputs& out, const std::string& prefix) {
  {
    std::ofstream csv(prefix + ".csv", std::ios::binary);
    require(static_cast<bool>(csv), "write_outputs: cannot open " + prefix + ".csv");
    csv << out.csv;
  }
  {
    std::ofstream js(prefix + ".json", std::ios::binary);
    require(static_cast<bool>(js), "write_outputs: cannot open " + prefix + ".json");
    js << out.sidecar.dump(2) << "\n";
  }
}

CompareSummary compare_outputs(const RunOutputs& out, const ProblemSpec& spec) {
  const ReferenceSolution ref = solve_reference(spec);
  CompareSummary sum;
  sum.reference_objective = ref.objective;
  sum.reference_method = ref.method;
  sum.reference_residual = ref.residual;
  sum.objective_gap = out.final_objective - ref.objective;
  if (is_distributed(spec.algorithm())) {
    double worst = 0.0;
    for (const auto& xi : out.final_primal) {
      require(xi.size() == ref.x.size(), "compare: dimension mismatch against the reference");
      Vec diff = xi;
      sub_into(diff, ref.x);
      worst = std::max(worst, norm2(diff));
    }
    sum.distance = worst;
  } else {
    Vec flat;
    for (const auto& b : out.final_primal) flat.insert(flat.end(), b.begin(), b.end());
    require(flat.size() == ref.x.size(), "compare: dimension mismatch against the reference");
    sub_into(flat, ref.x);
    sum.distance = norm2(flat);
  }
  const double thresholds[3] = {1e-2, 1e-4, 1e-6};
  for (int t = 0; t < 3; ++t)
    for (const auto& row : out.rows)
      if (row.objective - ref.objective < thresholds[t]) {
        sum.iters_to_gap[t] = row.n;
        break;
      }
  return sum;
}

CompareSummary compare_record(const std::string& prefix, const ProblemSpec& spec) {
  std::ifstream js(prefix + ".json");
  require(static_cast<bool>(js), "compare: cannot open " + prefix + ".json");
  Json sidecar = Json::parse(js);
  RunOutputs out;
  out.final_objective = sidecar.at("final_objective").get<double>();
  const Json& fs = sidecar.at("final_state");
  out.final_primal = fs.at("x").get<std::vector<Vec>>();
  // iteration objectives from the CSV
  std::ifstream csv(prefix + ".csv");
  require(static_cast<bool>(csv), "compare: cannot open " + prefix + ".csv");
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    RecordRow row;
    const char* p = line.c_str();
    char* end = nullptr;
    row.n = std::strtol(p, &end, 10);
    row.objective = std::strtod(end + 1, nullptr);
    out.rows.push_back(row);
  }
  return compare_outputs(out, spec);
}

}  // namespace rpd
