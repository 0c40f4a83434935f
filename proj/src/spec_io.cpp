#include "rpd/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rpd {
namespace {

void check_keys(const Json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw SpecError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw SpecError(where + ": unknown field '" + key + "'");
}

void require_spec(bool ok, const std::string& msg) {
  if (!ok) throw SpecError(msg);
}

double positive(const Json& j, const char* name) {
  const double v = j.at(name).get<double>();
  require_spec(v > 0.0, std::string("spec: '") + name + "' must be positive");
  return v;
}

// ---- inline custom-problem parsing ----------------------------------------

ProxFn prox_from_json(const Json& j, int dim) {
  check_keys(j, {"kind", "tau", "lo", "hi", "center", "c"}, "prox");
  const std::string kind = j.at("kind");
  if (kind == "zero") return ProxFn::zero(dim);
  if (kind == "l1") return ProxFn::l1(dim, positive(j, "tau"));
  if (kind == "box") {
    return ProxFn::box_uniform(dim, j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  if (kind == "sq_distance")
    return ProxFn::sq_distance(j.at("center").get<Vec>(), positive(j, "tau"));
  if (kind == "point") return ProxFn::point(j.at("c").get<Vec>());
  throw SpecError("prox: unknown kind '" + kind + "'");
}

MonotoneOp op_from_json(const Json& j, int dim) {
  if (j.at("kind") == "zero") return MonotoneOp::zero(dim);
  return MonotoneOp::subdifferential(prox_from_json(j, dim));
}

LinearBlock matrix_from_json(const Json& j) {
  require_spec(j.is_array() && !j.empty(), "matrix: expected a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : j) {
    require_spec(static_cast<int>(row.size()) == cols, "matrix: ragged rows");
    for (const auto& v : row) a.push_back(v.get<double>());
  }
  return LinearBlock(rows, cols, std::move(a));
}

SmoothFn smooth_from_json(const Json& j, int dim) {
  check_keys(j, {"kind", "matrix", "rhs", "weight"}, "smooth");
  const std::string kind = j.at("kind");
  if (kind == "zero") return SmoothFn::zero(dim);
  if (kind == "quadratic") {
    LinearBlock M = matrix_from_json(j.at("matrix"));
    require_spec(M.cols == dim, "smooth: matrix domain mismatch");
    return SmoothFn::quadratic(std::move(M), j.at("rhs").get<Vec>(), j.value("weight", 1.0));
  }
  throw SpecError("smooth: unknown kind '" + kind + "'");
}

Vec metric_vec_from_json(const Json& j, int dim) {
  if (j.is_number()) return Vec(static_cast<std::size_t>(dim), j.get<double>());
  Vec v = j.get<Vec>();
  require_spec(static_cast<int>(v.size()) == dim, "metric: dimension mismatch");
  return v;
}

PDProblem custom_pd_from_json(const Json& j) {
  check_keys(j, {"primal", "dual", "coupling"}, "problem");
  std::vector<PrimalBlock> primal;
  std::vector<Vec> wdiag;
  for (const auto& pj : j.at("primal")) {
    check_keys(pj, {"dim", "op", "smooth", "w", "mu_tilde"}, "primal block");
    const int dim = pj.at("dim").get<int>();
    PrimalBlock b;
    b.dim = dim;
    b.A = op_from_json(pj.value("op", Json{{"kind", "zero"}}), dim);
    b.C = smooth_from_json(pj.value("smooth", Json{{"kind", "zero"}}), dim);
    b.mu_tilde = pj.contains("mu_tilde")
                     ? pj.at("mu_tilde").get<double>()
                     : (b.C.is_zero() ? std::numeric_limits<double>::infinity()
                                      : 1.0 / b.C.lipschitz);
    wdiag.push_back(metric_vec_from_json(pj.at("w"), dim));
    primal.push_back(std::move(b));
  }
  std::vector<DualBlock> dual;
  std::vector<Vec> udiag;
  for (const auto& dj : j.at("dual")) {
    check_keys(dj, {"dim", "op", "dinv", "u", "nu_tilde"}, "dual block");
    const int dim = dj.at("dim").get<int>();
    DualBlock b;
    b.dim = dim;
    b.B = op_from_json(dj.value("op", Json{{"kind", "zero"}}), dim);
    b.Dinv = smooth_from_json(dj.value("dinv", Json{{"kind", "zero"}}), dim);
    b.nu_tilde = dj.contains("nu_tilde")
                     ? dj.at("nu_tilde").get<double>()
                     : std::numeric_limits<double>::infinity();
    udiag.push_back(metric_vec_from_json(dj.at("u"), dim));
    dual.push_back(std::move(b));
  }
  std::map<std::pair<int, int>, LinearBlock> blocks;
  for (const auto& cj : j.at("coupling")) {
    check_keys(cj, {"row", "col", "matrix"}, "coupling block");
    blocks.emplace(std::make_pair(cj.at("row").get<int>(), cj.at("col").get<int>()),
                   matrix_from_json(cj.at("matrix")));
  }
  std::vector<int> row_dims, col_dims;
  for (const auto& b : dual) row_dims.push_back(b.dim);
  for (const auto& b : primal) col_dims.push_back(b.dim);
  BlockOperatorMatrix L(row_dims, col_dims, blocks);
  return PDProblem(std::move(primal), std::move(dual), std::move(L), DiagonalMetric(wdiag),
                   DiagonalMetric(udiag));
}

DistProblem custom_dist_from_json(const Json& j) {
  check_keys(j, {"d", "hyperedges", "theta", "agents"}, "problem");
  const int d = j.at("d").get<int>();
  std::vector<std::vector<int>> edges;
  for (const auto& e : j.at("hyperedges")) edges.push_back(e.get<std::vector<int>>());
  Hypergraph graph(j.at("agents").size(), std::move(edges));
  Vec theta;
  if (j.at("theta").is_number())
    theta.assign(static_cast<std::size_t>(graph.r()), j.at("theta").get<double>());
  else
    theta = j.at("theta").get<Vec>();
  std::vector<DistAgent> agents;
  for (const auto& aj : j.at("agents")) {
    check_keys(aj, {"op", "smooth", "dual_op", "dinv", "M", "w", "u", "mu_tilde", "nu_tilde"},
               "agent");
    DistAgent ag;
    ag.A = op_from_json(aj.value("op", Json{{"kind", "zero"}}), d);
    ag.C = smooth_from_json(aj.value("smooth", Json{{"kind", "zero"}}), d);
    ag.mu_tilde = aj.contains("mu_tilde")
                      ? aj.at("mu_tilde").get<double>()
                      : (ag.C.is_zero() ? std::numeric_limits<double>::infinity()
                                        : 1.0 / ag.C.lipschitz);
    if (aj.contains("M") && aj.at("M").is_string()) {
      require_spec(aj.at("M") == "identity", "agent: unknown coupling map shorthand");
      ag.M = LinearBlock::identity(d);
    } else if (aj.contains("M")) {
      ag.M = matrix_from_json(aj.at("M"));
    } else {
      ag.M = LinearBlock::identity(d);
    }
    const int range = ag.M.rows;
    ag.B = op_from_json(aj.value("dual_op", Json{{"kind", "zero"}}), range);
    ag.Dinv = smooth_from_json(aj.value("dinv", Json{{"kind", "zero"}}), range);
    ag.nu_tilde = aj.contains("nu_tilde") ? aj.at("nu_tilde").get<double>()
                                          : std::numeric_limits<double>::infinity();
    ag.w = metric_vec_from_json(aj.at("w"), d);
    ag.u = metric_vec_from_json(aj.at("u"), range);
    agents.push_back(std::move(ag));
  }
  return DistProblem(d, std::move(graph), std::move(agents), std::move(theta));
}

Hypergraph topology_from_spec(const Json& top, int agents) {
  if (top.is_string()) {
    const std::string s = top.get<std::string>();
    if (s == "ring") return Hypergraph::ring(agents);
    if (s == "complete") return Hypergraph::complete(agents);
    throw SpecError("topology: unknown name '" + s + "'");
  }
  check_keys(top, {"hyperedges"}, "topology");
  std::vector<std::vector<int>> edges;
  for (const auto& e : top.at("hyperedges")) edges.push_back(e.get<std::vector<int>>());
  return Hypergraph(agents, std::move(edges));
}

}  // namespace

std::string to_string(AlgorithmId alg) {
  switch (alg) {
    case AlgorithmId::Alg1: return "alg1";
    case AlgorithmId::Alg1Sym: return "alg1_sym";
    case AlgorithmId::Alg2: return "alg2";
    case AlgorithmId::Dist1: return "dist1";
    case AlgorithmId::Dist2: return "dist2";
    case AlgorithmId::DistOpt: return "dist_opt";
    case AlgorithmId::DistPairwise: return "dist_pairwise";
  }
  return "?";
}

AlgorithmId algorithm_from_string(const std::string& name) {
  for (AlgorithmId a : {AlgorithmId::Alg1, AlgorithmId::Alg1Sym, AlgorithmId::Alg2,
                        AlgorithmId::Dist1, AlgorithmId::Dist2, AlgorithmId::DistOpt,
                        AlgorithmId::DistPairwise})
    if (to_string(a) == name) return a;
  throw SpecError("spec: unknown algorithm '" + name + "'");
}

bool is_distributed(AlgorithmId alg) {
  return alg == AlgorithmId::Dist1 || alg == AlgorithmId::Dist2 ||
         alg == AlgorithmId::DistOpt || alg == AlgorithmId::DistPairwise;
}

ProblemSpec ProblemSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

ProblemSpec ProblemSpec::from_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw SpecError(std::string("spec: invalid JSON: ") + e.what());
  }
  return from_json(std::move(doc));
}

ProblemSpec ProblemSpec::from_json(Json doc) {
  static const std::set<std::string> common = {"version",   "family", "algorithm", "activation",
                                               "errors",    "lambda", "stop",      "seed",
                                               "metrics",   "sum_zero"};
  if (!doc.is_object()) throw SpecError("spec: expected a JSON object");
  require_spec(doc.value("version", 0) == 1, "spec: unsupported or missing version");
  const std::string family = doc.value("family", "");
  std::set<std::string> allowed = common;
  if (family == "lasso" || family == "tv1d") {
    allowed.insert({"dimensions", "tau", "data_seed"});
  } else if (family == "box_ls") {
    allowed.insert({"dimensions", "box", "data_seed"});
  } else if (family == "ridge_consensus") {
    allowed.insert({"dimensions", "reg", "topology", "theta", "data_seed"});
  } else if (family == "custom_pd" || family == "custom_dist") {
    allowed.insert({"problem"});
  } else {
    throw SpecError("spec: unknown family '" + family + "'");
  }
  check_keys(doc, allowed, "spec");
  for (const char* key : {"family", "algorithm", "activation", "lambda", "stop"})
    require_spec(doc.contains(key), std::string("spec: missing field '") + key + "'");
  check_keys(doc.at("stop"), {"max_iters", "tol", "window"}, "stop");
  const std::string alg = doc.at("algorithm");
  algorithm_from_string(alg);  // validates
  const double lambda = doc.at("lambda").get<double>();
  require_spec(lambda > 0.0 && lambda <= 1.0, "spec: lambda must lie in (0,1]");
  return ProblemSpec(std::move(doc));
}

StopRule ProblemSpec::stop() const {
  const Json& s = doc_.at("stop");
  StopRule rule;
  rule.max_iters = s.value("max_iters", 1000LL);
  rule.tol = s.value("tol", 0.0);
  rule.window = s.value("window", 10);
  return rule;
}

std::optional<std::uint64_t> ProblemSpec::seed() const {
  if (!doc_.contains("seed")) return std::nullopt;
  return doc_.at("seed").get<std::uint64_t>();
}

ErrorInjector injector_from_json(const Json& j) {
  check_keys(j, {"kind", "c", "s", "rho"}, "errors");
  const std::string kind = j.at("kind");
  if (kind == "none") return ErrorInjector::none();
  try {
    if (kind == "decay_power") return ErrorInjector::power(j.at("c"), j.at("s"));
    if (kind == "decay_geometric") return ErrorInjector::geometric(j.at("c"), j.at("rho"));
  } catch (const StructuralError& e) {
    throw SpecError(std::string("errors: ") + e.what());
  }
  throw SpecError("errors: unknown kind '" + kind + "'");
}

BuiltProblem build_problem(const ProblemSpec& spec) {
  const std::string family = spec.family();
  const AlgorithmId alg = spec.algorithm();
  const Json& doc = spec.doc();
  BuiltProblem built;

  auto metric_pair = [&](const std::function<PDProblem(double, double)>& assemble) {
    // explicit metrics or the largest uniform scale passing the checker
    if (doc.contains("metrics") && doc.at("metrics").is_object()) {
      check_keys(doc.at("metrics"), {"w", "u"}, "metrics");
      return std::make_pair(positive(doc.at("metrics"), "w"), positive(doc.at("metrics"), "u"));
    }
    const double t = calibrate_scale([&](double s) {
      const PDProblem cand = assemble(s, s);
      return alg == AlgorithmId::Alg2 ? check_alg2(cand).pass : check_alg1(cand).pass;
    });
    return std::make_pair(t, t);
  };

  if (family == "lasso") {
    check_keys(doc.at("dimensions"), {"features", "samples"}, "dimensions");
    const int n = doc.at("dimensions").at("features").get<int>();
    const int s = doc.at("dimensions").at("samples").get<int>();
    built.lasso = make_lasso(n, s, positive(doc, "tau"), spec.data_seed());
    auto assemble = [&](double w, double u) { return lasso_problem(*built.lasso, w, u); };
    const auto [w, u] = metric_pair(assemble);
    built.pd = assemble(w, u);
    const LassoData data = *built.lasso;
    built.pd_objective = [data](const PDState& st) {
      return lasso_objective(data, st.x.blocks[0]);
    };
  } else if (family == "tv1d") {
    check_keys(doc.at("dimensions"), {"size"}, "dimensions");
    built.tv1d =
        make_tv1d(doc.at("dimensions").at("size").get<int>(), positive(doc, "tau"),
                  spec.data_seed());
    auto assemble = [&](double w, double u) { return tv1d_problem(*built.tv1d, w, u); };
    const auto [w, u] = metric_pair(assemble);
    built.pd = assemble(w, u);
    const Tv1dData data = *built.tv1d;
    built.pd_objective = [data](const PDState& st) {
      return tv1d_objective(data, st.x.blocks[0]);
    };
  } else if (family == "box_ls") {
    check_keys(doc.at("dimensions"), {"features", "samples"}, "dimensions");
    check_keys(doc.at("box"), {"lo", "hi"}, "box");
    built.box_ls = make_box_ls(doc.at("dimensions").at("features").get<int>(),
                               doc.at("dimensions").at("samples").get<int>(),
                               doc.at("box").at("lo").get<double>(),
                               doc.at("box").at("hi").get<double>(), spec.data_seed());
    auto assemble = [&](double w, double u) { return box_ls_problem(*built.box_ls, w, u); };
    const auto [w, u] = metric_pair(assemble);
    built.pd = assemble(w, u);
    const BoxLsData data = *built.box_ls;
    built.pd_objective = [data](const PDState& st) {
      return box_ls_objective(data, st.x.blocks[0]);
    };
  } else if (family == "ridge_consensus") {
    check_keys(doc.at("dimensions"), {"agents", "dim", "rows_per_agent"}, "dimensions");
    const int m = doc.at("dimensions").at("agents").get<int>();
    const int d = doc.at("dimensions").at("dim").get<int>();
    const int rows = doc.at("dimensions").value("rows_per_agent", d);
    built.ridge = make_ridge_consensus(m, d, rows, doc.value("reg", 0.1), spec.data_seed());
    const Hypergraph graph = topology_from_spec(doc.value("topology", Json("ring")), m);
    auto checker = [&](const DistProblem& p) {
      return alg == AlgorithmId::Dist2 ? check_dist2(p).pass : check_dist1(p).pass;
    };
    double w;
    if (doc.contains("metrics") && doc.at("metrics").is_object()) {
      check_keys(doc.at("metrics"), {"w"}, "metrics");
      w = positive(doc.at("metrics"), "w");
    } else {
      w = calibrate_scale([&](double s) {
        return checker(ridge_consensus_problem(*built.ridge, graph, s, 1e-9));
      });
    }
    double theta;
    if (doc.contains("theta") && doc.at("theta").is_number()) {
      theta = doc.at("theta").get<double>();
      require_spec(theta > 0.0, "spec: theta must be positive");
    } else {
      theta = calibrate_scale(
          [&](double t) { return checker(ridge_consensus_problem(*built.ridge, graph, w, t)); });
    }
    built.dist = ridge_consensus_problem(*built.ridge, graph, w, theta);
    const RidgeConsensusData data = *built.ridge;
    built.shared_objective = [data](const Vec& x) { return ridge_consensus_objective(data, x); };
  } else if (family == "custom_pd") {
    built.pd = custom_pd_from_json(doc.at("problem"));
  } else if (family == "custom_dist") {
    built.dist = custom_dist_from_json(doc.at("problem"));
  } else {
    throw SpecError("spec: unknown family '" + family + "'");
  }

  require_spec(built.distributed() == is_distributed(alg),
               "spec: algorithm '" + to_string(alg) + "' does not match family '" + family + "'");
  return built;
}

ReferenceSolution solve_reference(const ProblemSpec& spec) {
  const BuiltProblem built = build_problem(spec);
  if (built.lasso) return lasso_reference(*built.lasso);
  if (built.tv1d) return tv1d_reference(*built.tv1d);
  if (built.box_ls) return box_ls_reference(*built.box_ls);
  if (built.ridge) return ridge_consensus_reference(*built.ridge);
  throw ReferenceUnavailable("solve_reference: custom families need a user-provided reference");
}

ActivationSchedule schedule_from_spec(const ProblemSpec& spec, const BuiltProblem& built) {
  const AlgorithmId alg = spec.algorithm();
  CouplingRule rule;
  CouplingStructure st;
  if (built.distributed()) {
    rule = CouplingRule::Distributed;
    st = built.dist->coupling();
  } else {
    rule = alg == AlgorithmId::Alg1 ? CouplingRule::PrimalFollowsDual
                                    : CouplingRule::DualFollowsPrimal;
    st = built.pd->coupling();
  }
  const Json& act = spec.activation();
  check_keys(act, {"kind", "prob"}, "activation");
  const std::string kind = act.at("kind");
  if (kind == "full") return ActivationSchedule::full(rule, st);
  if (kind == "single_seed") return ActivationSchedule::single_seed(rule, st);
  if (kind == "bernoulli") {
    const int len = st.length(rule);
    Vec probs;
    if (act.at("prob").is_number())
      probs.assign(static_cast<std::size_t>(len), act.at("prob").get<double>());
    else
      probs = act.at("prob").get<Vec>();
    try {
      return ActivationSchedule::bernoulli(std::move(probs), rule, st);
    } catch (const StructuralError& e) {
      throw SpecError(std::string("activation: ") + e.what());
    }
  }
  throw SpecError("activation: unknown kind '" + kind + "'");
}

}  // namespace rpd
