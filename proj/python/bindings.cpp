// Python bindings for the main operations: the prox library, condition
// constants, consensus projection, norm estimation and spec-driven runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rpd/runner.hpp"

namespace py = pybind11;

namespace {

rpd::DiagonalMetric metric_from(const std::vector<rpd::Vec>& diag) {
  return rpd::DiagonalMetric(diag);
}

py::dict condition_dict(const rpd::ConditionReport& rep) {
  py::dict d;
  d["pass"] = rep.pass;
  d["norm_estimate"] = rep.norm_estimate;
  d["norm_bound"] = rep.norm_bound;
  d["mu"] = rep.mu;
  d["nu"] = rep.nu;
  d["alpha"] = rep.alpha;
  d["alpha_hat"] = rep.alpha_hat;
  d["theta"] = rep.theta;
  d["sufficient_block_sum"] = rep.sufficient_block_sum;
  d["detail"] = rep.detail;
  return d;
}

py::dict run_spec(const std::string& text, std::uint64_t seed, bool force) {
  const rpd::ProblemSpec spec = rpd::ProblemSpec::from_text(text);
  const rpd::RunOutputs out = rpd::run_experiment(spec, seed, force);
  py::dict d;
  d["iterations"] = out.iterations;
  d["stop_reason"] = out.stop_reason;
  d["final_objective"] = out.final_objective;
  d["config_hash"] = out.config_hash;
  d["condition_forced"] = out.condition_forced;
  d["csv"] = out.csv;
  d["sidecar"] = out.sidecar.dump(2);
  d["final_primal"] = out.final_primal;
  return d;
}

py::dict check_spec(const std::string& text) {
  const rpd::ProblemSpec spec = rpd::ProblemSpec::from_text(text);
  const rpd::BuiltProblem built = rpd::build_problem(spec);
  const rpd::AlgorithmId alg = spec.algorithm();
  rpd::ConditionReport rep;
  if (built.distributed())
    rep = alg == rpd::AlgorithmId::Dist2 ? rpd::check_dist2(*built.dist)
                                         : rpd::check_dist1(*built.dist);
  else
    rep = alg == rpd::AlgorithmId::Alg2 ? rpd::check_alg2(*built.pd)
                                        : rpd::check_alg1(*built.pd);
  py::dict d = condition_dict(rep);
  const auto act = rpd::schedule_from_spec(spec, built).validate();
  d["activation_valid"] = act.valid;
  d["expected_active_fraction"] = act.expected_active_fraction;
  return d;
}

py::dict reference_spec(const std::string& text) {
  const rpd::ReferenceSolution ref =
      rpd::solve_reference(rpd::ProblemSpec::from_text(text));
  py::dict d;
  d["x"] = ref.x;
  d["objective"] = ref.objective;
  d["method"] = ref.method;
  d["residual"] = ref.residual;
  return d;
}

double scaled_norm_dense(const std::vector<rpd::Vec>& matrix, const rpd::Vec& w,
                         const rpd::Vec& u, double tol) {
  const int rows = static_cast<int>(matrix.size());
  const int cols = rows ? static_cast<int>(matrix[0].size()) : 0;
  std::vector<double> a;
  for (const auto& row : matrix) a.insert(a.end(), row.begin(), row.end());
  rpd::LinearBlock M(rows, cols, std::move(a));
  std::map<std::pair<int, int>, rpd::LinearBlock> blocks{{{0, 0}, std::move(M)}};
  rpd::BlockOperatorMatrix L({rows}, {cols}, blocks);
  return rpd::scaled_norm(L, metric_from({w}), metric_from({u}), tol);
}

}  // namespace

PYBIND11_MODULE(_rpd, m) {
  m.doc() = "randomized block-coordinate primal-dual solver toolkit";

  py::register_exception<rpd::SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<rpd::ConditionError>(m, "ConditionError", PyExc_RuntimeError);

  py::class_<rpd::ProxFn>(m, "ProxFn", "proximable convex function")
      .def_static("zero", &rpd::ProxFn::zero, py::arg("dim"))
      .def_static("l1", &rpd::ProxFn::l1, py::arg("dim"), py::arg("tau"))
      .def_static("sq_distance", &rpd::ProxFn::sq_distance, py::arg("center"), py::arg("tau"))
      .def_static("box", &rpd::ProxFn::box, py::arg("lo"), py::arg("hi"))
      .def_static("point", &rpd::ProxFn::point, py::arg("c"))
      .def("eval", &rpd::ProxFn::eval, py::arg("x"));

  m.def("prox_metric", &rpd::prox_metric, py::arg("f"), py::arg("w"), py::arg("x"),
        "argmin of f(y) + sum (x_i - y_i)^2 / (2 w_i)");
  m.def("prox_conjugate", &rpd::prox_conjugate, py::arg("f"), py::arg("u"), py::arg("v"),
        "resolvent of the scaled inverse subdifferential via the decomposition identity");
  m.def("project_consensus", &rpd::project_consensus, py::arg("z"), py::arg("copies"),
        "replace each stacked copy by the mean of the copies");
  m.def("theta_alpha", &rpd::theta_alpha, py::arg("norm"), py::arg("mu"), py::arg("nu"),
        py::arg("alpha"), "cocoercivity constant of the preconditioned forward operator");
  m.def("alpha_hat", &rpd::alpha_hat, py::arg("norm"), py::arg("mu"), py::arg("nu"),
        "maximizing balance parameter");
  m.def("scaled_norm", &scaled_norm_dense, py::arg("matrix"), py::arg("w"), py::arg("u"),
        py::arg("tol") = 1e-9, "power-iteration estimate of || diag(u)^(1/2) M diag(w)^(1/2) ||");

  m.def("check", &check_spec, py::arg("spec_text"),
        "step-size condition report for a problem-spec document");
  m.def("run", &run_spec, py::arg("spec_text"), py::arg("seed"), py::arg("force") = false,
        "seeded experiment run; returns the record summary, csv and sidecar");
  m.def("reference", &reference_spec, py::arg("spec_text"),
        "reference solution of a zoo family");
}
