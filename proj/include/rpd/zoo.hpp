#pragma once

/// Problem zoo: deterministic data generators for the benchmark families,
/// assemblers into engine problems, objectives, optimality residuals and
/// reference solvers.

#include <string>

#include "rpd/distributed.hpp"
#include "rpd/pd_engine.hpp"

namespace rpd {

// ---- data -----------------------------------------------------------------

struct LassoData {
  LinearBlock A;
  Vec b;
  double tau = 0.0;
};

struct Tv1dData {
  Vec b;           // noisy signal
  LinearBlock D;   // first-difference operator, (n-1) x n
  double tau = 0.0;
};

struct BoxLsData {
  LinearBlock A;
  Vec b;
  double lo = 0.0, hi = 1.0;
};

struct RidgeConsensusData {
  int d = 0;
  std::vector<LinearBlock> A;  // one per agent
  std::vector<Vec> b;
  double reg = 0.0;  // per-agent Tikhonov weight
};

LassoData make_lasso(int features, int samples, double tau, std::uint64_t seed);
Tv1dData make_tv1d(int size, double tau, std::uint64_t seed);
BoxLsData make_box_ls(int features, int samples, double lo, double hi, std::uint64_t seed);
RidgeConsensusData make_ridge_consensus(int agents, int d, int rows_per_agent, double reg,
                                        std::uint64_t seed);

// ---- assembly into engine problems ----------------------------------------

/// lasso as a two-block problem: nonsmooth L1 resolvent on the primal side,
/// quadratic data term as the smooth part, identity coupling, vacuous dual.
PDProblem lasso_problem(const LassoData& data, double w, double u);

/// tv1d: smooth quadratic data term, L1 on the dual side of the difference map.
PDProblem tv1d_problem(const Tv1dData& data, double w, double u);

/// box-constrained least squares: box projection primal, vacuous dual.
PDProblem box_ls_problem(const BoxLsData& data, double w, double u);

/// consensus ridge regression over a hypergraph; vacuous agent dual channel
/// (its metric is kept tiny so it does not dominate the coupling constant).
DistProblem ridge_consensus_problem(const RidgeConsensusData& data, const Hypergraph& g,
                                    double w, double theta);

/// distributed lasso: per-agent quadratic plus a share of the L1 penalty.
DistProblem lasso_consensus_problem(const std::vector<LinearBlock>& A, const std::vector<Vec>& b,
                                    double tau, const Hypergraph& g, double w, double theta);

// ---- objectives and optimality residuals -----------------------------------

double lasso_objective(const LassoData& data, const Vec& x);
double lasso_residual(const LassoData& data, const Vec& x);

double tv1d_objective(const Tv1dData& data, const Vec& x);
/// KKT residual of the primal-dual pair (zero-pattern tolerance 1e-7).
double tv1d_residual(const Tv1dData& data, const Vec& x, const Vec& v);

double box_ls_objective(const BoxLsData& data, const Vec& x);
double box_ls_residual(const BoxLsData& data, const Vec& x);

double ridge_consensus_objective(const RidgeConsensusData& data, const Vec& x);
double ridge_consensus_residual(const RidgeConsensusData& data, const Vec& x);

// ---- reference solutions ----------------------------------------------------

struct ReferenceSolution {
  Vec x;
  Vec v;  // dual certificate when the method produces one
  double objective = 0.0;
  std::string method;
  double residual = 0.0;  // certified subgradient residual
};

struct ReferenceUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Proximal-gradient run to subgradient residual < target (cap 1e6 iterations).
ReferenceSolution lasso_reference(const LassoData& data, double target = 1e-10);
ReferenceSolution box_ls_reference(const BoxLsData& data, double target = 1e-10);
/// Deterministic full-activation primal-dual run, certified by the KKT residual.
ReferenceSolution tv1d_reference(const Tv1dData& data, double target = 1e-10);
/// Normal equations (dense Cholesky).
ReferenceSolution ridge_consensus_reference(const RidgeConsensusData& data);

/// Solve the SPD system G x = rhs (dense, row-major) by Cholesky.
Vec solve_spd(const std::vector<double>& G, const Vec& rhs);

/// Largest scale s (then shrunk by `margin`) for which `ok(s)` holds, found by
/// doubling and bisection; used to pick default metrics and edge weights.
double calibrate_scale(const std::function<bool(double)>& ok, double margin = 0.9);

}  // namespace rpd
