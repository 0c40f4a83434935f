#pragma once

/// Asynchronous distributed primal-dual algorithms over a hypergraph: the
/// consensus-lifted problem construction, the chi-based condition checks, and
/// the distributed step maps.  Activation patterns have layout
/// [agents 0..m) | agent duals m..2m) | edges 2m..2m+r).
///
/// The general step maps reuse the primal-dual engine's arithmetic kernels,
/// so a distributed run reproduces, bit for bit, the run of the generic
/// engine on the materialized product-space problem.

#include "rpd/hypergraph.hpp"
#include "rpd/pd_engine.hpp"

namespace rpd {

struct DistAgent {
  MonotoneOp A;         // resolvent part on the shared space
  SmoothFn C;           // smooth part
  double mu_tilde = 0;  // cocoercivity constant of C
  MonotoneOp B;         // dual operator on this agent's range space
  SmoothFn Dinv;
  double nu_tilde = 0;
  LinearBlock M;  // nonzero map from the shared space into the range space
  Vec w, u;       // diagonal metrics (w on the shared space, u on the range)
};

struct DistProblem {
  int d = 0;  // dimension of the shared space
  Hypergraph graph;
  std::vector<DistAgent> agents;
  Vec theta;  // positive edge weights, one per hyperedge

  DistProblem(int dim, Hypergraph g, std::vector<DistAgent> ag, Vec th);

  int m() const { return graph.m(); }
  int r() const { return graph.r(); }
  double theta_bar(int i) const;  // sum of weights of the edges containing i

  bool dinv_all_zero() const;
  bool resolvents_all_zero() const;
  CouplingStructure coupling() const;
};

struct DistState {
  std::vector<Vec> x;        // m blocks of dim d
  std::vector<Vec> v_agent;  // m blocks, agent range dims
  std::vector<Vec> v_edge;   // r blocks of dim kappa_l * d
  std::vector<Vec> xbar;     // r cached edge averages, dim d

  static DistState zeros(const DistProblem& prob);
  /// State with given iterates; the edge averages are computed fresh.
  static DistState make(const DistProblem& prob, std::vector<Vec> x0,
                        std::vector<Vec> v_agent0, std::vector<Vec> v_edge0);
  /// Per-edge sums of the stacked edge-dual copies (zero in sum-zero mode).
  std::vector<Vec> edge_dual_sums(const DistProblem& prob) const;
};

struct DistErrors {
  const std::vector<Vec>* a = nullptr;  // per agent, shared-space shaped
  const std::vector<Vec>* b = nullptr;  // per agent, range shaped
  const std::vector<Vec>* c = nullptr;
  const std::vector<Vec>* d = nullptr;
};

/// chi = max_i ( ||U_i^{1/2} M_i W_i^{1/2}||^2 + theta_bar_i * max diag(W_i) ).
double chi(const DistProblem& prob);

/// Condition for the resolvent-form distributed step: 2 * theta_alpha > 1
/// with the coupling norm replaced by sqrt(chi).
ConditionReport check_dist1(const DistProblem& prob);

/// Condition for the gradient-form distributed step:
/// min{mu, nu(1 - chi)} > 1/2; requires all A_i == 0.
ConditionReport check_dist2(const DistProblem& prob);

/// Resolvent-form step (dual phase first).  In sum-zero mode the per-edge
/// dual copies must sum to zero on entry; the invariant is then preserved up
/// to roundoff by the update itself.
DistState step_dist1(const DistProblem& prob, const DistState& st, const ActivationPattern& eps,
                     const DistErrors& err, double lambda, bool sum_zero_mode);

/// Gradient-form step; requires all A_i == 0 and sum-zero edge duals.
DistState step_dist2(const DistProblem& prob, const DistState& st, const ActivationPattern& eps,
                     const DistErrors& err, double lambda);

/// Proximal step for the consensus convex program (sum-zero edge duals
/// required; edge deviations read the cached averages).
DistState step_dist_opt(const DistProblem& prob, const DistState& st,
                        const ActivationPattern& eps, const DistErrors& err, double lambda);

/// Reduced pairwise scheme: all edges of size two, no dual channel (B_i == 0,
/// D_i^{-1} == 0).  Maintains the exact antisymmetry v_edge[l] = (t, -t) and
/// matches step_dist_opt bitwise under the activation tie
/// eps[m+i] == eps[i], eps[2m+l] == max over the edge members.
DistState step_dist_pairwise(const DistProblem& prob, const DistState& st,
                             const ActivationPattern& eps, double lambda);

// ---- product-space materialization (the module's master oracle path) ----

/// Generic-engine problem equivalent to the distributed one: p = m primal
/// blocks, q = m + r dual blocks (agent ranges, then per-edge consensus
/// blocks with metric theta_l * Id), coupling by M_i and edge selection maps.
PDProblem build_lifted(const DistProblem& prob);

PDState lift_state(const DistProblem& prob, const DistState& st);
DistState lower_state(const DistProblem& prob, const PDState& st);

/// Largest consensus gap: max over edges of the max pairwise distance
/// between member iterates.
double consensus_disagreement(const DistProblem& prob, const DistState& st);

}  // namespace rpd
