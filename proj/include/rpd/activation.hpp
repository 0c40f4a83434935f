#pragma once

/// Random binary activation patterns with the coupling closures the step
/// functions require.  A schedule draws identically distributed nonzero
/// patterns from its own stream; closure is a monotone post-pass on the raw
/// draw, so the emitted patterns stay i.i.d.

#include <string>
#include <vector>

#include "rpd/common.hpp"
#include "rpd/rng.hpp"

namespace rpd {

using ActivationPattern = std::vector<std::uint8_t>;

enum class ScheduleKind { Full, Bernoulli, SingleSeed };

enum class CouplingRule { None, PrimalFollowsDual, DualFollowsPrimal, Distributed };

/// Support structure the closure rules read.  For the primal-dual rules,
/// `col_support[j]` lists the dual indices coupled to primal j and
/// `row_support[k]` the primal indices coupled to dual k.  For the
/// distributed rule, `edges[l]` lists the agents of hyperedge l.
struct CouplingStructure {
  int p = 0, q = 0;                           // primal-dual layout (length p+q)
  std::vector<std::vector<int>> col_support;  // size p
  std::vector<std::vector<int>> row_support;  // size q
  int m = 0, r = 0;                           // distributed layout (length 2m+r)
  std::vector<std::vector<int>> edges;        // size r

  int length(CouplingRule rule) const {
    return rule == CouplingRule::Distributed ? 2 * m + r : p + q;
  }
};

struct ActivationReport {
  bool valid = true;
  std::vector<std::string> problems;
  Vec marginals;                        // per-coordinate, after closure
  double expected_active_fraction = 0;  // mean pattern density
};

class ActivationSchedule {
 public:
  /// Every coordinate active every iteration.
  static ActivationSchedule full(CouplingRule rule, CouplingStructure st);
  /// Independent Bernoulli coordinates with marginals `probs` (rejection
  /// resampling of the zero string), then closure.
  static ActivationSchedule bernoulli(Vec probs, CouplingRule rule, CouplingStructure st);
  /// One uniformly chosen driver coordinate, then closure.  Drivers are the
  /// p+q coordinates for the primal-dual rules and the m agents for the
  /// distributed rule.
  static ActivationSchedule single_seed(CouplingRule rule, CouplingStructure st);

  ScheduleKind kind() const { return kind_; }
  CouplingRule rule() const { return rule_; }
  const CouplingStructure& structure() const { return structure_; }
  int length() const { return structure_.length(rule_); }

  ActivationPattern sample(Rng& rng) const;

  /// Analytic marginal activation probabilities (after closure and
  /// zero-string rejection).
  Vec marginals() const;

  ActivationReport validate() const;

  /// Apply this schedule's closure rule in place.
  void close(ActivationPattern& eps) const;

  /// Check a pattern against a closure rule; empty string when satisfied.
  static std::string closure_violation(const ActivationPattern& eps, CouplingRule rule,
                                       const CouplingStructure& st);

 private:
  ActivationSchedule(ScheduleKind k, CouplingRule r, CouplingStructure st, Vec probs);

  ScheduleKind kind_;
  CouplingRule rule_;
  CouplingStructure structure_;
  Vec probs_;
};

}  // namespace rpd
