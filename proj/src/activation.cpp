#include "rpd/activation.hpp"

#include <algorithm>
#include <numeric>

namespace rpd {
namespace {

constexpr int kResampleCap = 10000;

bool any_set(const ActivationPattern& eps) {
  return std::any_of(eps.begin(), eps.end(), [](std::uint8_t b) { return b != 0; });
}

}  // namespace

ActivationSchedule::ActivationSchedule(ScheduleKind k, CouplingRule r, CouplingStructure st,
                                       Vec probs)
    : kind_(k), rule_(r), structure_(std::move(st)), probs_(std::move(probs)) {
  if (rule_ == CouplingRule::Distributed) {
    require(structure_.m >= 1, "ActivationSchedule: distributed structure needs agents");
    require(static_cast<int>(structure_.edges.size()) == structure_.r,
            "ActivationSchedule: edge list size mismatch");
  } else {
    require(structure_.p >= 0 && structure_.q >= 0 && structure_.p + structure_.q >= 1,
            "ActivationSchedule: empty coordinate space");
  }
  if (kind_ == ScheduleKind::Bernoulli) {
    require(static_cast<int>(probs_.size()) == length(),
            "ActivationSchedule: probability vector length mismatch");
    for (double p : probs_)
      require(p >= 0.0 && p <= 1.0, "ActivationSchedule: probabilities must lie in [0,1]");
  }
}

ActivationSchedule ActivationSchedule::full(CouplingRule rule, CouplingStructure st) {
  return ActivationSchedule(ScheduleKind::Full, rule, std::move(st), {});
}

ActivationSchedule ActivationSchedule::bernoulli(Vec probs, CouplingRule rule,
                                                 CouplingStructure st) {
  return ActivationSchedule(ScheduleKind::Bernoulli, rule, std::move(st), std::move(probs));
}

ActivationSchedule ActivationSchedule::single_seed(CouplingRule rule, CouplingStructure st) {
  return ActivationSchedule(ScheduleKind::SingleSeed, rule, std::move(st), {});
}

void ActivationSchedule::close(ActivationPattern& eps) const {
  const auto& st = structure_;
  switch (rule_) {
    case CouplingRule::None:
      return;
    case CouplingRule::PrimalFollowsDual:
      for (int j = 0; j < st.p; ++j)
        for (int k : st.col_support[j])
          if (eps[static_cast<std::size_t>(st.p) + k]) {
            eps[j] = 1;
            break;
          }
      return;
    case CouplingRule::DualFollowsPrimal:
      for (int k = 0; k < st.q; ++k)
        for (int j : st.row_support[k])
          if (eps[j]) {
            eps[static_cast<std::size_t>(st.p) + k] = 1;
            break;
          }
      return;
    case CouplingRule::Distributed:
      for (int i = 0; i < st.m; ++i)
        if (eps[i]) eps[static_cast<std::size_t>(st.m) + i] = 1;
      for (int l = 0; l < st.r; ++l)
        for (int i : st.edges[l])
          if (eps[i]) {
            eps[static_cast<std::size_t>(2 * st.m) + l] = 1;
            break;
          }
      return;
  }
}

std::string ActivationSchedule::closure_violation(const ActivationPattern& eps,
                                                  CouplingRule rule,
                                                  const CouplingStructure& st) {
  auto coord = [](const char* what, int i) {
    return std::string(what) + " " + std::to_string(i);
  };
  switch (rule) {
    case CouplingRule::None:
      break;
    case CouplingRule::PrimalFollowsDual:
      for (int j = 0; j < st.p; ++j)
        for (int k : st.col_support[j])
          if (eps[static_cast<std::size_t>(st.p) + k] && !eps[j])
            return "active dual " + std::to_string(k) + " requires " + coord("primal", j);
      break;
    case CouplingRule::DualFollowsPrimal:
      for (int k = 0; k < st.q; ++k)
        for (int j : st.row_support[k])
          if (eps[j] && !eps[static_cast<std::size_t>(st.p) + k])
            return "active primal " + std::to_string(j) + " requires " + coord("dual", k);
      break;
    case CouplingRule::Distributed:
      for (int i = 0; i < st.m; ++i)
        if (eps[i] && !eps[static_cast<std::size_t>(st.m) + i])
          return "active agent " + std::to_string(i) + " requires its dual coordinate";
      for (int l = 0; l < st.r; ++l)
        for (int i : st.edges[l])
          if (eps[i] && !eps[static_cast<std::size_t>(2 * st.m) + l])
            return "active agent " + std::to_string(i) + " requires " + coord("edge", l);
      break;
  }
  if (!any_set(eps)) return "pattern is the zero string";
  return {};
}

ActivationPattern ActivationSchedule::sample(Rng& rng) const {
  const int n = length();
  ActivationPattern eps(static_cast<std::size_t>(n), 0);
  switch (kind_) {
    case ScheduleKind::Full:
      std::fill(eps.begin(), eps.end(), 1);
      return eps;
    case ScheduleKind::Bernoulli: {
      for (int attempt = 0; attempt < kResampleCap; ++attempt) {
        for (int i = 0; i < n; ++i) eps[i] = rng.bernoulli(probs_[i]) ? 1 : 0;
        if (any_set(eps)) {
          close(eps);
          return eps;
        }
      }
      throw StructuralError("ActivationSchedule::sample: zero-string resampling cap reached");
    }
    case ScheduleKind::SingleSeed: {
      const int drivers = rule_ == CouplingRule::Distributed ? structure_.m : n;
      eps[rng.uniform_int(drivers)] = 1;
      close(eps);
      return eps;
    }
  }
  return eps;
}

Vec ActivationSchedule::marginals() const {
  const int n = length();
  Vec marg(static_cast<std::size_t>(n), 0.0);
  const auto& st = structure_;
  switch (kind_) {
    case ScheduleKind::Full:
      std::fill(marg.begin(), marg.end(), 1.0);
      return marg;
    case ScheduleKind::SingleSeed: {
      // exact enumeration of the driver cases
      const int drivers = rule_ == CouplingRule::Distributed ? st.m : n;
      for (int d = 0; d < drivers; ++d) {
        ActivationPattern eps(static_cast<std::size_t>(n), 0);
        eps[d] = 1;
        close(eps);
        for (int i = 0; i < n; ++i)
          if (eps[i]) marg[i] += 1.0 / drivers;
      }
      return marg;
    }
    case ScheduleKind::Bernoulli: {
      // P(coordinate active | draw nonzero); every activating event is a
      // subset of the nonzero event, so conditioning divides by Z.
      double z_complement = 1.0;
      for (double p : probs_) z_complement *= 1.0 - p;
      const double z = 1.0 - z_complement;
      require(z > 0.0, "ActivationSchedule: all-zero Bernoulli schedule");
      auto forced = [&](int raw, const std::vector<int>& forcers, int offset) {
        double miss = 1.0 - probs_[raw];
        for (int f : forcers) miss *= 1.0 - probs_[static_cast<std::size_t>(offset) + f];
        return (1.0 - miss) / z;
      };
      switch (rule_) {
        case CouplingRule::None:
          for (int i = 0; i < n; ++i) marg[i] = probs_[i] / z;
          break;
        case CouplingRule::PrimalFollowsDual:
          for (int j = 0; j < st.p; ++j) marg[j] = forced(j, st.col_support[j], st.p);
          for (int k = 0; k < st.q; ++k) marg[st.p + k] = probs_[st.p + k] / z;
          break;
        case CouplingRule::DualFollowsPrimal:
          for (int j = 0; j < st.p; ++j) marg[j] = probs_[j] / z;
          for (int k = 0; k < st.q; ++k) marg[st.p + k] = forced(st.p + k, st.row_support[k], 0);
          break;
        case CouplingRule::Distributed:
          for (int i = 0; i < st.m; ++i) marg[i] = probs_[i] / z;
          for (int i = 0; i < st.m; ++i) marg[st.m + i] = forced(st.m + i, {i}, 0);
          for (int l = 0; l < st.r; ++l) marg[2 * st.m + l] = forced(2 * st.m + l, st.edges[l], 0);
          break;
      }
      return marg;
    }
  }
  return marg;
}

ActivationReport ActivationSchedule::validate() const {
  ActivationReport rep;
  if (kind_ == ScheduleKind::Bernoulli) {
    bool all_zero = true;
    for (double p : probs_) all_zero = all_zero && p == 0.0;
    if (all_zero) {
      rep.valid = false;
      rep.problems.push_back("all Bernoulli probabilities are zero; only the zero string can be drawn");
      return rep;
    }
  }
  rep.marginals = marginals();
  for (std::size_t i = 0; i < rep.marginals.size(); ++i) {
    if (rep.marginals[i] <= 0.0) {
      rep.valid = false;
      rep.problems.push_back("coordinate " + std::to_string(i) +
                             " has zero activation probability");
    }
  }
  rep.expected_active_fraction =
      std::accumulate(rep.marginals.begin(), rep.marginals.end(), 0.0) /
      static_cast<double>(rep.marginals.size());
  return rep;
}

}  // namespace rpd
