#pragma once

/// Problem-spec documents: a versioned JSON format describing a zoo family or
/// inline custom problem, the algorithm, activation schedule, error injector
/// and run parameters.  Unknown fields are rejected.

#include <json.hpp>
#include <optional>
#include <string>

#include "rpd/distributed.hpp"
#include "rpd/error_injection.hpp"
#include "rpd/zoo.hpp"

namespace rpd {

using Json = nlohmann::ordered_json;

enum class AlgorithmId { Alg1, Alg1Sym, Alg2, Dist1, Dist2, DistOpt, DistPairwise };

std::string to_string(AlgorithmId alg);
AlgorithmId algorithm_from_string(const std::string& name);
bool is_distributed(AlgorithmId alg);

class ProblemSpec {
 public:
  static ProblemSpec from_file(const std::string& path);
  static ProblemSpec from_text(const std::string& text);
  static ProblemSpec from_json(Json doc);

  const Json& doc() const { return doc_; }
  std::string canonical() const { return doc_.dump(); }

  std::string family() const { return doc_.at("family").get<std::string>(); }
  AlgorithmId algorithm() const { return algorithm_from_string(doc_.at("algorithm")); }
  double lambda() const { return doc_.at("lambda").get<double>(); }
  StopRule stop() const;
  std::optional<std::uint64_t> seed() const;
  std::uint64_t data_seed() const { return doc_.value("data_seed", 0ULL); }
  Json activation() const { return doc_.at("activation"); }
  Json errors() const { return doc_.value("errors", Json{{"kind", "none"}}); }
  bool sum_zero() const { return doc_.value("sum_zero", false); }

 private:
  explicit ProblemSpec(Json doc) : doc_(std::move(doc)) {}
  Json doc_;
};

/// A spec instantiated into an engine problem plus its objective evaluators.
struct BuiltProblem {
  std::optional<PDProblem> pd;
  std::optional<DistProblem> dist;
  std::function<double(const PDState&)> pd_objective;      // empty when unknown
  std::function<double(const Vec&)> shared_objective;      // distributed families
  // zoo payloads kept for references and residuals
  std::optional<LassoData> lasso;
  std::optional<Tv1dData> tv1d;
  std::optional<BoxLsData> box_ls;
  std::optional<RidgeConsensusData> ridge;

  bool distributed() const { return dist.has_value(); }
};

BuiltProblem build_problem(const ProblemSpec& spec);

/// Reference solution for a zoo family; throws ReferenceUnavailable for the
/// custom families (they require a user-provided reference).
ReferenceSolution solve_reference(const ProblemSpec& spec);

ErrorInjector injector_from_json(const Json& j);

ActivationSchedule schedule_from_spec(const ProblemSpec& spec, const BuiltProblem& built);

}  // namespace rpd
