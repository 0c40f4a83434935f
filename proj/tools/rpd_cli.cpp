// Command-line front end: condition checks, seeded runs, record comparison
// and parameter sweeps over problem-spec files.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "rpd/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCondition = 2;
constexpr int kExitSpec = 3;

std::uint64_t resolve_seed(const rpd::ProblemSpec& spec, const std::optional<std::uint64_t>& cli) {
  if (cli) return *cli;
  if (auto s = spec.seed()) return *s;
  if (const char* env = std::getenv("RPD_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

std::string strip_suffix(std::string s, const std::string& suffix) {
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
    s.resize(s.size() - suffix.size());
  return s;
}

void print_condition(const rpd::ConditionReport& rep) {
  std::printf("condition: %s\n", rep.pass ? "PASS" : "FAIL");
  std::printf("  norm_estimate        %.12g\n", rep.norm_estimate);
  std::printf("  norm_bound           %.12g\n", rep.norm_bound);
  std::printf("  mu                   %.12g\n", rep.mu);
  std::printf("  nu                   %.12g\n", rep.nu);
  std::printf("  alpha                %.12g\n", rep.alpha);
  std::printf("  alpha_hat            %.12g\n", rep.alpha_hat);
  std::printf("  theta                %.12g\n", rep.theta);
  std::printf("  block_sum_sufficient %s\n", rep.sufficient_block_sum ? "yes" : "no");
  std::printf("  detail               %s\n", rep.detail.c_str());
}

int cmd_check(const std::string& spec_path) {
  const rpd::ProblemSpec spec = rpd::ProblemSpec::from_file(spec_path);
  const rpd::BuiltProblem built = rpd::build_problem(spec);
  const rpd::AlgorithmId alg = spec.algorithm();
  rpd::ConditionReport rep;
  if (built.distributed())
    rep = alg == rpd::AlgorithmId::Dist2 ? rpd::check_dist2(*built.dist)
                                         : rpd::check_dist1(*built.dist);
  else
    rep = alg == rpd::AlgorithmId::Alg2 ? rpd::check_alg2(*built.pd)
                                        : rpd::check_alg1(*built.pd);
  print_condition(rep);

  const rpd::ActivationSchedule schedule = rpd::schedule_from_spec(spec, built);
  const rpd::ActivationReport act = schedule.validate();
  std::printf("activation: %s\n", act.valid ? "VALID" : "INVALID");
  std::printf("  expected_active_fraction %.6g\n", act.expected_active_fraction);
  for (const auto& p : act.problems) std::printf("  problem: %s\n", p.c_str());
  return rep.pass && act.valid ? kExitOk : kExitCondition;
}

int cmd_run(const std::string& spec_path, std::optional<std::uint64_t> seed_opt, bool force,
            std::string out_prefix) {
  const rpd::ProblemSpec spec = rpd::ProblemSpec::from_file(spec_path);
  const std::uint64_t seed = resolve_seed(spec, seed_opt);
  if (out_prefix.empty()) out_prefix = strip_suffix(spec_path, ".json") + ".run";
  const rpd::RunOutputs out = rpd::run_experiment(spec, seed, force);
  rpd::write_outputs(out, out_prefix);
  std::printf("run: %s seed=%llu iterations=%ld stop=%s objective=%.12g wall=%.3fs\n",
              out.config_hash.c_str(), static_cast<unsigned long long>(seed), out.iterations,
              out.stop_reason.c_str(), out.final_objective, out.wall_seconds);
  std::printf("wrote %s.csv and %s.json\n", out_prefix.c_str(), out_prefix.c_str());
  return kExitOk;
}

int cmd_compare(const std::string& record_prefix, const std::string& spec_path) {
  const rpd::ProblemSpec spec = rpd::ProblemSpec::from_file(spec_path);
  const std::string prefix = strip_suffix(strip_suffix(record_prefix, ".csv"), ".json");
  const rpd::CompareSummary sum = rpd::compare_record(prefix, spec);
  std::printf("reference: method=%s objective=%.12g residual=%.3g\n",
              sum.reference_method.c_str(), sum.reference_objective, sum.reference_residual);
  std::printf("objective_gap    %.12g\n", sum.objective_gap);
  std::printf("distance_to_ref  %.12g\n", sum.distance);
  const double thresholds[3] = {1e-2, 1e-4, 1e-6};
  for (int t = 0; t < 3; ++t) {
    if (sum.iters_to_gap[t] >= 0)
      std::printf("iters_to_gap<%.0e  %ld\n", thresholds[t], sum.iters_to_gap[t]);
    else
      std::printf("iters_to_gap<%.0e  not reached\n", thresholds[t]);
  }
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& param,
              const std::vector<double>& values, std::optional<std::uint64_t> seed_opt,
              bool force, std::string out_prefix) {
  const rpd::ProblemSpec base = rpd::ProblemSpec::from_file(spec_path);
  if (out_prefix.empty()) out_prefix = strip_suffix(spec_path, ".json");
  // dotted path into the spec document
  for (std::size_t i = 0; i < values.size(); ++i) {
    rpd::Json doc = base.doc();
    rpd::Json* node = &doc;
    std::string rest = param;
    while (true) {
      const auto dot = rest.find('.');
      if (dot == std::string::npos) break;
      node = &(*node)[rest.substr(0, dot)];
      rest = rest.substr(dot + 1);
    }
    (*node)[rest] = values[i];
    const rpd::ProblemSpec spec = rpd::ProblemSpec::from_json(doc);
    const std::uint64_t seed = resolve_seed(spec, seed_opt);
    const rpd::RunOutputs out = rpd::run_experiment(spec, seed, force);
    const std::string prefix = out_prefix + ".sweep" + std::to_string(i);
    rpd::write_outputs(out, prefix);
    std::printf("sweep %zu: %s=%g iterations=%ld stop=%s objective=%.12g -> %s.csv\n", i,
                param.c_str(), values[i], out.iterations, out.stop_reason.c_str(),
                out.final_objective, prefix.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized block-coordinate primal-dual solver toolkit"};
  app.require_subcommand(1);

  std::string spec_path, record_prefix, out_prefix, param;
  std::vector<double> values;
  std::optional<std::uint64_t> seed;
  bool force = false;

  auto* check = app.add_subcommand("check", "evaluate step-size conditions for a spec");
  check->add_option("spec", spec_path, "problem-spec file")->required();

  auto* run = app.add_subcommand("run", "run an experiment and write its record");
  run->add_option("spec", spec_path, "problem-spec file")->required();
  run->add_option("--seed", seed, "seed override (decimal 64-bit)");
  run->add_flag("--force", force, "run even if the condition check fails");
  run->add_option("--out", out_prefix, "output prefix (default: spec path)");

  auto* compare = app.add_subcommand("compare", "compare a run record against the reference");
  compare->add_option("record", record_prefix, "record prefix or csv/json path")->required();
  compare->add_option("spec", spec_path, "problem-spec file")->required();

  auto* sweep = app.add_subcommand("sweep", "run a sweep over one spec parameter");
  sweep->add_option("spec", spec_path, "problem-spec file")->required();
  sweep->add_option("--param", param, "dotted path into the spec, e.g. activation.prob")
      ->required();
  sweep->add_option("--values", values, "values to sweep")->required()->delimiter(',');
  sweep->add_option("--seed", seed, "seed override");
  sweep->add_flag("--force", force, "run even if the condition check fails");
  sweep->add_option("--out", out_prefix, "output prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(spec_path);
    if (run->parsed()) return cmd_run(spec_path, seed, force, out_prefix);
    if (compare->parsed()) return cmd_compare(record_prefix, spec_path);
    if (sweep->parsed()) return cmd_sweep(spec_path, param, values, seed, force, out_prefix);
  } catch (const rpd::SpecError& e) {
    std::fprintf(stderr, "spec error: %s\n", e.what());
    return kExitSpec;
  } catch (const rpd::ConditionError& e) {
    std::fprintf(stderr, "condition error: %s\n", e.what());
    return kExitCondition;
  } catch (const rpd::ReferenceUnavailable& e) {
    std::fprintf(stderr, "reference unavailable: %s\n", e.what());
    return kExitSpec;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
