#pragma once

/// Experiment runner: seeded runs producing a CSV iteration record plus a
/// JSON sidecar, byte-identical across reruns of the same (spec, seed), and
/// the comparison of a record against a reference solution.

#include "rpd/spec_io.hpp"

namespace rpd {

struct RecordRow {
  long n = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double consensus_disagreement = 0.0;
  long active_blocks = 0;
  long cum_block_evals = 0;
  double err_norm = 0.0;
};

struct RunOutputs {
  std::vector<RecordRow> rows;
  std::string stop_reason;
  long iterations = 0;
  bool condition_forced = false;
  std::uint64_t seed = 0;
  std::string config_hash;
  double final_objective = 0.0;
  std::vector<Vec> final_primal;  // primal blocks (pd) or agent iterates (dist)
  Json sidecar;
  std::string csv;
  double wall_seconds = 0.0;  // reported on the console, never written to files
};

std::string config_hash_of(const ProblemSpec& spec, std::uint64_t seed);

RunOutputs run_experiment(const ProblemSpec& spec, std::uint64_t seed, bool force = false);

/// Writes prefix.csv and prefix.json.
void write_outputs(const RunOutputs& out, const std::string& prefix);

struct CompareSummary {
  double objective_gap = 0.0;  // final objective minus reference objective
  double distance = 0.0;       // pd: ||x - x*||; dist: max_i ||x_i - x*||
  long iters_to_gap[3] = {-1, -1, -1};  // thresholds 1e-2, 1e-4, 1e-6
  double reference_objective = 0.0;
  std::string reference_method;
  double reference_residual = 0.0;
};

/// Reads prefix.csv / prefix.json written by a run and compares against the
/// reference solution of `spec`.
CompareSummary compare_record(const std::string& prefix, const ProblemSpec& spec);

CompareSummary compare_outputs(const RunOutputs& out, const ProblemSpec& spec);

}  // namespace rpd
