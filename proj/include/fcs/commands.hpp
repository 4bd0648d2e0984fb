#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fcs/linguistics.hpp"
#include "fcs/types.hpp"

namespace fcs {

// When --seed is absent the environment config's seed applies, so the
// seed-bearing option structs carry a seed_given flag set by the CLI.

struct GenerateOptions {
  std::string env_config_path;  // empty = built-in defaults
  Index n_samples = 5000;
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::string out_path;  // .csv or .jsonl
};

struct DistillOptions {
  std::string dataset_path;
  std::string model_path;
  std::string family = "triangular";
  Index n_rules = 16;
  double beta = 1.5;
  double lambda = 0.1;
  double tau = 0.1;
  std::uint64_t seed = 42;
};

struct EvaluateOptions {
  std::string model_path;
  std::string dataset_path;
  double tau = 0.1;
  std::string out_path;  // empty = stdout only
};

struct RolloutCompareOptions {
  std::string model_path;
  std::string env_config_path;  // empty = built-in defaults
  Index n_rollouts = 10;
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::string out_dir;
};

struct SweepOptions {
  std::string dataset_path;
  std::vector<Index> rule_counts = {4, 8, 16};
  std::vector<std::string> families = {"gaussian", "triangular"};
  std::vector<std::uint64_t> seeds = {42, 43, 44, 45, 46};
  double beta = 1.5;
  double lambda = 0.1;
  double tau = 0.1;
  std::string out_dir;
};

struct ExportRulesOptions {
  std::string model_path;
  std::string scheme_path;  // empty = built-in default scheme
  double salience_threshold = kDefaultSalienceThreshold;
  std::string out_dir;
};

void cmd_generate(const GenerateOptions& opt);
void cmd_distill(const DistillOptions& opt);
void cmd_evaluate(const EvaluateOptions& opt);
void cmd_rollout_compare(const RolloutCompareOptions& opt);
void cmd_sweep(const SweepOptions& opt);
void cmd_export_rules(const ExportRulesOptions& opt);

// "42..46" (inclusive range) or "42,43,44".
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

// FUZZYDISTILL_THREADS caps the pool; unset or unparsable falls back to the
// hardware concurrency.
int worker_count();
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace fcs
