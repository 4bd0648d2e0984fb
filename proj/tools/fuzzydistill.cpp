#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>

#include "fcs/commands.hpp"
#include "fcs/types.hpp"

namespace {

struct ErrorClass {
  const char* type;
  int exit_code;
};

// 0 success, 1 usage, 2 data/validation, 3 numerical failure.
ErrorClass classify(const fcs::Error& e) {
  if (dynamic_cast<const fcs::NumericalError*>(&e) != nullptr) return {"numerical", 3};
  if (dynamic_cast<const fcs::ParseError*>(&e) != nullptr) return {"parse", 2};
  if (dynamic_cast<const fcs::ValidationError*>(&e) != nullptr) return {"validation", 2};
  if (dynamic_cast<const fcs::InvalidInputError*>(&e) != nullptr) return {"invalid-input", 2};
  return {"io", 2};  // the base class is only thrown by file operations
}

void emit_error_record(const char* type, const std::string& message) {
  nlohmann::ordered_json record;
  record["error"]["type"] = type;
  record["error"]["message"] = message;
  std::cerr << record.dump() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Distills logged state-action behaviour of a continuous-control teacher into a "
               "hierarchical TSK fuzzy rule system"};
  app.set_version_flag("--version", std::string(fcs::kToolVersion));
  app.require_subcommand(1);

  fcs::GenerateOptions gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Roll out the scripted teacher and log a dataset");
  generate->add_option("--env-config", gen.env_config_path, "Environment config JSON");
  generate->add_option("--n", gen.n_samples, "State-action pairs to collect")
      ->capture_default_str()
      ->check(CLI::Range(fcs::Index{1}, fcs::Index{100000000}));
  CLI::Option* gen_seed = generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen.out_path, "Dataset path (.csv or .jsonl)")->required();

  fcs::DistillOptions dis;
  CLI::App* distill =
      app.add_subcommand("distill", "Fit a fuzzy rule system to a logged dataset");
  distill->add_option("--dataset", dis.dataset_path, "Dataset path")->required();
  distill->add_option("--model", dis.model_path, "Output model JSON path")->required();
  distill->add_option("--family", dis.family, "Membership family")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "triangular"}));
  distill->add_option("--rules", dis.n_rules, "Number of rules")
      ->capture_default_str()
      ->check(CLI::Range(fcs::Index{1}, fcs::Index{100000}));
  distill->add_option("--beta", dis.beta, "Triangular support half-width factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  distill->add_option("--lambda", dis.lambda, "Ridge regularisation strength")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  distill->add_option("--tau", dis.tau, "Fidelity tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  distill->add_option("--seed", dis.seed, "RNG seed")->capture_default_str();

  fcs::EvaluateOptions eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a model against a dataset");
  evaluate->add_option("--model", eval.model_path, "Model JSON path")->required();
  evaluate->add_option("--dataset", eval.dataset_path, "Dataset path")->required();
  evaluate->add_option("--tau", eval.tau, "Fidelity tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--out", eval.out_path, "Report JSON path (also writes a CSV sibling)");

  fcs::RolloutCompareOptions roll;
  CLI::App* rollout = app.add_subcommand(
      "rollout-compare", "DTW between paired teacher and surrogate rollouts");
  rollout->add_option("--model", roll.model_path, "Model JSON path")->required();
  rollout->add_option("--env-config", roll.env_config_path, "Environment config JSON");
  rollout->add_option("--n", roll.n_rollouts, "Number of paired rollouts")
      ->capture_default_str()
      ->check(CLI::Range(fcs::Index{1}, fcs::Index{100000}));
  CLI::Option* roll_seed = rollout->add_option("--seed", roll.seed, "RNG seed");
  rollout->add_option("--out", roll.out_dir, "Output directory")->required();

  fcs::SweepOptions sweep;
  std::string seeds_spec = "42..46";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Grid over families, rule counts and seeds");
  sweep_cmd->add_option("--dataset", sweep.dataset_path, "Dataset path")->required();
  sweep_cmd->add_option("--rules", sweep.rule_counts, "Rule counts, e.g. 4,8,16")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::Range(fcs::Index{1}, fcs::Index{100000}));
  sweep_cmd->add_option("--families", sweep.families, "Families, e.g. gaussian,triangular")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds_spec, "Seed list or range, e.g. 42..46")
      ->capture_default_str();
  sweep_cmd->add_option("--beta", sweep.beta, "Triangular support half-width factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--lambda", sweep.lambda, "Ridge regularisation strength")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--tau", sweep.tau, "Fidelity tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out_dir, "Output directory")->required();

  fcs::ExportRulesOptions exp;
  CLI::App* export_rules =
      app.add_subcommand("export-rules", "Render the rulebase as IF-THEN text and JSON");
  export_rules->add_option("--model", exp.model_path, "Model JSON path")->required();
  export_rules->add_option("--scheme", exp.scheme_path, "Label scheme JSON");
  export_rules
      ->add_option("--salience-threshold", exp.salience_threshold,
                   "Clause omitted when spread >= threshold x dimension std")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  export_rules->add_option("--out", exp.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  gen.seed_given = gen_seed->count() > 0;
  roll.seed_given = roll_seed->count() > 0;
  if (sweep_cmd->parsed()) sweep.seeds = fcs::parse_seed_spec(seeds_spec);

  if (generate->parsed()) fcs::cmd_generate(gen);
  if (distill->parsed()) fcs::cmd_distill(dis);
  if (evaluate->parsed()) fcs::cmd_evaluate(eval);
  if (rollout->parsed()) fcs::cmd_rollout_compare(roll);
  if (sweep_cmd->parsed()) fcs::cmd_sweep(sweep);
  if (export_rules->parsed()) fcs::cmd_export_rules(exp);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fcs::Error& e) {
    const ErrorClass c = classify(e);
    emit_error_record(c.type, e.what());
    return c.exit_code;
  } catch (const std::exception& e) {
    emit_error_record("internal", e.what());
    return 2;
  }
}
