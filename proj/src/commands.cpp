#include "fcs/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fcs/dtw.hpp"
#include "fcs/io.hpp"
#include "fcs/lander.hpp"
#include "fcs/metrics.hpp"
#include "fcs/model_io.hpp"
#include "fcs/train.hpp"

namespace fcs {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// "out/model.json" + ".metrics.csv" -> "out/model.metrics.csv".
std::string sibling_path(const std::string& primary, const std::string& suffix) {
  fs::path p(primary);
  fs::path dir = p.parent_path();
  return (dir / (p.stem().string() + suffix)).string();
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::uint64_t>& seeds, ordered_json inputs,
                    ordered_json outputs, ordered_json config) {
  ordered_json doc;
  doc["tool"] = "fuzzydistill";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["timestamp"] = iso8601_utc_now();
  doc["seeds"] = seeds;
  doc["inputs"] = std::move(inputs);
  doc["outputs"] = std::move(outputs);
  doc["config"] = std::move(config);
  write_file_atomic(path, doc.dump(2) + "\n");
}

EnvConfig env_config_or_default(const std::string& path) {
  return path.empty() ? EnvConfig{} : load_env_config(path);
}

TrainConfig make_train_config(const std::string& family, Index n_rules, double beta,
                              double lambda, std::uint64_t seed) {
  TrainConfig config;
  config.n_rules = n_rules;
  config.family = MembershipFamily{mf_kind_from_string(family), beta};
  config.family.validate();
  config.lambda = lambda;
  config.seed = seed;
  return config;
}

// Validation split when it exists, otherwise the whole dataset (tiny inputs).
Dataset validation_view(const Dataset& data, const TrainReport& report) {
  if (report.val_indices.empty()) return data;
  return subset(data, report.val_indices);
}

double population_std(const std::vector<double>& values, double mean) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = (values[i] - mean) * (values[i] - mean);
  }
  return std::sqrt(sorted_sum(std::move(sq)) / static_cast<double>(values.size()));
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t";
  for (const std::string& name : lander_feature_names()) out << "," << name;
  for (const std::string& name : lander_action_names()) out << "," << name;
  out << "\n";
  for (Index t = 0; t < traj.length(); ++t) {
    out << t;
    for (Index k = 0; k < traj.states.cols(); ++k) out << "," << format_double(traj.states(t, k));
    for (Index j = 0; j < traj.actions.cols(); ++j) {
      out << "," << format_double(traj.actions(t, j));
    }
    out << "\n";
  }
  return out.str();
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw InvalidInputError("cannot create output directory \"" + dir + "\": " + ec.message());
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const std::size_t dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = static_cast<std::uint64_t>(
        parse_int(spec.substr(0, dots), "seed range start"));
    const std::uint64_t hi = static_cast<std::uint64_t>(
        parse_int(spec.substr(dots + 2), "seed range end"));
    if (hi < lo) throw InvalidInputError("seed range \"" + spec + "\": end before start");
    if (hi - lo > 10000) throw InvalidInputError("seed range \"" + spec + "\": too wide");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    seeds.push_back(static_cast<std::uint64_t>(parse_int(token, "seed")));
  }
  if (seeds.empty()) throw InvalidInputError("seed spec \"" + spec + "\": empty");
  return seeds;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("FUZZYDISTILL_THREADS"); env != nullptr && *env != '\0') {
    try {
      n = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      // Unparsable cap: keep the hardware default.
    }
  }
  return n;
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const Index workers = std::min<Index>(worker_count(), n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const Index i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void cmd_generate(const GenerateOptions& opt) {
  if (opt.out_path.empty()) throw InvalidInputError("generate: --out is required");
  const EnvConfig config = env_config_or_default(opt.env_config_path);
  const std::uint64_t seed = opt.seed_given ? opt.seed : config.seed;

  const Dataset data = generate_dataset(config, opt.n_samples, seed);
  save_dataset(data, opt.out_path);

  ordered_json inputs;
  inputs["env_config"] = opt.env_config_path.empty() ? "builtin-default" : opt.env_config_path;
  ordered_json outputs;
  outputs["dataset"] = opt.out_path;
  ordered_json config_snapshot;
  config_snapshot["n_samples"] = opt.n_samples;
  config_snapshot["seed"] = seed;
  config_snapshot["env"] = env_config_to_json(config);
  write_manifest(sibling_path(opt.out_path, ".manifest.json"), "generate", {seed},
                 std::move(inputs), std::move(outputs), std::move(config_snapshot));

  std::cout << "wrote " << opt.out_path << " (" << data.size() << " samples, "
            << data.episode_starts.size() << " episodes)\n";
}

void cmd_distill(const DistillOptions& opt) {
  if (opt.dataset_path.empty()) throw InvalidInputError("distill: --dataset is required");
  if (opt.model_path.empty()) throw InvalidInputError("distill: --model is required");

  const Dataset data = load_dataset(opt.dataset_path);
  const TrainConfig config =
      make_train_config(opt.family, opt.n_rules, opt.beta, opt.lambda, opt.seed);
  const DistillResult result = distill(data, config);

  const Dataset val = validation_view(data, result.report);
  const MetricsReport report = evaluate(result.model, val, opt.tau);

  save_model(result.model, opt.model_path);
  const std::string metrics_json_path = sibling_path(opt.model_path, ".metrics.json");
  const std::string metrics_csv_path = sibling_path(opt.model_path, ".metrics.csv");
  write_file_atomic(metrics_json_path, report.to_json().dump(2) + "\n");
  write_file_atomic(metrics_csv_path,
                    MetricsReport::csv_header() + "\n" + report.csv_row() + "\n");

  ordered_json inputs;
  inputs["dataset"] = opt.dataset_path;
  ordered_json outputs;
  outputs["model"] = opt.model_path;
  outputs["metrics_json"] = metrics_json_path;
  outputs["metrics_csv"] = metrics_csv_path;
  ordered_json config_snapshot;
  config_snapshot["family"] = opt.family;
  config_snapshot["rules"] = opt.n_rules;
  config_snapshot["beta"] = opt.beta;
  config_snapshot["lambda"] = opt.lambda;
  config_snapshot["tau"] = opt.tau;
  config_snapshot["seed"] = opt.seed;
  config_snapshot["train_samples"] = static_cast<Index>(result.report.train_indices.size());
  config_snapshot["validation_samples"] = static_cast<Index>(result.report.val_indices.size());
  config_snapshot["kmeans_inertia"] = result.report.kmeans_inertia;
  config_snapshot["kmeans_iterations"] = result.report.kmeans_iterations;
  config_snapshot["low_support_rules"] = result.report.low_support_rules;
  write_manifest(sibling_path(opt.model_path, ".manifest.json"), "distill", {opt.seed},
                 std::move(inputs), std::move(outputs), std::move(config_snapshot));

  std::cout << report.to_json().dump(2) << "\n";
}

void cmd_evaluate(const EvaluateOptions& opt) {
  if (opt.model_path.empty()) throw InvalidInputError("evaluate: --model is required");
  if (opt.dataset_path.empty()) throw InvalidInputError("evaluate: --dataset is required");

  const FcsModel model = load_model(opt.model_path);
  const Dataset data = load_dataset(opt.dataset_path);
  const MetricsReport report = evaluate(model, data, opt.tau);

  if (!opt.out_path.empty()) {
    const std::string csv_path = sibling_path(opt.out_path, ".csv");
    write_file_atomic(opt.out_path, report.to_json().dump(2) + "\n");
    write_file_atomic(csv_path, MetricsReport::csv_header() + "\n" + report.csv_row() + "\n");

    ordered_json inputs;
    inputs["model"] = opt.model_path;
    inputs["dataset"] = opt.dataset_path;
    ordered_json outputs;
    outputs["report_json"] = opt.out_path;
    outputs["report_csv"] = csv_path;
    ordered_json config_snapshot;
    config_snapshot["tau"] = opt.tau;
    write_manifest(sibling_path(opt.out_path, ".manifest.json"), "evaluate", {},
                   std::move(inputs), std::move(outputs), std::move(config_snapshot));
  }
  std::cout << report.to_json().dump(2) << "\n";
}

void cmd_rollout_compare(const RolloutCompareOptions& opt) {
  if (opt.model_path.empty()) throw InvalidInputError("rollout-compare: --model is required");
  if (opt.out_dir.empty()) throw InvalidInputError("rollout-compare: --out is required");
  if (opt.n_rollouts < 1) throw InvalidInputError("rollout-compare: --n must be >= 1");

  const FcsModel model = load_model(opt.model_path);
  if (model.d != 8 || model.m != 2) {
    throw InvalidInputError("rollout-compare: model dimensions (d=" + std::to_string(model.d) +
                            ", m=" + std::to_string(model.m) +
                            ") do not match the lander environment (d=8, m=2)");
  }
  const EnvConfig config = env_config_or_default(opt.env_config_path);
  const std::uint64_t seed = opt.seed_given ? opt.seed : config.seed;
  ensure_directory(opt.out_dir);

  const Policy teacher = [&config](const Vec& s) { return scripted_teacher(s, config.teacher); };
  const Policy surrogate = [&model](const Vec& s) { return infer(model, s).action; };

  Rng rng(seed);
  std::vector<double> costs;
  std::vector<double> normalized;
  std::ostringstream pairs;
  pairs << "pair,teacher_steps,surrogate_steps,dtw,dtw_normalized\n";
  const fs::path dir(opt.out_dir);
  for (Index k = 0; k < opt.n_rollouts; ++k) {
    const LanderState init = random_initial_state(rng, config);
    const Trajectory teacher_traj = rollout(teacher, config, init);
    const Trajectory surrogate_traj = rollout(surrogate, config, init);
    const DtwResult dtw = dtw_alignment(teacher_traj, surrogate_traj);
    costs.push_back(dtw.cost);
    normalized.push_back(dtw.normalized_cost);
    pairs << k << "," << teacher_traj.length() << "," << surrogate_traj.length() << ","
          << format_double(dtw.cost) << "," << format_double(dtw.normalized_cost) << "\n";
    const std::string stem = "traj_" + std::to_string(k);
    write_file_atomic((dir / (stem + "_teacher.csv")).string(), trajectory_csv(teacher_traj));
    write_file_atomic((dir / (stem + "_surrogate.csv")).string(),
                      trajectory_csv(surrogate_traj));
  }
  write_file_atomic((dir / "dtw_pairs.csv").string(), pairs.str());

  const double mean = sorted_sum(costs) / static_cast<double>(costs.size());
  const double mean_norm = sorted_sum(normalized) / static_cast<double>(normalized.size());
  ordered_json summary;
  summary["n_rollouts"] = opt.n_rollouts;
  summary["seed"] = seed;
  summary["dtw_mean"] = mean;
  summary["dtw_std"] = population_std(costs, mean);
  summary["dtw_normalized_mean"] = mean_norm;
  summary["dtw_normalized_std"] = population_std(normalized, mean_norm);
  write_file_atomic((dir / "dtw_summary.json").string(), summary.dump(2) + "\n");

  ordered_json inputs;
  inputs["model"] = opt.model_path;
  inputs["env_config"] = opt.env_config_path.empty() ? "builtin-default" : opt.env_config_path;
  ordered_json outputs;
  outputs["pairs_csv"] = (dir / "dtw_pairs.csv").string();
  outputs["summary_json"] = (dir / "dtw_summary.json").string();
  ordered_json config_snapshot;
  config_snapshot["n_rollouts"] = opt.n_rollouts;
  config_snapshot["seed"] = seed;
  config_snapshot["env"] = env_config_to_json(config);
  write_manifest((dir / "manifest.json").string(), "rollout-compare", {seed}, std::move(inputs),
                 std::move(outputs), std::move(config_snapshot));

  std::cout << summary.dump(2) << "\n";
}

void cmd_sweep(const SweepOptions& opt) {
  if (opt.dataset_path.empty()) throw InvalidInputError("sweep: --dataset is required");
  if (opt.out_dir.empty()) throw InvalidInputError("sweep: --out is required");
  if (opt.rule_counts.empty()) throw InvalidInputError("sweep: empty rule-count grid");
  if (opt.families.empty()) throw InvalidInputError("sweep: empty family grid");
  if (opt.seeds.empty()) throw InvalidInputError("sweep: empty seed list");

  const Dataset data = load_dataset(opt.dataset_path);
  ensure_directory(opt.out_dir);

  struct Cell {
    std::string family;
    Index rules = 0;
    std::uint64_t seed = 0;
    MetricsReport report;
  };
  std::vector<Cell> cells;
  for (const std::string& family : opt.families) {
    mf_kind_from_string(family);  // fail fast on a typo before spawning work
    for (Index rules : opt.rule_counts) {
      for (std::uint64_t seed : opt.seeds) {
        cells.push_back({family, rules, seed, {}});
      }
    }
  }

  parallel_for(static_cast<Index>(cells.size()), [&](Index i) {
    Cell& cell = cells[static_cast<std::size_t>(i)];
    const TrainConfig config =
        make_train_config(cell.family, cell.rules, opt.beta, opt.lambda, cell.seed);
    const DistillResult result = distill(data, config);
    cell.report = evaluate(result.model, validation_view(data, result.report), opt.tau);
  });

  std::ostringstream cells_csv;
  cells_csv << "family,rules,seed," << MetricsReport::csv_header() << "\n";
  for (const Cell& cell : cells) {
    cells_csv << cell.family << "," << cell.rules << "," << cell.seed << ","
              << cell.report.csv_row() << "\n";
  }
  const fs::path dir(opt.out_dir);
  write_file_atomic((dir / "cells.csv").string(), cells_csv.str());

  const auto metric_value = [](const MetricsReport& r, const std::string& name) {
    if (name == "fidelity_percent") return r.fidelity_percent;
    if (name == "mse") return r.mse;
    if (name == "mean_frad") return r.mean_frad;
    if (name == "fsc") return r.fsc;
    return r.asg;
  };
  const std::vector<std::string> metric_names = {"fidelity_percent", "mse", "mean_frad", "fsc",
                                                 "asg"};

  std::ostringstream aggregate;
  aggregate << "family,rules,n_seeds";
  for (const std::string& name : metric_names) {
    aggregate << "," << name << "_mean," << name << "_std";
  }
  aggregate << "\n";
  for (const std::string& family : opt.families) {
    for (Index rules : opt.rule_counts) {
      aggregate << family << "," << rules << "," << opt.seeds.size();
      for (const std::string& name : metric_names) {
        std::vector<double> values;
        for (const Cell& cell : cells) {
          if (cell.family == family && cell.rules == rules) {
            values.push_back(metric_value(cell.report, name));
          }
        }
        const double mean = sorted_sum(values) / static_cast<double>(values.size());
        aggregate << "," << format_double(mean) << ","
                  << format_double(population_std(values, mean));
      }
      aggregate << "\n";
    }
  }
  write_file_atomic((dir / "aggregate.csv").string(), aggregate.str());

  // Declared hypothesis pairs: for every rule count and metric, each ordered
  // family pair from the grid, paired by seed.
  std::ostringstream ttests;
  ttests << "rules,metric,family_a,family_b,t,p,df,status,detail\n";
  for (Index rules : opt.rule_counts) {
    for (const std::string& name : metric_names) {
      for (std::size_t a = 0; a < opt.families.size(); ++a) {
        for (std::size_t b = a + 1; b < opt.families.size(); ++b) {
          std::vector<double> va;
          std::vector<double> vb;
          for (const Cell& cell : cells) {
            if (cell.rules != rules) continue;
            if (cell.family == opt.families[a]) va.push_back(metric_value(cell.report, name));
            if (cell.family == opt.families[b]) vb.push_back(metric_value(cell.report, name));
          }
          ttests << rules << "," << name << "," << opt.families[a] << "," << opt.families[b]
                 << ",";
          try {
            const TTestResult test = paired_t_test(va, vb);
            ttests << format_double(test.t_statistic) << "," << format_double(test.p_value)
                   << "," << format_double(test.degrees_of_freedom) << ",ok,\n";
          } catch (const InvalidInputError& e) {
            std::string detail = e.what();
            std::replace(detail.begin(), detail.end(), ',', ';');
            ttests << ",,,degenerate," << detail << "\n";
          }
        }
      }
    }
  }
  write_file_atomic((dir / "ttests.csv").string(), ttests.str());

  ordered_json inputs;
  inputs["dataset"] = opt.dataset_path;
  ordered_json outputs;
  outputs["cells_csv"] = (dir / "cells.csv").string();
  outputs["aggregate_csv"] = (dir / "aggregate.csv").string();
  outputs["ttests_csv"] = (dir / "ttests.csv").string();
  ordered_json config_snapshot;
  config_snapshot["rule_counts"] = opt.rule_counts;
  config_snapshot["families"] = opt.families;
  config_snapshot["beta"] = opt.beta;
  config_snapshot["lambda"] = opt.lambda;
  config_snapshot["tau"] = opt.tau;
  write_manifest((dir / "manifest.json").string(), "sweep", opt.seeds, std::move(inputs),
                 std::move(outputs), std::move(config_snapshot));

  std::cout << aggregate.str();
}

void cmd_export_rules(const ExportRulesOptions& opt) {
  if (opt.model_path.empty()) throw InvalidInputError("export-rules: --model is required");
  if (opt.out_dir.empty()) throw InvalidInputError("export-rules: --out is required");

  const FcsModel model = load_model(opt.model_path);
  const LabelScheme scheme = opt.scheme_path.empty()
                                 ? default_scheme(model.d, model.feature_names)
                                 : load_scheme(opt.scheme_path);
  const RulebaseDocument doc = export_rulebase(model, scheme, opt.salience_threshold);

  ensure_directory(opt.out_dir);
  const fs::path dir(opt.out_dir);
  write_file_atomic((dir / "rules.txt").string(), doc.text);
  write_file_atomic((dir / "rules.json").string(), doc.doc.dump(2) + "\n");

  ordered_json inputs;
  inputs["model"] = opt.model_path;
  inputs["scheme"] = opt.scheme_path.empty() ? "builtin-default" : opt.scheme_path;
  ordered_json outputs;
  outputs["rules_txt"] = (dir / "rules.txt").string();
  outputs["rules_json"] = (dir / "rules.json").string();
  ordered_json config_snapshot;
  config_snapshot["salience_threshold"] = opt.salience_threshold;
  write_manifest((dir / "manifest.json").string(), "export-rules", {}, std::move(inputs),
                 std::move(outputs), std::move(config_snapshot));

  std::cout << doc.text;
}

}  // namespace fcs
