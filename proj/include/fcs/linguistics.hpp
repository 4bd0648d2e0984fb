#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fcs/model.hpp"
#include "fcs/types.hpp"

namespace fcs {

// k breakpoints carve the real line into k+1 half-open cells [b_i, b_{i+1});
// labels[i] names the i-th cell from the left.
struct DimensionScheme {
  std::string name;  // display name, e.g. "X" or "θ"
  std::vector<std::string> labels;
  std::vector<double> breakpoints;
};

struct LabelScheme {
  std::vector<DimensionScheme> dimensions;
  std::vector<std::string> action_names;  // display override; empty = model's

  void validate() const;
};

// NEG/ZERO/POS at -+0.3 for every dimension.
LabelScheme default_scheme(Index d, const std::vector<std::string>& feature_names = {});

nlohmann::ordered_json scheme_to_json(const LabelScheme& scheme);
LabelScheme scheme_from_json(const nlohmann::json& doc);
LabelScheme load_scheme(const std::string& path);
void save_scheme(const LabelScheme& scheme, const std::string& path);

std::string assign_label(const LabelScheme& scheme, Index dimension, double value);

constexpr double kDefaultSalienceThreshold = 1.25;
constexpr double kWeightPrintThreshold = 1e-4;

// One line: "Rule 3: IF X is NEG (~-0.7600) AND ... THEN Action is
// [Main = 0.4100, Side = -1.7400]" (+ " + linear terms" when weights matter).
// A clause is dropped when its spread >= threshold x the model-implied global
// std of that dimension; if that drops everything, the tightest clause stays.
std::string render_rule(const FcsModel& model, Index rule_index, const LabelScheme& scheme,
                        double salience_threshold = kDefaultSalienceThreshold);

// sqrt(mean spread^2 + population variance of centroids), per dimension.
Vec model_dimension_stds(const FcsModel& model);

struct RulebaseDocument {
  std::string text;            // one rendered line per rule
  nlohmann::ordered_json doc;  // same content, full precision
};

RulebaseDocument export_rulebase(const FcsModel& model, const LabelScheme& scheme,
                                 double salience_threshold = kDefaultSalienceThreshold);

struct ParsedClause {
  std::string name;
  std::string label;
  double centroid = 0.0;
};

struct ParsedRule {
  Index index = 0;  // 1-based, as printed
  std::vector<ParsedClause> clauses;
  std::vector<std::pair<std::string, double>> consequents;
  bool has_linear_terms = false;
};

ParsedRule parse_rendered_rule(const std::string& line);
std::vector<ParsedRule> parse_rulebase_text(const std::string& text);

}  // namespace fcs
