#include "fcs/linguistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fcs/io.hpp"

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Consumes `token` if the input continues with it.
bool eat(const std::string& text, std::size_t& pos, const std::string& token) {
  if (text.compare(pos, token.size(), token) != 0) return false;
  pos += token.size();
  return true;
}

std::string take_until(const std::string& text, std::size_t& pos, const std::string& stop,
                       const std::string& what) {
  const std::size_t at = text.find(stop, pos);
  if (at == std::string::npos) {
    throw ParseError("rule text: expected \"" + stop + "\" after " + what);
  }
  std::string token = text.substr(pos, at - pos);
  pos = at + stop.size();
  if (token.empty()) throw ParseError("rule text: empty " + what);
  return token;
}

}  // namespace

void LabelScheme::validate() const {
  if (dimensions.empty()) throw ValidationError("scheme: must cover at least one dimension");
  for (std::size_t k = 0; k < dimensions.size(); ++k) {
    const DimensionScheme& dim = dimensions[k];
    const std::string where = "scheme: dimensions[" + std::to_string(k) + "]";
    if (dim.name.empty()) throw ValidationError(where + ": empty display name");
    if (dim.labels.size() != dim.breakpoints.size() + 1) {
      throw ValidationError(where + ": " + std::to_string(dim.labels.size()) + " labels need " +
                            std::to_string(dim.labels.size() - 1) + " breakpoints, got " +
                            std::to_string(dim.breakpoints.size()));
    }
    for (const std::string& label : dim.labels) {
      if (label.empty()) throw ValidationError(where + ": empty label");
    }
    for (std::size_t i = 0; i < dim.breakpoints.size(); ++i) {
      if (!std::isfinite(dim.breakpoints[i])) {
        throw ValidationError(where + ": non-finite breakpoint");
      }
      if (i > 0 && !(dim.breakpoints[i - 1] < dim.breakpoints[i])) {
        throw ValidationError(where + ": breakpoints must be strictly increasing");
      }
    }
  }
}

LabelScheme default_scheme(Index d, const std::vector<std::string>& feature_names) {
  if (d < 1) throw InvalidInputError("default_scheme: d must be >= 1");
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != d) {
    throw InvalidInputError("default_scheme: feature name count does not match d");
  }
  LabelScheme scheme;
  scheme.dimensions.resize(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    DimensionScheme& dim = scheme.dimensions[static_cast<std::size_t>(k)];
    dim.name = feature_names.empty() ? "s" + std::to_string(k)
                                     : feature_names[static_cast<std::size_t>(k)];
    dim.labels = {"NEG", "ZERO", "POS"};
    dim.breakpoints = {-0.3, 0.3};
  }
  scheme.validate();
  return scheme;
}

ordered_json scheme_to_json(const LabelScheme& scheme) {
  scheme.validate();
  ordered_json doc;
  doc["dimensions"] = ordered_json::array();
  for (const DimensionScheme& dim : scheme.dimensions) {
    ordered_json d;
    d["name"] = dim.name;
    d["labels"] = dim.labels;
    d["breakpoints"] = dim.breakpoints;
    doc["dimensions"].push_back(std::move(d));
  }
  if (!scheme.action_names.empty()) doc["action_names"] = scheme.action_names;
  return doc;
}

LabelScheme scheme_from_json(const json& doc) {
  LabelScheme scheme;
  try {
    for (const json& d : doc.at("dimensions")) {
      DimensionScheme dim;
      dim.name = d.at("name").get<std::string>();
      dim.labels = d.at("labels").get<std::vector<std::string>>();
      dim.breakpoints = d.at("breakpoints").get<std::vector<double>>();
      scheme.dimensions.push_back(std::move(dim));
    }
    if (doc.contains("action_names")) {
      scheme.action_names = doc.at("action_names").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scheme: ") + e.what());
  }
  scheme.validate();
  return scheme;
}

LabelScheme load_scheme(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return scheme_from_json(doc);
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_scheme(const LabelScheme& scheme, const std::string& path) {
  write_file_atomic(path, scheme_to_json(scheme).dump(2) + "\n");
}

std::string assign_label(const LabelScheme& scheme, Index dimension, double value) {
  if (dimension < 0 || dimension >= static_cast<Index>(scheme.dimensions.size())) {
    throw InvalidInputError("assign_label: dimension " + std::to_string(dimension) +
                            " out of range");
  }
  if (!std::isfinite(value)) throw InvalidInputError("assign_label: non-finite value");
  const DimensionScheme& dim = scheme.dimensions[static_cast<std::size_t>(dimension)];
  std::size_t cell = 0;
  while (cell < dim.breakpoints.size() && value >= dim.breakpoints[cell]) ++cell;
  return dim.labels[cell];
}

Vec model_dimension_stds(const FcsModel& model) {
  const Index n = model.n_rules();
  Vec stds(model.d);
  for (Index k = 0; k < model.d; ++k) {
    double mean_sq_spread = 0.0;
    double mean_centroid = 0.0;
    for (const FuzzyRule& rule : model.rules) {
      mean_sq_spread += rule.spread(k) * rule.spread(k);
      mean_centroid += rule.centroid(k);
    }
    mean_sq_spread /= static_cast<double>(n);
    mean_centroid /= static_cast<double>(n);
    double centroid_var = 0.0;
    for (const FuzzyRule& rule : model.rules) {
      const double dev = rule.centroid(k) - mean_centroid;
      centroid_var += dev * dev;
    }
    centroid_var /= static_cast<double>(n);
    stds(k) = std::sqrt(mean_sq_spread + centroid_var);
  }
  return stds;
}

namespace {

std::vector<bool> salient_dimensions(const FcsModel& model, Index rule_index,
                                     double salience_threshold, const Vec& stds) {
  const FuzzyRule& rule = model.rules[static_cast<std::size_t>(rule_index)];
  std::vector<bool> salient(static_cast<std::size_t>(model.d), false);
  bool any = false;
  for (Index k = 0; k < model.d; ++k) {
    if (rule.spread(k) < salience_threshold * stds(k)) {
      salient[static_cast<std::size_t>(k)] = true;
      any = true;
    }
  }
  if (!any) {
    // Keep the proportionally tightest clause so the antecedent is never empty.
    Index tightest = 0;
    double best_ratio = rule.spread(0) / stds(0);
    for (Index k = 1; k < model.d; ++k) {
      const double ratio = rule.spread(k) / stds(k);
      if (ratio < best_ratio) {
        best_ratio = ratio;
        tightest = k;
      }
    }
    salient[static_cast<std::size_t>(tightest)] = true;
  }
  return salient;
}

const std::vector<std::string>& display_action_names(const FcsModel& model,
                                                     const LabelScheme& scheme) {
  return scheme.action_names.empty() ? model.action_names : scheme.action_names;
}

void check_scheme_against_model(const FcsModel& model, const LabelScheme& scheme) {
  scheme.validate();
  if (static_cast<Index>(scheme.dimensions.size()) != model.d) {
    throw InvalidInputError("scheme covers " + std::to_string(scheme.dimensions.size()) +
                            " dimensions, model has " + std::to_string(model.d));
  }
  if (!scheme.action_names.empty() &&
      static_cast<Index>(scheme.action_names.size()) != model.m) {
    throw InvalidInputError("scheme names " + std::to_string(scheme.action_names.size()) +
                            " actions, model has " + std::to_string(model.m));
  }
}

}  // namespace

std::string render_rule(const FcsModel& model, Index rule_index, const LabelScheme& scheme,
                        double salience_threshold) {
  check_scheme_against_model(model, scheme);
  if (rule_index < 0 || rule_index >= model.n_rules()) {
    throw InvalidInputError("render_rule: rule index " + std::to_string(rule_index) +
                            " out of range");
  }
  if (!(salience_threshold > 0.0)) {
    throw InvalidInputError("render_rule: salience threshold must be > 0");
  }
  const FuzzyRule& rule = model.rules[static_cast<std::size_t>(rule_index)];
  const Vec stds = model_dimension_stds(model);
  const std::vector<bool> salient =
      salient_dimensions(model, rule_index, salience_threshold, stds);

  std::ostringstream out;
  out << "Rule " << (rule_index + 1) << ": IF ";
  bool first = true;
  for (Index k = 0; k < model.d; ++k) {
    if (!salient[static_cast<std::size_t>(k)]) continue;
    if (!first) out << " AND ";
    first = false;
    out << scheme.dimensions[static_cast<std::size_t>(k)].name << " is "
        << assign_label(scheme, k, rule.centroid(k)) << " (~" << fixed4(rule.centroid(k)) << ")";
  }
  out << " THEN Action is [";
  const std::vector<std::string>& action_names = display_action_names(model, scheme);
  for (Index j = 0; j < model.m; ++j) {
    if (j > 0) out << ", ";
    out << action_names[static_cast<std::size_t>(j)] << " = " << fixed4(rule.biases(j));
  }
  out << "]";
  if (rule.weights.cwiseAbs().maxCoeff() > kWeightPrintThreshold) out << " + linear terms";
  return out.str();
}

RulebaseDocument export_rulebase(const FcsModel& model, const LabelScheme& scheme,
                                 double salience_threshold) {
  check_scheme_against_model(model, scheme);
  const Vec stds = model_dimension_stds(model);

  RulebaseDocument result;
  std::ostringstream text;
  result.doc["version"] = 1;
  result.doc["n_rules"] = model.n_rules();
  result.doc["salience_threshold"] = salience_threshold;
  result.doc["rules"] = ordered_json::array();

  for (Index i = 0; i < model.n_rules(); ++i) {
    const FuzzyRule& rule = model.rules[static_cast<std::size_t>(i)];
    const std::string line = render_rule(model, i, scheme, salience_threshold);
    text << line << "\n";

    const std::vector<bool> salient = salient_dimensions(model, i, salience_threshold, stds);
    ordered_json entry;
    entry["index"] = i + 1;
    entry["text"] = line;
    entry["clauses"] = ordered_json::array();
    for (Index k = 0; k < model.d; ++k) {
      ordered_json clause;
      clause["dimension"] = k;
      clause["name"] = scheme.dimensions[static_cast<std::size_t>(k)].name;
      clause["label"] = assign_label(scheme, k, rule.centroid(k));
      clause["centroid"] = rule.centroid(k);
      clause["spread"] = rule.spread(k);
      clause["salient"] = static_cast<bool>(salient[static_cast<std::size_t>(k)]);
      entry["clauses"].push_back(std::move(clause));
    }
    entry["biases"] = std::vector<double>(rule.biases.begin(), rule.biases.end());
    entry["weights"] = ordered_json::array();
    for (Index j = 0; j < model.m; ++j) {
      entry["weights"].push_back(
          std::vector<double>(rule.weights.row(j).begin(), rule.weights.row(j).end()));
    }
    result.doc["rules"].push_back(std::move(entry));
  }
  result.text = text.str();
  return result;
}

ParsedRule parse_rendered_rule(const std::string& line) {
  ParsedRule rule;
  std::size_t pos = 0;
  if (!eat(line, pos, "Rule ")) throw ParseError("rule text: expected \"Rule N:\" prefix");
  rule.index =
      static_cast<Index>(parse_int(take_until(line, pos, ": IF ", "rule number"), "rule number"));
  if (rule.index < 1) throw ParseError("rule text: rule number must be >= 1");

  bool in_antecedent = true;
  while (in_antecedent) {
    ParsedClause clause;
    clause.name = take_until(line, pos, " is ", "dimension name");
    clause.label = take_until(line, pos, " (~", "label");
    clause.centroid = parse_double(take_until(line, pos, ")", "centroid"), "centroid");
    rule.clauses.push_back(std::move(clause));
    if (eat(line, pos, " AND ")) continue;
    if (eat(line, pos, " THEN Action is [")) {
      in_antecedent = false;
    } else {
      throw ParseError("rule text: expected \" AND \" or \" THEN Action is [\"");
    }
  }

  bool in_consequent = true;
  while (in_consequent) {
    std::string name = take_until(line, pos, " = ", "action name");
    const std::size_t comma = line.find(", ", pos);
    const std::size_t bracket = line.find("]", pos);
    if (bracket == std::string::npos) throw ParseError("rule text: unterminated consequent");
    std::size_t stop = bracket;
    if (comma != std::string::npos && comma < bracket) {
      stop = comma;
    } else {
      in_consequent = false;
    }
    const double value = parse_double(line.substr(pos, stop - pos), "action value");
    rule.consequents.emplace_back(std::move(name), value);
    pos = stop + (in_consequent ? 2 : 1);
  }
  if (eat(line, pos, " + linear terms")) rule.has_linear_terms = true;
  if (pos != line.size()) {
    throw ParseError("rule text: trailing characters after the consequent");
  }
  return rule;
}

std::vector<ParsedRule> parse_rulebase_text(const std::string& text) {
  std::vector<ParsedRule> rules;
  std::istringstream in(text);
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rules.push_back(parse_rendered_rule(line));
    } catch (const Error& e) {
      throw ParseError("rulebase:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (rules.empty()) throw ParseError("rulebase: no rules found");
  return rules;
}

}  // namespace fcs
