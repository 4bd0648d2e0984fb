#include "fcs/model_io.hpp"

#include "fcs/io.hpp"

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json expect(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(path.empty() ? key + ": missing field" : path + "." + key + ": missing field");
  }
  return doc.at(key);
}

Vec vec_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw ParseError(path + ": expected array");
  Vec v(static_cast<Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const json& e = arr[k];
    if (!e.is_number()) throw ParseError(path + "[" + std::to_string(k) + "]: expected number");
    v(static_cast<Index>(k)) = e.get<double>();
  }
  return v;
}

ordered_json vec_to_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

}  // namespace

ordered_json model_to_json(const FcsModel& model) {
  ordered_json doc;
  doc["version"] = kModelFormatVersion;
  doc["family"] = to_string(model.family.kind);
  doc["beta"] = model.family.beta;
  doc["lambda"] = model.lambda;
  doc["d"] = model.d;
  doc["m"] = model.m;
  doc["feature_names"] = model.feature_names.empty() ? default_feature_names(model.d)
                                                     : model.feature_names;
  doc["action_names"] = model.action_names.empty() ? default_action_names(model.m)
                                                   : model.action_names;
  ordered_json rules = ordered_json::array();
  for (const FuzzyRule& r : model.rules) {
    ordered_json jr;
    jr["centroid"] = vec_to_json(r.centroid);
    jr["spread"] = vec_to_json(r.spread);
    ordered_json weights = ordered_json::array();
    for (Index j = 0; j < r.weights.rows(); ++j) {
      weights.push_back(vec_to_json(r.weights.row(j).transpose()));
    }
    jr["weights"] = weights;
    jr["biases"] = vec_to_json(r.biases);
    rules.push_back(jr);
  }
  doc["rules"] = rules;
  return doc;
}

FcsModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("model: expected JSON object");
  const json version = expect(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw ParseError("version: unsupported model format version");
  }

  FcsModel model;
  const json family = expect(doc, "family", "");
  if (!family.is_string()) throw ParseError("family: expected string");
  model.family.kind = mf_kind_from_string(family.get<std::string>());
  const json beta = expect(doc, "beta", "");
  if (!beta.is_number()) throw ParseError("beta: expected number");
  model.family.beta = beta.get<double>();
  const json lambda = expect(doc, "lambda", "");
  if (!lambda.is_number()) throw ParseError("lambda: expected number");
  model.lambda = lambda.get<double>();
  const json d = expect(doc, "d", "");
  const json m = expect(doc, "m", "");
  if (!d.is_number_integer() || !m.is_number_integer()) {
    throw ParseError("d/m: expected integers");
  }
  model.d = d.get<Index>();
  model.m = m.get<Index>();

  const json feature_names = expect(doc, "feature_names", "");
  const json action_names = expect(doc, "action_names", "");
  if (!feature_names.is_array() || !action_names.is_array()) {
    throw ParseError("feature_names/action_names: expected arrays of strings");
  }
  for (const auto& e : feature_names) {
    if (!e.is_string()) throw ParseError("feature_names: expected strings");
    model.feature_names.push_back(e.get<std::string>());
  }
  for (const auto& e : action_names) {
    if (!e.is_string()) throw ParseError("action_names: expected strings");
    model.action_names.push_back(e.get<std::string>());
  }

  const json rules = expect(doc, "rules", "");
  if (!rules.is_array()) throw ParseError("rules: expected array");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string at = "rules[" + std::to_string(i) + "]";
    const json& jr = rules[i];
    FuzzyRule rule;
    rule.centroid = vec_from_json(expect(jr, "centroid", at), at + ".centroid");
    rule.spread = vec_from_json(expect(jr, "spread", at), at + ".spread");
    const json weights = expect(jr, "weights", at);
    if (!weights.is_array()) throw ParseError(at + ".weights: expected array");
    rule.weights.resize(static_cast<Index>(weights.size()), model.d);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const Vec row = vec_from_json(weights[j], at + ".weights[" + std::to_string(j) + "]");
      if (row.size() != model.d) {
        throw ParseError(at + ".weights[" + std::to_string(j) + "]: length must equal d");
      }
      rule.weights.row(static_cast<Index>(j)) = row.transpose();
    }
    rule.biases = vec_from_json(expect(jr, "biases", at), at + ".biases");
    model.rules.push_back(std::move(rule));
  }

  model.validate();
  return model;
}

std::string serialize_model(const FcsModel& model) {
  return model_to_json(model).dump(2) + "\n";
}

FcsModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

FcsModel load_model(const std::string& path) {
  try {
    return deserialize_model(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_model(const FcsModel& model, const std::string& path) {
  write_file_atomic(path, serialize_model(model));
}

}  // namespace fcs
