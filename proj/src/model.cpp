#include "fcs/model.hpp"

#include <cmath>
#include <limits>

namespace fcs {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

void FcsModel::validate() const {
  family.validate();
  if (rules.empty()) throw ValidationError("rules: model must contain at least one rule");
  if (d < 1) throw ValidationError("d: must be >= 1");
  if (m < 1) throw ValidationError("m: must be >= 1");
  if (!std::isfinite(lambda) || lambda < 0.0) throw ValidationError("lambda: must be finite and >= 0");
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != d) {
    throw ValidationError("feature_names: length must equal d");
  }
  if (!action_names.empty() && static_cast<Index>(action_names.size()) != m) {
    throw ValidationError("action_names: length must equal m");
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const FuzzyRule& r = rules[i];
    const std::string at = "rules[" + std::to_string(i) + "]";
    if (r.centroid.size() != d) throw ValidationError(at + ".centroid: length must equal d");
    if (r.spread.size() != d) throw ValidationError(at + ".spread: length must equal d");
    if (r.weights.rows() != m || r.weights.cols() != d) {
      throw ValidationError(at + ".weights: shape must be m x d");
    }
    if (r.biases.size() != m) throw ValidationError(at + ".biases: length must equal m");
    if (!all_finite(r.centroid)) throw ValidationError(at + ".centroid: non-finite entry");
    if (!r.weights.allFinite()) throw ValidationError(at + ".weights: non-finite entry");
    if (!all_finite(r.biases)) throw ValidationError(at + ".biases: non-finite entry");
    for (Index k = 0; k < d; ++k) {
      if (!std::isfinite(r.spread(k)) || r.spread(k) < kSpreadFloor) {
        throw ValidationError(at + ".spread[" + std::to_string(k) + "]: below spread floor");
      }
    }
  }
}

double firing_strength(const FcsModel& model, Index rule_index, const Vec& state) {
  if (rule_index < 0 || rule_index >= model.n_rules()) {
    throw InvalidInputError("firing_strength: rule index out of range");
  }
  if (state.size() != model.d) {
    throw InvalidInputError("firing_strength: state dimension mismatch");
  }
  const FuzzyRule& r = model.rules[static_cast<std::size_t>(rule_index)];
  return rule_firing(model.family, r.centroid, r.spread, state);
}

Vec local_consequent(const FuzzyRule& rule, const Vec& state) {
  if (state.size() != rule.weights.cols()) {
    throw InvalidInputError("local_consequent: state dimension mismatch");
  }
  return rule.weights * state + rule.biases;
}

Index nearest_centroid_rule(const FcsModel& model, const Vec& state) {
  Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < model.n_rules(); ++i) {
    const double d2 = (state - model.rules[static_cast<std::size_t>(i)].centroid).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

InferResult infer(const FcsModel& model, const Vec& state) {
  if (state.size() != model.d) throw InvalidInputError("infer: state dimension mismatch");
  const Index n = model.n_rules();

  InferResult out;
  out.activations.resize(n);
  for (Index i = 0; i < n; ++i) {
    out.activations(i) = firing_strength(model, i, state);
  }

  const double total = sorted_sum(out.activations);
  if (total <= kActivationEpsilon) {
    out.used_fallback = true;
    out.fallback_rule = nearest_centroid_rule(model, state);
    out.action = local_consequent(model.rules[static_cast<std::size_t>(out.fallback_rule)], state);
    return out;
  }

  // Normalise first, then accumulate in value-sorted order: the output is
  // bit-identical under rule permutation, and a single-rule model returns
  // its consequent exactly (alpha/alpha == 1).
  std::vector<double> terms(static_cast<std::size_t>(n));
  out.action.resize(model.m);
  std::vector<Vec> consequents(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    consequents[static_cast<std::size_t>(i)] =
        local_consequent(model.rules[static_cast<std::size_t>(i)], state);
  }
  for (Index j = 0; j < model.m; ++j) {
    for (Index i = 0; i < n; ++i) {
      terms[static_cast<std::size_t>(i)] =
          (out.activations(i) / total) * consequents[static_cast<std::size_t>(i)](j);
    }
    out.action(j) = sorted_sum(terms);
  }
  return out;
}

std::vector<std::string> default_feature_names(Index d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) names.push_back("s" + std::to_string(k));
  return names;
}

std::vector<std::string> default_action_names(Index m) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) names.push_back("a" + std::to_string(j));
  return names;
}

}  // namespace fcs
