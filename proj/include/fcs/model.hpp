#pragma once

#include "fcs/membership.hpp"
#include "fcs/types.hpp"

#include <string>
#include <vector>

namespace fcs {

// One TSK rule: fuzzy antecedent (centroid and per-dimension spread) plus a
// linear consequent per action dimension.
struct FuzzyRule {
  Vec centroid;  // length d
  Vec spread;    // length d, every entry >= kSpreadFloor
  Mat weights;   // m x d; row j is the weight vector of action dimension j
  Vec biases;    // length m
};

// Behaviour when total activation is zero (possible for triangular
// memberships outside every support).
enum class FallbackPolicy { NearestCentroid };

// Immutable trained rule set. Inference is a pure read; a model can be
// shared across threads without synchronisation.
struct FcsModel {
  std::vector<FuzzyRule> rules;
  MembershipFamily family;
  Index d = 0;
  Index m = 0;
  double lambda = 0.0;
  std::vector<std::string> feature_names;
  std::vector<std::string> action_names;
  FallbackPolicy fallback = FallbackPolicy::NearestCentroid;

  Index n_rules() const { return static_cast<Index>(rules.size()); }

  // Throws ValidationError naming the offending field, e.g.
  // "rules[2].spread[5]: below spread floor".
  void validate() const;
};

struct InferResult {
  Vec action;       // length m
  Vec activations;  // raw firing strengths, length N
  bool used_fallback = false;  // total activation was at or below epsilon
  Index fallback_rule = -1;    // rule whose consequent was used, if fallback
};

// Product over dimensions of the rule's per-dimension memberships.
double firing_strength(const FcsModel& model, Index rule_index, const Vec& state);

// weights * state + biases.
Vec local_consequent(const FuzzyRule& rule, const Vec& state);

// Activation-weighted average of the local consequents. When total
// activation is at or below kActivationEpsilon, returns the consequent of the
// nearest-centroid rule (ties break toward the lowest rule index).
InferResult infer(const FcsModel& model, const Vec& state);

// Index of the rule whose centroid is closest to state in Euclidean
// distance; ties break toward the lowest index.
Index nearest_centroid_rule(const FcsModel& model, const Vec& state);

std::vector<std::string> default_feature_names(Index d);
std::vector<std::string> default_action_names(Index m);

}  // namespace fcs
