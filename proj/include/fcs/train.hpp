#pragma once

#include "fcs/dataset.hpp"
#include "fcs/kmeans.hpp"
#include "fcs/model.hpp"

#include <cstdint>
#include <vector>

namespace fcs {

struct TrainConfig {
  Index n_rules = 16;
  MembershipFamily family = triangular_family();
  double lambda = 0.1;
  std::uint64_t seed = 42;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  double train_fraction = 0.8;

  void validate() const;
};

// Per-cluster per-dimension population standard deviation about the member
// mean, floored at kSpreadFloor. Singleton and empty clusters get the floor
// in every dimension. centroids fixes the cluster count.
Mat estimate_spreads(const Mat& states, const std::vector<Index>& assignments,
                     const Mat& centroids);

struct Consequents {
  std::vector<Mat> weights;       // per rule, m x d
  std::vector<Vec> biases;        // per rule, length m
  std::vector<bool> low_support;  // activation mass at or below epsilon
};

// Per-rule weighted ridge fit of the linear consequents. Samples are
// weighted by the rule's firing strength; the bias is not regularised.
// Rules with no activation mass get zero weights and the mean action.
Consequents fit_consequents(const Dataset& data, const Mat& centroids, const Mat& spreads,
                            const MembershipFamily& family, double lambda);

struct TrainReport {
  std::vector<Index> train_indices;  // ascending
  std::vector<Index> val_indices;    // ascending
  double kmeans_inertia = 0.0;
  int kmeans_iterations = 0;
  std::vector<Index> low_support_rules;
};

struct DistillResult {
  FcsModel model;
  TrainReport report;
};

// Full pipeline: seeded train/validation split, k-means on the training
// states, spread estimation, consequent fitting. Deterministic for a fixed
// (dataset, config).
DistillResult distill(const Dataset& data, const TrainConfig& config);

}  // namespace fcs
