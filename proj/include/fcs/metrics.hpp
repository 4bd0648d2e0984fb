#pragma once

#include "fcs/dataset.hpp"
#include "fcs/model.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace fcs {

struct MetricsReport {
  double fidelity_percent = 0.0;
  double mse = 0.0;
  double mean_frad = 1.0;
  double fsc = 0.0;
  double asg = 0.0;
  Index n_samples = 0;
  double tau = 0.1;
  Index zero_activation_count = 0;

  nlohmann::ordered_json to_json() const;
  static MetricsReport from_json(const nlohmann::json& doc);
  static std::string csv_header();
  std::string csv_row() const;
};

// Sum of squared normalised activations; in [1/N, 1] for any non-zero
// activation vector. All-zero input returns the 1.0 sentinel.
double frad(const Vec& activations);

// Mean FRAD over states whose total activation exceeds epsilon;
// zero-activation states are excluded (counted in evaluate()). Returns the
// 1.0 sentinel when every state falls back.
double mean_frad(const FcsModel& model, const Mat& states);

// Mean over states of the per-dimension maximum membership across rules.
double fsc(const FcsModel& model, const Mat& states);

// Population variance of rule biases per action dimension, averaged across
// action dimensions.
double asg(const FcsModel& model);

using Predictor = std::function<Vec(const Vec&)>;

// Percentage of samples whose prediction is within tau of the logged action
// in the infinity norm.
double fidelity(const Predictor& predict, const Dataset& data, double tau);
double fidelity(const FcsModel& model, const Dataset& data, double tau);

// Mean squared error over samples and action dimensions.
double mse(const Predictor& predict, const Dataset& data);
double mse(const FcsModel& model, const Dataset& data);

MetricsReport evaluate(const FcsModel& model, const Dataset& data, double tau);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double degrees_of_freedom = 0.0;
};

// Two-sided paired t-test on the element-wise differences a - b.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided tail probability of Student's t distribution.
double student_t_two_sided_p(double t, double degrees_of_freedom);

}  // namespace fcs
