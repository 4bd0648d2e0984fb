#include "fcs/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fcs {

void TrainConfig::validate() const {
  if (n_rules < 1) throw InvalidInputError("config.n_rules: must be >= 1");
  family.validate();
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidInputError("config.lambda: must be finite and >= 0");
  }
  if (kmeans_max_iter < 1) throw InvalidInputError("config.kmeans_max_iter: must be >= 1");
  if (!(kmeans_tol >= 0.0)) throw InvalidInputError("config.kmeans_tol: must be >= 0");
  if (!(train_fraction > 0.0) || train_fraction > 1.0) {
    throw InvalidInputError("config.train_fraction: must be in (0, 1]");
  }
}

Mat estimate_spreads(const Mat& states, const std::vector<Index>& assignments,
                     const Mat& centroids) {
  const Index n = states.rows();
  const Index d = states.cols();
  const Index k = centroids.rows();
  if (static_cast<Index>(assignments.size()) != n) {
    throw InvalidInputError("estimate_spreads: assignment count mismatch");
  }

  Mat sums = Mat::Zero(k, d);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    const Index j = assignments[static_cast<std::size_t>(i)];
    if (j < 0 || j >= k) throw InvalidInputError("estimate_spreads: assignment out of range");
    sums.row(j) += states.row(i);
    ++counts[static_cast<std::size_t>(j)];
  }

  Mat means = Mat::Zero(k, d);
  for (Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) {
      means.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
  }

  Mat sq = Mat::Zero(k, d);
  for (Index i = 0; i < n; ++i) {
    const Index j = assignments[static_cast<std::size_t>(i)];
    sq.row(j) += (states.row(i) - means.row(j)).array().square().matrix();
  }

  Mat spreads(k, d);
  for (Index j = 0; j < k; ++j) {
    const Index c = counts[static_cast<std::size_t>(j)];
    for (Index col = 0; col < d; ++col) {
      const double sigma = c > 1 ? std::sqrt(sq(j, col) / static_cast<double>(c)) : 0.0;
      spreads(j, col) = std::max(sigma, kSpreadFloor);
    }
  }
  return spreads;
}

Consequents fit_consequents(const Dataset& data, const Mat& centroids, const Mat& spreads,
                            const MembershipFamily& family, double lambda) {
  data.validate();
  family.validate();
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidInputError("fit_consequents: lambda must be finite and >= 0");
  }
  const Index n = data.size();
  const Index d = data.state_dim();
  const Index m = data.action_dim();
  const Index k = centroids.rows();
  if (spreads.rows() != k || spreads.cols() != d || centroids.cols() != d) {
    throw InvalidInputError("fit_consequents: centroid/spread shape mismatch");
  }

  Consequents out;
  out.weights.resize(static_cast<std::size_t>(k));
  out.biases.resize(static_cast<std::size_t>(k));
  out.low_support.assign(static_cast<std::size_t>(k), false);

  for (Index rule = 0; rule < k; ++rule) {
    const Vec centroid = centroids.row(rule).transpose();
    const Vec spread = spreads.row(rule).transpose();
    Vec alpha(n);
    for (Index i = 0; i < n; ++i) {
      alpha(i) = rule_firing(family, centroid, spread, data.states.row(i).transpose());
    }
    const double mass = sorted_sum(alpha);

    Mat& weights = out.weights[static_cast<std::size_t>(rule)];
    Vec& biases = out.biases[static_cast<std::size_t>(rule)];

    if (mass <= kActivationEpsilon) {
      out.low_support[static_cast<std::size_t>(rule)] = true;
      weights = Mat::Zero(m, d);
      if (mass > 0.0) {
        biases = (data.actions.transpose() * alpha) / mass;
      } else {
        biases = data.actions.colwise().mean().transpose();
      }
      continue;
    }

    // Weighted normal equations over the augmented regressor (s, 1); the
    // last coordinate is the bias and carries no ridge penalty.
    Mat lower = Mat::Zero(d + 1, d + 1);
    Mat rhs = Mat::Zero(d + 1, m);
    Vec u(d + 1);
    for (Index i = 0; i < n; ++i) {
      u.head(d) = data.states.row(i).transpose();
      u(d) = 1.0;
      lower.selfadjointView<Eigen::Lower>().rankUpdate(u, alpha(i));
      rhs += (alpha(i) * u) * data.actions.row(i);
    }
    Mat normal = lower.selfadjointView<Eigen::Lower>();
    normal.topLeftCorner(d, d).diagonal().array() += lambda;

    const Eigen::LDLT<Mat> ldlt(normal);
    bool singular = ldlt.info() != Eigen::Success;
    if (!singular && lambda == 0.0) {
      // rcond() is blind to zeroed pivots, so inspect the D diagonal directly.
      const Vec pivots = ldlt.vectorD();
      const double largest = pivots.cwiseAbs().maxCoeff();
      singular = !(largest > 0.0) || pivots.minCoeff() < largest * 1e-13;
    }
    if (singular) {
      throw NumericalError("fit_consequents: rule " + std::to_string(rule) +
                           ": singular normal equations (lambda = 0)");
    }
    const Mat solution = ldlt.solve(rhs);  // (d+1) x m
    if (!solution.allFinite()) {
      throw NumericalError("fit_consequents: rule " + std::to_string(rule) +
                           ": non-finite ridge solution");
    }
    weights = solution.topRows(d).transpose();  // m x d
    biases = solution.row(d).transpose();
  }
  return out;
}

DistillResult distill(const Dataset& data, const TrainConfig& config) {
  data.validate();
  config.validate();

  const Index n = data.size();
  Index n_train = static_cast<Index>(std::floor(config.train_fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n);
  if (n_train < config.n_rules) {
    throw InvalidInputError("distill: training subset (" + std::to_string(n_train) +
                            " samples) smaller than rule count (" +
                            std::to_string(config.n_rules) + ")");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(config.seed);
  rng.shuffle(order);

  TrainReport report;
  report.train_indices.assign(order.begin(), order.begin() + n_train);
  report.val_indices.assign(order.begin() + n_train, order.end());
  std::sort(report.train_indices.begin(), report.train_indices.end());
  std::sort(report.val_indices.begin(), report.val_indices.end());

  const Dataset train = subset(data, report.train_indices);

  const KMeansResult km = kmeans_fit(train.states, config.n_rules, config.seed,
                                     config.kmeans_max_iter, config.kmeans_tol);
  report.kmeans_inertia = km.inertia;
  report.kmeans_iterations = km.iterations;

  const Mat spreads = estimate_spreads(train.states, km.assignments, km.centroids);
  const Consequents fit = fit_consequents(train, km.centroids, spreads, config.family,
                                          config.lambda);

  FcsModel model;
  model.family = config.family;
  model.d = data.state_dim();
  model.m = data.action_dim();
  model.lambda = config.lambda;
  model.feature_names =
      data.feature_names.empty() ? default_feature_names(model.d) : data.feature_names;
  model.action_names =
      data.action_names.empty() ? default_action_names(model.m) : data.action_names;
  for (Index i = 0; i < config.n_rules; ++i) {
    FuzzyRule rule;
    rule.centroid = km.centroids.row(i).transpose();
    rule.spread = spreads.row(i).transpose();
    rule.weights = fit.weights[static_cast<std::size_t>(i)];
    rule.biases = fit.biases[static_cast<std::size_t>(i)];
    model.rules.push_back(std::move(rule));
    if (fit.low_support[static_cast<std::size_t>(i)]) {
      report.low_support_rules.push_back(i);
    }
  }
  model.validate();
  return {std::move(model), std::move(report)};
}

}  // namespace fcs
