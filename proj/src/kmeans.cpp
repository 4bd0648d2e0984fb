#include "fcs/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace fcs {

namespace {

struct Assignment {
  std::vector<Index> labels;
  Vec distances_sq;  // to the assigned centroid
  double inertia = 0.0;
};

// Nearest centroid per point, scanning centroids in index order so ties
// break toward the lowest index.
Assignment assign_points(const Mat& states, const Mat& centroids) {
  const Index n = states.rows();
  const Index k = centroids.rows();
  Assignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.distances_sq = Vec::Constant(n, std::numeric_limits<double>::infinity());
  for (Index j = 0; j < k; ++j) {
    const Vec d2 = (states.rowwise() - centroids.row(j)).rowwise().squaredNorm();
    for (Index i = 0; i < n; ++i) {
      if (d2(i) < out.distances_sq(i)) {
        out.distances_sq(i) = d2(i);
        out.labels[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  out.inertia = out.distances_sq.sum();
  return out;
}

}  // namespace

Mat kmeanspp_seed(const Mat& states, Index n_clusters, Rng& rng) {
  const Index n = states.rows();
  if (n < n_clusters) throw InvalidInputError("kmeans: fewer points than clusters");
  if (n_clusters < 1) throw InvalidInputError("kmeans: n_clusters must be >= 1");
  if (!states.allFinite()) throw InvalidInputError("kmeans: non-finite state entry");

  Mat centroids(n_clusters, states.cols());
  std::vector<Index> chosen;
  const Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = states.row(first);
  chosen.push_back(first);

  Vec d2 = (states.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (Index j = 1; j < n_clusters; ++j) {
    const double total = d2.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;  // guard against rounding in the prefix walk
    } else {
      // All remaining distances are zero (duplicate-heavy data): take the
      // lowest-index point not already chosen.
      for (Index i = 0; i < n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    centroids.row(j) = states.row(pick);
    chosen.push_back(pick);
    const Vec nd2 = (states.rowwise() - centroids.row(j)).rowwise().squaredNorm();
    d2 = d2.cwiseMin(nd2);
  }
  return centroids;
}

KMeansResult lloyd(const Mat& states, Mat centroids, int max_iter, double tol) {
  const Index n = states.rows();
  const Index k = centroids.rows();
  if (n < k) throw InvalidInputError("kmeans: fewer points than clusters");
  if (max_iter < 1) throw InvalidInputError("kmeans: max_iter must be >= 1");

  KMeansResult result;
  Assignment current = assign_points(states, centroids);
  result.inertia_history.push_back(current.inertia);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Means of the current assignment.
    Mat next = Mat::Zero(k, states.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const Index j = current.labels[static_cast<std::size_t>(i)];
      next.row(j) += states.row(i);
      ++counts[static_cast<std::size_t>(j)];
    }
    std::vector<Index> empty;
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        next.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
      } else {
        empty.push_back(j);
      }
    }

    if (!empty.empty()) {
      // Re-seed each empty cluster to a distinct point, taking points in
      // decreasing distance to their assigned centroid (ties: lowest index).
      std::vector<Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), Index{0});
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (current.distances_sq(a) != current.distances_sq(b)) {
          return current.distances_sq(a) > current.distances_sq(b);
        }
        return a < b;
      });
      std::size_t next_point = 0;
      for (Index j : empty) {
        if (next_point < order.size()) {
          next.row(j) = states.row(order[next_point]);
          ++next_point;
        }
      }
    }

    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(next);
    current = assign_points(states, centroids);
    result.inertia_history.push_back(current.inertia);
    result.iterations = iter + 1;
    if (shift < tol) break;
  }

  result.centroids = std::move(centroids);
  result.assignments = std::move(current.labels);
  result.inertia = current.inertia;
  return result;
}

KMeansResult kmeans_fit(const Mat& states, Index n_clusters, std::uint64_t seed, int max_iter,
                        double tol) {
  Rng rng(seed);
  Mat centroids = kmeanspp_seed(states, n_clusters, rng);
  return lloyd(states, std::move(centroids), max_iter, tol);
}

}  // namespace fcs
