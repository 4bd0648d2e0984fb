#pragma once

#include "fcs/rng.hpp"
#include "fcs/types.hpp"

#include <cstdint>
#include <vector>

namespace fcs {

struct KMeansResult {
  Mat centroids;                   // k x d
  std::vector<Index> assignments;  // size n, consistent with centroids
  double inertia = 0.0;            // sum of squared distances to assigned centroids
  std::vector<double> inertia_history;  // one entry per assignment pass, non-increasing
  int iterations = 0;              // Lloyd update steps performed
};

// k-means++ seeding: first centre uniform, each next centre drawn with
// probability proportional to squared distance from the chosen set.
Mat kmeanspp_seed(const Mat& states, Index n_clusters, Rng& rng);

// Lloyd iterations from the given centroids. Terminates when the maximum
// centroid shift drops below tol or after max_iter updates. Empty clusters
// are re-seeded to the point farthest from its assigned centroid.
KMeansResult lloyd(const Mat& states, Mat centroids, int max_iter, double tol);

KMeansResult kmeans_fit(const Mat& states, Index n_clusters, std::uint64_t seed,
                        int max_iter = 300, double tol = 1e-6);

}  // namespace fcs
