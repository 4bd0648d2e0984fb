#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fcs/kmeans.hpp>
#include <fcs/rng.hpp>

#include <algorithm>
#include <limits>
#include <set>

using namespace fcs;

namespace {

Mat random_points(Rng& rng, Index n, Index d, double scale) {
  Mat points(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) points(i, k) = scale * rng.uniform(-1.0, 1.0);
  }
  return points;
}

}  // namespace

TEST_CASE("inertia history is non-increasing on random data") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 20 + static_cast<Index>(rng.below(80));
    const Index d = 1 + static_cast<Index>(rng.below(5));
    const Index k = 1 + static_cast<Index>(rng.below(std::min<Index>(n, 8)));
    const Mat points = random_points(rng, n, d, 3.0);
    const KMeansResult result = kmeans_fit(points, k, 1000 + trial);
    REQUIRE(result.inertia_history.size() >= 2);
    for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
      CHECK(result.inertia_history[i] <= result.inertia_history[i - 1] + 1e-9);
    }
    CHECK(result.inertia == result.inertia_history.back());
    CHECK(result.assignments.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("two well-separated blobs are recovered exactly") {
  Rng rng(7);
  const Index per_blob = 40;
  Mat points(2 * per_blob, 2);
  for (Index i = 0; i < per_blob; ++i) {
    points(i, 0) = -10.0 + rng.uniform(-0.5, 0.5);
    points(i, 1) = rng.uniform(-0.5, 0.5);
    points(per_blob + i, 0) = 10.0 + rng.uniform(-0.5, 0.5);
    points(per_blob + i, 1) = rng.uniform(-0.5, 0.5);
  }
  const KMeansResult result = kmeans_fit(points, 2, 42);
  // Every point in the same blob shares a label, and the two labels differ.
  const Index label_a = result.assignments[0];
  const Index label_b = result.assignments[static_cast<std::size_t>(per_blob)];
  CHECK(label_a != label_b);
  for (Index i = 0; i < per_blob; ++i) {
    CHECK(result.assignments[static_cast<std::size_t>(i)] == label_a);
    CHECK(result.assignments[static_cast<std::size_t>(per_blob + i)] == label_b);
  }
  // Centroids sit near the blob centres.
  Vec xs(2);
  xs << result.centroids(0, 0), result.centroids(1, 0);
  CHECK(xs.minCoeff() == doctest::Approx(-10.0).epsilon(0.1));
  CHECK(xs.maxCoeff() == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("k equal to n puts one centroid on every point") {
  Rng rng(31);
  const Mat points = random_points(rng, 6, 3, 2.0);
  const KMeansResult result = kmeans_fit(points, 6, 5);
  CHECK(result.inertia == doctest::Approx(0.0).epsilon(1e-12));
  std::set<Index> labels(result.assignments.begin(), result.assignments.end());
  CHECK(labels.size() == 6);
}

TEST_CASE("k of one returns the mean") {
  Rng rng(12);
  const Mat points = random_points(rng, 50, 2, 1.0);
  const KMeansResult result = kmeans_fit(points, 1, 9);
  const Vec mean = points.colwise().mean();
  CHECK((result.centroids.row(0).transpose() - mean).norm() < 1e-12);
}

TEST_CASE("duplicate-heavy data still yields k distinct centroids") {
  Mat points(10, 1);
  points << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0;
  const KMeansResult result = kmeans_fit(points, 3, 4);
  std::set<double> values;
  for (Index j = 0; j < 3; ++j) values.insert(result.centroids(j, 0));
  CHECK(values.size() == 3);
  CHECK(result.inertia == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fixed seed reproduces the run bit-identically") {
  Rng rng(55);
  const Mat points = random_points(rng, 120, 4, 2.0);
  const KMeansResult a = kmeans_fit(points, 8, 77);
  const KMeansResult b = kmeans_fit(points, 8, 77);
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia == b.inertia);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("assignments point to the nearest centroid") {
  Rng rng(91);
  const Mat points = random_points(rng, 60, 3, 2.0);
  const KMeansResult result = kmeans_fit(points, 5, 8);
  for (Index i = 0; i < points.rows(); ++i) {
    const Index assigned = result.assignments[static_cast<std::size_t>(i)];
    const double own =
        (points.row(i) - result.centroids.row(assigned)).squaredNorm();
    for (Index j = 0; j < 5; ++j) {
      const double other = (points.row(i) - result.centroids.row(j)).squaredNorm();
      CHECK(own <= other + 1e-12);
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  Mat points(3, 2);
  points.setZero();
  CHECK_THROWS_AS(kmeans_fit(points, 4, 1), InvalidInputError);
  CHECK_THROWS_AS(kmeans_fit(points, 0, 1), InvalidInputError);
  points(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(kmeans_fit(points, 2, 1), InvalidInputError);
}
