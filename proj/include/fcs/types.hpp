#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr const char* kToolVersion = "0.1.0";

// Floor applied to per-dimension spreads so clusters that are degenerate in a
// dimension (constant features) never divide by zero in the membership
// formulas.
inline constexpr double kSpreadFloor = 1e-6;

// Total activation at or below this counts as zero and triggers the
// nearest-centroid fallback during inference.
inline constexpr double kActivationEpsilon = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments to a library call: dimension mismatch, non-finite input.
struct InvalidInputError : Error {
  using Error::Error;
};

// Data or document content violates an invariant or schema.
struct ValidationError : Error {
  using Error::Error;
};

// Unparseable content; the message carries the field path or line number.
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

// Singular system or other numerical failure.
struct NumericalError : Error {
  using Error::Error;
};

// Accumulates in value-sorted order, so the result is invariant under any
// permutation of the terms. Used wherever a sum must not depend on rule
// storage order.
inline double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

inline double sorted_sum(const Vec& terms) {
  return sorted_sum(std::vector<double>(terms.begin(), terms.end()));
}

}  // namespace fcs
