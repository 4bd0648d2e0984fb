#pragma once

#include "fcs/types.hpp"

#include <cmath>
#include <string>

namespace fcs {

enum class MfKind { Gaussian, Triangular };

// Membership family shared by all rules of a model. `beta` scales the
// half-width of the triangular support [c - beta*sigma, c + beta*sigma] and
// is ignored by the Gaussian family.
struct MembershipFamily {
  MfKind kind = MfKind::Triangular;
  double beta = 1.5;

  void validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw ValidationError("family.beta: must be a positive finite number");
    }
  }
};

inline MembershipFamily gaussian_family() { return {MfKind::Gaussian, 1.5}; }
inline MembershipFamily triangular_family(double beta = 1.5) { return {MfKind::Triangular, beta}; }

std::string to_string(MfKind kind);
MfKind mf_kind_from_string(const std::string& name);

// Degree of membership of scalar s in the fuzzy set centred at c with spread
// sigma. Gaussian: exp(-(s-c)^2 / (2 sigma^2)), positive everywhere.
// Triangular: linear ramps peaking at c, exactly zero outside
// [c - beta*sigma, c + beta*sigma].
inline double membership(const MembershipFamily& family, double s, double c, double sigma) {
  if (!std::isfinite(s) || !std::isfinite(c) || !std::isfinite(sigma)) {
    throw InvalidInputError("membership: non-finite input");
  }
  if (sigma < kSpreadFloor) {
    throw InvalidInputError("membership: sigma below spread floor");
  }
  if (family.kind == MfKind::Gaussian) {
    const double z = (s - c) / sigma;
    return std::exp(-0.5 * z * z);
  }
  const double half = family.beta * sigma;
  const double rising = (s - (c - half)) / half;
  const double falling = ((c + half) - s) / half;
  return std::max(0.0, std::min(rising, falling));
}

// Product of per-dimension memberships for one antecedent. A zero membership
// in any dimension zeroes the whole product.
inline double rule_firing(const MembershipFamily& family, const Vec& centroid, const Vec& spread,
                          const Vec& state) {
  if (state.size() != centroid.size() || spread.size() != centroid.size()) {
    throw InvalidInputError("rule_firing: dimension mismatch");
  }
  double alpha = 1.0;
  for (Index k = 0; k < state.size(); ++k) {
    alpha *= membership(family, state(k), centroid(k), spread(k));
    if (alpha == 0.0) break;
  }
  return alpha;
}

}  // namespace fcs
