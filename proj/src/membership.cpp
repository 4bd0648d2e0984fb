#include "fcs/membership.hpp"

namespace fcs {

std::string to_string(MfKind kind) {
  return kind == MfKind::Gaussian ? "gaussian" : "triangular";
}

MfKind mf_kind_from_string(const std::string& name) {
  if (name == "gaussian") return MfKind::Gaussian;
  if (name == "triangular") return MfKind::Triangular;
  throw ParseError("family: expected \"gaussian\" or \"triangular\", got \"" + name + "\"");
}

}  // namespace fcs
