#include "cdx/limits.hpp"

#include <stdexcept>

namespace cdx::limits {

void ControlLimit::validate() const {
  if (u < 0.0) throw std::invalid_argument("control limit steepness u must be >= 0");
  if (r < 0.0) throw std::invalid_argument("control limit slack r must be >= 0");
  if (!(mu0 < 0.0)) throw std::invalid_argument("pre-change drift mu0 must be negative");
}

double ControlLimit::derivative(double x) const {
  switch (kind) {
    case LimitKind::Constant: return 0.0;
    case LimitKind::GUr: return -u;
    case LimitKind::GTilde: return x <= mu0 ? 0.0 : -u;
  }
  return 0.0;
}

double ControlLimit::zero_crossing() const {
  if (kind == LimitKind::Constant || !(u > 0.0)) {
    throw std::domain_error("control limit has no zero crossing");
  }
  const double anchor = kind == LimitKind::GUr ? mu0 - r : mu0;
  return anchor + 1.0 / u;
}

const char* to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Constant: return "const";
    case LimitKind::GUr: return "gur";
    case LimitKind::GTilde: return "gtilde";
  }
  return "?";
}

LimitKind parse_limit_kind(const std::string& name) {
  if (name == "const") return LimitKind::Constant;
  if (name == "gur") return LimitKind::GUr;
  if (name == "gtilde") return LimitKind::GTilde;
  throw std::invalid_argument("unknown control limit kind '" + name + "'");
}

}  // namespace cdx::limits
