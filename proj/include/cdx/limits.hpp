#pragma once

#include <string>

namespace cdx::limits {

enum class LimitKind { Constant, GUr, GTilde };

/// Decreasing control-limit shape g(.) used by the observation-adjusted CUSUM.
///
///   Constant:  g(x) = 1
///   GUr:       g(x) = 1 - u (x - (mu0 - r))
///   GTilde:    g(x) = min(1, 1 - u (x - mu0))
///
/// At u = 0 every kind is identically 1. As u grows, GUr tends to an
/// immediate alarm once the LLR mean reaches mu0 - r and to a never-alarm
/// below it; GTilde keeps the constant limit below mu0 and alarms
/// immediately above it.
struct ControlLimit {
  LimitKind kind = LimitKind::Constant;
  double u = 0.0;
  double r = 0.0;
  double mu0 = -0.5;

  static ControlLimit constant() { return {}; }
  static ControlLimit g_ur(double u, double r, double mu0) {
    return {LimitKind::GUr, u, r, mu0};
  }
  static ControlLimit g_tilde(double u, double mu0) {
    return {LimitKind::GTilde, u, 0.0, mu0};
  }

  /// Throws std::invalid_argument on negative u or r, or mu0 >= 0.
  void validate() const;

  double eval(double x) const {
    switch (kind) {
      case LimitKind::Constant: return 1.0;
      case LimitKind::GUr: return 1.0 - u * (x - (mu0 - r));
      case LimitKind::GTilde: return x <= mu0 ? 1.0 : 1.0 - u * (x - mu0);
    }
    return 1.0;
  }

  /// First derivative; GTilde uses the left derivative (0) at the kink x = mu0.
  double derivative(double x) const;

  /// Point where g crosses zero (requires u > 0 and a non-constant kind).
  double zero_crossing() const;
};

const char* to_string(LimitKind kind);
LimitKind parse_limit_kind(const std::string& name);

}  // namespace cdx::limits
