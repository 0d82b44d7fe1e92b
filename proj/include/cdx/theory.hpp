#pragma once

#include <optional>

#include "cdx/limits.hpp"
#include "cdx/model.hpp"

namespace cdx::theory {

/// Positive root of the composite log-MGF H_v together with the rate
/// u = H_v'(theta*) that appears inside H_v itself.
struct ThetaSolution {
  double theta_star = 0.0;
  double rate = 0.0;  ///< u = H'(theta*), the fixed point
  double a = 1.0;     ///< window scale
  int iterations = 0;
  double residual = 0.0;   ///< |H(theta*)|
  bool window_ok = true;   ///< a <= g(mu) / u
};

/// Order-of-magnitude ARL bounds by drift regime. Only V+ carries a point value.
struct ArlApprox {
  model::Regime regime = model::Regime::VMinus;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> point;
};

/// H_v(theta) = w ln h~_v(theta) + (1 - w) ln h_v(theta) with w = a u / g(mu).
/// Throws std::domain_error when g(mu) <= 0.
double H_of_theta(const model::GaussianChangeSpec& spec, double v, const limits::ControlLimit& g,
                  double a, double rate, double theta);
double H_derivative(const model::GaussianChangeSpec& spec, double v,
                    const limits::ControlLimit& g, double a, double rate, double theta);

/// Fixed-point iteration on u around a bracketed root-find of H. Requires
/// drift(v) < 0. Throws std::domain_error outside V-, std::runtime_error when
/// the iteration does not settle in 200 rounds.
ThetaSolution solve_theta_star(const model::GaussianChangeSpec& spec, double v,
                               const limits::ControlLimit& g, double a);

/// Positive root of h_v(theta) = 1, i.e. -2 drift(v) / sd(Z)^2.
double theta_zero(const model::GaussianChangeSpec& spec, double v);

/// Theta(x) = theta(1/x) - x H(theta(1/x)) - 2 theta*, where theta(y) solves H'(theta) = y.
class ThetaCurve {
 public:
  ThetaCurve(const model::GaussianChangeSpec& spec, double v, const limits::ControlLimit& g,
             double a);

  const ThetaSolution& solution() const { return sol_; }
  double H(double theta) const;
  double H_prime(double theta) const;
  /// theta with H'(theta) = slope; slope must exceed drift(v).
  double theta_for_slope(double slope) const;
  double operator()(double x) const;
  /// Smallest x > 1/u with Theta(x) = 0, searched on (1/u, 1e6/u].
  double find_b() const;

 private:
  model::GaussianChangeSpec spec_;
  double v_;
  limits::ControlLimit g_;
  double a_;
  ThetaSolution sol_;
};

double theta_curve(const model::GaussianChangeSpec& spec, double v,
                   const limits::ControlLimit& g, double a, double x);
double find_b(const model::GaussianChangeSpec& spec, double v, const limits::ControlLimit& g,
              double a);

/// Regime-wise ARL orders with all (1 + o(1)) factors dropped: exponential
/// bounds in V-, the square-law sandwich in V0, the linear law in V+.
ArlApprox arl_approx(const model::GaussianChangeSpec& spec, double v, double c,
                     const limits::ControlLimit& g, double a);

/// c = c' theta*_{v0} g(mu0).
double translate_threshold(double c_prime, double theta_star_v0, double g_at_mu0);

struct ThresholdTranslation {
  double c = 0.0;
  double theta_star_v0 = 0.0;
  double g_at_mu0 = 0.0;
};
ThresholdTranslation threshold_translation(double c_prime, const model::GaussianChangeSpec& spec,
                                           const limits::ControlLimit& g, double a);

/// For drift(v) >= 0: true when theta*_{v0} > g(mu)/g(mu0), i.e. the
/// observation-adjusted test is expected to beat the matched CUSUM at v.
/// Empty for drift(v) < 0, where the criterion involves an undefined constant.
std::optional<bool> oal_beats_cusum(const model::GaussianChangeSpec& spec, double v,
                                    const limits::ControlLimit& g, double a);

}  // namespace cdx::theory
