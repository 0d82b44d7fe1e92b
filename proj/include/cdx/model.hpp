#pragma once

#include <utility>

namespace cdx::model {

/// Equal-variance Gaussian pre/post-change model. The LLR of one observation is
/// log p_{v1}(x) / p_{v0}(x).
struct GaussianChangeSpec {
  double v0 = 0.0;     ///< pre-change mean
  double v1 = 1.0;     ///< reference post-change mean
  double sigma = 1.0;  ///< common standard deviation

  /// Throws std::invalid_argument when sigma <= 0 or v1 == v0.
  void validate() const;

  /// Slope of the affine LLR map, (v1 - v0) / sigma^2.
  double llr_slope() const { return (v1 - v0) / (sigma * sigma); }
  double llr_intercept() const { return (v0 * v0 - v1 * v1) / (2.0 * sigma * sigma); }

  /// Standard deviation of Z under any mean: |v1 - v0| / sigma.
  double llr_sd() const;
};

enum class Regime { VMinus, VZero, VPlus };

const char* to_string(Regime r);

inline constexpr double kRegimeTolerance = 1e-12;

double llr_transform(const GaussianChangeSpec& spec, double x);

/// E_v(Z_1) = I(P_v|P_v0) - I(P_v|P_v1).
double drift(const GaussianChangeSpec& spec, double v);

/// (I(P_v|P_v0), I(P_v|P_v1)).
std::pair<double, double> kl_pair(const GaussianChangeSpec& spec, double v);

Regime classify_regime(const GaussianChangeSpec& spec, double v);

// Moment generating functions of Z (and of the tilted variable
// Z~ = Z + |g'(mu)| (Z - mu) / a) under mean v. The log forms are total; the
// plain forms throw std::overflow_error when the result is not representable.
double log_mgf(const GaussianChangeSpec& spec, double v, double theta);
double log_mgf_derivative(const GaussianChangeSpec& spec, double v, double theta);
double mgf_h(const GaussianChangeSpec& spec, double v, double theta);

double log_mgf_tilde(const GaussianChangeSpec& spec, double v, double theta,
                     double gprime_at_mu, double a);
double log_mgf_tilde_derivative(const GaussianChangeSpec& spec, double v, double theta,
                                double gprime_at_mu, double a);
double mgf_h_tilde(const GaussianChangeSpec& spec, double v, double theta,
                   double gprime_at_mu, double a);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace cdx::model
