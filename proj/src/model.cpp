#include "cdx/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdx::model {

namespace {

double checked_exp(double log_value) {
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    throw std::overflow_error("moment generating function overflows double");
  }
  return std::exp(log_value);
}

// Scale factor of Z~ relative to Z around its mean.
double tilt_scale(double gprime_at_mu, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("window scale a must be positive");
  return 1.0 + std::abs(gprime_at_mu) / a;
}

}  // namespace

void GaussianChangeSpec::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (v1 == v0) throw std::invalid_argument("v1 must differ from v0");
}

double GaussianChangeSpec::llr_sd() const { return std::abs(v1 - v0) / sigma; }

const char* to_string(Regime r) {
  switch (r) {
    case Regime::VMinus: return "V-";
    case Regime::VZero: return "V0";
    case Regime::VPlus: return "V+";
  }
  return "?";
}

double llr_transform(const GaussianChangeSpec& spec, double x) {
  return spec.llr_slope() * x + spec.llr_intercept();
}

double drift(const GaussianChangeSpec& spec, double v) { return llr_transform(spec, v); }

std::pair<double, double> kl_pair(const GaussianChangeSpec& spec, double v) {
  const double two_var = 2.0 * spec.sigma * spec.sigma;
  return {(v - spec.v0) * (v - spec.v0) / two_var, (v - spec.v1) * (v - spec.v1) / two_var};
}

Regime classify_regime(const GaussianChangeSpec& spec, double v) {
  const double mu = drift(spec, v);
  if (std::abs(mu) <= kRegimeTolerance) return Regime::VZero;
  return mu < 0.0 ? Regime::VMinus : Regime::VPlus;
}

double log_mgf(const GaussianChangeSpec& spec, double v, double theta) {
  const double s = spec.llr_sd();
  return theta * drift(spec, v) + 0.5 * theta * theta * s * s;
}

double log_mgf_derivative(const GaussianChangeSpec& spec, double v, double theta) {
  const double s = spec.llr_sd();
  return drift(spec, v) + theta * s * s;
}

double mgf_h(const GaussianChangeSpec& spec, double v, double theta) {
  return checked_exp(log_mgf(spec, v, theta));
}

double log_mgf_tilde(const GaussianChangeSpec& spec, double v, double theta,
                     double gprime_at_mu, double a) {
  const double s = spec.llr_sd() * tilt_scale(gprime_at_mu, a);
  return theta * drift(spec, v) + 0.5 * theta * theta * s * s;
}

double log_mgf_tilde_derivative(const GaussianChangeSpec& spec, double v, double theta,
                                double gprime_at_mu, double a) {
  const double s = spec.llr_sd() * tilt_scale(gprime_at_mu, a);
  return drift(spec, v) + theta * s * s;
}

double mgf_h_tilde(const GaussianChangeSpec& spec, double v, double theta,
                   double gprime_at_mu, double a) {
  return checked_exp(log_mgf_tilde(spec, v, theta, gprime_at_mu, a));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace cdx::model
