#pragma once

// Test-only reference computations. Nothing here calls into the library's
// closed forms; each routine works from a definition.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cdx::oracle {

inline double normal_pdf(double x, double mean, double sd) {
  const double t = (x - mean) / sd;
  return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double log_normal_pdf(double x, double mean, double sd) {
  const double t = (x - mean) / sd;
  return -0.5 * t * t - std::log(sd * std::sqrt(2.0 * std::numbers::pi));
}

/// Integral of f against N(mean, sd^2) by adaptive Gauss-Kronrod over +-40 sd.
inline double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd) {
  auto integrand = [&](double x) { return f(x) * normal_pdf(x, mean, sd); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, mean - 40.0 * sd, mean + 40.0 * sd, 15, 1e-14, &err);
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// E[T] for T = min{n >= 1 : Y_1 + ... + Y_n >= 0}, Y_i iid N(drift, sd^2),
/// drift > 0, via Spitzer's identity E[T] = exp(sum_n P(S_n < 0) / n).
/// Direct sum to `direct_terms`, Euler-Maclaurin tail with a quadrature integral.
inline double ladder_epoch_mean(double drift, double sd, std::uint64_t direct_terms = 2'000'000) {
  const double k = drift / sd;
  auto term = [k](double n) { return std_normal_cdf(-k * std::sqrt(n)) / n; };
  double sum = 0.0;
  for (std::uint64_t n = direct_terms; n >= 1; --n) sum += term(static_cast<double>(n));
  // sum_{n > N} f(n) ~ int_N^inf f - f(N)/2; substitute y = k sqrt(t): int = 2 int Phi(-y)/y dy.
  const double y0 = k * std::sqrt(static_cast<double>(direct_terms));
  auto g = [](double y) { return 2.0 * std_normal_cdf(-y) / y; };
  double err = 0.0;
  const double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                          g, y0, y0 + 40.0, 15, 1e-14, &err) -
                      0.5 * term(static_cast<double>(direct_terms));
  return std::exp(sum + tail);
}

/// P(S_1 < 0, ..., S_n < 0) for a symmetric continuous random walk
/// (Sparre Andersen): C(2n, n) / 4^n, evaluated in log space.
inline double sparre_andersen_survival(std::uint64_t n) {
  const double dn = static_cast<double>(n);
  return std::exp(std::lgamma(2.0 * dn + 1.0) - 2.0 * std::lgamma(dn + 1.0) - dn * std::log(4.0));
}

}  // namespace cdx::oracle
