#include "cdx/theory.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace cdx::theory {

namespace {

constexpr int kMaxFixedPoint = 200;
constexpr double kRateTol = 1e-8;

template <class F>
double bracketed_root(F f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

double limit_at_drift(const model::GaussianChangeSpec& spec, double v,
                      const limits::ControlLimit& g) {
  const double gmu = g.eval(model::drift(spec, v));
  if (!(gmu > 0.0)) {
    throw std::domain_error("evaluate only where the limit is positive: g(mu) <= 0");
  }
  return gmu;
}

double mixing_weight(double a, double rate, double gmu) { return a * rate / gmu; }

// Root of H(.; rate) on (0, inf).
double positive_root(const model::GaussianChangeSpec& spec, double v,
                     const limits::ControlLimit& g, double a, double rate) {
  auto H = [&](double t) { return H_of_theta(spec, v, g, a, rate, t); };
  double hi = 1.0;
  int guard = 0;
  while (H(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("H has no positive root");
  }
  double lo = hi;
  guard = 0;
  while (H(lo) >= 0.0) {
    lo *= 0.5;
    if (++guard > 1100) throw std::runtime_error("H is not negative near 0");
  }
  return bracketed_root(H, lo, hi);
}

}  // namespace

double H_of_theta(const model::GaussianChangeSpec& spec, double v, const limits::ControlLimit& g,
                  double a, double rate, double theta) {
  const double mu = model::drift(spec, v);
  const double gmu = limit_at_drift(spec, v, g);
  const double w = mixing_weight(a, rate, gmu);
  const double gp = g.derivative(mu);
  return w * model::log_mgf_tilde(spec, v, theta, gp, a) +
         (1.0 - w) * model::log_mgf(spec, v, theta);
}

double H_derivative(const model::GaussianChangeSpec& spec, double v,
                    const limits::ControlLimit& g, double a, double rate, double theta) {
  const double mu = model::drift(spec, v);
  const double gmu = limit_at_drift(spec, v, g);
  const double w = mixing_weight(a, rate, gmu);
  const double gp = g.derivative(mu);
  return w * model::log_mgf_tilde_derivative(spec, v, theta, gp, a) +
         (1.0 - w) * model::log_mgf_derivative(spec, v, theta);
}

ThetaSolution solve_theta_star(const model::GaussianChangeSpec& spec, double v,
                               const limits::ControlLimit& g, double a) {
  spec.validate();
  g.validate();
  if (!(a > 0.0)) throw std::invalid_argument("window scale a must be positive");
  const double mu = model::drift(spec, v);
  if (model::classify_regime(spec, v) != model::Regime::VMinus) {
    throw std::domain_error("no positive root: drift(v) >= 0");
  }
  const double gmu = limit_at_drift(spec, v, g);

  ThetaSolution sol;
  sol.a = a;
  double rate = std::abs(mu);
  double prev_delta = 0.0;
  for (int it = 1; it <= kMaxFixedPoint; ++it) {
    const double theta = positive_root(spec, v, g, a, rate);
    const double next = H_derivative(spec, v, g, a, rate, theta);
    const double delta = next - rate;
    sol.iterations = it;
    if (std::abs(delta) < kRateTol * std::abs(rate)) {
      rate = next;
      sol.rate = rate;
      sol.theta_star = positive_root(spec, v, g, a, rate);
      sol.residual = std::abs(H_of_theta(spec, v, g, a, rate, sol.theta_star));
      sol.window_ok = a <= gmu / rate;
      return sol;
    }
    // Damp when the update overshoots.
    rate = (prev_delta != 0.0 && (delta > 0.0) != (prev_delta > 0.0)) ? rate + 0.5 * delta : next;
    prev_delta = delta;
  }
  throw std::runtime_error("theta* fixed point did not converge in 200 iterations");
}

double theta_zero(const model::GaussianChangeSpec& spec, double v) {
  spec.validate();
  if (model::classify_regime(spec, v) != model::Regime::VMinus) {
    throw std::domain_error("theta_0 needs drift(v) < 0");
  }
  const double s = spec.llr_sd();
  return -2.0 * model::drift(spec, v) / (s * s);
}

ThetaCurve::ThetaCurve(const model::GaussianChangeSpec& spec, double v,
                       const limits::ControlLimit& g, double a)
    : spec_(spec), v_(v), g_(g), a_(a), sol_(solve_theta_star(spec, v, g, a)) {}

double ThetaCurve::H(double theta) const {
  return H_of_theta(spec_, v_, g_, a_, sol_.rate, theta);
}

double ThetaCurve::H_prime(double theta) const {
  return H_derivative(spec_, v_, g_, a_, sol_.rate, theta);
}

double ThetaCurve::theta_for_slope(double slope) const {
  auto f = [&](double t) { return H_prime(t) - slope; };
  if (!(f(0.0) < 0.0)) throw std::domain_error("slope must exceed H'(0)");
  double hi = 1.0;
  int guard = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("H' never reaches the requested slope");
  }
  return bracketed_root(f, 0.0, hi);
}

double ThetaCurve::operator()(double x) const {
  if (!(x > 0.0)) throw std::domain_error("Theta(x) needs x > 0");
  const double t = theta_for_slope(1.0 / x);
  return t - x * H(t) - 2.0 * sol_.theta_star;
}

double ThetaCurve::find_b() const {
  const double x0 = 1.0 / sol_.rate;
  const double at_x0 = (*this)(x0);
  if (std::abs(at_x0 + sol_.theta_star) > 1e-8 * std::max(1.0, sol_.theta_star)) {
    throw std::logic_error("Theta(1/u) != -theta*: inconsistent theta* solution");
  }
  const double x_max = 1e6 * x0;
  double lo = x0;
  for (double x = 2.0 * x0; x <= x_max * (1.0 + 1e-12); x *= 2.0) {
    if ((*this)(x) > 0.0) {
      return bracketed_root([this](double y) { return (*this)(y); }, lo, x);
    }
    lo = x;
  }
  throw std::runtime_error("Theta has no sign change on (1/u, 1e6/u]");
}

double theta_curve(const model::GaussianChangeSpec& spec, double v,
                   const limits::ControlLimit& g, double a, double x) {
  return ThetaCurve(spec, v, g, a)(x);
}

double find_b(const model::GaussianChangeSpec& spec, double v, const limits::ControlLimit& g,
              double a) {
  return ThetaCurve(spec, v, g, a).find_b();
}

ArlApprox arl_approx(const model::GaussianChangeSpec& spec, double v, double c,
                     const limits::ControlLimit& g, double a) {
  if (!(c > 0.0)) throw std::invalid_argument("threshold c must be positive");
  spec.validate();
  ArlApprox out;
  out.regime = model::classify_regime(spec, v);
  const double mu = model::drift(spec, v);
  switch (out.regime) {
    case model::Regime::VMinus: {
      ThetaCurve curve(spec, v, g, a);
      const auto& sol = curve.solution();
      const double gmu = g.eval(mu);
      const double growth = std::exp(c * gmu * sol.theta_star);
      out.lower = growth / (curve.find_b() * c);
      out.upper = c * gmu * growth / sol.rate;
      break;
    }
    case model::Regime::VZero: {
      if (!(c > 1.0)) throw std::domain_error("V0 bounds need c > 1");
      const double g0 = limit_at_drift(spec, v, g);
      const double s2 = spec.llr_sd() * spec.llr_sd();
      const double cg2 = (c * g0) * (c * g0);
      out.lower = cg2 / (8.0 * s2 * std::log(c));
      out.upper = cg2 / (s2 * (1.0 - model::normal_cdf(1.0)));
      break;
    }
    case model::Regime::VPlus: {
      const double gmu = limit_at_drift(spec, v, g);
      out.point = c * gmu / mu;
      out.lower = out.upper = *out.point;
      break;
    }
  }
  return out;
}

double translate_threshold(double c_prime, double theta_star_v0, double g_at_mu0) {
  return c_prime * theta_star_v0 * g_at_mu0;
}

ThresholdTranslation threshold_translation(double c_prime, const model::GaussianChangeSpec& spec,
                                           const limits::ControlLimit& g, double a) {
  const auto sol = solve_theta_star(spec, spec.v0, g, a);
  const double g0 = g.eval(model::drift(spec, spec.v0));
  return {translate_threshold(c_prime, sol.theta_star, g0), sol.theta_star, g0};
}

std::optional<bool> oal_beats_cusum(const model::GaussianChangeSpec& spec, double v,
                                    const limits::ControlLimit& g, double a) {
  const double mu = model::drift(spec, v);
  if (mu < 0.0) return std::nullopt;
  const auto tr = threshold_translation(1.0, spec, g, a);
  return tr.theta_star_v0 > g.eval(mu) / tr.g_at_mu0;
}

}  // namespace cdx::theory
