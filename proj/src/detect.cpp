#include "cdx/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cdx::detect {

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Cusum: return "cusum";
    case DetectorKind::CusumOal: return "oal";
    case DetectorKind::Slr: return "slr";
    case DetectorKind::MinCombo: return "combo";
  }
  return "?";
}

DetectorSpec DetectorSpec::cusum(double c) {
  DetectorSpec s;
  s.kind = DetectorKind::Cusum;
  s.c = c;
  return s;
}

DetectorSpec DetectorSpec::cusum_oal(double c, limits::ControlLimit g,
                                     std::optional<std::size_t> window) {
  DetectorSpec s;
  s.kind = DetectorKind::CusumOal;
  s.c = c;
  s.g = g;
  s.window = window;
  return s;
}

DetectorSpec DetectorSpec::slr(double r, double mu0) {
  DetectorSpec s;
  s.kind = DetectorKind::Slr;
  s.r = r;
  s.mu0 = mu0;
  return s;
}

DetectorSpec DetectorSpec::min_combo(std::vector<DetectorSpec> components) {
  DetectorSpec s;
  s.kind = DetectorKind::MinCombo;
  s.components = std::move(components);
  return s;
}

void DetectorSpec::validate() const {
  switch (kind) {
    case DetectorKind::Cusum:
      if (!(c > 0.0)) throw std::invalid_argument("CUSUM threshold c must be positive");
      break;
    case DetectorKind::CusumOal:
      if (!(c > 0.0)) throw std::invalid_argument("CUSUM-OAL threshold c must be positive");
      g.validate();
      if (window && *window == 0) throw std::invalid_argument("window must be positive");
      break;
    case DetectorKind::Slr:
      if (!(r >= 0.0)) throw std::invalid_argument("SLR slack r must be >= 0");
      if (!(mu0 < 0.0)) throw std::invalid_argument("SLR mu0 must be negative");
      break;
    case DetectorKind::MinCombo:
      if (components.empty()) throw std::invalid_argument("empty min-combination");
      for (const auto& part : components) part.validate();
      break;
  }
}

std::string DetectorSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case DetectorKind::Cusum: os << "cusum"; break;
    case DetectorKind::CusumOal:
      os << "oal(" << limits::to_string(g.kind);
      if (g.kind != limits::LimitKind::Constant) os << ",u=" << g.u;
      if (g.kind == limits::LimitKind::GUr) os << ",r=" << g.r;
      if (window) os << ",w=" << *window;
      os << ")";
      break;
    case DetectorKind::Slr: os << "slr(r=" << r << ")"; break;
    case DetectorKind::MinCombo:
      os << "min(";
      for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) os << ",";
        os << components[i].label();
      }
      os << ")";
      break;
  }
  return os.str();
}

std::size_t window_from_scale(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw std::invalid_argument("window scale needs a > 0 and c > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(a * c)));
}

Detector::Detector(const DetectorSpec& spec)
    : kind_(spec.kind),
      c_(spec.c),
      g_(spec.g),
      window_(spec.window.value_or(0)),
      r_(spec.r),
      mu0_(spec.mu0) {
  spec.validate();
  if (kind_ == DetectorKind::Cusum) g_ = limits::ControlLimit::constant();
  for (const auto& part : spec.components) children_.emplace_back(part);
  if (kind_ == DetectorKind::CusumOal && window_ > 0) ring_.assign(window_, 0.0);
}

void Detector::reset() {
  n_ = 0;
  m_ = 0.0;
  s_ = 0.0;
  ring_head_ = 0;
  ring_sum_ = 0.0;
  alarmed_at_.reset();
  for (auto& child : children_) child.reset();
}

bool Detector::check(double z) {
  m_ = n_ == 0 ? z : std::max(m_, 0.0) + z;
  s_ += z;
  ++n_;

  switch (kind_) {
    case DetectorKind::Cusum: return m_ >= c_;
    case DetectorKind::CusumOal: {
      double mean;
      if (window_ == 0) {
        mean = s_ / static_cast<double>(n_);
      } else {
        if (n_ > window_) ring_sum_ -= ring_[ring_head_];
        ring_[ring_head_] = z;
        ring_sum_ += z;
        if (++ring_head_ == window_) {
          ring_head_ = 0;
          // Resynchronise once per lap so add/subtract rounding cannot drift.
          ring_sum_ = std::accumulate(ring_.begin(), ring_.end(), 0.0);
        }
        mean = ring_sum_ / static_cast<double>(std::min<std::uint64_t>(n_, window_));
      }
      // The k = 0 empty sum makes the statistic at least 0.
      return std::max(m_, 0.0) >= c_ * g_.eval(mean);
    }
    case DetectorKind::Slr:
      return s_ - static_cast<double>(n_) * mu0_ >= -r_ * static_cast<double>(n_);
    case DetectorKind::MinCombo: {
      bool any = false;
      for (auto& child : children_) {
        if (child.step(z)) any = true;
      }
      return any;
    }
  }
  return false;
}

std::optional<std::uint64_t> Detector::step(double z) {
  if (alarmed_at_) throw std::logic_error("detector stepped after alarm");
  if (check(z)) alarmed_at_ = n_;
  return alarmed_at_;
}

RunOutcome run(const DetectorSpec& spec, std::span<const double> z, std::uint64_t max_steps) {
  if (max_steps == 0) throw std::invalid_argument("max_steps must be >= 1");
  Detector det(spec);
  const std::uint64_t limit = std::min<std::uint64_t>(max_steps, z.size());
  for (std::uint64_t i = 0; i < limit; ++i) {
    if (auto hit = det.step(z[i])) return {*hit, false};
  }
  return {limit, true};
}

namespace {

bool bruteforce_alarm_at(const DetectorSpec& spec, std::span<const double> z, std::size_t n) {
  // n is 1-based; z[0..n-1] are the observations seen so far.
  auto trailing_max = [&](std::size_t k_min) {
    double best = k_min == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      sum += z[n - k];
      best = std::max(best, sum);
    }
    return best;
  };

  switch (spec.kind) {
    case DetectorKind::Cusum: return trailing_max(1) >= spec.c;
    case DetectorKind::CusumOal: {
      const std::size_t j = spec.window ? std::min<std::size_t>(n, *spec.window) : n;
      double sum = 0.0;
      for (std::size_t i = n - j; i < n; ++i) sum += z[i];
      const double mean = sum / static_cast<double>(j);
      return trailing_max(0) >= spec.c * spec.g.eval(mean);
    }
    case DetectorKind::Slr: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += z[i] - spec.mu0;
      return sum >= -spec.r * static_cast<double>(n);
    }
    case DetectorKind::MinCombo:
      for (const auto& part : spec.components) {
        if (bruteforce_alarm_at(part, z, n)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

std::optional<std::uint64_t> stopping_time_bruteforce(const DetectorSpec& spec,
                                                      std::span<const double> z) {
  spec.validate();
  for (std::size_t n = 1; n <= z.size(); ++n) {
    if (bruteforce_alarm_at(spec, z, n)) return n;
  }
  return std::nullopt;
}

}  // namespace cdx::detect
