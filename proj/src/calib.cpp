#include "cdx/calib.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdx::calib {

namespace {

constexpr int kMaxExpansions = 60;
constexpr int kMaxBisections = 200;

struct Probe {
  double arl = 0.0;
  double std_error = 0.0;
  bool above = false;  // ARL >= target
};

class Objective {
 public:
  Objective(Family family, const model::GaussianChangeSpec& model, const CalibrationConfig& cfg)
      : family_(std::move(family)), model_(model), cfg_(cfg) {}

  Probe operator()(double parameter) {
    ++evaluations_;
    mc::Scenario sc{0, model_.v0, cfg_.reps, cfg_.seed, cfg_.max_steps};
    // Anything beyond the tolerance band is decided without finishing the run.
    const double cap = cfg_.target_arl0 * (1.0 + cfg_.rel_tol);
    auto est = mc::estimate_arl_capped(family_(parameter), model_, sc, cap, cfg_.engine);
    if (est.exceeded) return {std::numeric_limits<double>::infinity(), 0.0, true};
    return {est.summary.mean, est.summary.std_error, est.summary.mean >= cfg_.target_arl0};
  }

  int evaluations() const { return evaluations_; }

 private:
  Family family_;
  model::GaussianChangeSpec model_;
  CalibrationConfig cfg_;
  int evaluations_ = 0;
};

void check_config(const CalibrationConfig& cfg) {
  if (!std::isfinite(cfg.target_arl0)) throw std::invalid_argument("target must be finite");
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 0.5)) {
    throw std::invalid_argument("rel_tol must lie in (0, 0.5)");
  }
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
}

bool within(const Probe& p, const CalibrationConfig& cfg) {
  return std::isfinite(p.arl) &&
         std::abs(p.arl - cfg.target_arl0) <= cfg.rel_tol * cfg.target_arl0;
}

// `increasing`: ARL0 nondecreasing in the parameter. Searches outward from
// `start` by doubling/halving, then bisects.
CalibrationResult search(Objective& f, const CalibrationConfig& cfg, double start,
                         bool increasing, double min_width, std::optional<Probe> start_probe) {
  CalibrationResult res;
  // "low side" = ARL below target.
  auto low_side = [&](const Probe& p) { return !p.above; };

  Probe p0 = start_probe ? *start_probe : f(start);
  if (within(p0, cfg)) {
    res.parameter = start;
    res.achieved_arl0 = p0.arl;
    res.achieved_stderr = p0.std_error;
    res.lo = res.hi = start;
    res.converged = true;
    res.iterations = f.evaluations();
    return res;
  }

  // Bracket [a, b] in parameter space with a on the low-ARL side.
  double low_param = start;
  double high_param = start;
  bool start_low = low_side(p0);
  double step_up = increasing == start_low ? 2.0 : 0.5;  // move toward the other side
  double probe_param = start;
  bool found = false;
  for (int i = 0; i < kMaxExpansions; ++i) {
    probe_param *= step_up;
    Probe p = f(probe_param);
    if (within(p, cfg)) {
      res.parameter = probe_param;
      res.achieved_arl0 = p.arl;
      res.achieved_stderr = p.std_error;
      res.lo = res.hi = probe_param;
      res.converged = true;
      res.iterations = f.evaluations();
      return res;
    }
    if (low_side(p) != start_low) {
      found = true;
      break;
    }
    if (start_low) low_param = probe_param; else high_param = probe_param;
  }
  if (!found) throw std::runtime_error("bracket expansion failed after 60 steps");
  if (start_low) high_param = probe_param; else low_param = probe_param;

  double lo = std::min(low_param, high_param);
  double hi = std::max(low_param, high_param);
  Probe last = p0;
  double last_param = start;
  for (int i = 0; i < kMaxBisections && hi - lo >= min_width; ++i) {
    const double mid = 0.5 * (lo + hi);
    Probe p = f(mid);
    last = p;
    last_param = mid;
    if (within(p, cfg)) {
      res.converged = true;
      break;
    }
    // Keep the low-ARL end on the side it started.
    const bool mid_low = low_side(p);
    if (mid_low == increasing) lo = mid; else hi = mid;
  }
  res.parameter = last_param;
  res.achieved_arl0 = last.arl;
  res.achieved_stderr = last.std_error;
  res.lo = lo;
  res.hi = hi;
  res.iterations = f.evaluations();
  return res;
}

}  // namespace

CalibrationResult calibrate_threshold(const Family& family,
                                      const model::GaussianChangeSpec& model,
                                      const CalibrationConfig& config) {
  if (config.target_arl0 <= 1.0) {
    // At c = 0 the empty-sum term alarms at the first observation.
    CalibrationResult res;
    res.boundary = true;
    res.converged = config.target_arl0 == 1.0;
    res.achieved_arl0 = 1.0;
    return res;
  }
  check_config(config);
  Objective f(family, model, config);
  return search(f, config, 1.0, true, 1e-4, std::nullopt);
}

CalibrationResult calibrate_slack(const model::GaussianChangeSpec& model,
                                  const CalibrationConfig& config) {
  check_config(config);
  if (config.target_arl0 <= 1.0) throw std::invalid_argument("target ARL0 must exceed 1");
  const double mu0 = model::drift(model, model.v0);
  Objective f([mu0](double r) { return detect::DetectorSpec::slr(r, mu0); }, model, config);
  // Probe both ends of the initial bracket to learn the orientation.
  const double start = 1.0;
  Probe a = f(start);
  Probe b = f(2.0 * start);
  bool increasing;
  if (std::isfinite(a.arl) && std::isfinite(b.arl) && a.arl != b.arl) {
    increasing = b.arl > a.arl;
  } else {
    increasing = b.above && !a.above;
  }
  // Slack moves in far smaller steps than thresholds; keep the bracket
  // tolerance relative to the scale of r.
  return search(f, config, start, increasing, 1e-7, a);
}

}  // namespace cdx::calib
