#pragma once

#include <cstdint>
#include <functional>

#include "cdx/detect.hpp"
#include "cdx/mc.hpp"
#include "cdx/model.hpp"

namespace cdx::calib {

struct CalibrationResult {
  double parameter = 0.0;
  double achieved_arl0 = 0.0;
  double achieved_stderr = 0.0;
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
  /// False when the search stopped on bracket width rather than on rel_tol.
  bool converged = false;
  /// Target at or below the degenerate c = 0 limit (immediate alarm, ARL0 = 1).
  bool boundary = false;
};

struct CalibrationConfig {
  double target_arl0 = 1000.0;
  double rel_tol = 0.01;
  std::uint64_t reps = 200'000;
  std::uint64_t seed = 42;
  std::uint64_t max_steps = mc::kDefaultMaxSteps;
  mc::EngineOptions engine;
};

/// Maps the free parameter to a concrete detector.
using Family = std::function<detect::DetectorSpec(double)>;

/// Bisection on a threshold c whose in-control ARL is nondecreasing in c.
/// Every evaluation reuses the same replication seeds, so the objective is a
/// deterministic step function of c.
CalibrationResult calibrate_threshold(const Family& family,
                                      const model::GaussianChangeSpec& model,
                                      const CalibrationConfig& config);

/// Same search over the SLR slack r. The direction of monotonicity is probed
/// from the first two evaluations rather than assumed.
CalibrationResult calibrate_slack(const model::GaussianChangeSpec& model,
                                  const CalibrationConfig& config);

}  // namespace cdx::calib
