#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdx/detect.hpp"
#include "cdx/model.hpp"

namespace cdx::mc {

inline constexpr std::uint64_t kDefaultMaxSteps = 10'000'000;

/// One change-point experiment. tau = 0 means the change never happens;
/// otherwise observations tau, tau+1, ... have mean v.
struct Scenario {
  std::uint64_t tau = 1;
  double v = 1.0;
  std::uint64_t reps = 1;
  std::uint64_t seed = 42;
  std::uint64_t max_steps = kDefaultMaxSteps;

  void validate() const;
};

struct RunLengthSummary {
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;
  std::uint64_t reps_used = 0;
  std::uint64_t censored = 0;
  /// Replications that survived to the change-point (equals reps_used).
  std::uint64_t conditional_kept = 0;

  /// Censored replications were counted at the horizon, so mean underestimates.
  bool lower_bound() const { return censored > 0; }
};

struct EngineOptions {
  unsigned threads = 0;  ///< 0 = std::thread::hardware_concurrency()
};

/// Stopping time of replication `rep`. Deterministic in (scenario.seed, rep).
detect::RunOutcome simulate_run_length(const detect::DetectorSpec& spec,
                                       const model::GaussianChangeSpec& model,
                                       const Scenario& scenario, std::uint64_t rep);

/// Mean/SD of the raw stopping time T over scenario.reps replications.
/// Throws std::runtime_error("horizon too small") if every replication censors.
RunLengthSummary estimate_arl(const detect::DetectorSpec& spec,
                              const model::GaussianChangeSpec& model, const Scenario& scenario,
                              EngineOptions opts = {});

/// Like estimate_arl, but gives up once the running total proves the mean is
/// above `cap_mean`. Replications are consumed in index order in fixed-size
/// chunks, so the stopping point does not depend on the thread count.
struct CappedEstimate {
  RunLengthSummary summary;  ///< partial when exceeded
  bool exceeded = false;
};
CappedEstimate estimate_arl_capped(const detect::DetectorSpec& spec,
                                   const model::GaussianChangeSpec& model,
                                   const Scenario& scenario, double cap_mean,
                                   EngineOptions opts = {});

/// E(T - tau + 1 | T >= tau). Replications alarming before tau are discarded
/// and show up as reps - conditional_kept.
RunLengthSummary conditional_delay(const detect::DetectorSpec& spec,
                                   const model::GaussianChangeSpec& model,
                                   const Scenario& scenario, EngineOptions opts = {});

struct JAceResult {
  double value = 0.0;
  std::vector<RunLengthSummary> delays;  ///< one per change-point, in input order
};

/// Unweighted mean of conditional delays over `taus`; `base` supplies
/// v, reps, seed and horizon.
JAceResult j_ace(const detect::DetectorSpec& spec, const model::GaussianChangeSpec& model,
                 std::span<const std::uint64_t> taus, const Scenario& base,
                 EngineOptions opts = {});

struct GridConfig {
  std::uint64_t reps = 100'000;
  std::uint64_t seed = 42;
  std::uint64_t max_steps = kDefaultMaxSteps;
};

struct GridCell {
  std::size_t spec_index = 0;
  double shift = 0.0;
  std::uint64_t tau = 0;
  RunLengthSummary summary;
};

/// One summary per (spec, shift, tau). Every cell shares the same replication
/// seeds, so specs are compared on common random numbers. tau = 0 cells are
/// in-control ARLs and tau = 1 cells plain ARLs; later change-points report
/// conditional delays.
std::vector<GridCell> compare_grid(std::span<const detect::DetectorSpec> specs,
                                   const model::GaussianChangeSpec& model,
                                   std::span<const double> shifts,
                                   std::span<const std::uint64_t> taus, const GridConfig& config,
                                   EngineOptions opts = {});

}  // namespace cdx::mc
