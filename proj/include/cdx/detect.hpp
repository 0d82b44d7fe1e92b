#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdx/limits.hpp"

namespace cdx::detect {

enum class DetectorKind { Cusum, CusumOal, Slr, MinCombo };

const char* to_string(DetectorKind kind);

/// Configuration of one stopping rule.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::Cusum;
  double c = 1.0;                     ///< threshold (Cusum, CusumOal)
  limits::ControlLimit g;             ///< CusumOal only
  std::optional<std::size_t> window;  ///< CusumOal only; nullopt = full-history mean
  double r = 0.0;                     ///< Slr slack
  double mu0 = -0.5;                  ///< Slr pre-change drift
  std::vector<DetectorSpec> components;  ///< MinCombo only

  static DetectorSpec cusum(double c);
  static DetectorSpec cusum_oal(double c, limits::ControlLimit g,
                                std::optional<std::size_t> window = std::nullopt);
  static DetectorSpec slr(double r, double mu0);
  static DetectorSpec min_combo(std::vector<DetectorSpec> components);

  /// Throws std::invalid_argument when the spec cannot be run.
  void validate() const;

  /// Short human-readable label, e.g. "oal(gtilde,u=100)".
  std::string label() const;
};

/// Sliding-window length ceil(a * c), never below 1.
std::size_t window_from_scale(double a, double c);

/// Streaming state of one stopping rule. Observations are LLR values; checks
/// start at the first observation. A state is single-threaded; reset() lets a
/// caller reuse the buffers across replications.
class Detector {
 public:
  explicit Detector(const DetectorSpec& spec);

  /// Consumes one LLR value and returns the step index on the first alarm.
  /// Throws std::logic_error if the detector has already alarmed.
  std::optional<std::uint64_t> step(double z);

  void reset();

  std::uint64_t steps() const { return n_; }
  std::optional<std::uint64_t> alarmed_at() const { return alarmed_at_; }
  /// CUSUM statistic max_{1<=k<=n} sum_{i=n-k+1}^n Z_i (undefined before step 1).
  double cusum_statistic() const { return m_; }
  double running_sum() const { return s_; }

 private:
  bool check(double z);

  DetectorKind kind_;
  double c_;
  limits::ControlLimit g_;
  std::size_t window_;  // 0 = full history
  double r_;
  double mu0_;
  std::vector<Detector> children_;

  std::uint64_t n_ = 0;
  double m_ = 0.0;
  double s_ = 0.0;
  std::vector<double> ring_;
  std::size_t ring_head_ = 0;
  double ring_sum_ = 0.0;
  std::optional<std::uint64_t> alarmed_at_;
};

struct RunOutcome {
  std::uint64_t time = 0;  ///< alarm index, or number of steps consumed when censored
  bool censored = false;

  friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

/// First alarm within the first max_steps values of z (or within z, if shorter).
RunOutcome run(const DetectorSpec& spec, std::span<const double> z, std::uint64_t max_steps);

/// Evaluates the stopping rule at each n directly from its definition: all
/// trailing sums, the window mean recomputed from scratch. Quadratic; test oracle.
std::optional<std::uint64_t> stopping_time_bruteforce(const DetectorSpec& spec,
                                                      std::span<const double> z);

}  // namespace cdx::detect
