#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "cdx/calib.hpp"
#include "oracles.hpp"

using namespace cdx::calib;
using cdx::detect::DetectorSpec;
using cdx::limits::ControlLimit;

namespace {
const cdx::model::GaussianChangeSpec kModel{};

CalibrationConfig config(double target, std::uint64_t reps, std::uint64_t seed = 42) {
  CalibrationConfig c;
  c.target_arl0 = target;
  c.reps = reps;
  c.seed = seed;
  return c;
}

Family cusum_family() {
  return [](double c) { return DetectorSpec::cusum(c); };
}

double arl0(const DetectorSpec& spec, std::uint64_t reps, std::uint64_t seed) {
  return cdx::mc::estimate_arl(spec, kModel, {0, 0.0, reps, seed}).mean;
}
}  // namespace

TEST(Calib, TargetOneIsBoundary) {
  const auto r = calibrate_threshold(
      [](double c) { return DetectorSpec::cusum_oal(c, ControlLimit::g_tilde(10.0, -0.5)); },
      kModel, config(1.0, 1000));
  EXPECT_TRUE(r.boundary);
  EXPECT_LE(r.parameter, 0.0);
  EXPECT_EQ(r.achieved_arl0, 1.0);
}

TEST(Calib, CusumThresholds) {
  const auto r1000 = calibrate_threshold(cusum_family(), kModel, config(1000.0, 100'000));
  EXPECT_NEAR(r1000.parameter, 5.0742, 0.02 * 5.0742);
  EXPECT_NEAR(r1000.achieved_arl0, 1000.0, 10.0);
  const auto r500 = calibrate_threshold(cusum_family(), kModel, config(500.0, 100'000));
  EXPECT_NEAR(r500.parameter, 4.3867, 0.02 * 4.3867);
}

TEST(Calib, InfiniteSlackTarget) {
  try {
    calibrate_slack(kModel, config(std::numeric_limits<double>::infinity(), 100));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "target must be finite");
  }
}

TEST(Calib, TableSlacksMatchLadderOracle) {
  // In control, T*(r) is the first ladder epoch of a walk with drift r.
  EXPECT_NEAR(cdx::oracle::ladder_epoch_mean(0.0007, 1.0), 1000.0, 0.05 * 1000.0);
  EXPECT_NEAR(cdx::oracle::ladder_epoch_mean(0.00137, 1.0), 500.0, 0.05 * 500.0);
}

TEST(Calib, LadderOracleSmallCases) {
  // Drift large enough that T is almost always 1: E T = 1 / P(Y >= 0) to first order.
  const double d = 6.0;
  EXPECT_NEAR(cdx::oracle::ladder_epoch_mean(d, 1.0, 1000), 1.0, 1e-8);
  // Against a plain Monte Carlo estimate at moderate drift.
  const auto mc = cdx::mc::estimate_arl(DetectorSpec::slr(0.2, -0.5), kModel, {0, 0.0, 400'000, 4});
  EXPECT_NEAR(mc.mean, cdx::oracle::ladder_epoch_mean(0.2, 1.0), 4.0 * mc.std_error);
}

TEST(Calib, SlackAgainstLadderOracle) {
  auto cfg = config(100.0, 200'000);
  cfg.rel_tol = 0.02;
  const auto r = calibrate_slack(kModel, cfg);
  ASSERT_GT(r.parameter, 0.0);
  const double exact = cdx::oracle::ladder_epoch_mean(r.parameter, 1.0);
  const double tol = std::max(cfg.rel_tol, 3.0 * r.achieved_stderr / cfg.target_arl0);
  EXPECT_NEAR(exact, cfg.target_arl0, 2.0 * tol * cfg.target_arl0) << "r=" << r.parameter;
}

TEST(Calib, Deterministic) {
  const auto a = calibrate_threshold(cusum_family(), kModel, config(200.0, 20'000, 7));
  const auto b = calibrate_threshold(cusum_family(), kModel, config(200.0, 20'000, 7));
  EXPECT_EQ(a.parameter, b.parameter);
  EXPECT_EQ(a.achieved_arl0, b.achieved_arl0);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Calib, RoundTripWithFreshSeed) {
  auto cfg = config(300.0, 100'000, 11);
  const auto r = calibrate_threshold(cusum_family(), kModel, cfg);
  ASSERT_TRUE(r.converged);
  const auto fresh = cdx::mc::estimate_arl(DetectorSpec::cusum(r.parameter), kModel,
                                           {0, 0.0, cfg.reps, 9999});
  const double tol = std::max(cfg.rel_tol, 3.0 * fresh.std_error / cfg.target_arl0);
  EXPECT_NEAR(fresh.mean, cfg.target_arl0, tol * cfg.target_arl0 + 3.0 * r.achieved_stderr);
}

TEST(Calib, BracketStraddlesTarget) {
  auto cfg = config(250.0, 20'000, 3);
  cfg.rel_tol = 1e-4;
  const auto r = calibrate_threshold(cusum_family(), kModel, cfg);
  ASSERT_LT(r.lo, r.hi);
  EXPECT_LT(arl0(DetectorSpec::cusum(r.lo), cfg.reps, cfg.seed), cfg.target_arl0);
  EXPECT_GE(arl0(DetectorSpec::cusum(r.hi), cfg.reps, cfg.seed), cfg.target_arl0);
}

TEST(Calib, Validation) {
  auto cfg = config(100.0, 100);
  cfg.rel_tol = 0.7;
  EXPECT_THROW(calibrate_threshold(cusum_family(), kModel, cfg), std::invalid_argument);
}
