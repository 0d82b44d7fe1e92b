#include <stdexcept>

#include <gtest/gtest.h>

#include "cdx/limits.hpp"

using namespace cdx::limits;

TEST(Limits, Examples) {
  for (double x : {-3.0, -0.5, 0.0, 2.0}) {
    EXPECT_DOUBLE_EQ(ControlLimit::g_ur(0.0, 0.3, -0.5).eval(x), 1.0);
    EXPECT_DOUBLE_EQ(ControlLimit::g_tilde(0.0, -0.5).eval(x), 1.0);
    EXPECT_DOUBLE_EQ(ControlLimit::constant().eval(x), 1.0);
  }
  EXPECT_DOUBLE_EQ(ControlLimit::g_tilde(5.0, -0.5).eval(-0.5), 1.0);
  EXPECT_DOUBLE_EQ(ControlLimit::g_ur(2.0, 0.0, -0.5).eval(0.0), 0.0);
}

TEST(Limits, Derivative) {
  EXPECT_DOUBLE_EQ(ControlLimit::constant().derivative(0.3), 0.0);
  EXPECT_DOUBLE_EQ(ControlLimit::g_ur(3.0, 0.1, -0.5).derivative(-7.0), -3.0);
  const auto gt = ControlLimit::g_tilde(3.0, -0.5);
  EXPECT_DOUBLE_EQ(gt.derivative(-1.5), 0.0);
  EXPECT_DOUBLE_EQ(gt.derivative(-0.5), 0.0);
  EXPECT_DOUBLE_EQ(gt.derivative(0.0), -3.0);
}

TEST(Limits, Monotone) {
  const ControlLimit gs[] = {ControlLimit::constant(), ControlLimit::g_ur(1.0, 0.0, -0.5),
                             ControlLimit::g_ur(100.0, 0.2, -0.5),
                             ControlLimit::g_tilde(10.0, -0.5), ControlLimit::g_tilde(1e4, -1.0)};
  for (const auto& g : gs) {
    double prev = g.eval(-10.0);
    for (double x = -10.0; x <= 10.0; x += 0.01) {
      const double now = g.eval(x);
      EXPECT_LE(now, prev);
      prev = now;
    }
  }
}

TEST(Limits, ZeroCrossing) {
  for (double u : {0.5, 1.0, 100.0}) {
    const auto gur = ControlLimit::g_ur(u, 0.25, -0.5);
    EXPECT_DOUBLE_EQ(gur.zero_crossing(), -0.5 - 0.25 + 1.0 / u);
    EXPECT_NEAR(gur.eval(gur.zero_crossing()), 0.0, 1e-15);
    const auto gt = ControlLimit::g_tilde(u, -0.5);
    EXPECT_DOUBLE_EQ(gt.zero_crossing(), -0.5 + 1.0 / u);
    EXPECT_NEAR(gt.eval(gt.zero_crossing()), 0.0, 1e-15);
  }
}

TEST(Limits, UOrderingAboveAnchor) {
  const double us[] = {0.0, 1.0, 10.0, 100.0, 1e4};
  for (double x = -0.74; x <= 2.0; x += 0.01) {
    for (int i = 1; i < 5; ++i) {
      EXPECT_LE(ControlLimit::g_ur(us[i], 0.25, -0.5).eval(x),
                ControlLimit::g_ur(us[i - 1], 0.25, -0.5).eval(x));
      EXPECT_LE(ControlLimit::g_tilde(us[i], -0.5).eval(x),
                ControlLimit::g_tilde(us[i - 1], -0.5).eval(x));
    }
  }
}

TEST(Limits, Validate) {
  EXPECT_THROW(ControlLimit::g_ur(-1.0, 0.0, -0.5).validate(), std::invalid_argument);
  EXPECT_THROW(ControlLimit::g_ur(1.0, -0.1, -0.5).validate(), std::invalid_argument);
  EXPECT_THROW(ControlLimit::g_tilde(1.0, 0.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(ControlLimit::g_tilde(1.0, -0.5).validate());
}

TEST(Limits, Parse) {
  EXPECT_EQ(parse_limit_kind("const"), LimitKind::Constant);
  EXPECT_EQ(parse_limit_kind("gur"), LimitKind::GUr);
  EXPECT_EQ(parse_limit_kind("gtilde"), LimitKind::GTilde);
  EXPECT_THROW(parse_limit_kind("quadratic"), std::invalid_argument);
}
