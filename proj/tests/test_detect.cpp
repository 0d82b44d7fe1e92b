#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "cdx/detect.hpp"
#include "cdx/rng.hpp"

using namespace cdx::detect;
using cdx::limits::ControlLimit;

namespace {

std::vector<double> random_stream(std::mt19937_64& gen, std::size_t len, double mean) {
  std::normal_distribution<double> nd(mean, 1.0);
  std::vector<double> z(len);
  for (auto& x : z) x = nd(gen);
  return z;
}

std::optional<std::uint64_t> alarm(const DetectorSpec& spec, const std::vector<double>& z) {
  auto out = run(spec, z, z.size() + 1);
  if (out.censored) return std::nullopt;
  return out.time;
}

std::optional<std::uint64_t> min_time(std::optional<std::uint64_t> a,
                                      std::optional<std::uint64_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

}  // namespace

TEST(Detect, InitState) {
  Detector d(DetectorSpec::cusum(5.0));
  EXPECT_EQ(d.steps(), 0u);
  EXPECT_FALSE(d.alarmed_at());
  Detector s(DetectorSpec::slr(0.0, -0.5));
  EXPECT_EQ(s.steps(), 0u);
  EXPECT_EQ(s.running_sum(), 0.0);
  EXPECT_THROW(Detector(DetectorSpec::min_combo({})), std::invalid_argument);
  EXPECT_THROW(Detector(DetectorSpec::cusum(0.0)), std::invalid_argument);
  EXPECT_THROW(Detector(DetectorSpec::cusum_oal(-1.0, ControlLimit::constant())),
               std::invalid_argument);
  EXPECT_THROW(Detector(DetectorSpec::cusum_oal(1.0, ControlLimit::constant(), 0)),
               std::invalid_argument);
}

TEST(Detect, StepExamples) {
  Detector d(DetectorSpec::cusum(1.0));
  EXPECT_FALSE(d.step(0.6));
  EXPECT_EQ(d.step(0.6), 2u);
  EXPECT_DOUBLE_EQ(d.cusum_statistic(), 1.2);
  EXPECT_THROW(d.step(0.0), std::logic_error);

  Detector neg(DetectorSpec::cusum(1.0));
  for (int i = 0; i < 10000; ++i) {
    ASSERT_FALSE(neg.step(-1.0));
    ASSERT_DOUBLE_EQ(neg.cusum_statistic(), -1.0);
  }

  Detector slr(DetectorSpec::slr(0.0, -0.5));
  EXPECT_EQ(slr.step(0.1), 1u);
}

TEST(Detect, TieAlarms) {
  Detector d(DetectorSpec::cusum(1.0));
  EXPECT_EQ(d.step(1.0), 1u);
}

TEST(Detect, NonpositiveLimitAlarmsImmediately) {
  // g_tilde with u = 10 crosses zero at mu0 + 0.1; a first value of 0 sits above it.
  Detector d(DetectorSpec::cusum_oal(5.0, ControlLimit::g_tilde(10.0, -0.5)));
  EXPECT_EQ(d.step(-0.3), 1u);
}

TEST(Detect, ResetReplays) {
  std::mt19937_64 gen(3);
  auto z = random_stream(gen, 500, 0.1);
  const auto spec = DetectorSpec::cusum_oal(4.0, ControlLimit::g_tilde(10.0, -0.5), 13);
  Detector d(spec);
  std::optional<std::uint64_t> first, second;
  for (double x : z) if ((first = d.step(x))) break;
  d.reset();
  for (double x : z) if ((second = d.step(x))) break;
  EXPECT_EQ(first, second);
  ASSERT_TRUE(first);
}

TEST(Detect, RunCensoring) {
  const std::vector<double> z(50, -1.0);
  auto out = run(DetectorSpec::cusum(1.0), z, 20);
  EXPECT_TRUE(out.censored);
  EXPECT_EQ(out.time, 20u);
  out = run(DetectorSpec::cusum(1.0), z, 1000);
  EXPECT_TRUE(out.censored);
  EXPECT_EQ(out.time, 50u);
  EXPECT_THROW(run(DetectorSpec::cusum(1.0), z, 0), std::invalid_argument);
}

TEST(Detect, BruteforceEmpty) {
  EXPECT_FALSE(stopping_time_bruteforce(DetectorSpec::cusum(1.0), {}));
}

TEST(Detect, WindowFromScale) {
  EXPECT_EQ(window_from_scale(1.0, 5.0742), 6u);
  EXPECT_EQ(window_from_scale(2.0, 3.0), 6u);
  EXPECT_EQ(window_from_scale(1e-9, 1.0), 1u);
}

TEST(Detect, Labels) {
  EXPECT_EQ(DetectorSpec::cusum_oal(1.0, ControlLimit::g_tilde(100.0, -0.5)).label(),
            "oal(gtilde,u=100)");
}

TEST(Detect, RecursionMatchesBruteforce) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> len(0, 200);
  std::uniform_real_distribution<double> mean(-0.6, 0.3);
  std::uniform_real_distribution<double> cdist(0.5, 8.0);
  std::uniform_real_distribution<double> udist(0.0, 50.0);
  std::uniform_int_distribution<std::size_t> wdist(1, 30);
  int alarms = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto z = random_stream(gen, len(gen), mean(gen));
    const double c = cdist(gen), u = udist(gen);
    const std::vector<DetectorSpec> specs{
        DetectorSpec::cusum(c),
        DetectorSpec::cusum_oal(c, ControlLimit::g_tilde(u, -0.5)),
        DetectorSpec::cusum_oal(c, ControlLimit::g_ur(u, 0.01, -0.5), wdist(gen)),
        DetectorSpec::cusum_oal(c, ControlLimit::g_tilde(u, -0.5), wdist(gen)),
        DetectorSpec::slr(0.05 * cdist(gen), -0.5),
        DetectorSpec::min_combo({DetectorSpec::cusum(c), DetectorSpec::slr(0.0, -0.5)}),
    };
    for (const auto& s : specs) {
      const auto fast = alarm(s, z);
      ASSERT_EQ(fast, stopping_time_bruteforce(s, z)) << s.label() << " seq " << i;
      alarms += fast.has_value();
      ++total;
    }
  }
  EXPECT_GT(alarms, total / 5);
  EXPECT_GT(total - alarms, total / 20);
}

TEST(Detect, CusumStatisticMatchesTrailingMax) {
  std::mt19937_64 gen(5);
  const auto z = random_stream(gen, 300, -0.2);
  Detector d(DetectorSpec::cusum(1e9));
  for (std::size_t n = 1; n <= z.size(); ++n) {
    d.step(z[n - 1]);
    double best = -1e300, sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      sum += z[n - k];
      best = std::max(best, sum);
    }
    ASSERT_NEAR(d.cusum_statistic(), best, 1e-10);
  }
}

TEST(Detect, MonotoneInThreshold) {
  std::mt19937_64 gen(17);
  for (int i = 0; i < 300; ++i) {
    const auto z = random_stream(gen, 400, -0.1);
    std::optional<std::uint64_t> prev_c, prev_o;
    for (double c = 0.5; c <= 8.0; c += 0.5) {
      const auto tc = alarm(DetectorSpec::cusum(c), z);
      const auto to = alarm(DetectorSpec::cusum_oal(c, ControlLimit::g_tilde(20.0, -0.5), 9), z);
      if (c > 0.5) {
        EXPECT_TRUE(!tc || (prev_c && *tc >= *prev_c));
        EXPECT_TRUE(!to || (prev_o && *to >= *prev_o));
      }
      prev_c = tc;
      prev_o = to;
    }
  }
}

TEST(Detect, GTildeMonotoneInU) {
  std::mt19937_64 gen(19);
  const double us[] = {0.0, 1.0, 10.0, 100.0, 1000.0, 1e4};
  for (int i = 0; i < 300; ++i) {
    const auto z = random_stream(gen, 400, -0.4);
    std::optional<std::uint64_t> prev;
    for (int k = 0; k < 6; ++k) {
      const auto t = alarm(DetectorSpec::cusum_oal(6.0, ControlLimit::g_tilde(us[k], -0.5)), z);
      if (k > 0 && t) EXPECT_TRUE(!prev || *t <= *prev);
      if (k > 0 && prev) EXPECT_TRUE(t.has_value());
      prev = t;
    }
  }
}

TEST(Detect, GTildeBoundedByComboLimit) {
  std::mt19937_64 gen(23);
  const auto combo = DetectorSpec::min_combo({DetectorSpec::cusum(6.0), DetectorSpec::slr(0.0, -0.5)});
  for (int i = 0; i < 300; ++i) {
    const auto z = random_stream(gen, 400, -0.4);
    const auto tm = alarm(combo, z);
    for (double u : {0.0, 1.0, 10.0, 100.0, 1e4, 1e8}) {
      const auto t = alarm(DetectorSpec::cusum_oal(6.0, ControlLimit::g_tilde(u, -0.5)), z);
      if (t) {
        ASSERT_TRUE(tm.has_value());
        EXPECT_GE(*t, *tm);
      }
    }
  }
}

TEST(Detect, ConstantLimitIsCusum) {
  std::mt19937_64 gen(29);
  for (int i = 0; i < 500; ++i) {
    const auto z = random_stream(gen, 300, -0.3);
    EXPECT_EQ(alarm(DetectorSpec::cusum(4.0), z),
              alarm(DetectorSpec::cusum_oal(4.0, ControlLimit::constant()), z));
    EXPECT_EQ(alarm(DetectorSpec::cusum(4.0), z),
              alarm(DetectorSpec::cusum_oal(4.0, ControlLimit::g_ur(0.0, 0.1, -0.5)), z));
    EXPECT_EQ(alarm(DetectorSpec::cusum(4.0), z),
              alarm(DetectorSpec::cusum_oal(4.0, ControlLimit::g_tilde(0.0, -0.5), 5), z));
  }
}

TEST(Detect, ComboIsMinimum) {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 500; ++i) {
    const auto z = random_stream(gen, 300, -0.45);
    const auto a = DetectorSpec::cusum(5.0);
    const auto b = DetectorSpec::slr(0.0, -0.5);
    const auto c = DetectorSpec::cusum_oal(3.0, ControlLimit::g_tilde(4.0, -0.5), 10);
    EXPECT_EQ(alarm(DetectorSpec::min_combo({a, b, c}), z),
              min_time(min_time(alarm(a, z), alarm(b, z)), alarm(c, z)));
  }
}
