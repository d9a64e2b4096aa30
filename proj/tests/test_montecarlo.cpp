#include <gtest/gtest.h>

#include <cmath>

#include "ehrelay/analytic.hpp"
#include "ehrelay/montecarlo.hpp"

namespace ehrelay {
namespace {

TEST(SampleChannel, ExponentialMoments) {
  const SystemParams p;
  const McSettings mc{.master_seed = 99};
  const int n = 1'000'000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double h = sample_channel(p, mc, i).gain_sr_sq;
    s += h;
    s2 += h * h;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.0, 0.005);
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.01);
}

TEST(SampleChannel, ScalesWithFadingMeans) {
  SystemParams p;
  p.fading_mean_sr = 2.5;
  p.fading_mean_rd = 0.4;
  const McSettings mc{};
  double sh = 0, sg = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const auto ch = sample_channel(p, mc, i);
    sh += ch.gain_sr_sq;
    sg += ch.gain_rd_sq;
  }
  EXPECT_NEAR(sh / n, 2.5, 0.03);
  EXPECT_NEAR(sg / n, 0.4, 0.005);
}

TEST(SampleChannel, DeterministicPerSeedAndIndex) {
  const SystemParams p;
  const McSettings a{.master_seed = 1}, b{.master_seed = 2};
  EXPECT_EQ(sample_channel(p, a, 12345), sample_channel(p, a, 12345));
  EXPECT_NE(sample_channel(p, a, 12345), sample_channel(p, b, 12345));
  EXPECT_NE(sample_channel(p, a, 12345), sample_channel(p, a, 12346));
}

TEST(SampleChannel, GainsAreFiniteAndNonnegative) {
  const SystemParams p;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto ch = sample_channel(p, McSettings{}, i);
    ASSERT_TRUE(std::isfinite(ch.gain_sr_sq) && ch.gain_sr_sq >= 0.0);
    ASSERT_TRUE(std::isfinite(ch.gain_rd_sq) && ch.gain_rd_sq >= 0.0);
  }
}

TEST(OutageEmpirical, CertainWithoutHarvesting) {
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    const auto e = outage_empirical({}, Protocol::tsr(0.0), {.num_realizations = 1000, .master_seed = seed});
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
  }
}

TEST(OutageEmpirical, AgreesWithExact) {
  const SystemParams p;
  const auto e = outage_empirical(p, Protocol::tsr(0.28), {.num_realizations = 100000});
  const double exact = outage_probability(p, Protocol::tsr(0.28), AnalyticMethod::Exact).value;
  EXPECT_LE(std::abs(e.value - exact), 4 * e.std_error);
  EXPECT_NEAR(e.std_error, std::sqrt(e.value * (1 - e.value) / 100000), 1e-15);
}

TEST(OutageEmpirical, SingleSampleIsDegenerate) {
  const auto e = outage_empirical({}, Protocol::tsr(0.5), {.num_realizations = 1});
  EXPECT_TRUE(e.value == 0.0 || e.value == 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_TRUE(e.degenerate_se);
}

TEST(OutageEmpirical, RejectsZeroRealizations) {
  EXPECT_THROW(outage_empirical({}, Protocol::ideal(), {.num_realizations = 0}), ParameterError);
}

TEST(CapacityEmpirical, ZeroWithoutHarvesting) {
  const auto e = capacity_empirical({}, Protocol::tsr(0.0), {.num_realizations = 1000, .master_seed = 5});
  EXPECT_EQ(e.value, 0.0);
}

TEST(CapacityEmpirical, AgreesWithExact) {
  const SystemParams p;
  const auto e = capacity_empirical(p, Protocol::psr(0.5), {.num_realizations = 100000});
  const double exact = ergodic_capacity(p, Protocol::psr(0.5), AnalyticMethod::Exact).value;
  EXPECT_LE(std::abs(e.value - exact), 4 * e.std_error);
}

TEST(CapacityEmpirical, StandardErrorScalesAsRootN) {
  const SystemParams p;
  const auto a = capacity_empirical(p, Protocol::tsr(0.4), {.num_realizations = 50000, .master_seed = 3});
  const auto b = capacity_empirical(p, Protocol::tsr(0.4), {.num_realizations = 200000, .master_seed = 3});
  // Quadrupling N halves the standard error.
  EXPECT_NEAR(a.std_error / b.std_error, 2.0, 0.4);
  const auto c = capacity_empirical(p, Protocol::tsr(0.4), {.num_realizations = 100000, .master_seed = 3});
  EXPECT_NEAR(a.std_error / c.std_error, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(Reproducibility, BitIdenticalAcrossThreadCounts) {
  const SystemParams p;
  for (bool anti : {false, true}) {
    McSettings one{.num_realizations = 50001, .master_seed = 11, .antithetic = anti, .threads = 1};
    McSettings many = one;
    many.threads = 7;
    const auto a = capacity_empirical(p, Protocol::psr(0.4), one);
    const auto b = capacity_empirical(p, Protocol::psr(0.4), many);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(outage_empirical(p, Protocol::tsr(0.3), one).value,
              outage_empirical(p, Protocol::tsr(0.3), many).value);
  }
}

TEST(Antithetic, PairsMirrorUniformsAndStayUnbiased) {
  const SystemParams p;
  const McSettings mc{.num_realizations = 100000, .master_seed = 21, .antithetic = true};
  const auto a = sample_channel(p, mc, 10);
  const auto b = sample_channel(p, mc, 11);
  // exp(-x) for the mirrored draw is 1 - exp(-x) up to one ulp of the grid.
  EXPECT_NEAR(std::exp(-a.gain_sr_sq) + std::exp(-b.gain_sr_sq), 1.0, 1e-12);
  const auto e = capacity_empirical(p, Protocol::tsr(0.5), mc);
  const double exact = ergodic_capacity(p, Protocol::tsr(0.5), AnalyticMethod::Exact).value;
  EXPECT_LE(std::abs(e.value - exact), 4 * e.std_error);
}

TEST(Bounds, EstimatesInRange) {
  const SystemParams p;
  for (double f : {0.0, 0.2, 0.8, 1.0}) {
    for (const auto& pr : {Protocol::tsr(f), Protocol::psr(f)}) {
      const auto o = outage_empirical(p, pr, {.num_realizations = 5000});
      EXPECT_GE(o.value, 0.0);
      EXPECT_LE(o.value, 1.0);
      EXPECT_GE(capacity_empirical(p, pr, {.num_realizations = 5000}).value, 0.0);
    }
  }
}

TEST(Agreement, FiveByFiveGrid) {
  // (fraction x antenna noise) cells; at most one excursion beyond 4 SE.
  int outage_misses = 0, capacity_misses = 0;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double noise : {0.005, 0.01, 0.02, 0.05, 0.1}) {
      SystemParams p;
      p.antenna_noise_var = noise;
      const Protocol pr = Protocol::tsr(f);
      const McSettings mc{.num_realizations = 100000, .master_seed = 1000};
      const auto o = outage_empirical(p, pr, mc);
      const auto c = capacity_empirical(p, Protocol::psr(f), mc);
      const double po = outage_probability(p, pr, AnalyticMethod::Exact).value;
      const double cc = ergodic_capacity(p, Protocol::psr(f), AnalyticMethod::Exact).value;
      outage_misses += std::abs(o.value - po) > 4 * o.std_error;
      capacity_misses += std::abs(c.value - cc) > 4 * c.std_error;
    }
  }
  EXPECT_LE(outage_misses, 1);
  EXPECT_LE(capacity_misses, 1);
}

}  // namespace
}  // namespace ehrelay
