#include <gtest/gtest.h>

#include <cmath>

#include "ehrelay/model.hpp"

namespace ehrelay {
namespace {

TEST(Validate, AcceptsReferenceDefaults) {
  const SystemParams p;
  EXPECT_EQ(p.source_power, 1.0);
  EXPECT_EQ(p.path_loss_exponent, 2.7);
  EXPECT_EQ(p.antenna_noise_var, 0.01);
  EXPECT_EQ(p.conversion_noise_var, 0.01);
  EXPECT_EQ(p.rate, 3.0);
  EXPECT_NO_THROW(validate(p));
  EXPECT_EQ(validate(p), p);
}

TEST(Validate, Idempotent) {
  SystemParams p;
  p.dist_source_relay = 1.3;
  p.conversion_noise_var = 0.0;
  EXPECT_EQ(validate(validate(p)), validate(p));
}

TEST(Validate, RejectsZeroDistance) {
  SystemParams p;
  p.dist_source_relay = 0.0;
  try {
    validate(p);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("dist_source_relay"), std::string::npos);
  }
}

TEST(Validate, RejectsNoiselessLink) {
  SystemParams p;
  p.antenna_noise_var = 0.0;
  p.conversion_noise_var = 0.0;
  EXPECT_THROW(validate(p), ParameterError);
  p.antenna_noise_var = 1e-6;
  EXPECT_NO_THROW(validate(p));
}

TEST(Validate, RejectsOutOfRangeFields) {
  auto rejects = [](auto mutate) {
    SystemParams p;
    mutate(p);
    return [&] {
      try {
        validate(p);
      } catch (const ParameterError&) {
        return true;
      }
      return false;
    }();
  };
  EXPECT_TRUE(rejects([](SystemParams& p) { p.harvesting_efficiency = 1.5; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.harvesting_efficiency = 0.0; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.source_power = -1.0; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.antenna_noise_var = -0.01; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.fading_mean_rd = 0.0; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.rate = 0.0; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.block_time = NAN; }));
  EXPECT_TRUE(rejects([](SystemParams& p) { p.path_loss_exponent = INFINITY; }));
}

TEST(SnrThreshold, Values) {
  EXPECT_DOUBLE_EQ(snr_threshold(3.0), 7.0);
  EXPECT_DOUBLE_EQ(snr_threshold(1.0), 1.0);
  EXPECT_NEAR(snr_threshold(0.5), std::sqrt(2.0) - 1.0, 1e-15);
  EXPECT_THROW(snr_threshold(0.0), ParameterError);
  EXPECT_THROW(snr_threshold(-1.0), ParameterError);
}

TEST(SnrThreshold, IncreasingAndVanishingAtZero) {
  double prev = 0.0;
  for (double r = 1e-9; r < 20.0; r *= 1.5) {
    const double g = snr_threshold(r);
    EXPECT_GT(g, prev);
    prev = g;
  }
  EXPECT_LT(snr_threshold(1e-12), 1e-11);
}

TEST(Protocol, StoresFractionOnlyWhenUsed) {
  EXPECT_EQ(Protocol::tsr(0.3).fraction(), 0.3);
  EXPECT_EQ(Protocol::psr(0.6).kind(), ProtocolKind::PSR);
  EXPECT_FALSE(Protocol::ideal().fraction().has_value());
  EXPECT_EQ(Protocol::of(ProtocolKind::Ideal, 0.9), Protocol::ideal());
  EXPECT_THROW(Protocol::tsr(1.01), ParameterError);
  EXPECT_THROW(Protocol::psr(-0.1), ParameterError);
  EXPECT_NO_THROW(Protocol::tsr(0.0));
  EXPECT_NO_THROW(Protocol::psr(1.0));
}

}  // namespace
}  // namespace ehrelay
