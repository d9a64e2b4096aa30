#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ehrelay {

/// Raised when a parameter set or selector violates its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical link parameters. Defaults are the reference scenario: unit powers,
/// distances and fading means, m = 2.7, both noise variances 0.01, R = 3.
///
/// Relay and destination share the antenna and conversion noise variances.
/// `block_time` is carried for completeness; every throughput expression is
/// normalized by it, so it never reaches an output.
struct SystemParams {
  double source_power = 1.0;           // P_s, J/s
  double harvesting_efficiency = 1.0;  // eta in (0, 1]
  double dist_source_relay = 1.0;      // d1
  double dist_relay_dest = 1.0;        // d2
  double path_loss_exponent = 2.7;     // m
  double antenna_noise_var = 0.01;
  double conversion_noise_var = 0.01;
  double fading_mean_sr = 1.0;  // mean of |h|^2
  double fading_mean_rd = 1.0;  // mean of |g|^2
  double rate = 3.0;            // R, bits/s/Hz
  double block_time = 1.0;      // T, s

  bool operator==(const SystemParams&) const = default;

  double path_loss_sr() const { return std::pow(dist_source_relay, path_loss_exponent); }
  double path_loss_rd() const { return std::pow(dist_relay_dest, path_loss_exponent); }
};

namespace detail {

inline void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) {
    throw ParameterError(std::string(field) + ": " + std::string(what));
  }
}

inline bool positive(double v) { return std::isfinite(v) && v > 0.0; }
inline bool nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace detail

/// Returns `params` unchanged if every field is in its domain, otherwise throws
/// ParameterError naming the first offending field.
inline SystemParams validate(const SystemParams& params) {
  using detail::nonnegative;
  using detail::positive;
  using detail::require;
  require(positive(params.source_power), "source_power", "must be positive");
  require(positive(params.harvesting_efficiency) && params.harvesting_efficiency <= 1.0,
          "harvesting_efficiency", "must lie in (0, 1]");
  require(positive(params.dist_source_relay), "dist_source_relay", "must be positive");
  require(positive(params.dist_relay_dest), "dist_relay_dest", "must be positive");
  require(positive(params.path_loss_exponent), "path_loss_exponent", "must be positive");
  require(nonnegative(params.antenna_noise_var), "antenna_noise_var", "must be nonnegative");
  require(nonnegative(params.conversion_noise_var), "conversion_noise_var",
          "must be nonnegative");
  require(params.antenna_noise_var > 0.0 || params.conversion_noise_var > 0.0,
          "antenna_noise_var/conversion_noise_var",
          "at least one noise variance must be positive");
  require(positive(params.fading_mean_sr), "fading_mean_sr", "must be positive");
  require(positive(params.fading_mean_rd), "fading_mean_rd", "must be positive");
  require(positive(params.rate), "rate", "must be positive");
  require(positive(params.block_time), "block_time", "must be positive");
  return params;
}

/// SNR needed to support `rate` bits/s/Hz: 2^R - 1.
inline double snr_threshold(double rate) {
  detail::require(detail::positive(rate), "rate", "must be positive");
  // exp2 is exact at integer rates; expm1 keeps precision as R -> 0.
  return rate >= 1.0 ? std::exp2(rate) - 1.0 : std::expm1(rate * std::numbers::ln2);
}

enum class ProtocolKind { TSR, PSR, Ideal };

/// Relaying protocol together with its harvesting fraction: the time fraction
/// alpha for TSR, the power-splitting ratio rho for PSR, nothing for Ideal.
class Protocol {
 public:
  static Protocol tsr(double alpha) { return Protocol(ProtocolKind::TSR, alpha); }
  static Protocol psr(double rho) { return Protocol(ProtocolKind::PSR, rho); }
  static Protocol ideal() { return Protocol(ProtocolKind::Ideal, std::nullopt); }

  /// Builds the protocol of the given family; `fraction` is ignored for Ideal.
  static Protocol of(ProtocolKind kind, double fraction) {
    switch (kind) {
      case ProtocolKind::TSR: return tsr(fraction);
      case ProtocolKind::PSR: return psr(fraction);
      case ProtocolKind::Ideal: return ideal();
    }
    throw ParameterError("unknown protocol kind");
  }

  ProtocolKind kind() const { return kind_; }
  std::optional<double> fraction() const { return fraction_; }
  /// Fraction for TSR/PSR, 0 for Ideal.
  double fraction_or_zero() const { return fraction_.value_or(0.0); }

  bool operator==(const Protocol&) const = default;

 private:
  Protocol(ProtocolKind kind, std::optional<double> fraction) : kind_(kind), fraction_(fraction) {
    if (fraction_) {
      detail::require(std::isfinite(*fraction_) && *fraction_ >= 0.0 && *fraction_ <= 1.0,
                      kind == ProtocolKind::TSR ? "alpha" : "rho", "must lie in [0, 1]");
    }
  }

  ProtocolKind kind_;
  std::optional<double> fraction_;
};

enum class TransmissionMode { DelayLimited, DelayTolerant };

/// One block-fading draw of the squared channel magnitudes.
struct ChannelRealization {
  double gain_sr_sq = 0.0;  // |h|^2
  double gain_rd_sq = 0.0;  // |g|^2

  bool operator==(const ChannelRealization&) const = default;
};

inline std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::TSR: return "TSR";
    case ProtocolKind::PSR: return "PSR";
    case ProtocolKind::Ideal: return "Ideal";
  }
  return "?";
}

inline std::string_view to_string(TransmissionMode mode) {
  return mode == TransmissionMode::DelayLimited ? "delay-limited" : "delay-tolerant";
}

}  // namespace ehrelay
