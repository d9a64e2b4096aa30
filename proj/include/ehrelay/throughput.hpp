#pragma once

#include <string>

#include "ehrelay/analytic.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/montecarlo.hpp"

namespace ehrelay {

enum class Method { Exact, HighSnrApprox, MonteCarlo };

inline std::string_view to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::HighSnrApprox: return "high-snr-approx";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

/// Numerical settings shared by every evaluator.
struct EvalOptions {
  QuadratureSettings quadrature{};
  McSettings monte_carlo{};
};

struct ThroughputResult {
  double throughput = 0.0;  // bits/s/Hz
  TransmissionMode mode = TransmissionMode::DelayLimited;
  /// Outage probability (delay-limited) or ergodic capacity (delay-tolerant).
  double intermediate = 0.0;
  Method method = Method::Exact;
  /// Standard error of `throughput`; zero for the analytic methods.
  double std_error = 0.0;
  bool converged = true;
  std::string note;
};

namespace detail {

// Fraction of the block carrying information from source to destination.
inline double information_share(const Protocol& protocol) {
  return protocol.kind() == ProtocolKind::TSR ? (1.0 - protocol.fraction_or_zero()) / 2.0 : 0.5;
}

}  // namespace detail

/// Throughput in bits/s/Hz per unit block time.
///   delay-limited:  (1 - p_out) R * share
///   delay-tolerant: C * share
/// with share = (1 - alpha)/2 for TSR and 1/2 for PSR and the ideal receiver.
inline ThroughputResult throughput(const SystemParams& params, const Protocol& protocol,
                                   TransmissionMode mode, Method method,
                                   const EvalOptions& options = {}) {
  validate(params);
  const double share = detail::information_share(protocol);
  ThroughputResult out;
  out.mode = mode;
  out.method = method;

  if (method == Method::MonteCarlo) {
    if (mode == TransmissionMode::DelayLimited) {
      const McEstimate p = outage_empirical(params, protocol, options.monte_carlo);
      out.intermediate = p.value;
      out.throughput = (1.0 - p.value) * params.rate * share;
      out.std_error = params.rate * share * p.std_error;
    } else {
      const McEstimate c = capacity_empirical(params, protocol, options.monte_carlo);
      out.intermediate = c.value;
      out.throughput = c.value * share;
      out.std_error = share * c.std_error;
    }
    return out;
  }

  const AnalyticMethod am =
      method == Method::Exact ? AnalyticMethod::Exact : AnalyticMethod::HighSnrApprox;
  const AnalyticValue v = mode == TransmissionMode::DelayLimited
                              ? outage_probability(params, protocol, am, options.quadrature)
                              : ergodic_capacity(params, protocol, am, options.quadrature);
  out.intermediate = v.value;
  out.converged = v.converged;
  out.note = v.diagnostic;
  out.throughput = mode == TransmissionMode::DelayLimited ? (1.0 - v.value) * params.rate * share
                                                          : v.value * share;
  return out;
}

}  // namespace ehrelay
