#pragma once

// Outage probability, SNR distribution and ergodic capacity from the
// (a, b, c, d, u) constants, by quadrature (Exact) or by the Bessel-function
// form that drops b (HighSnrApprox).
//
// All z-integrals over [d/c, inf) are evaluated after the substitution
// x = c z - d, under which c z^2 - d z = z x and the exponent becomes
//   -(d/c + x/c) / lambda_h - (a + b c / (x + d)) / (x lambda_g).
// The x = 0 endpoint, where the exponent tends to -inf, is never sampled.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "ehrelay/model.hpp"
#include "ehrelay/snr.hpp"
#include "ehrelay/specfun.hpp"

namespace ehrelay {

enum class AnalyticMethod { Exact, HighSnrApprox };

inline std::string_view to_string(AnalyticMethod method) {
  return method == AnalyticMethod::Exact ? "exact" : "high-snr-approx";
}

struct IntegralConstants {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double u = 0.0;  // sqrt(4 a / (c lambda_h lambda_g))

  /// c = 0 means zero relay power: certain outage, zero capacity.
  bool degenerate() const { return !(c > 0.0); }

  static IntegralConstants make(double a, double b, double c, double d, double mean_sr,
                                double mean_rd) {
    IntegralConstants k{a, b, c, d, 0.0};
    k.u = c > 0.0 ? std::sqrt(4.0 * a / (c * mean_sr * mean_rd))
                  : std::numeric_limits<double>::infinity();
    return k;
  }
};

/// Constants for the protocol evaluated at SNR point `snr_point` (the threshold
/// 2^R - 1 for outage, the running variable for the SNR distribution).
inline IntegralConstants constants(const SystemParams& params, const Protocol& protocol,
                                   double snr_point) {
  if (!(snr_point > 0.0)) {
    throw ParameterError("constants: SNR point must be positive");
  }
  const NoiseDecomposition noise = noise_decomposition(params, protocol);
  const double sr = noise.relay_total_var;
  const double sd = noise.dest_total_var;
  const double ps = params.source_power;
  const double eta = params.harvesting_efficiency;
  const double l1 = params.path_loss_sr();
  const double l2 = params.path_loss_rd();
  const double g = snr_point;

  const double a0 = ps * l1 * l2 * sd * g;
  const double b0 = l1 * l1 * l2 * sr * sd * g;
  const double c0 = eta * ps * ps;
  const double d0 = eta * ps * l1 * sr * g;

  double a = a0, b = b0, c = c0, d = d0;
  switch (protocol.kind()) {
    case ProtocolKind::TSR: {
      const double alpha = protocol.fraction_or_zero();
      a = a0 * (1.0 - alpha);
      b = b0 * (1.0 - alpha);
      c = 2.0 * c0 * alpha;
      d = 2.0 * d0 * alpha;
      break;
    }
    case ProtocolKind::PSR: {
      const double rho = protocol.fraction_or_zero();
      a = a0 * (1.0 - rho);
      c = c0 * rho * (1.0 - rho);
      d = d0 * rho;
      break;
    }
    case ProtocolKind::Ideal: break;
  }
  return IntegralConstants::make(a, b, c, d, params.fading_mean_sr, params.fading_mean_rd);
}

/// A numerically evaluated quantity with its quadrature error estimate.
struct AnalyticValue {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
  std::string diagnostic;
};

namespace detail {

struct FadingMeans {
  double sr;
  double rd;
};

// Length scale for the x-integrals: geometric mean of the transition point
// a / lambda_g and the exponential decay length c lambda_h.
inline double x_scale(const IntegralConstants& k, FadingMeans m) {
  const double decay = k.c * m.sr;
  const double transition = k.a / m.rd;
  return transition > 0.0 ? std::sqrt(decay * transition) : decay;
}

inline double exponent_q(const IntegralConstants& k, FadingMeans m, double x) {
  return (k.a + k.b * k.c / (x + k.d)) / (x * m.rd);
}

inline AnalyticValue clamp_unit(AnalyticValue v, double rel_tol, std::string_view what) {
  const double slack = 10.0 * rel_tol;
  if (v.value < -slack || v.value > 1.0 + slack || !std::isfinite(v.value)) {
    v.diagnostic = std::string(what) + " out of [0,1] before clamping: " + std::to_string(v.value);
  }
  if (!std::isfinite(v.value)) {
    v.value = 1.0;
    v.converged = false;
  }
  v.value = std::clamp(v.value, 0.0, 1.0);
  return v;
}

}  // namespace detail

/// P(gamma_D < snr_point) given the constants for that point. This is the
/// engine behind both the outage probability and the SNR CDF.
///
/// Exact evaluates the complement form
///   1 - e^{-d/(c lh)} + e^{-d/(c lh)}/(c lh) * int_0^inf e^{-x/(c lh)} (1 - e^{-q(x)}) dx,
/// which equals 1 - (1/lh) int_{d/c}^inf exp(-(z/lh + (az+b)/((cz^2-dz) lg))) dz
/// but keeps full relative accuracy when the outage is small.
inline AnalyticValue outage_from_constants(const IntegralConstants& k, double mean_sr, double mean_rd,
                                           AnalyticMethod method,
                                           const QuadratureSettings& settings = {}) {
  if (k.degenerate()) {
    return AnalyticValue{1.0, 0.0, true, {}};
  }
  const detail::FadingMeans m{mean_sr, mean_rd};
  const double decay = k.c * m.sr;
  const double lower_mass = -std::expm1(-k.d / decay);  // P(|h|^2 < d/c)
  const double tail = std::exp(-k.d / decay);

  AnalyticValue out;
  if (method == AnalyticMethod::HighSnrApprox) {
    out.value = lower_mass + tail * (1.0 - x_bessel_k1(k.u));
    return detail::clamp_unit(out, settings.rel_tol, "outage");
  }
  auto integrand = [&](double x) {
    const double q = detail::exponent_q(k, m, x);
    return clamped_exp(-x / decay) * -std::expm1(-q);
  };
  const QuadratureResult r = integrate_semi_infinite(integrand, 0.0, settings, detail::x_scale(k, m));
  out.value = lower_mass + tail / decay * r.value;
  out.abs_error = tail / decay * r.abs_error;
  out.converged = r.converged;
  return detail::clamp_unit(out, settings.rel_tol, "outage");
}

/// Density of gamma_D at `gamma` given the constants for that point.
///
/// Exact: (1/(lh gamma)) int_{d/c}^inf (az+b) c z^2 / ((cz^2-dz)^2 lg) exp(...) dz,
/// evaluated as e^{-d/(c lh)}/(lh lg gamma) int_0^inf (az+b)/x^2 e^{-x/(c lh) - q(x)} dx.
/// HighSnrApprox: u^2 K0(u) e^{-d/(c lh)}/(2 gamma) + d u K1(u) e^{-d/(c lh)}/(gamma c lh).
inline AnalyticValue density_from_constants(const IntegralConstants& k, double mean_sr,
                                            double mean_rd, double gamma, AnalyticMethod method,
                                            const QuadratureSettings& settings = {}) {
  if (!(gamma > 0.0)) {
    throw ParameterError("snr_pdf: gamma must be positive");
  }
  if (k.degenerate()) {
    return AnalyticValue{};
  }
  const detail::FadingMeans m{mean_sr, mean_rd};
  const double decay = k.c * m.sr;
  const double tail = std::exp(-k.d / decay);

  AnalyticValue out;
  if (method == AnalyticMethod::HighSnrApprox) {
    if (k.u > 0.0) {
      const detail::BesselPair kk = detail::bessel_k01(k.u);
      out.value = tail * (k.u * k.u * kk.k0 / (2.0 * gamma) + k.d * k.u * kk.k1 / (gamma * decay));
    } else {
      out.value = tail * k.d / (gamma * decay);
    }
    return out;
  }
  auto integrand = [&](double x) {
    const double z = (x + k.d) / k.c;
    const double weight = k.a * z + k.b;
    if (!(weight > 0.0) || !(x > 0.0)) {
      return 0.0;
    }
    const double q = detail::exponent_q(k, m, x);
    return clamped_exp(std::log(weight) - 2.0 * std::log(x) - x / decay - q);
  };
  const QuadratureResult r = integrate_semi_infinite(integrand, 0.0, settings, detail::x_scale(k, m));
  const double prefactor = tail / (m.sr * m.rd * gamma);
  out.value = std::max(0.0, prefactor * r.value);
  out.abs_error = prefactor * r.abs_error;
  out.converged = r.converged;
  return out;
}

/// Outage probability P(gamma_D < 2^R - 1).
inline AnalyticValue outage_probability(const SystemParams& params, const Protocol& protocol,
                                        AnalyticMethod method,
                                        const QuadratureSettings& settings = {}) {
  validate(params);
  const IntegralConstants k = constants(params, protocol, snr_threshold(params.rate));
  return outage_from_constants(k, params.fading_mean_sr, params.fading_mean_rd, method, settings);
}

/// CDF of the end-to-end SNR.
inline AnalyticValue snr_cdf(const SystemParams& params, const Protocol& protocol, double gamma,
                             AnalyticMethod method = AnalyticMethod::Exact,
                             const QuadratureSettings& settings = {}) {
  validate(params);
  if (!(gamma > 0.0)) {
    throw ParameterError("snr_cdf: gamma must be positive");
  }
  const IntegralConstants k = constants(params, protocol, gamma);
  return outage_from_constants(k, params.fading_mean_sr, params.fading_mean_rd, method, settings);
}

/// PDF of the end-to-end SNR.
inline AnalyticValue snr_pdf(const SystemParams& params, const Protocol& protocol, double gamma,
                             AnalyticMethod method = AnalyticMethod::Exact,
                             const QuadratureSettings& settings = {}) {
  validate(params);
  if (!(gamma > 0.0)) {
    throw ParameterError("snr_pdf: gamma must be positive");
  }
  const IntegralConstants k = constants(params, protocol, gamma);
  return density_from_constants(k, params.fading_mean_sr, params.fading_mean_rd, gamma, method,
                                settings);
}

namespace detail {

inline constexpr double kFirstCapacityHorizon = 64.0;
inline constexpr int kMaxHorizonDoublings = 48;

// int_0^inf g(gamma) d gamma over (0, 64], then [G, 2G] pieces until a piece
// changes the running total by less than rel_tol.
template <class G>
AnalyticValue integrate_capacity(G&& g, const QuadratureSettings& settings) {
  AnalyticValue out;
  QuadratureResult r = integrate(g, 0.0, kFirstCapacityHorizon, settings);
  out.value = r.value;
  out.abs_error = r.abs_error;
  out.converged = r.converged;
  double horizon = kFirstCapacityHorizon;
  for (int i = 0;; ++i) {
    if (i == kMaxHorizonDoublings) {
      out.converged = false;
      out.diagnostic = "capacity integrand did not decay within the horizon limit";
      break;
    }
    QuadratureSettings piece = settings;
    piece.abs_tol = std::max(settings.abs_tol, 0.1 * settings.rel_tol * std::abs(out.value));
    r = integrate(g, horizon, 2.0 * horizon, piece);
    out.value += r.value;
    out.abs_error += r.abs_error;
    out.converged = out.converged && r.converged;
    horizon *= 2.0;
    if (std::abs(r.value) <= settings.rel_tol * std::abs(out.value) && out.value > 0.0) {
      break;
    }
    if (out.value == 0.0 && horizon > 1e12) {
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Ergodic capacity E[log2(1 + gamma_D)] = int_0^inf f(gamma) log2(1 + gamma) d gamma.
///
/// The inner z-integral is re-evaluated at every outer abscissa with tolerances
/// ten times tighter than the outer ones; a, b and d all scale with gamma so
/// nothing is shared between abscissae.
inline AnalyticValue ergodic_capacity(const SystemParams& params, const Protocol& protocol,
                                      AnalyticMethod method,
                                      const QuadratureSettings& settings = {}) {
  validate(params);
  settings.check();
  const IntegralConstants probe = constants(params, protocol, 1.0);
  if (probe.degenerate()) {
    return AnalyticValue{};
  }
  const QuadratureSettings inner = settings.tightened(10.0);
  const double lh = params.fading_mean_sr;
  const double lg = params.fading_mean_rd;

  AnalyticValue out;
  if (probe.a == 0.0) {
    // TSR at alpha = 1: the density expression no longer applies because the
    // integrand does not vanish at z = d/c. Integrate the survival function
    // instead: C = (1/ln 2) int_0^inf (1 - F(gamma)) / (1 + gamma) d gamma.
    auto g = [&](double gamma) {
      if (!(gamma > 0.0)) return 0.0;
      const IntegralConstants k = constants(params, protocol, gamma);
      const double cdf = outage_from_constants(k, lh, lg, method, inner).value;
      return (1.0 - cdf) / ((1.0 + gamma) * std::numbers::ln2);
    };
    out = detail::integrate_capacity(g, settings);
  } else {
    bool inner_ok = true;
    auto g = [&](double gamma) {
      if (!(gamma > 0.0)) return 0.0;
      const IntegralConstants k = constants(params, protocol, gamma);
      const AnalyticValue f = density_from_constants(k, lh, lg, gamma, method, inner);
      inner_ok = inner_ok && f.converged;
      return f.value * std::log1p(gamma) / std::numbers::ln2;
    };
    out = detail::integrate_capacity(g, settings);
    if (!inner_ok) {
      out.converged = false;
      if (out.diagnostic.empty()) out.diagnostic = "inner density quadrature did not converge";
    }
  }
  if (out.value < -10.0 * settings.rel_tol) {
    out.diagnostic = "capacity negative before clamping: " + std::to_string(out.value);
  }
  out.value = std::max(0.0, out.value);
  return out;
}

}  // namespace ehrelay
