#pragma once

// Monte-Carlo estimates over independent Rayleigh block-fading draws.
//
// Each realization is a pure function of (master_seed, index): uniforms come
// from a counter-based hash, so estimates are bit-identical for any thread
// count. Partial sums are formed over fixed chunks and combined pairwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ehrelay/model.hpp"
#include "ehrelay/parallel.hpp"
#include "ehrelay/snr.hpp"

namespace ehrelay {

struct McSettings {
  std::uint64_t num_realizations = 100000;
  std::uint64_t master_seed = 0x5EEDULL;
  /// Pair realization 2k+1 with the mirrored uniforms of 2k.
  bool antithetic = false;
  /// Worker threads, 0 = hardware concurrency. Does not affect results.
  unsigned threads = 0;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  /// Standard error is not estimable (a single sample or a single pair).
  bool degenerate_se = false;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Uniform on (0, 1] keyed by (seed, index, lane).
inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  const std::uint64_t key = mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (index * 2 + lane);
  const std::uint64_t bits = mix64(mix64(key) + 0x632BE59BD9B4E019ULL);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline double mirrored(double u) { return 1.0 - u + 0x1.0p-53; }

inline ChannelRealization draw(const SystemParams& params, double u_h, double u_g) {
  return ChannelRealization{-params.fading_mean_sr * std::log(u_h),
                            -params.fading_mean_rd * std::log(u_g)};
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

inline Moments pairwise_sum(std::span<const Moments> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  const Moments l = pairwise_sum(parts.first(half));
  const Moments r = pairwise_sum(parts.subspan(half));
  return Moments{l.sum + r.sum, l.sum_sq + r.sum_sq};
}

inline constexpr std::uint64_t kChunk = 4096;

// Sample moments of the per-unit averages of `metric`, where a unit is one
// realization, or one antithetic pair.
template <class Metric>
Moments unit_moments(const SystemParams& params, const McSettings& mc, Metric&& metric,
                     std::uint64_t& units) {
  const std::uint64_t n = mc.num_realizations;
  units = mc.antithetic ? (n + 1) / 2 : n;
  const std::uint64_t chunks = (units + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Moments m;
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(units, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) {
          double v;
          if (mc.antithetic) {
            const double uh = counter_uniform(mc.master_seed, i, 0);
            const double ug = counter_uniform(mc.master_seed, i, 1);
            const double first = metric(draw(params, uh, ug));
            if (2 * i + 1 < n) {
              v = 0.5 * (first + metric(draw(params, mirrored(uh), mirrored(ug))));
            } else {
              v = first;
            }
          } else {
            v = metric(draw(params, counter_uniform(mc.master_seed, i, 0),
                            counter_uniform(mc.master_seed, i, 1)));
          }
          m.sum += v;
          m.sum_sq += v * v;
        }
        parts[c] = m;
      },
      mc.threads);
  return pairwise_sum(parts);
}

inline void check(const McSettings& mc) {
  if (mc.num_realizations < 1) {
    throw ParameterError("McSettings: num_realizations must be >= 1");
  }
}

}  // namespace detail

/// Realization `index` of the fading process: |h|^2 ~ Exp(lambda_h) and
/// |g|^2 ~ Exp(lambda_g) by inverse CDF, independent of each other.
inline ChannelRealization sample_channel(const SystemParams& params, const McSettings& mc,
                                         std::uint64_t index) {
  if (mc.antithetic) {
    const std::uint64_t base = index / 2;
    double uh = detail::counter_uniform(mc.master_seed, base, 0);
    double ug = detail::counter_uniform(mc.master_seed, base, 1);
    if (index % 2 == 1) {
      uh = detail::mirrored(uh);
      ug = detail::mirrored(ug);
    }
    return detail::draw(params, uh, ug);
  }
  return detail::draw(params, detail::counter_uniform(mc.master_seed, index, 0),
                      detail::counter_uniform(mc.master_seed, index, 1));
}

/// Fraction of realizations with gamma_D below 2^R - 1.
inline McEstimate outage_empirical(const SystemParams& params, const Protocol& protocol,
                                   const McSettings& mc = {}) {
  validate(params);
  detail::check(mc);
  const double threshold = snr_threshold(params.rate);
  std::uint64_t units = 0;
  const detail::Moments m = detail::unit_moments(
      params, mc,
      [&](const ChannelRealization& ch) {
        return instantaneous_snr(params, protocol, ch) < threshold ? 1.0 : 0.0;
      },
      units);
  McEstimate out;
  out.samples = mc.num_realizations;
  out.value = m.sum / static_cast<double>(units);
  if (!mc.antithetic) {
    out.std_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(units));
    out.degenerate_se = units < 2;
  } else if (units >= 2) {
    const double var = std::max(0.0, (m.sum_sq - m.sum * out.value) / static_cast<double>(units - 1));
    out.std_error = std::sqrt(var / static_cast<double>(units));
  } else {
    out.degenerate_se = true;
  }
  return out;
}

/// Sample mean of log2(1 + gamma_D) with its standard error.
inline McEstimate capacity_empirical(const SystemParams& params, const Protocol& protocol,
                                     const McSettings& mc = {}) {
  validate(params);
  detail::check(mc);
  std::uint64_t units = 0;
  const detail::Moments m = detail::unit_moments(
      params, mc,
      [&](const ChannelRealization& ch) {
        return std::log2(1.0 + instantaneous_snr(params, protocol, ch));
      },
      units);
  McEstimate out;
  out.samples = mc.num_realizations;
  out.value = m.sum / static_cast<double>(units);
  if (units >= 2) {
    const double var = std::max(0.0, (m.sum_sq - m.sum * out.value) / static_cast<double>(units - 1));
    out.std_error = std::sqrt(var / static_cast<double>(units));
  } else {
    out.degenerate_se = true;
  }
  return out;
}

}  // namespace ehrelay
