#pragma once

// Offline search for the throughput-maximizing harvesting fraction.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ehrelay/parallel.hpp"
#include "ehrelay/throughput.hpp"

namespace ehrelay {

struct OptResult {
  double best_fraction = 0.0;
  double best_throughput = 0.0;
  int evaluations = 0;
  /// Width of the final golden-section interval around best_fraction.
  double bracket_width = 0.0;
  /// Every coarse-grid throughput was zero; best_fraction is then the
  /// smallest grid fraction and carries no information.
  bool flat = false;
  /// Full evaluation at best_fraction.
  ThroughputResult at_best{};
};

inline constexpr int kGridPoints = 99;  // 0.01, 0.02, ..., 0.99

inline double grid_fraction(int i) { return (i + 1) / 100.0; }

/// Maximizes a scalar objective on [0, 1]: scan the 0.01 grid, then refine the
/// bracket around the best grid point by golden-section search until it is
/// narrower than `frac_tol`. Ties go to the smaller fraction.
template <class Objective>
OptResult maximize_fraction(Objective&& objective, double frac_tol = 1e-3, unsigned threads = 0) {
  if (!(frac_tol > 0.0)) {
    throw ParameterError("optimize_fraction: frac_tol must be positive");
  }
  std::array<double, kGridPoints> grid{};
  parallel_for(
      grid.size(), [&](std::size_t i) { grid[i] = objective(grid_fraction(static_cast<int>(i))); },
      threads);

  OptResult out;
  out.evaluations = kGridPoints;
  int best = 0;
  for (int i = 1; i < kGridPoints; ++i) {
    if (grid[i] > grid[best]) best = i;
  }
  out.best_fraction = grid_fraction(best);
  out.best_throughput = grid[best];
  if (grid[best] <= 0.0) {
    out.flat = true;
    out.bracket_width = 0.01;
    return out;
  }

  double lo = best == 0 ? 0.0 : grid_fraction(best - 1);
  double hi = best == kGridPoints - 1 ? 1.0 : grid_fraction(best + 1);
  constexpr double kInvPhi = 1.0 / std::numbers::phi;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  out.evaluations += 2;
  while (hi - lo >= frac_tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
    ++out.evaluations;
  }
  out.bracket_width = hi - lo;
  const double refined = f1 >= f2 ? x1 : x2;
  const double refined_value = std::max(f1, f2);
  if (refined_value > out.best_throughput) {
    out.best_fraction = refined;
    out.best_throughput = refined_value;
  }
  return out;
}

/// Throughput-optimal alpha (TSR) or rho (PSR). Monte-Carlo objectives reuse
/// the same master seed at every fraction (common random numbers).
inline OptResult optimize_fraction(const SystemParams& params, ProtocolKind family,
                                   TransmissionMode mode, Method method,
                                   const EvalOptions& options = {}, double frac_tol = 1e-3,
                                   unsigned threads = 0) {
  validate(params);
  if (family == ProtocolKind::Ideal) {
    throw ParameterError("optimize_fraction: the ideal receiver has no fraction to optimize");
  }
  EvalOptions inner = options;
  // The grid scan is already parallel; keep each Monte-Carlo run on its thread.
  inner.monte_carlo.threads = 1;
  auto objective = [&](double f) {
    return throughput(params, Protocol::of(family, f), mode, method, inner).throughput;
  };
  OptResult out = maximize_fraction(objective, frac_tol, threads);
  out.at_best = throughput(params, Protocol::of(family, out.best_fraction), mode, method, inner);
  return out;
}

}  // namespace ehrelay
