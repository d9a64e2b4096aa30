#pragma once

// Modified Bessel functions K0/K1 and adaptive Gauss-Kronrod quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ehrelay/model.hpp"

namespace ehrelay {

/// exp(x) with arguments below the double range flushed to exactly 0.
/// Also maps -inf (and NaN from inf-inf at an integrable endpoint) to 0.
inline double clamped_exp(double x) {
  if (!(x > -745.0)) {
    return 0.0;
  }
  return std::exp(x);
}

namespace detail {

struct BesselPair {
  double k0;
  double k1;
};

// Ascending series, accurate for 0 < x <= 2.
inline BesselPair bessel_k01_series(double x) {
  constexpr double kEuler = std::numbers::egamma;
  const double y = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  // term = y^k / (k!)^2 for K0, y^k / (k! (k+1)!) for K1
  double t0 = 1.0, t1 = 1.0;
  double harmonic = 0.0;  // H_k
  double i0 = 1.0, i1_over_half_x = 1.0;
  double s0 = 0.0;
  double s1 = -2.0 * kEuler + 1.0;  // psi(1) + psi(2)
  for (int k = 1; k < 60; ++k) {
    t0 *= y / (static_cast<double>(k) * k);
    t1 *= y / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    const double psi_sum = -2.0 * kEuler + 2.0 * harmonic + 1.0 / (k + 1);
    i0 += t0;
    i1_over_half_x += t1;
    s0 += t0 * harmonic;
    s1 += t1 * psi_sum;
    if (t0 < 1e-18 * i0 && t1 < 1e-18 * i1_over_half_x) {
      break;
    }
  }
  const double i1 = 0.5 * x * i1_over_half_x;
  BesselPair out;
  out.k0 = -(log_half + kEuler) * i0 + s0;
  out.k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
  return out;
}

// Steed's continued fraction (CF2) for K_0 and K_1, x > 2.
inline BesselPair bessel_k01_cf2(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) {
      break;
    }
  }
  h *= a1;
  BesselPair out;
  out.k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * clamped_exp(-x) / s;
  out.k1 = out.k0 * (x + 0.5 - h) / x;
  return out;
}

inline BesselPair bessel_k01(double x) {
  if (!(x > 0.0)) {
    throw ParameterError("bessel_k: argument must be positive");
  }
  return x <= 2.0 ? bessel_k01_series(x) : bessel_k01_cf2(x);
}

}  // namespace detail

/// Modified Bessel function of the second kind, order 0.
inline double bessel_k0(double x) { return detail::bessel_k01(x).k0; }

/// Modified Bessel function of the second kind, order 1.
inline double bessel_k1(double x) { return detail::bessel_k01(x).k1; }

/// x * K1(x), continuous at 0 where it equals 1.
inline double x_bessel_k1(double x) {
  if (x == 0.0) {
    return 1.0;
  }
  return x * bessel_k1(x);
}

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  void check() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1) {
      throw ParameterError("QuadratureSettings: tolerances must be positive, max_subdivisions >= 1");
    }
  }

  /// Same settings with both tolerances scaled by `factor`.
  QuadratureSettings tightened(double factor) const {
    QuadratureSettings out = *this;
    out.rel_tol /= factor;
    out.abs_tol /= factor;
    return out;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
};

template <class F>
Segment gauss_kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);
  double result_k = f_center * kWgk[7];
  double result_g = f_center * kWg[3];
  double result_abs = std::abs(result_k);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    result_k += kWgk[j] * sum;
    result_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) {
      result_g += kWg[j / 2] * sum;
    }
  }
  const double mean = 0.5 * result_k;
  double result_asc = kWgk[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j) {
    result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  result_k *= half;
  result_abs *= std::abs(half);
  result_asc *= std::abs(half);
  double err = std::abs((result_k - result_g * half));
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * result_abs, err);
  }
  return Segment{lo, hi, result_k, err};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod integration of `f` over [lo, hi].
/// Stops once the summed error estimate is below max(abs_tol, rel_tol*|I|);
/// if `max_subdivisions` is reached first, the partial value is returned with
/// `converged == false`.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureSettings& settings = {}) {
  settings.check();
  QuadratureResult out;
  if (lo == hi) {
    return out;
  }
  auto by_error = [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; };
  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(settings.max_subdivisions) + 1);
  heap.push_back(detail::gauss_kronrod15(f, lo, hi));
  out.evaluations = 15;
  double total = heap.front().value;
  double error = heap.front().error;
  while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= settings.max_subdivisions) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at machine precision.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      out.converged = false;
      break;
    }
    const detail::Segment left = detail::gauss_kronrod15(f, worst.lo, mid);
    const detail::Segment right = detail::gauss_kronrod15(f, mid, worst.hi);
    out.evaluations += 30;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Re-sum rather than update incrementally so the result does not drift.
    total = 0.0;
    error = 0.0;
    for (const auto& s : heap) {
      total += s.value;
      error += s.error;
    }
  }
  out.value = total;
  out.abs_error = error;
  out.subdivisions = static_cast<int>(heap.size());
  return out;
}

/// Integral of `f` over [lower, inf). The domain is mapped onto [0, 1) with
/// z = lower + scale * t / (1 - t); `scale` should be the length over which
/// the integrand varies. The endpoints t = 0 and t = 1 are never evaluated.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double lower, const QuadratureSettings& settings = {},
                                         double scale = 1.0) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("integrate_semi_infinite: scale must be positive and finite");
  }
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double z = lower + scale * t / one_minus;
    if (!std::isfinite(z)) {
      return 0.0;
    }
    const double v = f(z);
    return v == 0.0 ? 0.0 : v * scale / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, settings);
}

}  // namespace ehrelay
