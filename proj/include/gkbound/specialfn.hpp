#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "gkbound/errors.hpp"

// Scalar special functions: gamma at half-integer arguments, double
// factorials, the Gaussian hypergeometric series on [-1,1] for half-integer
// parameters, the moment constants c_k, Catalan numbers, and the standard
// normal density / distribution / quantile.

namespace gkb {

// n!! with the conventions (-1)!! = 0!! = 1.
inline double double_factorial(int n) {
  if (n < -1) throw DomainError("double factorial needs n >= -1");
  double acc = 1.0;
  for (int k = n; k >= 2; k -= 2) acc *= k;
  return acc;
}

// Argument n/2 stored as the integer n, so the half-integer grid is exact.
struct HalfInt {
  int twice_value;
};

// Gamma(n/2) = (n-2)!! / sqrt(2)^{n-2} * b_n with b_n = 1 for even n and
// sqrt(pi/2) for odd n. Stays on the half-integer grid, no libm gamma.
inline double gamma_half(int twice_value) {
  if (twice_value < 1) throw DomainError("gamma argument must be positive");
  const double b = twice_value % 2 == 0 ? 1.0 : std::sqrt(3.14159265358979323846 / 2.0);
  return double_factorial(twice_value - 2) / std::pow(std::sqrt(2.0), twice_value - 2) * b;
}

inline double gamma_half(HalfInt h) { return gamma_half(h.twice_value); }

namespace detail {

// round a parameter to the half-integer grid, rejecting anything off it
inline int to_twice(double v, const char* what) {
  const double t = v * 2.0;
  const double r = std::nearbyint(t);
  if (std::abs(t - r) > 1e-12 || std::abs(r) > 1e9)
    throw DomainError(std::string(what) + " must be a half-integer");
  return static_cast<int>(r);
}

}  // namespace detail

// Gaussian hypergeometric partial sum for half-integer parameters and
// |x| <= 1. At x = 1 the Gauss summation theorem replaces the series, which
// would converge too slowly there; elsewhere terms are added until the
// relative increment drops below 1e-15 twice in a row.
inline double hyp2f1(double a, double b, double c, double x) {
  const int tc = detail::to_twice(c, "third parameter");
  detail::to_twice(a, "first parameter");
  detail::to_twice(b, "second parameter");
  if (tc <= 0 && tc % 2 == 0) throw ParameterPole("third parameter is a non-positive integer");
  if (std::abs(x) > 1.0 + 1e-15) throw DomainError("argument outside [-1,1]");
  if (std::abs(std::abs(x) - 1.0) <= 1e-15) {
    if (c <= a + b) throw DivergentAtBoundary("series diverges at the boundary");
    if (x > 0.0) {
      // Gauss closed form; reciprocal handles poles of the denominator gammas
      auto recip = [](double v) {
        const int t = detail::to_twice(v, "gamma argument");
        return t < 1 ? 0.0 : 1.0 / gamma_half(t);
      };
      return gamma_half(tc) * gamma_half(detail::to_twice(c - a - b, "exponent")) *
             recip(c - a) * recip(c - b);
    }
  }
  double term = 1.0, sum = 1.0;
  int calm = 0;
  for (int n = 0; n < 1000000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * x;
    sum += term;
    if (std::abs(term) <= 1e-15 * std::abs(sum)) {
      if (++calm >= 2) return sum;
    } else {
      calm = 0;
    }
  }
  throw DomainError("hypergeometric series did not converge within the term cap");
}

// c_k = sqrt(2/k) Gamma((k+1)/2) / Gamma(k/2), the mean absolute value of
// one coordinate of a k-dimensional unit-variance Gaussian direction.
inline double c_k(int k) {
  if (k < 1) throw DomainError("c_k needs k >= 1");
  return std::sqrt(2.0 / k) * gamma_half(k + 1) / gamma_half(k);
}

// exact Catalan numbers; the 128-bit intermediate keeps the recurrence exact
// up to the long-long range
inline long long catalan(int n) {
  if (n < 0) throw DomainError("catalan index must be nonnegative");
  if (n > 35) throw SizeGuard("catalan overflows 64 bits beyond n = 35");
  __int128 c = 1;
  for (int i = 0; i < n; ++i) c = c * (4 * i + 2) / (i + 2);
  return static_cast<long long>(c);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Phi(x) = erfc(-x/sqrt(2))/2; libm's erfc is correctly rounded to well
// under the 1e-12 budget and avoids cancellation in the lower tail.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline std::pair<double, double> std_normal(double x) {
  return {normal_pdf(x), normal_cdf(x)};
}

// quantile by bracketing bisection followed by Newton polish
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile needs p in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double step = (normal_cdf(x) - p) / normal_pdf(x);
    x -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return x;
}

}  // namespace gkb
