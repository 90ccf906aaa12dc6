#pragma once

#include <cmath>
#include <string>

#include <gmpxx.h>

#include "gkbound/errors.hpp"

namespace gkb {

// Exact scalar backend. Identity tests and the beta-table run on Rat;
// the floating pipeline runs on plain double. The two are never mixed
// inside one computation.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline double to_double(const Rat& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline Rat scalar_abs(const Rat& q) { return abs(q); }
inline double scalar_abs(double x) { return std::fabs(x); }

inline bool is_zero(const Rat& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }

inline bool is_finite_scalar(const Rat&) { return true; }
inline bool is_finite_scalar(double x) { return std::isfinite(x); }

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "double";
};

template <>
struct ScalarTraits<Rat> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
};

// Factorials and binomials in the active scalar type. Arguments above 64
// are refused: the reversion formulas grow factorially and a silent double
// overflow would poison every bound downstream.
inline constexpr int kFactorialGuard = 64;

template <class S>
S factorial_checked(int n) {
  if (n < 0) throw DomainError("factorial of negative integer");
  if (n > kFactorialGuard) throw SizeGuard("factorial beyond guard of 64");
  S acc(1);
  for (int i = 2; i <= n; ++i) acc *= S(i);
  return acc;
}

template <class S>
S binomial_checked(int n, int k) {
  if (n < 0) throw DomainError("binomial with negative upper index");
  if (n > kFactorialGuard) throw SizeGuard("binomial beyond guard of 64");
  if (k < 0 || k > n) return S(0);
  if (k > n - k) k = n - k;
  // Multiplicative form, exact in both backends for n <= 64.
  S acc(1);
  for (int i = 1; i <= k; ++i) {
    acc *= S(n - k + i);
    acc /= S(i);
  }
  return acc;
}

}  // namespace gkb
