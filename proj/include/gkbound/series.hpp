#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gkbound/errors.hpp"
#include "gkbound/scalar.hpp"

namespace gkb {

enum class Parity { none, odd, even };

inline const char* parity_name(Parity p) {
  switch (p) {
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    default: return "none";
  }
}

inline Parity parity_from_name(const std::string& s) {
  if (s == "odd") return Parity::odd;
  if (s == "even") return Parity::even;
  if (s == "none") return Parity::none;
  throw ParityError("unknown parity tag: " + s);
}

// Parity of a product of two series with the given parities.
inline Parity product_parity(Parity a, Parity b) {
  if (a == Parity::none || b == Parity::none) return Parity::none;
  return a == b ? Parity::even : Parity::odd;
}

/**
 * One truncated Maclaurin series: coefficients a_0..a_N plus parity and a
 * convergence-radius marker. The radius is metadata only, nothing enforces
 * it; abs-series get evaluated exactly at the boundary on purpose.
 *
 * Values are immutable after construction, so sharing across threads is safe.
 */
template <class S>
class TruncatedSeries {
 public:
  TruncatedSeries() : coeffs_(1, S(0)) {}

  explicit TruncatedSeries(std::vector<S> coeffs, Parity parity = Parity::none,
                           double radius = 1.0)
      : coeffs_(std::move(coeffs)), parity_(parity), radius_(radius) {
    if (coeffs_.empty()) coeffs_.assign(1, S(0));
    for (const S& c : coeffs_)
      if (!is_finite_scalar(c)) throw DomainError("non-finite series coefficient");
    if (!(radius_ > 0.0)) throw DomainError("series radius must be positive");
    check_parity();
  }

  // x as a series of the given truncation order.
  static TruncatedSeries identity(int order) {
    std::vector<S> c(static_cast<std::size_t>(std::max(order, 1)) + 1, S(0));
    c[1] = S(1);
    return TruncatedSeries(std::move(c), Parity::odd);
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  Parity parity() const { return parity_; }
  double radius() const { return radius_; }
  const std::vector<S>& coeffs() const { return coeffs_; }

  const S& coeff(int n) const {
    if (n < 0 || n > order()) throw ArityError("coefficient index out of range");
    return coeffs_[static_cast<std::size_t>(n)];
  }

  // Horner evaluation of the partial sum.
  S eval(const S& x) const {
    S acc = coeffs_.back();
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
  }

  // Coefficient-wise absolute value; majorizes the series on [0, radius].
  TruncatedSeries abs_transform() const {
    std::vector<S> c(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] = scalar_abs(coeffs_[i]);
    return TruncatedSeries(std::move(c), parity_, radius_);
  }

  // a_n -> a_n c^n, i.e. s(c x). With normalize set the result is divided by
  // eval(abs_transform(), c), the canonical normalization of the pipeline.
  TruncatedSeries scale_argument(const S& c, bool normalize = false) const {
    if (!is_finite_scalar(c)) throw DomainError("scale factor must be finite");
    std::vector<S> out(coeffs_.size());
    S p(1);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      out[i] = coeffs_[i] * p;
      p = p * c;
    }
    if (normalize) {
      const S d = abs_transform().eval(c);
      if (is_zero(d))
        throw NormalizationDegenerate("abs-series vanishes at the scale point");
      for (S& v : out) v = v / d;
    }
    const double ac = std::fabs(to_double(c));
    const double r = ac == 0.0 ? std::numeric_limits<double>::infinity() : radius_ / ac;
    return TruncatedSeries(std::move(out), parity_, r);
  }

 private:
  void check_parity() const {
    if (parity_ == Parity::none) return;
    const int bad = parity_ == Parity::odd ? 0 : 1;
    for (std::size_t i = bad; i < coeffs_.size(); i += 2)
      if (!is_zero(coeffs_[i]))
        throw ParityError(std::string("coefficient ") + std::to_string(i) +
                          " violates declared " + parity_name(parity_) + " parity");
  }

  std::vector<S> coeffs_;
  Parity parity_ = Parity::none;
  double radius_ = 1.0;
};

// Cauchy product. By default the result is truncated to the shorter
// operand, the honest order for products of truncated series: coefficients
// past it would silently miss contributions that were never computed.
// Pass result_order (up to the order sum) when the operands are exact
// polynomials and the full convolution is wanted.
template <class S>
TruncatedSeries<S> cauchy_product(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b,
                                  int result_order = -1) {
  const int n = result_order < 0 ? std::min(a.order(), b.order())
                                 : std::min(result_order, a.order() + b.order());
  std::vector<S> c(static_cast<std::size_t>(n) + 1, S(0));
  for (int i = 0; i <= std::min(n, a.order()); ++i)
    for (int j = 0; i + j <= n && j <= b.order(); ++j)
      c[static_cast<std::size_t>(i + j)] += a.coeff(i) * b.coeff(j);
  return TruncatedSeries<S>(std::move(c), product_parity(a.parity(), b.parity()),
                            std::min(a.radius(), b.radius()));
}

// Coefficients of outer(inner(y)) through degree n. inner must have no
// constant term, otherwise the composition needs all outer coefficients.
template <class S>
TruncatedSeries<S> compose_truncated(const TruncatedSeries<S>& outer,
                                     const TruncatedSeries<S>& inner, int n) {
  if (!is_zero(inner.coeff(0)))
    throw DomainError("composition needs a vanishing inner constant term");
  if (n < 0) throw ArityError("negative composition order");
  n = std::min(n, inner.order());
  const std::size_t len = static_cast<std::size_t>(n) + 1;
  // Horner in the outer coefficients: acc <- acc * inner + a_k, truncated.
  std::vector<S> acc(len, S(0));
  const int top = std::min(outer.order(), n);
  for (int k = top; k >= 0; --k) {
    std::vector<S> next(len, S(0));
    for (int i = 1; i <= n; ++i) {
      if (i > inner.order()) break;
      if (is_zero(inner.coeff(i))) continue;
      for (int j = 0; i + j <= n; ++j)
        if (!is_zero(acc[static_cast<std::size_t>(j)]))
          next[static_cast<std::size_t>(i + j)] +=
              acc[static_cast<std::size_t>(j)] * inner.coeff(i);
    }
    next[0] += outer.coeff(k);
    acc = std::move(next);
  }
  Parity p = Parity::none;
  if (inner.parity() == Parity::odd) p = outer.parity();
  else if (inner.parity() == Parity::even && outer.parity() != Parity::none)
    p = Parity::even;
  return TruncatedSeries<S>(std::move(acc), p, inner.radius());
}

namespace detail {

inline bool reversion_residual_ok(const Rat& r, double) { return sgn(r) == 0; }
inline bool reversion_residual_ok(double r, double tol) { return std::fabs(r) <= tol; }

}  // namespace detail

// Compositional inversion by the triangular solve of s(g(y)) = y, degree by
// degree. Independent of the Bell and determinant backends, hence usable as
// an oracle against them. The defining identity is re-checked before
// returning: exactly in rational mode, to check_tol in floating mode.
template <class S>
TruncatedSeries<S> revert_oracle(const TruncatedSeries<S>& s, int n,
                                 double check_tol = 1e-12) {
  if (n < 1) throw ArityError("reversion order must be at least 1");
  if (!is_zero(s.coeff(0)))
    throw NotInvertibleAtZero("constant term must vanish");
  if (s.order() < 1 || is_zero(s.coeff(1)))
    throw NotInvertibleAtZero("linear term must not vanish");

  const S a1 = s.coeff(1);
  std::vector<S> g(static_cast<std::size_t>(n) + 1, S(0));
  g[1] = S(1) / a1;
  for (int m = 2; m <= n; ++m) {
    // Composition through degree m with g_m still unknown (set to zero);
    // the unknown only enters degree m through the linear term a_1 g_m.
    TruncatedSeries<S> partial(std::vector<S>(g.begin(), g.begin() + m + 1));
    const S t = compose_truncated(s, partial, m).coeff(m);
    g[static_cast<std::size_t>(m)] = -t / a1;
  }

  Parity p = Parity::none;
  if (s.parity() == Parity::odd) {
    // The solve produces exact zeros at even degrees; tag the result odd.
    p = Parity::odd;
    for (std::size_t i = 0; i < g.size(); i += 2) g[i] = S(0);
  }
  TruncatedSeries<S> out(std::move(g), p);

  const TruncatedSeries<S> check = compose_truncated(s, out, n);
  for (int m = 0; m <= n; ++m) {
    const S want = m == 1 ? S(1) : S(0);
    if (!detail::reversion_residual_ok(check.coeff(m) - want, check_tol))
      throw DomainError("reversion self-check failed at degree " + std::to_string(m));
  }
  return out;
}

}  // namespace gkb
