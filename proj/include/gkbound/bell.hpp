#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gkbound/errors.hpp"
#include "gkbound/scalar.hpp"
#include "gkbound/series.hpp"

// Ordinary partial Bell polynomials and the series-reversion backends built
// on them: the direct Bell-coefficient formula, the determinant recurrence,
// and the odd-case specialization. A brute-force partition enumerator serves
// as the independent oracle for everything else.

namespace gkb {

namespace detail {

// DP table of B(i,j) for i <= n, j <= k over a fixed argument vector,
// via the convolution recursion B(i,j) = sum_{t=1}^{i-j+1} x_t B(i-t,j-1),
// B(i,0) = [i == 0]. Row j lives only while row j+1 is being built, but the
// full table is small, so keep it whole; callers index it repeatedly.
template <class S>
std::vector<std::vector<S>> bell_table(int n, int k, const std::vector<S>& xs) {
  std::vector<std::vector<S>> b(static_cast<std::size_t>(k) + 1,
                                std::vector<S>(static_cast<std::size_t>(n) + 1, S(0)));
  b[0][0] = S(1);
  for (int j = 1; j <= k; ++j)
    for (int i = j; i <= n; ++i) {
      S acc(0);
      const int tmax = std::min(i - j + 1, static_cast<int>(xs.size()));
      for (int t = 1; t <= tmax; ++t)
        acc += xs[static_cast<std::size_t>(t - 1)] * b[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - t)];
      b[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = acc;
    }
  return b;
}

}  // namespace detail

// B_{n,k} (ordinary partial Bell polynomial) by the convolution recursion.
template <class S>
S bell_conv(int n, int k, const std::vector<S>& xs) {
  if (n < 0 || k < 0 || k > n) throw DomainError("bell_conv needs 0 <= k <= n");
  if (k == 0) return n == 0 ? S(1) : S(0);
  if (static_cast<int>(xs.size()) < n - k + 1)
    throw ArityError("bell_conv needs " + std::to_string(n - k + 1) + " arguments");
  return detail::bell_table(n, k, xs)[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
}

// Same value by brute force: sum k! x^nu / nu! over all nu with
// sum nu_i = k and sum i nu_i = n. Exponential cost, so n is capped.
template <class S>
S bell_partition_oracle(int n, int k, const std::vector<S>& xs) {
  if (n < 0 || k < 0 || k > n) throw DomainError("partition oracle needs 0 <= k <= n");
  if (n > 30) throw SizeGuard("partition enumeration capped at n = 30");
  if (k == 0) return n == 0 ? S(1) : S(0);
  const int len = n - k + 1;
  if (static_cast<int>(xs.size()) < len)
    throw ArityError("partition oracle needs " + std::to_string(len) + " arguments");
  S total(0);
  // walk positions 1..len, choosing the multiplicity of each part size
  struct Walker {
    const std::vector<S>& xs;
    int len;
    S* total;
    void go(int i, int k_rem, int n_rem, S prod) {
      if (i > len) {
        if (k_rem == 0 && n_rem == 0) *total += prod;
        return;
      }
      const int cap = std::min(k_rem, n_rem / i);
      S p = prod;  // nu_i = 0 term first; 0^0 = 1 keeps zero arguments harmless
      go(i + 1, k_rem, n_rem, p);
      for (int nu = 1; nu <= cap; ++nu) {
        p = p * xs[static_cast<std::size_t>(i - 1)] / S(nu);
        go(i + 1, k_rem - nu, n_rem - i * nu, p);
      }
    }
  } w{xs, len, &total};
  w.go(1, k, n, S(1));
  return total * factorial_checked<S>(k);
}

// The banded matrix whose leading principal minors drive the determinant
// backend: entries ((i-j+1)n + j-1) x_{i-j+1} below and on the diagonal,
// the integer i on the first superdiagonal, zero above it.
template <class S>
std::vector<std::vector<S>> bell_det_matrix(int n, int p, const std::vector<S>& xs) {
  if (p < 0) throw DomainError("negative submatrix size");
  if (static_cast<int>(xs.size()) < p)
    throw ArityError("matrix builder needs " + std::to_string(p) + " arguments");
  std::vector<std::vector<S>> a(static_cast<std::size_t>(p),
                                std::vector<S>(static_cast<std::size_t>(p), S(0)));
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= p; ++j) {
      if (j == i + 1) a[i - 1][j - 1] = S(i);
      else if (j <= i)
        a[i - 1][j - 1] = S((i - j + 1) * n + j - 1) * xs[static_cast<std::size_t>(i - j)];
    }
  return a;
}

// Plain Gaussian elimination with partial pivoting; exact over rationals.
template <class S>
S det_dense(std::vector<std::vector<S>> a) {
  const std::size_t n = a.size();
  S det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (scalar_abs(a[r][c]) > scalar_abs(a[piv][c])) piv = r;
    if (is_zero(a[piv][c])) return S(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(a[r][c])) continue;
      const S f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

// det of the p-th leading principal submatrix, by the recurrence
//   det[p] = (p-1)! sum_{k=1}^{p} (-1)^{p-k} (pn-(k-1)(n-1))/(k-1)! x_{p-k+1} det[k-1],
// det[0] = 1. Returns the whole chain det[0..p].
template <class S>
std::vector<S> det_bnp_chain(int n, int p, const std::vector<S>& xs) {
  if (static_cast<int>(xs.size()) < p)
    throw ArityError("determinant chain needs " + std::to_string(p) + " arguments");
  std::vector<S> dets(static_cast<std::size_t>(p) + 1);
  dets[0] = S(1);
  for (int q = 1; q <= p; ++q) {
    S acc(0);
    S sign(q % 2 == 1 ? 1 : -1);  // (-1)^{q-k} for k = 1, flipped as k grows
    for (int k = 1; k <= q; ++k) {
      const S w = S(q * n - (k - 1) * (n - 1)) / factorial_checked<S>(k - 1);
      acc += sign * w * xs[static_cast<std::size_t>(q - k)] * dets[static_cast<std::size_t>(k - 1)];
      sign = -sign;
    }
    dets[static_cast<std::size_t>(q)] = factorial_checked<S>(q - 1) * acc;
  }
  return dets;
}

template <class S>
S det_bnp(int n, int p, const std::vector<S>& xs) {
  return det_bnp_chain(n, p, xs).back();
}

// Odd-case chain: values of det at even sizes 2, 4, ..., 2r for the matrix
// with interleaved zero arguments,
//   det[2q] = -2(2q-1)! ((2m+1) q x_q + sum_{k<q} (2m(q-k)+q)/(2k)! det[2k] x_{q-k}).
// Returns the chain indexed by q = 0..r with det[0] = 1.
template <class S>
std::vector<S> det_b2m1_chain(int m, int r, const std::vector<S>& xs) {
  if (m < 1 || r < 1 || r > m) throw DomainError("odd determinant needs 1 <= r <= m");
  if (static_cast<int>(xs.size()) < r)
    throw ArityError("odd determinant needs " + std::to_string(r) + " arguments");
  std::vector<S> dets(static_cast<std::size_t>(r) + 1);
  dets[0] = S(1);
  for (int q = 1; q <= r; ++q) {
    S inner = S((2 * m + 1) * q) * xs[static_cast<std::size_t>(q - 1)];
    for (int k = 1; k < q; ++k)
      inner += S(2 * m * (q - k) + q) / factorial_checked<S>(2 * k) *
               dets[static_cast<std::size_t>(k)] * xs[static_cast<std::size_t>(q - k - 1)];
    dets[static_cast<std::size_t>(q)] = S(-2) * factorial_checked<S>(2 * q - 1) * inner;
  }
  return dets;
}

template <class S>
S det_b2m1(int m, int r, const std::vector<S>& xs) {
  return det_b2m1_chain(m, r, xs).back();
}

namespace detail {

template <class S>
void require_invertible(const TruncatedSeries<S>& s) {
  if (!is_zero(s.coeff(0))) throw NotInvertibleAtZero("constant term must vanish");
  if (s.order() < 1 || is_zero(s.coeff(1))) throw NotInvertibleAtZero("linear term must not vanish");
}

// alpha_n / alpha_1 for n = 2..top, as the argument vector x_j = alpha_{j+1}^x.
template <class S>
std::vector<S> standardized_tail(const TruncatedSeries<S>& s, int top) {
  const S a1 = s.coeff(1);
  std::vector<S> xs;
  xs.reserve(static_cast<std::size_t>(top));
  for (int j = 2; j <= top + 1; ++j)
    xs.push_back(j <= s.order() ? s.coeff(j) / a1 : S(0));
  return xs;
}

template <class S>
TruncatedSeries<S> tag_like_input(std::vector<S> beta, const TruncatedSeries<S>& in) {
  const Parity p = in.parity() == Parity::odd ? Parity::odd : Parity::none;
  return TruncatedSeries<S>(std::move(beta), p);
}

}  // namespace detail

// Reversion through the Bell-coefficient formula
//   beta_n = 1/(n a_1^n) sum_{k=1}^{n-1} (-1)^k C(n-1+k,k) B_{n-1,k}(a_2^x,...,a_{n-k+1}^x).
// The binomial guard limits this route to moderate orders; use the odd
// specialization for long odd series.
template <class S>
TruncatedSeries<S> invert_series_bell(const TruncatedSeries<S>& s, int n_max) {
  detail::require_invertible(s);
  if (n_max < 1) throw ArityError("reversion order must be at least 1");
  const S a1 = s.coeff(1);
  const std::vector<S> xs = detail::standardized_tail(s, std::max(n_max - 1, 1));
  const auto table = detail::bell_table(n_max - 1, n_max - 1, xs);
  std::vector<S> beta(static_cast<std::size_t>(n_max) + 1, S(0));
  beta[1] = S(1) / a1;
  S a1_pow = a1;
  for (int n = 2; n <= n_max; ++n) {
    a1_pow *= a1;
    S acc(0);
    S sign(-1);
    for (int k = 1; k <= n - 1; ++k) {
      acc += sign * binomial_checked<S>(n - 1 + k, k) *
             table[static_cast<std::size_t>(k)][static_cast<std::size_t>(n - 1)];
      sign = -sign;
    }
    beta[static_cast<std::size_t>(n)] = acc / (S(n) * a1_pow);
  }
  return detail::tag_like_input(std::move(beta), s);
}

// Reversion through determinants of the banded matrices. The odd-parity
// input routes through the interleaved-zero recurrence, everything else
// through the general chain; both avoid materializing any matrix.
template <class S>
TruncatedSeries<S> invert_series_det(const TruncatedSeries<S>& s, int n_max) {
  detail::require_invertible(s);
  if (n_max < 1) throw ArityError("reversion order must be at least 1");
  const S a1 = s.coeff(1);
  std::vector<S> beta(static_cast<std::size_t>(n_max) + 1, S(0));
  beta[1] = S(1) / a1;

  if (s.parity() == Parity::odd) {
    // beta_{2m+1} = -(a_{2m+1}^x + 1/(2m+1) sum_{r<m} (2(m-r)+1)/(2r)! a_{2(m-r)+1}^x det[2r]) / a_1^{2m+1}
    const int m_max = (n_max - 1) / 2;
    std::vector<S> xs;  // x_k = a_{2k+1}^x
    for (int k = 1; 2 * k + 1 <= n_max; ++k)
      xs.push_back(2 * k + 1 <= s.order() ? s.coeff(2 * k + 1) / a1 : S(0));
    S a1_pow = a1;
    for (int m = 1; m <= m_max; ++m) {
      a1_pow *= a1 * a1;
      const auto dets = m >= 2 ? det_b2m1_chain(m, m - 1, xs) : std::vector<S>{S(1)};
      S acc = xs[static_cast<std::size_t>(m - 1)];
      S corr(0);
      for (int r = 1; r <= m - 1; ++r)
        corr += S(2 * (m - r) + 1) / factorial_checked<S>(2 * r) *
                xs[static_cast<std::size_t>(m - r - 1)] * dets[static_cast<std::size_t>(r)];
      acc += corr / S(2 * m + 1);
      beta[static_cast<std::size_t>(2 * m + 1)] = -acc / a1_pow;
    }
    return detail::tag_like_input(std::move(beta), s);
  }

  const std::vector<S> xs = detail::standardized_tail(s, std::max(n_max - 1, 1));
  S a1_pow = a1;
  S sign(-1);  // (-1)^{n-1} for n = 2
  for (int n = 2; n <= n_max; ++n) {
    a1_pow *= a1;
    const S d = det_bnp(n, n - 1, xs);
    beta[static_cast<std::size_t>(n)] = sign * d / (factorial_checked<S>(n) * a1_pow);
    sign = -sign;
  }
  return detail::tag_like_input(std::move(beta), s);
}

// Odd-series reversion,
//   beta_{2m+1} = 1/((2m+1)! a_1^{2m+1}) sum_{r=1}^{m} (-1)^r (2m+r)!/r! B_{m,r}(a_3^x, a_5^x, ...),
// which sums over partitions of m rather than 2m, so it reaches the
// pipeline's default order within the factorial guard.
template <class S>
TruncatedSeries<S> invert_series_odd(const TruncatedSeries<S>& s, int n_max) {
  if (s.parity() != Parity::odd) throw ParityError("odd reversion needs an odd series");
  detail::require_invertible(s);
  if (n_max < 1) throw ArityError("reversion order must be at least 1");
  const int m_max = (n_max - 1) / 2;
  const S a1 = s.coeff(1);
  std::vector<S> xs;  // x_j = a_{2j+1}^x
  for (int j = 1; j <= std::max(m_max, 1); ++j)
    xs.push_back(2 * j + 1 <= s.order() ? s.coeff(2 * j + 1) / a1 : S(0));
  const auto table = detail::bell_table(m_max, m_max, xs);
  std::vector<S> beta(static_cast<std::size_t>(2 * m_max) + 2, S(0));
  beta[1] = S(1) / a1;
  S a1_pow = a1;
  for (int m = 1; m <= m_max; ++m) {
    a1_pow *= a1 * a1;
    S acc(0);
    S sign(-1);
    for (int r = 1; r <= m; ++r) {
      const S ratio = factorial_checked<S>(2 * m + r) / factorial_checked<S>(r);
      acc += sign * ratio * table[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)];
      sign = -sign;
    }
    beta[static_cast<std::size_t>(2 * m + 1)] = acc / (factorial_checked<S>(2 * m + 1) * a1_pow);
  }
  return TruncatedSeries<S>(std::move(beta), Parity::odd);
}

}  // namespace gkb
