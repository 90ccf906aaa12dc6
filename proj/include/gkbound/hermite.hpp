#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "gkbound/errors.hpp"
#include "gkbound/scalar.hpp"
#include "gkbound/specialfn.hpp"

// Orthonormal probabilist Hermite polynomials (the convention carrying the
// 1/sqrt(n!) factor), their values at zero, the Fourier-Hermite coefficients
// of the catalog functions sign / orthant indicators / Phi / kappa, complex
// Hermite polynomials, and a cached Gauss-Hermite rule for the standard
// Gaussian measure.

namespace gkb {

// three-term recurrence H_{n+1} = (x H_n - sqrt(n) H_{n-1}) / sqrt(n+1)
inline double hermite_eval(int n, double x) {
  if (n < 0) throw DomainError("hermite index must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

// product over coordinates for a multi-index
inline double hermite_eval(const std::vector<int>& m, const std::vector<double>& x) {
  if (m.size() != x.size()) throw DimensionMismatch("index and point dimensions differ");
  double acc = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc *= hermite_eval(m[i], x[i]);
  return acc;
}

// H_{2l}(0) = (-1)^l sqrt((2l-1)!!/(2l)!!), odd orders vanish; the running
// product keeps the value in range for large orders
inline double hermite_zero(int n) {
  if (n < 0) throw DomainError("hermite index must be nonnegative");
  if (n % 2 == 1) return 0.0;
  double sq = 1.0;
  for (int i = 1; 2 * i <= n; ++i) sq *= (2.0 * i - 1.0) / (2.0 * i);
  return (n / 2 % 2 == 0 ? 1.0 : -1.0) * std::sqrt(sq);
}

// <sign, H_n>: zero at even n, and at n = 2l+1 equal to
// (-1)^l sqrt(2/pi) (2l-1)!!/sqrt((2l+1)!), evaluated by a ratio recurrence
// so large orders neither overflow nor lose the leading digits
inline double fh_sign(int n) {
  if (n < 0) throw DomainError("coefficient index must be nonnegative");
  if (n % 2 == 0) return 0.0;
  double w = std::sqrt(2.0 / 3.14159265358979323846);
  for (int l = 1; 2 * l + 1 <= n; ++l)
    w *= -(2.0 * l - 1.0) / std::sqrt(2.0 * l * (2.0 * l + 1.0));
  return w;
}

// <1_orthant, H_m> for the product orthant with one threshold per
// coordinate: upper = true means [t_i, inf) in every coordinate, false means
// (-inf, t_i]; the lower variant picks up a sign per nonzero index entry.
inline double fh_indicator(const std::vector<double>& t, bool upper, const std::vector<int>& m) {
  if (t.size() != m.size()) throw DimensionMismatch("threshold and index dimensions differ");
  double acc = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (m[i] < 0) throw DomainError("coefficient index must be nonnegative");
    if (m[i] == 0) {
      acc *= upper ? 1.0 - normal_cdf(t[i]) : normal_cdf(t[i]);
    } else {
      double f = normal_pdf(t[i]) * hermite_eval(m[i] - 1, t[i]) / std::sqrt(static_cast<double>(m[i]));
      acc *= upper ? f : -f;
    }
  }
  return acc;
}

// <Phi, H_n>: 1/2 at n = 0, zero at even n >= 2, and at n = 2l+1 equal to
// (-1)^l (1/(2 sqrt(pi))) (1/2)^l (2l-1)!!/sqrt((2l+1)!)
inline double fh_phi(int n) {
  if (n < 0) throw DomainError("coefficient index must be nonnegative");
  if (n == 0) return 0.5;
  if (n % 2 == 0) return 0.0;
  double w = 0.5 / std::sqrt(3.14159265358979323846);
  for (int l = 1; 2 * l + 1 <= n; ++l)
    w *= -0.5 * (2.0 * l - 1.0) / std::sqrt(2.0 * l * (2.0 * l + 1.0));
  return w;
}

// kappa = sqrt(3)(2 Phi - 1) is odd with unit Gaussian norm
inline double fh_kappa(int n) {
  if (n < 0) throw DomainError("coefficient index must be nonnegative");
  if (n == 0) return 0.0;
  return 2.0 * std::sqrt(3.0) * fh_phi(n);
}

// H_{m,n}(z,w) = (1/sqrt(m! n!)) sum_j (-1)^j j! C(m,j) C(n,j) z^{m-j} w^{n-j}
inline std::complex<double> complex_hermite(int m, int n, std::complex<double> z,
                                            std::complex<double> w) {
  if (m < 0 || n < 0) throw DomainError("hermite indices must be nonnegative");
  std::complex<double> acc(0.0, 0.0);
  double sign = 1.0;
  for (int j = 0; j <= std::min(m, n); ++j) {
    const double coef = sign * factorial_checked<double>(j) * binomial_checked<double>(m, j) *
                        binomial_checked<double>(n, j);
    acc += coef * std::pow(z, m - j) * std::pow(w, n - j);
    sign = -sign;
  }
  return acc / std::sqrt(factorial_checked<double>(m) * factorial_checked<double>(n));
}

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sums to 1: the rule integrates against d(gamma_1)
};

// Golub-Welsch on the Jacobi matrix of the orthonormal recurrence
// (off-diagonal sqrt(k)), then Newton polish against the recurrence and
// Christoffel-sum weights. The eigenvector route would hand back the tiny
// edge weights with absolute eigen-solver error, which the exploding
// polynomial values at those nodes amplify into visible quadrature error;
// the Christoffel sum 1/sum_k H_k(x)^2 has no cancellation. Built once per
// order and cached.
inline const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  static std::map<int, GaussHermiteRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi,
                                                              Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()(i);
    for (int step = 0; step < 4; ++step) {
      const double d = std::sqrt(static_cast<double>(order)) * hermite_eval(order - 1, x);
      if (d == 0.0) break;
      x -= hermite_eval(order, x) / d;
    }
    double christoffel = 0.0;
    for (int k = 0; k < order; ++k) {
      const double h = hermite_eval(k, x);
      christoffel += h * h;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / christoffel;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace gkb
