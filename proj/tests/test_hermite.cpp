#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "gkbound/errors.hpp"
#include "gkbound/hermite.hpp"
#include "gkbound/specialfn.hpp"

using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = 3.14159265358979323846;

// composite Simpson rule, the workhorse oracle for the coefficient formulas
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / (2 * panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("normalized recurrence matches the closed low-order forms") {
  CHECK(gkb::hermite_eval(1, 2.5) == 2.5);
  CHECK(gkb::hermite_eval(0, -3.0) == 1.0);
  for (double x = -3.0; x <= 3.0; x += 0.37) {
    CHECK_THAT(gkb::hermite_eval(2, x), WithinAbs((x * x - 1.0) / std::sqrt(2.0), 1e-12));
    CHECK_THAT(gkb::hermite_eval(3, x), WithinAbs((x * x * x - 3.0 * x) / std::sqrt(6.0), 1e-12));
  }
  CHECK_THROWS_AS(gkb::hermite_eval(-1, 0.0), gkb::DomainError);
}

TEST_CASE("values at zero follow the double-factorial ratio") {
  CHECK(gkb::hermite_zero(0) == 1.0);
  CHECK(gkb::hermite_zero(3) == 0.0);
  CHECK_THAT(gkb::hermite_zero(2), WithinAbs(-1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(gkb::hermite_zero(4), WithinAbs(std::sqrt(3.0 / 8.0), 1e-15));
  CHECK_THAT(gkb::hermite_zero(6), WithinAbs(-std::sqrt(15.0 / 48.0), 1e-15));
  for (int n = 0; n <= 30; ++n)
    CHECK_THAT(gkb::hermite_zero(n), WithinAbs(gkb::hermite_eval(n, 0.0), 1e-14));
}

TEST_CASE("parity of the polynomials") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pt(-4.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = pt(rng);
    for (int n = 0; n <= 15; ++n) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      CHECK_THAT(gkb::hermite_eval(n, -x), WithinAbs(sign * gkb::hermite_eval(n, x), 1e-11));
    }
  }
}

TEST_CASE("quadrature rule integrates Gaussian moments and the orthonormality relations") {
  const auto& rule = gkb::gauss_hermite(64);
  REQUIRE(rule.nodes.size() == 64);

  double w_sum = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    w_sum += w;
    m2 += w * x * x;
    m3 += w * x * x * x;
    m4 += w * x * x * x * x;
  }
  CHECK_THAT(w_sum, WithinAbs(1.0, 1e-13));
  CHECK_THAT(m2, WithinAbs(1.0, 1e-12));
  CHECK_THAT(m3, WithinAbs(0.0, 1e-12));
  CHECK_THAT(m4, WithinAbs(3.0, 1e-11));

  for (int m = 0; m <= 20; ++m)
    for (int n = m; n <= 20; ++n) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * gkb::hermite_eval(m, rule.nodes[i]) *
               gkb::hermite_eval(n, rule.nodes[i]);
      CHECK_THAT(acc, WithinAbs(m == n ? 1.0 : 0.0, 1e-10));
    }
}

TEST_CASE("sign coefficients: closed form, quadrature oracle, reconstruction") {
  CHECK_THAT(gkb::fh_sign(1), WithinAbs(std::sqrt(2.0 / kPi), 1e-15));
  CHECK(gkb::fh_sign(0) == 0.0);
  CHECK(gkb::fh_sign(8) == 0.0);
  CHECK_THAT(gkb::fh_sign(3), WithinAbs(-std::sqrt(2.0 / kPi) / std::sqrt(6.0), 1e-15));
  // explicit radical at n = 5 (second odd index after the sign flip)
  CHECK_THAT(gkb::fh_sign(5), WithinAbs(std::sqrt(2.0 / kPi) * 3.0 / std::sqrt(120.0), 1e-15));

  SECTION("numeric integration agrees") {
    for (int n = 1; n <= 9; n += 2) {
      const double numeric =
          2.0 * simpson([n](double x) { return gkb::hermite_eval(n, x) * gkb::normal_pdf(x); },
                        0.0, 9.0, 40000);
      CHECK_THAT(gkb::fh_sign(n), WithinAbs(numeric, 1e-10));
    }
  }

  SECTION("squared coefficients resum to the arcsine curve") {
    const double rho = 0.9;
    double acc = 0.0;
    for (int l = 0; l <= 200; ++l) {
      const double c = gkb::fh_sign(2 * l + 1);
      acc += c * c * std::pow(rho, 2 * l + 1);
    }
    CHECK_THAT(acc, WithinAbs(2.0 / kPi * std::asin(rho), 1e-6));
  }
}

TEST_CASE("orthant indicator coefficients") {
  CHECK_THAT(gkb::fh_indicator({0.0}, true, {1}), WithinAbs(1.0 / std::sqrt(2.0 * kPi), 1e-15));
  CHECK_THAT(gkb::fh_indicator({-37.0}, true, {0}), WithinAbs(1.0, 1e-15));
  CHECK_THAT(gkb::fh_indicator({0.0, 0.0}, false, {1, 0}),
             WithinAbs(-0.5 / std::sqrt(2.0 * kPi), 1e-15));
  CHECK_THROWS_AS(gkb::fh_indicator({0.0, 1.0}, true, {1}), gkb::DimensionMismatch);

  SECTION("one-dimensional factors against numeric integration") {
    for (double a : {-1.1, 0.3, 2.0}) {
      for (int m = 0; m <= 6; ++m) {
        const double upper =
            simpson([m](double x) { return gkb::hermite_eval(m, x) * gkb::normal_pdf(x); }, a,
                    10.0, 60000);
        CHECK_THAT(gkb::fh_indicator({a}, true, {m}), WithinAbs(upper, 1e-9));
        const double lower =
            simpson([m](double x) { return gkb::hermite_eval(m, x) * gkb::normal_pdf(x); },
                    -10.0, a, 60000);
        CHECK_THAT(gkb::fh_indicator({a}, false, {m}), WithinAbs(lower, 1e-9));
      }
    }
  }

  SECTION("multi-coordinate values factor across coordinates") {
    const std::vector<double> t{0.4, -0.9, 1.3};
    const std::vector<int> m{2, 0, 1};
    double prod = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      prod *= gkb::fh_indicator({t[i]}, false, {m[i]});
    // the per-coordinate signs multiply to the global orthant sign
    CHECK_THAT(gkb::fh_indicator(t, false, m), WithinAbs(prod, 1e-15));
  }
}

TEST_CASE("distribution-function coefficients and the kappa norm") {
  CHECK(gkb::fh_phi(0) == 0.5);
  CHECK(gkb::fh_phi(2) == 0.0);
  CHECK(gkb::fh_phi(4) == 0.0);
  CHECK_THAT(gkb::fh_phi(1), WithinAbs(0.5 / std::sqrt(kPi), 1e-15));

  SECTION("numeric integration agrees") {
    for (int n = 1; n <= 7; n += 2) {
      const double numeric = simpson(
          [n](double x) {
            return gkb::normal_cdf(x) * gkb::hermite_eval(n, x) * gkb::normal_pdf(x);
          },
          -10.0, 10.0, 60000);
      CHECK_THAT(gkb::fh_phi(n), WithinAbs(numeric, 1e-9));
    }
  }

  SECTION("kappa is odd with unit norm and slope 3/pi") {
    CHECK(gkb::fh_kappa(0) == 0.0);
    CHECK(gkb::fh_kappa(6) == 0.0);
    CHECK_THAT(gkb::fh_kappa(1) * gkb::fh_kappa(1), WithinAbs(3.0 / kPi, 1e-14));
    double acc = 0.0;
    for (int n = 0; n <= 81; ++n) {
      const double c = gkb::fh_kappa(n);
      acc += c * c;
    }
    CHECK(acc >= 0.999);
    CHECK(acc <= 1.0 + 1e-12);
  }
}

TEST_CASE("complex Hermite polynomials expand correctly") {
  using cplx = std::complex<double>;
  const cplx z(0.3, 0.7), w(-0.4, 0.2);

  CHECK(gkb::complex_hermite(0, 0, z, w) == cplx(1.0, 0.0));
  CHECK(std::abs(gkb::complex_hermite(1, 0, z, std::conj(z)) - z) < 1e-15);

  // H_{1,1}(z, conj z) = |z|^2 - 1; at 1+i the value is 1
  const cplx at = gkb::complex_hermite(1, 1, cplx(1.0, 1.0), cplx(1.0, -1.0));
  CHECK_THAT(at.real(), WithinAbs(1.0, 1e-14));
  CHECK_THAT(at.imag(), WithinAbs(0.0, 1e-14));

  // H_{2,1}(z,w) = (z^2 w - 2 z)/sqrt(2) written out by hand
  const cplx want = (z * z * w - 2.0 * z) / std::sqrt(2.0);
  CHECK(std::abs(gkb::complex_hermite(2, 1, z, w) - want) < 1e-14);

  // swapping the index pair conjugates the value on the diagonal slice
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 4; ++n) {
      const cplx a = gkb::complex_hermite(m, n, z, std::conj(z));
      const cplx b = gkb::complex_hermite(n, m, z, std::conj(z));
      CHECK(std::abs(a - std::conj(b)) < 1e-13);
    }
  CHECK_THROWS_AS(gkb::complex_hermite(-1, 0, z, w), gkb::DomainError);
}

TEST_CASE("multi-index evaluation is the coordinate product") {
  const std::vector<int> m{3, 0, 2};
  const std::vector<double> x{0.5, -1.2, 2.2};
  const double want =
      gkb::hermite_eval(3, 0.5) * gkb::hermite_eval(0, -1.2) * gkb::hermite_eval(2, 2.2);
  CHECK_THAT(gkb::hermite_eval(m, x), WithinAbs(want, 1e-14));
  CHECK_THROWS_AS(gkb::hermite_eval(m, std::vector<double>{1.0}), gkb::DimensionMismatch);
}
