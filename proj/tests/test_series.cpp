#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "gkbound/series.hpp"
#include "gkbound/series_io.hpp"

using gkb::Parity;
using gkb::Rat;
using gkb::TruncatedSeries;

namespace {

constexpr double kPi = 3.14159265358979323846;

// (2/pi) arcsin coefficients a_{2l+1} = (2/pi) q_l / (2l+1), q_l = ((2l-1)!!/(2l)!!).
TruncatedSeries<double> arcsin_series(int order) {
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  double q = 1.0;
  for (int l = 0; 2 * l + 1 <= order; ++l) {
    if (l > 0) q *= (2.0 * l - 1.0) / (2.0 * l);
    c[static_cast<std::size_t>(2 * l + 1)] = (2.0 / kPi) * q / (2.0 * l + 1.0);
  }
  return TruncatedSeries<double>(std::move(c), Parity::odd);
}

// sin(pi y / 2) coefficients (-1)^l (pi/2)^{2l+1} / (2l+1)!.
TruncatedSeries<double> sin_half_pi_series(int order) {
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  double term = kPi / 2.0;
  for (int l = 0; 2 * l + 1 <= order; ++l) {
    if (l > 0) term *= -(kPi / 2.0) * (kPi / 2.0) / ((2.0 * l) * (2.0 * l + 1.0));
    c[static_cast<std::size_t>(2 * l + 1)] = term;
  }
  return TruncatedSeries<double>(std::move(c), Parity::odd);
}

TruncatedSeries<Rat> random_rat_series(std::mt19937_64& rng, int order) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 9);
  std::vector<Rat> c(static_cast<std::size_t>(order) + 1);
  c[0] = Rat(0);
  for (int i = 1; i <= order; ++i) c[static_cast<std::size_t>(i)] = gkb::rat(num(rng), den(rng));
  if (gkb::is_zero(c[1])) c[1] = gkb::rat(1, 2);
  return TruncatedSeries<Rat>(std::move(c));
}

}  // namespace

TEST_CASE("eval sums the partial series") {
  TruncatedSeries<double> zero;
  CHECK(zero.eval(0.7) == 0.0);

  TruncatedSeries<double> quad(std::vector<double>{0.0, 1.0, 1.0});
  CHECK(quad.eval(2.0) == 6.0);

  const auto s = arcsin_series(41);
  for (double x : {0.1, 0.3, 0.5, -0.5}) {
    CHECK_THAT(s.eval(x), Catch::Matchers::WithinAbs((2.0 / kPi) * std::asin(x), 1e-12));
  }

  // Horner agrees with a plain forward sum.
  double forward = 0.0;
  double p = 1.0;
  for (int n = 0; n <= s.order(); ++n, p *= 0.77) forward += s.coeff(n) * p;
  CHECK_THAT(s.eval(0.77), Catch::Matchers::WithinAbs(forward, 1e-15));

  // At the boundary the truncated sum sits below the limit 1 and grows with
  // order; the tail decays like 1/sqrt(degree), so convergence is slow.
  // Reference values from an exact rational sum of the coefficients.
  const double at1_21 = arcsin_series(21).eval(1.0);
  const double at1_41 = s.eval(1.0);
  const double at1_61 = arcsin_series(61).eval(1.0);
  CHECK(at1_41 > at1_21);
  CHECK(at1_61 > at1_41);
  CHECK(at1_61 < 1.0);
  CHECK_THAT(at1_21, Catch::Matchers::WithinAbs(0.8913217823788036, 1e-12));
  CHECK_THAT(at1_41, Catch::Matchers::WithinAbs(0.9214715760960280, 1e-12));
  CHECK_THAT(at1_61, Catch::Matchers::WithinAbs(0.9354057028693842, 1e-12));
}

TEST_CASE("abs_transform flips signs only") {
  TruncatedSeries<double> s(std::vector<double>{1.0, -2.0, 3.0});
  CHECK(s.abs_transform().coeffs() == std::vector<double>{1.0, 2.0, 3.0});

  const auto nonneg = arcsin_series(21);
  CHECK(nonneg.abs_transform().coeffs() == nonneg.coeffs());

  // sin(pi y/2) maps to sinh(pi y/2): check against the library sinh.
  const auto sin_s = sin_half_pi_series(41);
  const auto sinh_s = sin_s.abs_transform();
  CHECK(sinh_s.parity() == Parity::odd);
  CHECK_THAT(sinh_s.eval(1.0), Catch::Matchers::WithinAbs(std::sinh(kPi / 2.0), 1e-12));
  CHECK_THAT(sinh_s.eval(0.4), Catch::Matchers::WithinAbs(std::sinh(0.4 * kPi / 2.0), 1e-13));
}

TEST_CASE("abs_transform majorizes on grids") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> c(11);
    for (auto& v : c) v = coef(rng);
    TruncatedSeries<double> s(std::move(c));
    const auto a = s.abs_transform();
    for (double x = -1.0; x <= 1.0; x += 0.125) {
      CHECK(std::fabs(s.eval(x)) <= a.eval(std::fabs(x)) + 1e-14);
    }
  }
}

TEST_CASE("scale_argument applies the power rule") {
  const auto id = TruncatedSeries<double>::identity(3);
  CHECK(id.scale_argument(3.0).coeff(1) == 3.0);

  const auto s = arcsin_series(21);
  CHECK(s.scale_argument(1.0).coeffs() == s.coeffs());

  TruncatedSeries<double> cubic(std::vector<double>{0.0, 1.0, 0.0, 1.0}, Parity::odd);
  const auto scaled = cubic.scale_argument(2.0);
  CHECK(scaled.coeff(1) == 2.0);
  CHECK(scaled.coeff(3) == 8.0);
  CHECK(scaled.parity() == Parity::odd);

  // Composition of scales.
  const auto s12 = s.scale_argument(0.7).scale_argument(-0.4);
  const auto s3 = s.scale_argument(-0.28);
  for (int n = 0; n <= s.order(); ++n)
    CHECK_THAT(s12.coeff(n), Catch::Matchers::WithinRel(s3.coeff(n), 1e-14));
}

TEST_CASE("scale_argument normalization divides by the abs value") {
  const auto sin_s = sin_half_pi_series(21);
  const double c = 0.6;
  const auto norm = sin_s.scale_argument(c, true);
  const double d = std::sinh(c * kPi / 2.0);
  for (int n = 1; n <= 21; n += 2)
    CHECK_THAT(norm.coeff(n),
               Catch::Matchers::WithinRel(sin_s.coeff(n) * std::pow(c, n) / d, 1e-12));

  TruncatedSeries<double> zero(std::vector<double>(5, 0.0));
  CHECK_THROWS_AS(zero.scale_argument(0.5, true), gkb::NormalizationDegenerate);
}

TEST_CASE("cauchy_product convolves and truncates to the shorter operand") {
  const auto s = arcsin_series(21);
  TruncatedSeries<double> one(std::vector<double>{1.0});
  CHECK(cauchy_product(s, one).order() == 0);

  TruncatedSeries<double> one5(std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const auto u = cauchy_product(s, one5);
  CHECK(u.order() == 5);
  for (int n = 0; n <= 5; ++n) CHECK(u.coeff(n) == s.coeff(n));

  // Exact polynomials may ask for the full convolution order.
  TruncatedSeries<double> x(std::vector<double>{0.0, 1.0}, Parity::odd);
  const auto x2 = cauchy_product(x, x, 2);
  CHECK(x2.coeffs() == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(x2.parity() == Parity::even);
  CHECK(cauchy_product(x, x).order() == 1);  // default stays at the min

  // Multiplying by the constant-one polynomial at full order gives s back.
  TruncatedSeries<double> one0(std::vector<double>{1.0});
  const auto full = cauchy_product(s, one0, s.order());
  CHECK(full.coeffs() == s.coeffs());

  const auto sq = cauchy_product(s, s);
  CHECK_THAT(sq.coeff(2), Catch::Matchers::WithinAbs((2.0 / kPi) * (2.0 / kPi), 1e-15));
  CHECK(sq.parity() == Parity::even);
}

TEST_CASE("revert_oracle recovers signed Catalan numbers") {
  TruncatedSeries<Rat> s(std::vector<Rat>{Rat(0), Rat(1), Rat(1)});
  const auto g = revert_oracle(s, 12);
  // Catalan numbers by their recurrence, signs alternating.
  std::vector<Rat> catalan{Rat(1)};
  for (int n = 1; n < 12; ++n) {
    Rat c(0);
    for (int i = 0; i < n; ++i) c += catalan[static_cast<std::size_t>(i)] * catalan[static_cast<std::size_t>(n - 1 - i)];
    catalan.push_back(c);
  }
  for (int n = 1; n <= 12; ++n) {
    const Rat want = (n % 2 == 1 ? catalan[static_cast<std::size_t>(n - 1)] : -catalan[static_cast<std::size_t>(n - 1)]);
    CHECK(g.coeff(n) == want);
  }
}

TEST_CASE("revert_oracle inverts the arcsin series to the sine series") {
  // At moderate order the coefficients come out essentially exact.
  {
    const auto g = revert_oracle(arcsin_series(21), 21);
    const auto want = sin_half_pi_series(21);
    for (int n = 1; n <= 21; n += 2)
      CHECK_THAT(g.coeff(n), Catch::Matchers::WithinAbs(want.coeff(n), 1e-12));
  }
  // At order 41 the triangular solve cancels summands of order one down to
  // coefficients below 1e-30, so only absolute accuracy survives in doubles.
  // The composition residual stays tight, which is what the bound pipeline
  // actually consumes; evaluation inside the unit disk damps the noise.
  {
    const auto g = revert_oracle(arcsin_series(41), 41, 1e-11);
    const auto want = sin_half_pi_series(41);
    for (int n = 1; n <= 41; n += 2)
      CHECK_THAT(g.coeff(n), Catch::Matchers::WithinAbs(want.coeff(n), 5e-9));
    for (int n = 1; n <= 11; n += 2)
      CHECK_THAT(g.coeff(n), Catch::Matchers::WithinRel(want.coeff(n), 1e-9));
  }
}

TEST_CASE("revert_oracle handles linear series and rejects bad input") {
  TruncatedSeries<double> lin(std::vector<double>{0.0, 4.0, 0.0});
  const auto g = revert_oracle(lin, 2);
  CHECK(g.coeff(1) == 0.25);
  CHECK(g.coeff(2) == 0.0);

  TruncatedSeries<double> shifted(std::vector<double>{0.5, 1.0});
  CHECK_THROWS_AS(revert_oracle(shifted, 3), gkb::NotInvertibleAtZero);
  TruncatedSeries<double> degenerate(std::vector<double>{0.0, 0.0, 1.0});
  CHECK_THROWS_AS(revert_oracle(degenerate, 3), gkb::NotInvertibleAtZero);
}

TEST_CASE("reversion round trip is exact in rational mode") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 8; ++rep) {
    const auto s = random_rat_series(rng, 10);
    const auto g = revert_oracle(s, 10);
    const auto back = compose_truncated(s, g, 10);
    for (int n = 0; n <= 10; ++n) CHECK(back.coeff(n) == (n == 1 ? Rat(1) : Rat(0)));
  }
}

TEST_CASE("reversion round trip stays tight in floating mode") {
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> c(25);
  for (auto& v : c) v = coef(rng);
  c[0] = 0.0;
  c[1] = 1.5;
  TruncatedSeries<double> s(std::move(c));
  const auto g = revert_oracle(s, 24, 1e-12);
  const auto back = compose_truncated(s, g, 24);
  for (int n = 0; n <= 24; ++n)
    CHECK_THAT(back.coeff(n), Catch::Matchers::WithinAbs(n == 1 ? 1.0 : 0.0, 1e-12));
}

TEST_CASE("reversion keeps parity") {
  // Untagged odd input: the solve itself must leave even degrees at zero.
  std::vector<double> c(18, 0.0);
  c[1] = 1.0; c[3] = -0.3; c[5] = 0.11; c[7] = 0.05; c[9] = -0.02;
  TruncatedSeries<double> odd_untagged(c);  // parity none on purpose
  const auto g = revert_oracle(odd_untagged, 17);
  for (int n = 0; n <= 17; n += 2) CHECK(std::fabs(g.coeff(n)) < 1e-14);

  TruncatedSeries<double> odd_tagged(c, Parity::odd);
  CHECK(revert_oracle(odd_tagged, 17).parity() == Parity::odd);

  // Exactness of the even-degree zeros in rational mode.
  std::vector<Rat> rc(12, Rat(0));
  rc[1] = gkb::rat(2, 3); rc[3] = gkb::rat(-1, 5); rc[5] = gkb::rat(7, 2); rc[7] = Rat(1);
  const auto rg = revert_oracle(TruncatedSeries<Rat>(rc), 11);
  for (int n = 0; n <= 11; n += 2) CHECK(gkb::is_zero(rg.coeff(n)));
}

TEST_CASE("parity tags are validated and products follow the parity algebra") {
  CHECK_THROWS_AS(TruncatedSeries<double>(std::vector<double>{1.0, 1.0}, Parity::odd),
                  gkb::ParityError);
  CHECK_THROWS_AS(TruncatedSeries<double>(std::vector<double>{0.0, 1.0}, Parity::even),
                  gkb::ParityError);

  TruncatedSeries<double> odd(std::vector<double>{0.0, 1.0, 0.0, 2.0}, Parity::odd);
  TruncatedSeries<double> even(std::vector<double>{1.0, 0.0, 3.0, 0.0}, Parity::even);
  CHECK(cauchy_product(odd, even).parity() == Parity::odd);
  CHECK(cauchy_product(even, even).parity() == Parity::even);
  CHECK(cauchy_product(odd, odd).parity() == Parity::even);
}

TEST_CASE("series JSON and CSV round trip") {
  const auto s = arcsin_series(13);
  const auto j = gkb::series_to_json(s);
  CHECK(j["order"] == 13);
  CHECK(j["parity"] == "odd");
  const auto back = gkb::series_from_json(j);
  CHECK(back.order() == 13);
  CHECK(back.parity() == Parity::odd);
  CHECK(back.coeffs() == s.coeffs());

  std::stringstream csv;
  gkb::write_series_csv(csv, s);
  const auto from_csv = gkb::read_series_csv(csv);
  CHECK(from_csv.order() == 13);
  CHECK(from_csv.coeffs() == s.coeffs());

  nlohmann::json bad = {{"order", 3}, {"coeffs", {0.0, 1.0}}};
  CHECK_THROWS_AS(gkb::series_from_json(bad), gkb::ArityError);
}
