#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gkbound/bell.hpp"
#include "gkbound/errors.hpp"
#include "gkbound/hermite.hpp"
#include "gkbound/scalar.hpp"
#include "gkbound/series.hpp"
#include "gkbound/specialfn.hpp"

// The bound pipeline: correlation-function series h(rho) = sum p_nu rho^nu
// for the catalog of generating functions, a Schoenberg-style plausibility
// check, series reversion behind three interchangeable backends, and the
// abs-series root machinery that turns a reverted series into the upper
// estimate sup_norm_sq / c*.
//
// Numerical layout: every catalog coefficient factors as p_nu =
// scale * shape(nu) with shape exactly rational and a single transcendental
// scale (2/pi, pi/4, 3/pi, c_k^2). Reversion runs on the rational shape, so
// it is bit-exact at any order, and only the final rescale
// beta_n = shape_beta_n * scale^{-n} leaves exact arithmetic. Reverting the
// double-valued series directly would scramble the high-order coefficients:
// the triangular structure amplifies rounding by orders of magnitude past
// degree ~11, which the sign check and the tail indicator must not inherit.

namespace gkb {

enum class InvertBackend { bell, det, oracle };

inline const char* backend_name(InvertBackend b) {
  switch (b) {
    case InvertBackend::bell: return "bell";
    case InvertBackend::det: return "det";
    default: return "oracle";
  }
}

inline InvertBackend backend_from_name(const std::string& s) {
  if (s == "bell") return InvertBackend::bell;
  if (s == "det") return InvertBackend::det;
  if (s == "oracle") return InvertBackend::oracle;
  throw DomainError("unknown reversion backend: " + s);
}

// One entry of the bound catalog. l2_norm_sq is the full coefficient mass
// r = h(1), sup_norm_sq the squared sup norm of the generating function.
// cra_assumed marks entries whose inverse-series regularity is taken on
// faith rather than derived; reports propagate the flag so callers can warn.
struct CcpDescriptor {
  std::string name;
  double l2_norm_sq = 1.0;
  double sup_norm_sq = 1.0;
  Parity parity = Parity::odd;
  double scale = 1.0;
  std::function<Rat(int)> shape;
  bool cra_assumed = false;

  double coeff(int nu) const {
    if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
    return scale * to_double(shape(nu));
  }
};

namespace detail {

// ((2l-1)!!)^2 / (2l+1)! at degree 2l+1: the arcsine coefficient mass,
// assembled from its factorial pieces.
inline Rat grothendieck_shape(int nu) {
  if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
  if (nu % 2 == 0) return Rat(0);
  Rat acc(1);
  for (int j = 3; j <= nu - 2; j += 2) acc *= j * j;
  for (int j = 2; j <= nu; ++j) acc /= j;
  return acc;
}

// 2 ((nu-2)!!)^2 / (((nu-1)!!)^2 (nu+1)) at odd nu, normalized so the
// linear term is 1.
inline Rat haagerup_shape(int nu) {
  if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
  if (nu % 2 == 0) return Rat(0);
  Rat acc = rat(2, nu + 1);
  for (int j = 3; j <= nu - 2; j += 2) acc *= j * j;
  for (int j = 2; j <= nu - 1; j += 2) acc /= j * j;
  return acc;
}

// Coefficients of x * 2F1(1/2, 1/2, (k+2)/2; x^2): successive odd terms
// carry the exact ratio (2l-1)^2 / (2l (2l+k)).
inline Rat fk_shape(int k, int nu) {
  if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
  if (nu % 2 == 0) return Rat(0);
  Rat acc(1);
  for (int l = 1; 2 * l + 1 <= nu; ++l)
    acc *= rat((2 * l - 1) * (2 * l - 1), 2 * l * (2 * l + k));
  return acc;
}

// arcsin(x/2) mass relative to its linear term: each step picks up the
// arcsine ratio divided by 4.
inline Rat kappa_shape(int nu) {
  if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
  if (nu % 2 == 0) return Rat(0);
  Rat acc(1);
  for (int l = 1; 2 * l + 1 <= nu; ++l)
    acc *= rat((2 * l - 1) * (2 * l - 1), 8 * l * (2 * l + 1));
  return acc;
}

}  // namespace detail

inline CcpDescriptor catalog_fk(int k) {
  if (k < 1) throw DomainError("fk dimension must be at least 1");
  const double ck = c_k(k);
  CcpDescriptor d;
  d.name = "fk(" + std::to_string(k) + ")";
  d.l2_norm_sq = 1.0;
  d.sup_norm_sq = static_cast<double>(k);
  d.parity = Parity::odd;
  d.scale = ck * ck;
  d.shape = [k](int nu) { return detail::fk_shape(k, nu); };
  d.cra_assumed = k >= 3;
  return d;
}

inline CcpDescriptor catalog(const std::string& name) {
  const double pi = 3.14159265358979323846;
  CcpDescriptor d;
  d.name = name;
  if (name == "grothendieck") {
    d.scale = 2.0 / pi;
    d.shape = detail::grothendieck_shape;
    return d;
  }
  if (name == "haagerup") {
    d.scale = pi / 4.0;
    d.shape = detail::haagerup_shape;
    return d;
  }
  if (name == "kappa") {
    d.sup_norm_sq = 3.0;
    d.scale = 3.0 / pi;
    d.shape = detail::kappa_shape;
    return d;
  }
  if (name.size() > 4 && name.compare(0, 3, "fk(") == 0 && name.back() == ')') {
    const std::string body = name.substr(3, name.size() - 4);
    std::size_t pos = 0;
    int k = 0;
    try {
      k = std::stoi(body, &pos);
    } catch (const std::exception&) {
      throw DomainError("unknown catalog entry: " + name);
    }
    if (pos != body.size()) throw DomainError("unknown catalog entry: " + name);
    return catalog_fk(k);
  }
  throw DomainError("unknown catalog entry: " + name);
}

// Wrap an explicit coefficient list. Doubles are promoted bit-exactly to
// rationals so the reversion backends treat them like catalog shapes; the
// coefficient mass becomes l2_norm_sq.
inline CcpDescriptor custom_descriptor(const std::vector<double>& coeffs,
                                       double sup_norm_sq,
                                       Parity parity = Parity::none,
                                       const std::string& name = "custom") {
  double mass = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i])) throw DomainError("non-finite custom coefficient");
    if (coeffs[i] < 0.0) throw DomainError("custom coefficients must be nonnegative");
    const bool skip = (parity == Parity::odd && i % 2 == 0) ||
                      (parity == Parity::even && i % 2 == 1);
    if (skip && coeffs[i] != 0.0)
      throw ParityError("custom coefficient " + std::to_string(i) +
                        " violates the declared parity");
    mass += coeffs[i];
  }
  if (!(sup_norm_sq >= mass))
    throw DomainError("sup norm squared must dominate the coefficient mass");
  auto stored = std::make_shared<const std::vector<double>>(coeffs);
  CcpDescriptor d;
  d.name = name;
  d.l2_norm_sq = mass;
  d.sup_norm_sq = sup_norm_sq;
  d.parity = parity;
  d.scale = 1.0;
  d.shape = [stored](int nu) {
    if (nu < 0) throw DomainError("coefficient degree must be nonnegative");
    return nu < static_cast<int>(stored->size())
               ? Rat((*stored)[static_cast<std::size_t>(nu)])
               : Rat(0);
  };
  return d;
}

// Truncated series of h through degree n_max.
inline TruncatedSeries<double> h_series(const CcpDescriptor& d, int n_max) {
  if (n_max < 0) throw ArityError("series order must be nonnegative");
  std::vector<double> c(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int nu = 0; nu <= n_max; ++nu) {
    if (d.parity == Parity::odd && nu % 2 == 0) continue;
    if (d.parity == Parity::even && nu % 2 == 1) continue;
    c[static_cast<std::size_t>(nu)] = d.coeff(nu);
  }
  return TruncatedSeries<double>(std::move(c), d.parity);
}

namespace detail {

inline TruncatedSeries<Rat> shape_series(const CcpDescriptor& d, int n_max) {
  if (n_max < 0) throw ArityError("series order must be nonnegative");
  std::vector<Rat> c(static_cast<std::size_t>(n_max) + 1, Rat(0));
  for (int nu = 0; nu <= n_max; ++nu) {
    if (d.parity == Parity::odd && nu % 2 == 0) continue;
    if (d.parity == Parity::even && nu % 2 == 1) continue;
    c[static_cast<std::size_t>(nu)] = d.shape(nu);
  }
  return TruncatedSeries<Rat>(std::move(c), d.parity);
}

inline TruncatedSeries<Rat> revert_backend(const TruncatedSeries<Rat>& s, int n,
                                           InvertBackend backend) {
  switch (backend) {
    case InvertBackend::bell:
      return s.parity() == Parity::odd ? invert_series_odd(s, n)
                                       : invert_series_bell(s, n);
    case InvertBackend::det:
      return invert_series_det(s, n);
    default:
      return revert_oracle(s, n);
  }
}

// First odd degree where strict alternation sign(beta_{2m+1}) = (-1)^m
// fails (a zero counts as failing), or -1 when it holds throughout.
inline int first_alternation_break(const TruncatedSeries<Rat>& inv) {
  if (inv.parity() != Parity::odd) return 1;
  for (int m = 0; 2 * m + 1 <= inv.order(); ++m)
    if (sgn(inv.coeff(2 * m + 1)) != (m % 2 == 0 ? 1 : -1)) return 2 * m + 1;
  return -1;
}

// (-1)^m flip of the odd coefficients, the hyperbolic transform itself.
inline TruncatedSeries<double> alternating_copy(const TruncatedSeries<double>& s) {
  std::vector<double> out(static_cast<std::size_t>(s.order()) + 1, 0.0);
  for (int m = 0; 2 * m + 1 <= s.order(); ++m)
    out[static_cast<std::size_t>(2 * m + 1)] =
        (m % 2 == 0 ? 1.0 : -1.0) * s.coeff(2 * m + 1);
  return TruncatedSeries<double>(std::move(out), Parity::odd, s.radius());
}

}  // namespace detail

struct CcpCheckReport {
  bool pass = true;
  int first_violation = -1;  // coefficient index, or the order for a tail shortfall
  double coefficient_sum = 0.0;
  double tail_allowance = 0.0;
  std::string reason;  // empty on pass
};

// Allowance for the unseen tail, extrapolated from the last two positive
// coefficients: fit p_nu ~ C nu^{-s} through them and integrate past the
// truncation, doubled for slack. Infinite when the retained data shows no
// decay, because a mass shortfall can then never be pinned on truncation.
inline double tail_allowance(const TruncatedSeries<double>& s) {
  int a = -1, b = -1;
  for (int i = s.order(); i >= 1; --i) {
    if (s.coeff(i) > 0.0) {
      if (a < 0) {
        a = i;
      } else {
        b = i;
        break;
      }
    }
  }
  if (a < 0) return 0.0;
  if (b < 0) return s.coeff(a) * a;
  const double q = s.coeff(a) / s.coeff(b);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  const double sexp = -std::log(q) / std::log(static_cast<double>(a) / b);
  if (sexp <= 1.0) return std::numeric_limits<double>::infinity();
  return 2.0 * s.coeff(a) * (static_cast<double>(a) / (a - b)) / (sexp - 1.0);
}

// Plausibility check of a truncated correlation series: coefficients must be
// nonnegative and their mass must reach r. A shortfall at the truncation
// boundary is forgiven up to the tail allowance; an excess can never be
// repaired by more nonnegative terms, so it fails outright at the first
// degree whose running sum crosses r.
inline CcpCheckReport ccp_check(const TruncatedSeries<double>& s, double r, double tol) {
  if (!(tol >= 0.0)) throw DomainError("tolerance must be nonnegative");
  if (!(r > 0.0) || !std::isfinite(r))
    throw DomainError("coefficient mass must be positive and finite");
  CcpCheckReport rep;
  rep.tail_allowance = tail_allowance(s);
  double sum = 0.0;
  int first_negative = -1;
  int first_excess = -1;
  for (int n = 0; n <= s.order(); ++n) {
    const double c = s.coeff(n);
    if (first_negative < 0 && c < -tol) first_negative = n;
    sum += c;
    if (first_excess < 0 && sum > r + tol) first_excess = n;
  }
  rep.coefficient_sum = sum;
  if (first_negative >= 0) {
    rep.pass = false;
    rep.first_violation = first_negative;
    rep.reason = "coefficient " + std::to_string(first_negative) + " is negative";
  } else if (first_excess >= 0) {
    rep.pass = false;
    rep.first_violation = first_excess;
    rep.reason = "coefficient mass exceeds the target once degree " +
                 std::to_string(first_excess) + " is included";
  } else if (r - sum > rep.tail_allowance + tol) {
    rep.pass = false;
    rep.first_violation = s.order();
    rep.reason = "coefficient mass falls short of the target beyond the tail allowance";
  }
  return rep;
}

// Alternating-sign copy of the descriptor's series, legitimate exactly when
// the reverted series alternates strictly: sign(beta_{2m+1}) = (-1)^m
// through the truncation order, a zero counting as a violation. The check
// runs on the exact rational shape, where it is decidable at any order; a
// positive scale cannot flip a sign, so the shape verdict is the verdict.
inline TruncatedSeries<double> hyp_transform_sign_route(const CcpDescriptor& d, int order) {
  if (d.parity != Parity::odd)
    throw ParityError("hyperbolic route needs an odd descriptor");
  if (!(d.scale > 0.0) || !std::isfinite(d.scale))
    throw DomainError("descriptor scale must be positive");
  const TruncatedSeries<Rat> inv = invert_series_odd(detail::shape_series(d, order), order);
  const int bad = detail::first_alternation_break(inv);
  if (bad >= 0)
    throw SignConditionUnverified(
        "reverted coefficient at degree " + std::to_string(bad) +
        " breaks the alternation needed for the hyperbolic route");
  return detail::alternating_copy(h_series(d, order));
}

// Data-as-given variant for a raw coefficient series. The doubles are
// promoted bit-exactly to rationals and reverted exactly, but the input
// itself is trusted only to one ulp: a second reversion of a per-coefficient
// nudged copy estimates how far that uncertainty moves each reverted
// coefficient, and any coefficient inside eight times that margin is
// indistinguishable from zero, so the sign condition counts as unverified.
// Catalog entries carry exact shapes; the descriptor overload checks those
// without any margin and works at orders where rounding has long swamped
// the true coefficients here.
inline TruncatedSeries<double> hyp_transform_sign_route(const TruncatedSeries<double>& s) {
  if (s.parity() != Parity::odd)
    throw ParityError("hyperbolic route needs an odd series");
  const int n = s.order();
  std::vector<Rat> rc(static_cast<std::size_t>(n) + 1, Rat(0));
  std::vector<Rat> nudged(static_cast<std::size_t>(n) + 1, Rat(0));
  const long ulp_den = 1L << 52;
  for (int j = 1, l = 0; j <= n; j += 2, ++l) {
    rc[static_cast<std::size_t>(j)] = Rat(s.coeff(j));
    nudged[static_cast<std::size_t>(j)] =
        rc[static_cast<std::size_t>(j)] * rat(ulp_den + (l % 2 == 0 ? 1 : -1), ulp_den);
  }
  const TruncatedSeries<Rat> inv =
      invert_series_odd(TruncatedSeries<Rat>(std::move(rc), Parity::odd), n);
  const TruncatedSeries<Rat> inv_nudged =
      invert_series_odd(TruncatedSeries<Rat>(std::move(nudged), Parity::odd), n);
  for (int m = 0; 2 * m + 1 <= inv.order(); ++m) {
    const int deg = 2 * m + 1;
    const Rat beta = inv.coeff(deg);
    const double margin =
        8.0 * std::fabs(to_double(Rat(beta - inv_nudged.coeff(deg))));
    if (std::fabs(to_double(beta)) <= margin)
      throw SignConditionUnverified(
          "reverted coefficient at degree " + std::to_string(deg) +
          " sits inside double rounding noise; the sign condition cannot be "
          "verified at this order");
    if (sgn(beta) != (m % 2 == 0 ? 1 : -1))
      throw SignConditionUnverified(
          "reverted coefficient at degree " + std::to_string(deg) +
          " breaks the alternation needed for the hyperbolic route");
  }
  return detail::alternating_copy(s);
}

inline constexpr double kCstarTol = 1e-13;
inline constexpr int kCstarMaxIter = 200;

// Unique c in (0, r] with beta_abs(c) = 1, by bisection. Monotonicity comes
// from the nonnegative coefficients (at least one positive past degree 0),
// existence from beta_abs(r) >= 1. Stops once the residual drops below
// kCstarTol; the iteration cap alone already pins the midpoint far below
// double resolution.
inline double find_cstar(const TruncatedSeries<double>& beta_abs, double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw DomainError("mass must be positive and finite");
  bool rising = false;
  for (int n = 0; n <= beta_abs.order(); ++n) {
    if (beta_abs.coeff(n) < 0.0)
      throw DomainError("abs series must be coefficient-wise nonnegative");
    if (n >= 1 && beta_abs.coeff(n) > 0.0) rising = true;
  }
  if (!rising) throw DomainError("abs series is constant, nothing to bisect");
  if (beta_abs.coeff(0) >= 1.0)
    throw DomainError("abs series starts at or above 1, the root degenerates");
  if (beta_abs.eval(r) < 1.0)
    throw NoRootInRange("abs series stays below 1 on (0, r]; raise the truncation order");
  double lo = 0.0;
  double hi = r;
  for (int it = 0; it < kCstarMaxIter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = beta_abs.eval(mid);
    if (std::fabs(v - 1.0) < kCstarTol) return mid;
    if (v < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline constexpr int kDefaultBoundOrder = 41;
inline constexpr char kRouteHyp[] = "sign-condition-hyp";
inline constexpr char kRouteRoot[] = "invert-abs-root";

struct BoundReport {
  std::string name;
  int order = 0;
  InvertBackend backend = InvertBackend::bell;
  std::string route;
  double c_star = 0.0;
  double bound = 0.0;
  double abs_inverse_at_r = 0.0;
  double tail_indicator = 0.0;
  bool cra_assumed = false;  // advisory flag, deliberately not serialized

  std::string to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"name\":\"" << name << "\",\"order\":" << order << ",\"backend\":\""
       << backend_name(backend) << "\",\"route\":\"" << route
       << "\",\"c_star\":" << c_star << ",\"bound\":" << bound
       << ",\"abs_inverse_at_r\":" << abs_inverse_at_r
       << ",\"tail_indicator\":" << tail_indicator << "}";
    return os.str();
  }
};

// Reverted series of h in double: exact reversion of the rational shape,
// rescaled by beta_n = shape_beta_n * scale^{-n}.
inline TruncatedSeries<double> h_inverse_series(const CcpDescriptor& d, int n_max,
                                                InvertBackend backend) {
  if (!(d.scale > 0.0) || !std::isfinite(d.scale))
    throw DomainError("descriptor scale must be positive");
  const TruncatedSeries<Rat> shape = detail::shape_series(d, n_max);
  const TruncatedSeries<Rat> inv = detail::revert_backend(shape, n_max, backend);
  std::vector<double> out(static_cast<std::size_t>(inv.order()) + 1, 0.0);
  double pw = 1.0;
  for (int n = 0; n <= inv.order(); ++n) {
    if (n > 0) pw /= d.scale;
    out[static_cast<std::size_t>(n)] = to_double(inv.coeff(n)) * pw;
  }
  return TruncatedSeries<double>(std::move(out), inv.parity());
}

// Full pipeline: shape, exact reversion, abs series, root, report. The
// route field records whether the reverted series alternates strictly; in
// that case the alternating copy of the forward series evaluates the same
// transform and the two routes agree to roundoff. c_star always comes from
// the bisection. The bound is sup_norm_sq / c_star, additionally capped by
// the abs series value at r when the two norms coincide. tail_indicator
// carries the magnitude of the last retained abs coefficient; bounds are
// order-n estimates, never certified values.
inline BoundReport bound(const CcpDescriptor& d, int order, InvertBackend backend) {
  if (order < 1) throw ArityError("bound order must be at least 1");
  if (!(d.scale > 0.0) || !std::isfinite(d.scale))
    throw DomainError("descriptor scale must be positive");
  const TruncatedSeries<Rat> shape = detail::shape_series(d, order);
  const TruncatedSeries<Rat> inv = detail::revert_backend(shape, order, backend);

  BoundReport rep;
  rep.name = d.name;
  rep.order = order;
  rep.backend = backend;
  rep.cra_assumed = d.cra_assumed;
  rep.route = detail::first_alternation_break(inv) < 0 ? kRouteHyp : kRouteRoot;

  std::vector<double> beta_abs(static_cast<std::size_t>(inv.order()) + 1, 0.0);
  double pw = 1.0;
  int top = 0;
  for (int n = 0; n <= inv.order(); ++n) {
    if (n > 0) pw /= d.scale;
    const double v = std::fabs(to_double(inv.coeff(n))) * pw;
    beta_abs[static_cast<std::size_t>(n)] = v;
    if (v > 0.0) top = n;
  }
  rep.tail_indicator = beta_abs[static_cast<std::size_t>(top)];
  const TruncatedSeries<double> abs_series(std::move(beta_abs), inv.parity());
  const double r = d.l2_norm_sq;
  rep.abs_inverse_at_r = abs_series.eval(r);
  rep.c_star = find_cstar(abs_series, r);
  rep.bound = d.sup_norm_sq / rep.c_star;
  if (d.sup_norm_sq == d.l2_norm_sq)
    rep.bound = std::min(rep.bound, rep.abs_inverse_at_r);
  return rep;
}

inline BoundReport bound(const std::string& name, int order, InvertBackend backend) {
  return bound(catalog(name), order, backend);
}

// sign(zeta) * h(|zeta|) on the closed unit disk, with h the haagerup
// series through the requested truncation order.
inline std::complex<double> haagerup_eval(std::complex<double> zeta, int order) {
  const double rho = std::abs(zeta);
  if (rho > 1.0 + 1e-12) throw DomainError("argument must stay in the closed unit disk");
  if (rho == 0.0) return {0.0, 0.0};
  const TruncatedSeries<double> h = h_series(catalog("haagerup"), order);
  return zeta / rho * h.eval(std::min(rho, 1.0));
}

// P(X <= a, Y <= b) coordinatewise for k jointly Gaussian pairs with cross
// correlation rho: the coefficient of rho^nu collects the orthant-projected
// Hermite mass at total degree nu, and the sum over k-coordinate
// multi-indices is the k-fold Cauchy power of the per-coordinate sequence.
inline double gaussian_df_series(double rho, double a, double b, int k, int n_max) {
  if (std::fabs(rho) > 1.0) throw DomainError("correlation must lie in [-1, 1]");
  if (k < 1) throw DomainError("coordinate count must be at least 1");
  if (n_max < 0) throw ArityError("series order must be nonnegative");
  std::vector<double> u(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 0; j <= n_max; ++j)
    u[static_cast<std::size_t>(j)] =
        fh_indicator({a}, false, {j}) * fh_indicator({b}, false, {j});
  const TruncatedSeries<double> factor(u);
  TruncatedSeries<double> acc = factor;
  for (int i = 1; i < k; ++i) acc = cauchy_product(acc, factor, n_max);
  return acc.eval(rho);
}

}  // namespace gkb
