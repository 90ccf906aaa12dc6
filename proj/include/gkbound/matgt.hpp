#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gkbound/errors.hpp"
#include "gkbound/series.hpp"

// Matrix layer: dense real/complex matrices, the Euclidean-division index
// maps and the Kronecker/vec/commutation calculus built on them,
// Walsh-Hadamard transforms from the sign recursion, the exact (inf,1)
// matrix norm with sign-vector witnesses, PSD and correlation checks, the
// structured correlation matrices Sigma_2n(zeta), entrywise functional
// calculus, the Delta block embedding, and the 2x2 Bell-violation witness.

namespace gkb {

using cplx = std::complex<double>;

namespace detail {
inline bool finite_entry(double v) { return std::isfinite(v); }
inline bool finite_entry(const cplx& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
inline double conj_entry(double v) { return v; }
inline cplx conj_entry(const cplx& v) { return std::conj(v); }
}  // namespace detail

template <class T>
class DenseMatrix {
 public:
  DenseMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(checked_size(rows, cols), T(0)) {}

  DenseMatrix(int rows, int cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != checked_size(rows, cols))
      throw ShapeMismatch("entry count does not match the shape");
    for (const T& v : a_)
      if (!detail::finite_entry(v)) throw DomainError("matrix entries must be finite");
  }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }

  const std::vector<T>& entries() const { return a_; }

  DenseMatrix transpose() const {
    DenseMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  DenseMatrix conj_transpose() const {
    DenseMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = detail::conj_entry((*this)(i, j));
    return m;
  }

  DenseMatrix operator*(const DenseMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ShapeMismatch("inner dimensions differ");
    DenseMatrix m(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const T v = (*this)(i, k);
        for (int j = 0; j < rhs.cols_; ++j) m(i, j) += v * rhs(k, j);
      }
    return m;
  }

  DenseMatrix operator+(const DenseMatrix& rhs) const {
    require_same_shape(rhs);
    DenseMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += rhs.a_[i];
    return m;
  }

  DenseMatrix operator-(const DenseMatrix& rhs) const {
    require_same_shape(rhs);
    DenseMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= rhs.a_[i];
    return m;
  }

  DenseMatrix scaled(T factor) const {
    DenseMatrix m = *this;
    for (T& v : m.a_) v *= factor;
    return m;
  }

  double frobenius() const {
    double acc = 0.0;
    for (const T& v : a_) acc += std::norm(cplx(v));
    return std::sqrt(acc);
  }

  double max_abs() const {
    double acc = 0.0;
    for (const T& v : a_) acc = std::max(acc, std::abs(cplx(v)));
    return acc;
  }

  void require_same_shape(const DenseMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ShapeMismatch("shapes differ");
  }

 private:
  static std::size_t checked_size(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ShapeMismatch("matrix dimensions must be positive");
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  int rows_, cols_;
  std::vector<T> a_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<cplx>;

// ---- Euclidean-division index maps (all arguments and results 1-based) ----

// quotient block: f_n(nu) = ceil(nu/n)
inline int index_f(int n, int nu) {
  if (n < 1 || nu < 1) throw DomainError("index maps need positive arguments");
  return (nu - 1) / n + 1;
}

// remainder within the block, shifted into [1, n]
inline int index_r(int n, int nu) {
  if (n < 1 || nu < 1) throw DomainError("index maps need positive arguments");
  return (nu - 1) % n + 1;
}

// pairing [l] x [n] -> [ln]; inverse of nu -> (f_n(nu), r_n(nu))
inline int index_psi(int n, int i, int j) {
  if (n < 1 || i < 1 || j < 1 || j > n) throw DomainError("pairing arguments out of range");
  return n * (i - 1) + j;
}

inline std::pair<int, int> index_lambda(int n, int nu) {
  return {index_f(n, nu), index_r(n, nu)};
}

// ---- Hadamard and Kronecker products, vec / mat / commutation ----

template <class T>
DenseMatrix<T> hadamard(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  a.require_same_shape(b);
  DenseMatrix<T> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) * b(i, j);
  return m;
}

// (A (x) B)_{alpha beta} = a_{f_p(alpha), f_q(beta)} b_{r_p(alpha), r_q(beta)}
// for A (m x n), B (p x q); driven entirely by the index maps
template <class T>
DenseMatrix<T> kronecker(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  const int p = b.rows(), q = b.cols();
  DenseMatrix<T> m(a.rows() * p, a.cols() * q);
  for (int alpha = 1; alpha <= m.rows(); ++alpha)
    for (int beta = 1; beta <= m.cols(); ++beta)
      m(alpha - 1, beta - 1) = a(index_f(p, alpha) - 1, index_f(q, beta) - 1) *
                               b(index_r(p, alpha) - 1, index_r(q, beta) - 1);
  return m;
}

// column-stacking vec
template <class T>
std::vector<T> vec(const DenseMatrix<T>& a) {
  std::vector<T> x;
  x.reserve(static_cast<std::size_t>(a.rows()) * a.cols());
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) x.push_back(a(i, j));
  return x;
}

template <class T>
DenseMatrix<T> mat(const std::vector<T>& x, int m, int n) {
  if (static_cast<std::size_t>(m) * n != x.size())
    throw DimensionMismatch("vector length does not match the target shape");
  DenseMatrix<T> a(m, n);
  std::size_t idx = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = x[idx++];
  return a;
}

// K_{m,n} vec(A) = vec(A^T) for A (m x n);
// (K_{m,n})_{nu mu} = delta_{f_n(nu), r_m(mu)} delta_{r_n(nu), f_m(mu)}
inline RealMatrix commutation(int m, int n) {
  RealMatrix k(m * n, m * n);
  for (int nu = 1; nu <= m * n; ++nu)
    for (int mu = 1; mu <= m * n; ++mu)
      if (index_f(n, nu) == index_r(m, mu) && index_r(n, nu) == index_f(m, mu))
        k(nu - 1, mu - 1) = 1.0;
  return k;
}

// ---- Walsh-Hadamard transforms ----

namespace detail {
// b_1(nu) = 1 for even nu (1-based), the lowest bit of nu-1
inline int bit_even(int nu) { return 1 - nu % 2; }
}  // namespace detail

// sign exponent N_m(nu, mu) accumulated in exactly m halving steps
inline int wht_sign_exponent(int m, int nu, int mu) {
  if (m < 0) throw DomainError("transform order must be nonnegative");
  if (nu < 1 || mu < 1 || nu > (1 << m) || mu > (1 << m))
    throw DomainError("transform indices out of range");
  int acc = 0;
  for (int step = 0; step < m; ++step) {
    acc += detail::bit_even(nu) * detail::bit_even(mu);
    nu = (nu + 1) / 2;
    mu = (mu + 1) / 2;
  }
  return acc;
}

inline double wht_entry(int m, int nu, int mu) {
  const double scale = std::pow(2.0, -0.5 * m);
  return wht_sign_exponent(m, nu, mu) % 2 == 0 ? scale : -scale;
}

inline constexpr int kWhtMaterializeCap = 10;

inline RealMatrix wht(int m) {
  if (m < 0) throw DomainError("transform order must be nonnegative");
  if (m > kWhtMaterializeCap)
    throw SizeGuard("transform of order " + std::to_string(m) + " will not be materialized");
  const int size = 1 << m;
  RealMatrix h(size, size);
  for (int nu = 1; nu <= size; ++nu)
    for (int mu = 1; mu <= size; ++mu) h(nu - 1, mu - 1) = wht_entry(m, nu, mu);
  return h;
}

// the skew companion: H_1^op fixed, H_{m+1}^op = H_m (x) H_1^op
inline RealMatrix wht_op(int m) {
  if (m < 1) throw DomainError("transform order must be positive");
  if (m > kWhtMaterializeCap)
    throw SizeGuard("transform of order " + std::to_string(m) + " will not be materialized");
  const double s = 1.0 / std::sqrt(2.0);
  const RealMatrix h1op(2, 2, {-s, s, s, s});
  if (m == 1) return h1op;
  return kronecker(wht(m - 1), h1op);
}

inline ComplexMatrix wht_complex(int m) {
  const RealMatrix re = wht(m), im = wht_op(m);
  ComplexMatrix h(re.rows(), re.cols());
  for (int i = 0; i < re.rows(); ++i)
    for (int j = 0; j < re.cols(); ++j) h(i, j) = cplx(re(i, j), im(i, j));
  return h;
}

// normalized gate matrices H_m / sqrt(2)^{3m-2}
inline RealMatrix had_gate(int m) { return wht(m).scaled(std::pow(2.0, -0.5 * (3 * m - 2))); }

// ---- the exact (inf,1) norm over sign vectors ----

struct NormWitness {
  double value = 0.0;
  std::vector<double> p;  // sign vector on the row side
  std::vector<double> q;  // sign vector on the column side
};

namespace detail {

// Gray-code walk over {-1,1}^{cols-1} (last coordinate pinned to +1 by the
// q -> -q symmetry), keeping Aq updated incrementally
inline NormWitness norm_inf1_enumerate(const RealMatrix& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> q(static_cast<std::size_t>(n), 1.0);
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i)] += a(i, j);

  auto l1 = [&] {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
  };

  NormWitness best;
  best.value = l1();
  best.q = q;
  std::vector<double> best_v = v;

  const std::uint64_t steps = n > 1 ? (1ull << (n - 1)) : 1ull;
  for (std::uint64_t k = 1; k < steps; ++k) {
    // flip the coordinate indexed by the lowest set bit of k
    int j = 0;
    while (!((k >> j) & 1ull)) ++j;
    q[static_cast<std::size_t>(j)] = -q[static_cast<std::size_t>(j)];
    const double twice = 2.0 * q[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] += twice * a(i, j);
    const double val = l1();
    if (val > best.value) {
      best.value = val;
      best.q = q;
      best_v = v;
    }
  }

  best.p.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    best.p[static_cast<std::size_t>(i)] = best_v[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
  return best;
}

}  // namespace detail

// max |p^T A q| over sign vectors, exact; enumerates the side with fewer
// columns (the norm is transpose-invariant) and reads the other side off
// the signs of Aq
inline NormWitness norm_inf1_real(const RealMatrix& a) {
  const bool flip = a.cols() > a.rows();
  const RealMatrix& work = flip ? a.transpose() : a;
  if (work.cols() - 1 > 24)
    throw SizeGuard("sign-vector enumeration beyond 2^24 is refused");
  NormWitness w = detail::norm_inf1_enumerate(work);
  if (flip) std::swap(w.p, w.q);
  return w;
}

// lower estimate of the complex (inf,1) norm: the extreme points form a
// torus, so this runs alternating phase ascent from a batch of seeds and
// reports the best value found. Labeled an estimate, never exact.
struct ComplexNormEstimate {
  double lower_bound = 0.0;
  int seeds = 0;
  int sweeps = 0;
};

inline ComplexNormEstimate norm_inf1_complex_estimate(const ComplexMatrix& a, int seeds = 64) {
  const int m = a.rows(), n = a.cols();
  ComplexNormEstimate out;
  out.seeds = seeds;
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next_phase = [&state] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return 2.0 * 3.14159265358979323846 * (state >> 11) / 9007199254740992.0;
  };
  for (int s = 0; s < seeds; ++s) {
    std::vector<cplx> q(static_cast<std::size_t>(n));
    for (auto& v : q) {
      const double t = s == 0 ? 0.0 : next_phase();  // first seed: all-ones
      v = cplx(std::cos(t), std::sin(t));
    }
    double prev = -1.0;
    for (int sweep = 0; sweep < 200; ++sweep) {
      // p step: p_i aligns with (Aq)_i; q step: q_j aligns with (A^* p)_j
      std::vector<cplx> aq(static_cast<std::size_t>(m), cplx(0));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) aq[static_cast<std::size_t>(i)] += a(i, j) * q[static_cast<std::size_t>(j)];
      double val = 0.0;
      std::vector<cplx> p(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const double r = std::abs(aq[static_cast<std::size_t>(i)]);
        val += r;
        p[static_cast<std::size_t>(i)] =
            r > 0.0 ? aq[static_cast<std::size_t>(i)] / r : cplx(1.0, 0.0);
      }
      for (int j = 0; j < n; ++j) {
        cplx acc(0);
        for (int i = 0; i < m; ++i) acc += std::conj(a(i, j)) * p[static_cast<std::size_t>(i)];
        const double r = std::abs(acc);
        q[static_cast<std::size_t>(j)] = r > 0.0 ? acc / r : cplx(1.0, 0.0);
      }
      ++out.sweeps;
      if (val <= prev + 1e-13) {
        prev = val;
        break;
      }
      prev = val;
    }
    out.lower_bound = std::max(out.lower_bound, prev);
  }
  return out;
}

// ---- PSD and correlation checks ----

namespace detail {
inline Eigen::MatrixXd to_eigen(const RealMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}
inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}
}  // namespace detail

// self-adjointness first (reject if ||A - A*|| exceeds tol relative to
// ||A||), then the smallest eigenvalue of the symmetrized matrix
template <class T>
bool psd_check(const DenseMatrix<T>& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.frobenius();
  if (scale == 0.0) return true;
  const DenseMatrix<T> adj = a.conj_transpose();
  if ((a - adj).frobenius() > tol * scale) return false;
  auto sym = detail::to_eigen(a + adj);
  Eigen::SelfAdjointEigenSolver<decltype(sym)> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() * 0.5 >= -tol * scale;
}

template <class T>
bool corr_check(const DenseMatrix<T>& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    if (std::abs(cplx(a(i, i)) - cplx(1.0)) > tol) return false;
  return psd_check(a, tol);
}

// ---- the structured correlation matrices Sigma_{2n}(zeta) ----

inline ComplexMatrix sigma(int n, cplx zeta) {
  if (n < 1) throw DomainError("block dimension must be positive");
  if (std::abs(zeta) > 1.0 + 1e-15) throw DomainError("correlation must lie in the unit disk");
  ComplexMatrix s(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    s(n + i, n + i) = 1.0;
    s(i, n + i) = zeta;
    s(n + i, i) = std::conj(zeta);
  }
  return s;
}

inline RealMatrix sigma_real(int n, double rho) {
  if (n < 1) throw DomainError("block dimension must be positive");
  if (std::abs(rho) > 1.0 + 1e-15) throw DomainError("correlation must lie in [-1,1]");
  RealMatrix s(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    s(n + i, n + i) = 1.0;
    s(i, n + i) = rho;
    s(n + i, i) = rho;
  }
  return s;
}

// Sigma_{2n}(zeta)^{-1} = Sigma_{2n}(-zeta) / (1 - |zeta|^2)
inline ComplexMatrix sigma_inverse(int n, cplx zeta) {
  const double d = 1.0 - std::norm(zeta);
  if (d <= 0.0) throw DomainError("no inverse on the boundary of the disk");
  return sigma(n, -zeta).scaled(1.0 / d);
}

// ---- entrywise functional calculus ----

template <class T, class F>
DenseMatrix<T> entrywise_apply(F&& f, const DenseMatrix<T>& a) {
  DenseMatrix<T> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = f(a(i, j));
  return m;
}

inline RealMatrix entrywise_apply(const TruncatedSeries<double>& s, const RealMatrix& a) {
  return entrywise_apply([&s](double x) { return s.eval(x); }, a);
}

// ---- the Delta block embedding and its pairing ----

template <class T>
DenseMatrix<T> delta(const DenseMatrix<T>& a) {
  const int m = a.rows(), n = a.cols();
  DenseMatrix<T> d(m + n, m + n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      d(i, m + j) = a(i, j) * T(0.5);
      d(m + j, i) = detail::conj_entry(a(i, j)) * T(0.5);
    }
  return d;
}

// tr(Delta(A) S) for S of size (m+n); only the off-diagonal blocks of S
// enter, which the tests pin down
template <class T>
T delta_pairing(const DenseMatrix<T>& a, const DenseMatrix<T>& s) {
  const int m = a.rows(), n = a.cols();
  if (s.rows() != m + n || s.cols() != m + n)
    throw ShapeMismatch("pairing partner must have the combined dimension");
  const DenseMatrix<T> d = delta(a);
  T acc(0);
  for (int i = 0; i < m + n; ++i)
    for (int k = 0; k < m + n; ++k) acc += d(i, k) * s(k, i);
  return acc;
}

// ---- Gram matrices and the 2x2 Bell-violation witness ----

// columns of U and V are the vectors; entry (i,j) is <u_i, v_j>
template <class T>
DenseMatrix<T> gram(const DenseMatrix<T>& u, const DenseMatrix<T>& v) {
  if (u.rows() != v.rows()) throw DimensionMismatch("vector dimensions differ");
  return u.conj_transpose() * v;
}

struct BellWitness {
  double quantum_value;    // tr(gate^T H_1), reached by the unit-vector strategy
  double classical_value;  // exact (inf,1) norm of the gate
  double ratio;
  NormWitness classical_witness;
  std::vector<double> u1, u2, v1, v2;  // unit vectors with <u_i, v_j> = (H_1)_{ij}
};

inline BellWitness bell_witness() {
  BellWitness w;
  const RealMatrix gate = had_gate(1);
  const RealMatrix h1 = wht(1);
  const RealMatrix prod = gate.transpose() * h1;
  w.quantum_value = prod(0, 0) + prod(1, 1);
  w.classical_witness = norm_inf1_real(gate);
  w.classical_value = w.classical_witness.value;
  w.ratio = w.quantum_value / w.classical_value;
  const double s = 1.0 / std::sqrt(2.0);
  w.u1 = {0.0, 1.0};
  w.u2 = {1.0, 0.0};
  w.v1 = {s, s};
  w.v2 = {-s, s};
  return w;
}

// ---- plain-text matrix format ----
// first line: "rows cols real|complex"; then row-major entries, complex
// entries as "re im" pairs

inline void write_matrix_text(std::ostream& os, const RealMatrix& a) {
  os << a.rows() << ' ' << a.cols() << " real\n";
  os.precision(17);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) os << (j ? " " : "") << a(i, j);
    os << '\n';
  }
}

inline void write_matrix_text(std::ostream& os, const ComplexMatrix& a) {
  os << a.rows() << ' ' << a.cols() << " complex\n";
  os.precision(17);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j)
      os << (j ? " " : "") << a(i, j).real() << ' ' << a(i, j).imag();
    os << '\n';
  }
}

struct MatrixText {
  bool is_complex = false;
  RealMatrix real{1, 1};
  ComplexMatrix complex{1, 1};
};

inline MatrixText read_matrix_text(std::istream& is) {
  int rows = 0, cols = 0;
  std::string kind;
  if (!(is >> rows >> cols >> kind)) throw DomainError("matrix header is malformed");
  if (rows < 1 || cols < 1) throw ShapeMismatch("matrix dimensions must be positive");
  MatrixText out;
  if (kind == "real") {
    std::vector<double> entries(static_cast<std::size_t>(rows) * cols);
    for (double& v : entries)
      if (!(is >> v)) throw DomainError("matrix body is shorter than the header claims");
    out.real = RealMatrix(rows, cols, std::move(entries));
  } else if (kind == "complex") {
    out.is_complex = true;
    std::vector<cplx> entries(static_cast<std::size_t>(rows) * cols);
    for (cplx& v : entries) {
      double re = 0, im = 0;
      if (!(is >> re >> im)) throw DomainError("matrix body is shorter than the header claims");
      v = cplx(re, im);
    }
    out.complex = ComplexMatrix(rows, cols, std::move(entries));
  } else {
    throw DomainError("matrix kind must be real or complex");
  }
  return out;
}

}  // namespace gkb
