#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gkbound/errors.hpp"
#include "gkbound/hermite.hpp"
#include "gkbound/specialfn.hpp"

// Monte-Carlo oracle for Gaussian expectations: correlated real and complex
// pair sampling, Mehler-kernel tensor quadrature for the one-dimensional
// case, spherical moments, and Stein identity checks.
//
// Randomness is counter-based and fully deterministic: stream s of seed q
// runs SplitMix64 from the finalized mix of (q, s), and normals come from
// the Marsaglia polar method on top of that. The sample budget is always
// split over a fixed number of streams and merged in stream order with
// count-weighted mean/variance combination, so the estimate does not depend
// on how many worker threads ran the streams. Bit-reproducibility holds per
// build, not across platforms (libm differences).

namespace gkb {

inline constexpr int kMcStreams = 64;

// SplitMix64 finalizer; also used to key streams
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // uniform on [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// standard normals from the polar method (no trig calls)
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, int stream)
      : rng_(mix64(seed) ^ mix64(0xd1b54a32d192ed03ull * static_cast<std::uint64_t>(stream + 1))) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.uniform() - 1.0;
      v = 2.0 * rng_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  void fill(std::vector<double>& out) {
    for (double& x : out) x = next();
  }

 private:
  SplitMix64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Welford accumulator with exact count-weighted merging
struct Accumulator {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Accumulator& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const long long total = count + o.count;
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / static_cast<double>(total);
    m2 += o.m2 + d * d * (static_cast<double>(count) * static_cast<double>(o.count) /
                          static_cast<double>(total));
    count = total;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
};

struct McEstimateComplex {
  std::complex<double> mean;
  double std_error = 0.0;  // sqrt of (var_re + var_im) / samples
  long long samples = 0;
  std::uint64_t seed = 0;
};

struct CorrelationSpec {
  int k;
  std::complex<double> zeta;

  CorrelationSpec(int dim, double rho) : CorrelationSpec(dim, std::complex<double>(rho)) {}

  CorrelationSpec(int dim, std::complex<double> z) : k(dim), zeta(z) {
    if (k < 1) throw DomainError("pair dimension must be positive");
    if (std::abs(zeta) > 1.0 + 1e-15)
      throw DomainError("correlation must lie in the closed unit disk");
  }

  double rho() const {
    if (zeta.imag() != 0.0)
      throw DomainError("this operation needs a real correlation");
    return zeta.real();
  }
};

using RealPairFn = std::function<double(const std::vector<double>&)>;
using ComplexPairFn = std::function<std::complex<double>(const std::vector<std::complex<double>>&)>;

namespace detail {

inline int worker_count() {
  if (const char* env = std::getenv("GKBOUND_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Runs `body(stream_index, samples_for_stream, accumulators...)` over the
// fixed stream grid, optionally fanned out over threads, and merges the
// per-stream accumulators in index order. Deterministic for any thread
// count because streams never share state.
template <class Body>
void run_streams(long long n, int accs_per_stream, std::vector<Accumulator>& merged,
                 Body&& body) {
  std::vector<Accumulator> table(static_cast<std::size_t>(kMcStreams) * accs_per_stream);
  const long long base = n / kMcStreams;
  const long long rem = n % kMcStreams;
  auto run_range = [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      const long long quota = base + (s < rem ? 1 : 0);
      if (quota == 0) continue;
      body(s, quota, &table[static_cast<std::size_t>(s) * accs_per_stream]);
    }
  };
  const int workers = worker_count();
  if (workers <= 1) {
    run_range(0, kMcStreams);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (kMcStreams + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk, hi = std::min(kMcStreams, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  merged.assign(static_cast<std::size_t>(accs_per_stream), Accumulator{});
  for (int s = 0; s < kMcStreams; ++s)
    for (int a = 0; a < accs_per_stream; ++a)
      merged[static_cast<std::size_t>(a)].merge(table[static_cast<std::size_t>(s) * accs_per_stream + a]);
}

inline McEstimate finish(const Accumulator& acc, std::uint64_t seed) {
  McEstimate e;
  e.mean = acc.mean;
  e.samples = acc.count;
  e.seed = seed;
  e.std_error = acc.count > 0 ? std::sqrt(acc.variance() / static_cast<double>(acc.count)) : 0.0;
  return e;
}

}  // namespace detail

// E[f(X) g(Y)] for X ~ N(0, I_k), Y = rho X + sqrt(1-rho^2) Z
inline McEstimate sample_pair(const CorrelationSpec& spec, const RealPairFn& f,
                              const RealPairFn& g, long long n, std::uint64_t seed) {
  const double rho = spec.rho();
  if (n < 1) throw DomainError("sample count must be positive");
  const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const int k = spec.k;
  std::vector<Accumulator> merged;
  detail::run_streams(n, 1, merged, [&](int stream, long long quota, Accumulator* acc) {
    GaussianStream gen(seed, stream);
    std::vector<double> x(static_cast<std::size_t>(k)), y(static_cast<std::size_t>(k));
    for (long long i = 0; i < quota; ++i) {
      for (int j = 0; j < k; ++j) {
        x[static_cast<std::size_t>(j)] = gen.next();
        y[static_cast<std::size_t>(j)] = rho * x[static_cast<std::size_t>(j)] + c * gen.next();
      }
      acc->add(f(x) * g(y));
    }
  });
  return detail::finish(merged[0], seed);
}

// E[b1(Z) conj(b2(W))] for (Z, W) ~ CN_{2k}(0, Sigma_{2k}(zeta)), realized
// through the real 4k-vector representation: A, B ~ N(0, I_{2k}) with
// cross-correlation |zeta|, then Z = sign(zeta) (A_j + i A_{k+j}) / sqrt(2),
// W = (B_j + i B_{k+j}) / sqrt(2)
inline McEstimateComplex sample_complex(const CorrelationSpec& spec, const ComplexPairFn& b1,
                                        const ComplexPairFn& b2, long long n,
                                        std::uint64_t seed) {
  if (n < 1) throw DomainError("sample count must be positive");
  const double r = std::abs(spec.zeta);
  const std::complex<double> phase = r > 0.0 ? spec.zeta / r : std::complex<double>(1.0);
  const double c = std::sqrt(std::max(0.0, 1.0 - r * r));
  const double half = 1.0 / std::sqrt(2.0);
  const int k = spec.k;
  std::vector<Accumulator> merged;
  detail::run_streams(n, 2, merged, [&](int stream, long long quota, Accumulator* acc) {
    GaussianStream gen(seed, stream);
    std::vector<std::complex<double>> z(static_cast<std::size_t>(k)), w(static_cast<std::size_t>(k));
    std::vector<double> a(static_cast<std::size_t>(2 * k)), b(static_cast<std::size_t>(2 * k));
    for (long long i = 0; i < quota; ++i) {
      for (int j = 0; j < 2 * k; ++j) {
        a[static_cast<std::size_t>(j)] = gen.next();
        b[static_cast<std::size_t>(j)] = r * a[static_cast<std::size_t>(j)] + c * gen.next();
      }
      for (int j = 0; j < k; ++j) {
        z[static_cast<std::size_t>(j)] = phase * std::complex<double>(a[static_cast<std::size_t>(j)] * half,
                                                                      a[static_cast<std::size_t>(k + j)] * half);
        w[static_cast<std::size_t>(j)] = std::complex<double>(b[static_cast<std::size_t>(j)] * half,
                                                              b[static_cast<std::size_t>(k + j)] * half);
      }
      const std::complex<double> v = b1(z) * std::conj(b2(w));
      acc[0].add(v.real());
      acc[1].add(v.imag());
    }
  });
  McEstimateComplex e;
  e.mean = {merged[0].mean, merged[1].mean};
  e.samples = merged[0].count;
  e.seed = seed;
  e.std_error = std::sqrt((merged[0].variance() + merged[1].variance()) /
                          static_cast<double>(merged[0].count));
  return e;
}

inline McEstimateComplex sample_complex(const CorrelationSpec& spec, const ComplexPairFn& b,
                                        long long n, std::uint64_t seed) {
  return sample_complex(spec, b, b, n, seed);
}

// Deterministic E[f(X) g(Y)] for scalar X, Y: 64x64 tensor Gauss-Hermite
// with the Mehler kernel evaluated at node pairs. Machine precision for
// smooth integrands; for integrands with jumps (sign) the node quadrature
// of the discontinuity caps the accuracy near 5e-3, so this serves as a
// coarse independent check there, not a tight one.
inline double mehler_quad(const std::function<double(double)>& f,
                          const std::function<double(double)>& g, double rho) {
  const double ar = std::abs(rho);
  if (ar > 1.0) throw DomainError("correlation must lie in [-1,1]");
  if (ar == 1.0) throw BoundaryRho("Mehler kernel degenerates at |rho| = 1");
  const auto& rule = gauss_hermite(64);
  const double d = 1.0 - rho * rho;
  const double scale = 1.0 / std::sqrt(d);
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    const double fx = f(x);
    if (fx == 0.0) continue;
    double inner = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double y = rule.nodes[static_cast<std::size_t>(j)];
      const double kernel =
          scale * std::exp((2.0 * rho * x * y - rho * rho * (x * x + y * y)) / (2.0 * d));
      inner += rule.weights[static_cast<std::size_t>(j)] * g(y) * kernel;
    }
    acc += rule.weights[static_cast<std::size_t>(i)] * fx * inner;
  }
  return acc;
}

// E[(u^T X / ||X||)^m] over the uniform law on S^{n-1}
inline McEstimate sphere_moment(int n, int m, long long samples, std::uint64_t seed) {
  if (n < 1 || m < 0) throw DomainError("sphere moment needs n >= 1, m >= 0");
  if (samples < 1) throw DomainError("sample count must be positive");
  std::vector<Accumulator> merged;
  detail::run_streams(samples, 1, merged, [&](int stream, long long quota, Accumulator* acc) {
    GaussianStream gen(seed, stream);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (long long i = 0; i < quota; ++i) {
      double norm2 = 0.0;
      for (double& t : x) {
        t = gen.next();
        norm2 += t * t;
      }
      const double u1 = x[0] / std::sqrt(norm2);
      acc->add(std::pow(u1, m));
    }
  });
  return detail::finish(merged[0], seed);
}

struct SteinReport {
  McEstimate lhs;  // E[f(X) Y]
  McEstimate rhs;  // rho E[f'(X)], derivative by central difference
  double difference = 0.0;
  double joint_std_error = 0.0;
};

// checks E[f(X) Y] = rho E[f'(X)] with both sides estimated from disjoint
// stream sets of the same seed; f' uses a central difference with h = 1e-5
// (bias O(h^2), far below Monte-Carlo resolution)
inline SteinReport stein_check(const std::function<double(double)>& f, double rho, long long n,
                               std::uint64_t seed) {
  if (std::abs(rho) > 1.0) throw DomainError("correlation must lie in [-1,1]");
  if (n < 1) throw DomainError("sample count must be positive");
  const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const double h = 1e-5;

  std::vector<Accumulator> left;
  detail::run_streams(n, 1, left, [&](int stream, long long quota, Accumulator* acc) {
    GaussianStream gen(seed, stream);
    for (long long i = 0; i < quota; ++i) {
      const double x = gen.next();
      const double y = rho * x + c * gen.next();
      acc->add(f(x) * y);
    }
  });

  std::vector<Accumulator> right;
  detail::run_streams(n, 1, right, [&](int stream, long long quota, Accumulator* acc) {
    GaussianStream gen(seed, kMcStreams + stream);
    for (long long i = 0; i < quota; ++i) {
      const double x = gen.next();
      acc->add(rho * (f(x + h) - f(x - h)) / (2.0 * h));
    }
  });

  SteinReport rep;
  rep.lhs = detail::finish(left[0], seed);
  rep.rhs = detail::finish(right[0], seed);
  rep.difference = rep.lhs.mean - rep.rhs.mean;
  rep.joint_std_error = std::sqrt(rep.lhs.std_error * rep.lhs.std_error +
                                  rep.rhs.std_error * rep.rhs.std_error);
  return rep;
}

// sign with sign(0) = 0, the convention used throughout
inline double sign_fn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

inline std::complex<double> csign_fn(std::complex<double> z) {
  const double r = std::abs(z);
  return r > 0.0 ? z / r : std::complex<double>(0.0);
}

// closed-form moment of |<x, u>|-type powers on the sphere, the oracle the
// sampler is tested against
inline double sphere_moment_exact(int n, int m) {
  if (n < 1 || m < 0) throw DomainError("sphere moment needs n >= 1, m >= 0");
  if (m % 2 == 1) return 0.0;
  return gamma_half(m + 1) * gamma_half(n) / (std::sqrt(3.14159265358979323846) * gamma_half(m + n));
}

}  // namespace gkb
