#pragma once

#include <stdexcept>
#include <string>

namespace gkb {

// Enumeration and table-size refusals. Raised instead of overflowing or
// grinding through an infeasible search space.
struct SizeGuard : std::length_error {
  explicit SizeGuard(const std::string& what) : std::length_error(what) {}
};

// Argument-shape problems (wrong vector length, wrong matrix shape, ...).
struct ArityError : std::invalid_argument {
  explicit ArityError(const std::string& what) : std::invalid_argument(what) {}
};

struct ParityError : std::invalid_argument {
  explicit ParityError(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct ShapeMismatch : std::invalid_argument {
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Value outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// scale_argument with normalization requested, but the normalizer vanishes.
struct NormalizationDegenerate : std::domain_error {
  explicit NormalizationDegenerate(const std::string& what) : std::domain_error(what) {}
};

// Series reversion needs a_0 = 0 and a_1 != 0.
struct NotInvertibleAtZero : std::domain_error {
  explicit NotInvertibleAtZero(const std::string& what) : std::domain_error(what) {}
};

// 2F1 summed at |x| = 1 with c <= a + b.
struct DivergentAtBoundary : std::domain_error {
  explicit DivergentAtBoundary(const std::string& what) : std::domain_error(what) {}
};

// 2F1 with c a non-positive integer.
struct ParameterPole : std::domain_error {
  explicit ParameterPole(const std::string& what) : std::domain_error(what) {}
};

// Mehler quadrature at |rho| = 1, where the kernel degenerates.
struct BoundaryRho : std::domain_error {
  explicit BoundaryRho(const std::string& what) : std::domain_error(what) {}
};

// The alternating-sign shortcut for the hyperbolic transform is only valid
// when the computed inverse coefficients alternate strictly; refused otherwise.
struct SignConditionUnverified : std::runtime_error {
  explicit SignConditionUnverified(const std::string& what) : std::runtime_error(what) {}
};

// Root search for c* on (0, r] found the abs-inverse still below 1 at r,
// usually a sign that the truncation order is too short.
struct NoRootInRange : std::runtime_error {
  explicit NoRootInRange(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gkb
