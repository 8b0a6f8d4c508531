#pragma once

#include <stdexcept>
#include <string>

namespace convexcorr {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class AmbientMismatch : public Error {
 public:
  explicit AmbientMismatch(const std::string& msg) : Error(msg) {}
};

/// Thrown when an operation requires a direct (trivially intersecting) pair
/// of subspaces and the intersection is nontrivial.
class NotDirect : public Error {
 public:
  explicit NotDirect(const std::string& msg) : Error(msg) {}
};

class UnknownName : public Error {
 public:
  explicit UnknownName(const std::string& msg) : Error(msg) {}
};

class ConjugateUnavailable : public Error {
 public:
  explicit ConjugateUnavailable(const std::string& msg) : Error(msg) {}
};

class CapabilityMissing : public Error {
 public:
  explicit CapabilityMissing(const std::string& msg) : Error(msg) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& msg) : Error(msg) {}
};

class NotConverged : public Error {
 public:
  explicit NotConverged(const std::string& msg) : Error(msg) {}
};

class DualUnbounded : public Error {
 public:
  explicit DualUnbounded(const std::string& msg) : Error(msg) {}
};

class BoxTooLarge : public Error {
 public:
  explicit BoxTooLarge(const std::string& msg) : Error(msg) {}
};

class NotBracketed : public Error {
 public:
  explicit NotBracketed(const std::string& msg) : Error(msg) {}
};

/// Signals the violated hypothesis argmin(Phi) disjoint from the nullspace of L.
class NonPositiveC : public Error {
 public:
  explicit NonPositiveC(const std::string& msg) : Error(msg) {}
};

/// Redundant computation routes for a quantity disagree beyond tolerance.
class RouteDisagreement : public Error {
 public:
  explicit RouteDisagreement(const std::string& msg) : Error(msg) {}
};

}  // namespace convexcorr
