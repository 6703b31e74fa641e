#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace badmm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateOperatorError : public Error {
 public:
  using Error::Error;
};

class MetadataIncompleteError : public Error {
 public:
  using Error::Error;
};

class InvalidCertificateError : public Error {
 public:
  using Error::Error;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class NotStronglyConvexError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class StepsizeCollapseError : public Error {
 public:
  StepsizeCollapseError(const std::string& what, int block) : Error(what), block_(block) {}
  int block() const { return block_; }

 private:
  int block_;
};

// Raised by iterative methods that hit their iteration cap. `block` is set
// when the failure happened inside a block subproblem; `best` holds the best
// iterate seen when the method tracks one.
class NonconvergenceError : public Error {
 public:
  explicit NonconvergenceError(const std::string& what, std::optional<int> block = std::nullopt,
                               std::vector<double> best = {})
      : Error(what), block_(block), best_(std::move(best)) {}
  std::optional<int> block() const { return block_; }
  const std::vector<double>& best() const { return best_; }

 private:
  std::optional<int> block_;
  std::vector<double> best_;
};

// Used by verification modes when a recomputed quantity disagrees with the
// incrementally maintained one.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace badmm
