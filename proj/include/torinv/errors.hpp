#pragma once

#include <stdexcept>
#include <string>

namespace torinv {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: expressions, matrix files, profiles, lattice specs.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// A configured size limit was exceeded. Distinct from InvalidSpec so batch
/// drivers can tell "too big" from "wrong".
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class ClosureCapExceeded : public CapExceeded {
 public:
  using CapExceeded::CapExceeded;
};

class RankOverflow : public CapExceeded {
 public:
  using CapExceeded::CapExceeded;
};

class DegreeCapExceeded : public CapExceeded {
 public:
  DegreeCapExceeded(const std::string& what, double estimated_cochain_rank)
      : CapExceeded(what), estimated_cochain_rank_(estimated_cochain_rank) {}
  /// Rank of the largest cochain group the request would have built.
  double estimated_cochain_rank() const { return estimated_cochain_rank_; }

 private:
  double estimated_cochain_rank_;
};

class SizeExceeded : public CapExceeded {
 public:
  using CapExceeded::CapExceeded;
};

class NotInvertible : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

class NotInjective : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

class NotSaturated : public InvalidSpec {
 public:
  NotSaturated(const std::string& what, std::string factors) : InvalidSpec(what), factors_(std::move(factors)) {}
  /// Invariant factors of the torsion in the cokernel, e.g. "Z/2".
  const std::string& factors() const { return factors_; }

 private:
  std::string factors_;
};

class FamilyDatumMissing : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

class Cancelled : public Error {
 public:
  Cancelled() : Error("computation cancelled") {}
};

}  // namespace torinv
