#pragma once

#include <stdexcept>
#include <string>

namespace seqpps {

// Domain errors. Everything the CLI maps to exit code 1 derives from
// ValidationError; IoError maps to 3, UsageError to 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbOutOfRange : ValidationError {
  long long unit;
  ProbOutOfRange(long long k, const std::string& val)
      : ValidationError("probability for unit " + std::to_string(k) +
                        " is outside (0,1): " + val),
        unit(k) {}
};

struct NonIntegerTotal : ValidationError {
  double sum, nearest, deviation;
  NonIntegerTotal(double s, double near, double dev)
      : ValidationError("probabilities sum to " + std::to_string(s) +
                        ", nearest integer " + std::to_string(near) +
                        ", deviation " + std::to_string(dev)),
        sum(s), nearest(near), deviation(dev) {}
};

struct InvariantViolation : ValidationError {
  InvariantViolation(long long k, long long count, long long lo, long long hi)
      : ValidationError("running-count invariant violated at unit " +
                        std::to_string(k) + ": count " + std::to_string(count) +
                        " outside [" + std::to_string(lo) + "," +
                        std::to_string(hi) + "]") {}
  explicit InvariantViolation(const std::string& what) : ValidationError(what) {}
};

struct NonTermination : ValidationError {
  using ValidationError::ValidationError;
};

struct DegenerateDenominator : ValidationError {
  using ValidationError::ValidationError;
};

struct ZeroJointProbability : ValidationError {
  long long k, l;
  ZeroJointProbability(long long k_, long long l_)
      : ValidationError("joint inclusion probability of units " +
                        std::to_string(k_) + "," + std::to_string(l_) +
                        " is zero; unbiased variance estimation impossible "
                        "for this design"),
        k(k_), l(l_) {}
};

struct PopulationTooLarge : ValidationError {
  PopulationTooLarge(long long N, long long cap)
      : ValidationError("population size " + std::to_string(N) +
                        " exceeds enumeration cap " + std::to_string(cap)) {}
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct ZeroTrueVariance : ValidationError {
  ZeroTrueVariance() : ValidationError("true variance is zero; relative summaries undefined") {}
};

struct DegenerateX : ValidationError {
  DegenerateX() : ValidationError("all size values equal; rescale to [1,10] undefined") {}
};

struct InfeasibleSize : ValidationError {
  InfeasibleSize(long long n, long long N)
      : ValidationError("sample size " + std::to_string(n) +
                        " infeasible for population of " + std::to_string(N)) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace seqpps
