#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "seqpps/errors.hpp"
#include "seqpps/rational.hpp"

namespace seqpps {

// Validated inclusion-probability vector with integer total n. The scalar
// type selects the arithmetic mode: double (compensated float64) or Rational
// (exact). Unit positions are 1-based throughout the public API.
template <class T>
struct DesignParams {
  std::vector<T> probs;  // probs[k-1] is the probability of unit k
  long long n = 0;

  long long N() const { return static_cast<long long>(probs.size()); }
};

// A realized fixed-size sample: sorted unit positions, the circular
// permutation start (when the randomized sampler produced it), and the seed
// that generated it.
struct Sample {
  std::vector<long long> selected;
  std::optional<long long> permutation_start;
  std::uint64_t seed = 0;
};

namespace detail {

inline double kahan_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

// Checks every probability lies strictly in (0,1) and the total is an
// integer n >= 1. Float mode tolerates |sum - round(sum)| <= 1e-9 * N and
// then rescales by n / sum so downstream cumulative walks land exactly on
// integers (up to roundoff well below the frame's snap tolerance); exact
// mode requires an exact integer total and keeps the inputs verbatim.
inline DesignParams<double> validate_params(std::vector<double> probs) {
  const long long N = static_cast<long long>(probs.size());
  if (N == 0) throw ValidationError("empty probability vector");
  for (long long k = 0; k < N; ++k)
    if (!(probs[k] > 0.0) || !(probs[k] < 1.0))
      throw ProbOutOfRange(k + 1, std::to_string(probs[k]));
  const double sum = detail::kahan_sum(probs);
  const double nearest = std::round(sum);
  const double dev = std::abs(sum - nearest);
  if (dev > 1e-9 * static_cast<double>(N))
    throw NonIntegerTotal(sum, nearest, dev);
  const long long n = static_cast<long long>(nearest);
  if (n < 1) throw ValidationError("expected sample size must be at least 1");
  if (dev != 0.0) {
    const double scale = nearest / sum;
    for (double& p : probs) {
      p *= scale;
      if (p >= 1.0) p = std::nextafter(1.0, 0.0);
    }
  }
  return DesignParams<double>{std::move(probs), n};
}

inline DesignParams<Rational> validate_params(std::vector<Rational> probs) {
  const long long N = static_cast<long long>(probs.size());
  if (N == 0) throw ValidationError("empty probability vector");
  for (long long k = 0; k < N; ++k)
    if (probs[k] <= 0 || probs[k] >= 1)
      throw ProbOutOfRange(k + 1, format_rational(probs[k]));
  Rational sum = 0;
  for (const Rational& p : probs) sum += p;
  if (denominator(sum) != 1) {
    const double s = to_double(sum);
    throw NonIntegerTotal(s, std::round(s), std::abs(s - std::round(s)));
  }
  const long long n = numerator(sum).convert_to<long long>();
  if (n < 1) throw ValidationError("expected sample size must be at least 1");
  return DesignParams<Rational>{std::move(probs), n};
}

}  // namespace seqpps
