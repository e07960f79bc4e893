#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "seqpps/frame.hpp"
#include "seqpps/rng.hpp"

namespace seqpps {

// Strictly sequential scan: each pushed unit is decided on the spot from the
// running profile and the count of selections so far, consuming exactly one
// uniform draw per unit in scan order. State is O(1) beyond the selected
// ids, so arbitrarily long populations can be streamed through it.
template <class T>
class ChromyScan {
 public:
  explicit ChromyScan(UniformSource& rng) : rng_(&rng) {}

  bool push(long long id, const T& pi) {
    const long long prev_int = walker_.v_int;
    const T prev_frac = walker_.v_frac;
    walker_.advance(pi);
    const T p = detail::transition_prob(prev_int, prev_frac, walker_.v_int,
                                        walker_.v_frac, pi, count_);
    ++scanned_;
    const bool take = bernoulli(*rng_, p);
    if (take) {
      ++count_;
      selected_.push_back(id);
    }
    if (count_ < walker_.v_int || count_ > walker_.v_int + 1)
      throw InvariantViolation(scanned_, count_, walker_.v_int, walker_.v_int + 1);
    return take;
  }

  // Closes the stream; the profile must have accumulated an integer total,
  // which forces the selected count to equal it.
  std::vector<long long> finish() {
    if (!(walker_.v_frac == 0))
      throw NonIntegerTotal(static_cast<double>(walker_.v_int) + to_double(walker_.v_frac),
                            static_cast<double>(walker_.v_int), to_double(walker_.v_frac));
    if (count_ != walker_.v_int)
      throw InvariantViolation(scanned_, count_, walker_.v_int, walker_.v_int);
    return std::move(selected_);
  }

  long long scanned() const { return scanned_; }
  long long count() const { return count_; }

 private:
  UniformSource* rng_;
  detail::ProfileWalker<T> walker_;
  long long count_ = 0;
  long long scanned_ = 0;
  std::vector<long long> selected_;
};

template <class T>
Sample chromy_sample(const Frame<T>& fr, UniformSource& rng, std::uint64_t seed = 0) {
  ChromyScan<T> scan(rng);
  for (long long k = 1; k <= fr.N(); ++k) scan.push(k, fr.params.probs[k - 1]);
  Sample s;
  s.selected = scan.finish();
  s.seed = seed;
  return s;
}

namespace detail {

// Start unit of the circular permutation, drawn with probability pi_k / n
// from a single uniform: smallest s with cum(s+1) > u * n.
template <class T>
long long pick_start(const DesignParams<T>& params, UniformSource& rng) {
  T target;
  if constexpr (std::is_same_v<T, double>) {
    target = rng.next() * static_cast<double>(params.n);
  } else {
    target = Rational(BigInt(rng.raw53()), BigInt(1) << 53) * params.n;
  }
  T cum(0);
  for (long long s = 0; s < params.N(); ++s) {
    cum += params.probs[s];
    if (cum > target) return s;  // 0-based
  }
  return params.N() - 1;  // float roundoff guard; unreachable in exact mode
}

}  // namespace detail

// Randomized variant: rotate the population to start at a unit drawn with
// probability pi_k / n, run the sequential scan over the rotated order, map
// the selected positions back. The rotation costs a second pass over the
// probabilities; that is the price of randomization.
template <class T>
Sample randomized_chromy_sample(const Frame<T>& fr, UniformSource& rng,
                                std::uint64_t seed = 0) {
  const long long N = fr.N();
  const long long start = detail::pick_start(fr.params, rng);  // 0-based
  ChromyScan<T> scan(rng);
  for (long long j = 0; j < N; ++j) {
    const long long orig = (start + j) % N;  // 0-based original position
    scan.push(orig + 1, fr.params.probs[orig]);
  }
  Sample s;
  s.selected = scan.finish();
  std::sort(s.selected.begin(), s.selected.end());
  s.permutation_start = start + 1;
  s.seed = seed;
  return s;
}

}  // namespace seqpps
