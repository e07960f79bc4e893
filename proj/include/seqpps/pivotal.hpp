#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seqpps/frame.hpp"
#include "seqpps/rng.hpp"

namespace seqpps {

namespace detail {

constexpr double kResidualSnap = 1e-12;

template <class T>
void snap_residual(T& r) {
  if constexpr (std::is_same_v<T, double>) {
    if (r > 1.0 - kResidualSnap) r = 1.0;
    if (r < kResidualSnap) r = 0.0;
  }
}

template <class T>
bool residual_active(const T& r) {
  return !(r == 0) && !(r == 1);
}

}  // namespace detail

// Ordered pivotal sampling: a succession of duels between the two first
// units whose probability is still fractional. When the two masses fit
// under 1 (boundary included) the duel is a rejection step: the loser is
// ruled out and the winner carries the combined mass at its own position.
// Otherwise it is a selection step: the winner enters the sample and the
// loser keeps the overflow. One uniform per duel, in duel order; every duel
// retires at least one unit, so at most N-1 duels resolve everything.
template <class T>
Sample pivotal_sample(const Frame<T>& fr, UniformSource& rng, std::uint64_t seed = 0) {
  const long long N = fr.N();
  std::vector<T> res = fr.params.probs;
  const auto next_active = [&](long long i) {
    ++i;
    while (i < N && !detail::residual_active(res[i])) ++i;
    return i;
  };
  long long duels = 0;
  long long f = next_active(-1);
  long long s = f < N ? next_active(f) : N;
  while (s < N) {
    if (++duels > N - 1)
      throw NonTermination("pivotal duel count exceeded N-1; residuals are corrupt");
    const T sum = res[f] + res[s];
    if (sum <= 1) {
      // rejection step: f absorbs the pair with probability res[f] / sum
      if (bernoulli(rng, res[f] / sum)) {
        res[f] = sum;
        res[s] = T(0);
      } else {
        res[f] = T(0);
        res[s] = sum;
      }
    } else {
      // selection step: f is selected with probability (1 - res[s]) / (2 - sum)
      if (bernoulli(rng, (T(1) - res[s]) / (T(2) - sum))) {
        res[f] = T(1);
        res[s] = sum - 1;
      } else {
        res[f] = sum - 1;
        res[s] = T(1);
      }
    }
    detail::snap_residual(res[f]);
    detail::snap_residual(res[s]);
    // at most one of the duellists is still fractional; it leads the next duel
    if (detail::residual_active(res[f])) {
      s = next_active(s);
    } else if (detail::residual_active(res[s])) {
      f = s;
      s = next_active(s);
    } else {
      f = next_active(s);
      s = f < N ? next_active(f) : N;
    }
  }
  long long ones = 0;
  for (long long k = 0; k < N; ++k)
    if (res[k] == 1) ++ones;
  if (f < N && detail::residual_active(res[f])) {
    // float-mode closure: accumulated roundoff can leave the last residual a
    // hair off its terminal value; the selected count decides which one
    const double r = to_double(res[f]);
    if (std::min(r, 1.0 - r) > 1e-6)
      throw NonTermination("pivotal scan left a fractional residual");
    if (ones == fr.n() - 1) {
      res[f] = T(1);
      ++ones;
    } else if (ones == fr.n()) {
      res[f] = T(0);
    } else {
      throw NonTermination("pivotal scan left a fractional residual");
    }
  }
  if (ones != fr.n())
    throw NonTermination("pivotal sample size mismatch");
  Sample out;
  for (long long k = 0; k < N; ++k)
    if (res[k] == 1) out.selected.push_back(k + 1);
  out.seed = seed;
  return out;
}

}  // namespace seqpps
