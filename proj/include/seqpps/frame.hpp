#pragma once

#include <utility>
#include <vector>

#include "seqpps/params.hpp"

namespace seqpps {

// Cumulative profile of the design: V_k = sum of the first k probabilities,
// stored as integer part plus fractional part with V_frac in [0,1). Index 0
// is the empty prefix. A V_k that lands exactly on an integer has
// V_frac[k] == 0 by convention.
template <class T>
struct CumulativeProfile {
  std::vector<long long> V_int;  // size N+1, V_int[0] == 0
  std::vector<T> V_frac;         // size N+1, V_frac[0] == 0

  long long N() const { return static_cast<long long>(V_int.size()) - 1; }
};

namespace detail {

constexpr double kIntegerSnap = 1e-9;

// One-pass accumulator for the cumulative profile, shared by frame
// construction, the sequential sampler and the enumeration oracle so that
// boundary classification can never diverge between them. The double
// instantiation keeps a Kahan compensation term; the carry subtracts an
// exact 1.0 and is error-free. Fractions within kIntegerSnap below an
// integer are snapped onto it (and the compensation is dropped, since the
// discarded residue is exactly what the snap deems noise).
template <class T>
struct ProfileWalker {
  long long v_int = 0;
  T v_frac{};
  T comp{};  // unused (stays zero) in the exact mode

  void advance(const T& pi) {
    if constexpr (std::is_same_v<T, double>) {
      double y = pi - comp;
      double t = v_frac + y;
      comp = (t - v_frac) - y;
      v_frac = t;
      if (v_frac >= 1.0) {
        v_frac -= 1.0;
        ++v_int;
        if (v_frac < kIntegerSnap) {
          v_frac = 0.0;
          comp = 0.0;
        }
      } else if (v_frac > 1.0 - kIntegerSnap) {
        v_frac = 0.0;
        comp = 0.0;
        ++v_int;
      }
      if (v_frac < 0.0) v_frac = 0.0;
    } else {
      v_frac += pi;
      if (v_frac >= 1) {
        v_frac -= 1;
        ++v_int;
      }
    }
  }
};

// Conditional selection probability of the unit that moved the profile from
// (prev_int, prev_frac) to (cur_int, cur_frac), given the number of
// selections so far. Two regimes: a rising fractional part means no integer
// boundary was crossed (the unit is selected only if the count still sits at
// the lower bound), a non-rising one means the boundary was crossed (the
// unit is forced in when the count lags, and otherwise rides the ratio of
// fractional parts). pi equal to 0 or 1 never occurs for validated
// parameters but does for cluster-level probabilities, where the outcome is
// deterministic.
template <class T>
T transition_prob(long long prev_int, const T& prev_frac, long long /*cur_int*/,
                  const T& cur_frac, const T& pi, long long count) {
  if (pi == 0) return T(0);
  if (pi == 1) return T(1);
  if (cur_frac > prev_frac) {
    if (count != prev_int) return T(0);
    return (cur_frac - prev_frac) / (T(1) - prev_frac);
  }
  if (prev_frac == 0)
    throw InvariantViolation(
        "transition step hit a zero fractional part on the falling branch; "
        "cumulative profile is corrupt");
  if (count == prev_int) return T(1);
  return cur_frac / prev_frac;
}

}  // namespace detail

// Cross-border geometry of a design. cross_border[i-1] is the unit k_i whose
// probability interval straddles the integer boundary i, split there into a
// left mass a[i-1] and right mass b[i-1]. Microstrata are the inclusive unit
// ranges between consecutive cross-border units; adjacent ones share exactly
// their cross-border unit.
template <class T>
struct Frame {
  DesignParams<T> params;
  CumulativeProfile<T> profile;
  std::vector<long long> cross_border;                   // k_1..k_{n-1}, 1-based
  std::vector<T> a;                                      // a_i = i - V_{k_i - 1}
  std::vector<T> b;                                      // b_i = V_{k_i} - i
  std::vector<std::pair<long long, long long>> microstrata;  // inclusive ranges

  long long N() const { return params.N(); }
  long long n() const { return params.n; }
};

// Builds the profile and cross-border structure in one pass. A unit is
// cross-border for boundary i when V_{k-1} <= i and V_k > i (strictly); a
// prefix landing exactly on an integer therefore pushes the boundary onto
// the NEXT unit, with a = 0.
template <class T>
Frame<T> build_frame(DesignParams<T> params) {
  const long long N = params.N();
  const long long n = params.n;
  Frame<T> fr;
  fr.profile.V_int.resize(N + 1);
  fr.profile.V_frac.resize(N + 1);
  fr.profile.V_int[0] = 0;
  fr.profile.V_frac[0] = T(0);

  detail::ProfileWalker<T> w;
  for (long long k = 1; k <= N; ++k) {
    const long long prev_int = w.v_int;
    const T prev_frac = w.v_frac;
    w.advance(params.probs[k - 1]);
    fr.profile.V_int[k] = w.v_int;
    fr.profile.V_frac[k] = w.v_frac;

    if (prev_frac == 0 && prev_int >= 1 && prev_int <= n - 1) {
      // previous prefix sat exactly on boundary i = prev_int
      fr.cross_border.push_back(k);
      fr.a.push_back(T(0));
      fr.b.push_back(w.v_frac);
    } else if (w.v_int == prev_int + 1 && w.v_frac > 0 && w.v_int <= n - 1) {
      fr.cross_border.push_back(k);
      fr.a.push_back(T(1) - prev_frac);
      fr.b.push_back(w.v_frac);
    }
  }
  if (w.v_int != n || !(w.v_frac == 0))
    throw InvariantViolation("cumulative profile does not close at the sample size");
  if (static_cast<long long>(fr.cross_border.size()) != n - 1)
    throw InvariantViolation("expected " + std::to_string(n - 1) +
                             " cross-border units, found " +
                             std::to_string(fr.cross_border.size()));

  fr.microstrata.reserve(n);
  for (long long i = 1; i <= n; ++i) {
    long long lo = (i == 1) ? 1 : fr.cross_border[i - 2];
    long long hi = (i == n) ? N : fr.cross_border[i - 1];
    fr.microstrata.emplace_back(lo, hi);
  }
  fr.params = std::move(params);
  return fr;
}

}  // namespace seqpps
