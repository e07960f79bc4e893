#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "seqpps/chromy.hpp"
#include "seqpps/frame.hpp"

namespace seqpps {

// The population regrouped around its cross-border units: 2n-1 clusters in
// unit order, alternating interior runs (odd positions u_1, u_3, ...) and
// cross-border singletons (even positions u_2, u_4, ...). phi is the
// probability mass of each cluster. Interior runs may be empty (adjacent
// cross-border units) with phi == 0, and the first interior run carries mass
// 1 when the first boundary splits with a = 0; both boundary shapes are kept
// on the general code path.
template <class T>
struct ClusteredPopulation {
  std::vector<std::pair<long long, long long>> clusters;  // inclusive 1-based unit ranges; empty when lo > hi
  std::vector<T> phi;

  long long size() const { return static_cast<long long>(clusters.size()); }
};

template <class T>
ClusteredPopulation<T> build_clustered(const Frame<T>& fr) {
  const long long N = fr.N();
  const long long n = fr.n();
  ClusteredPopulation<T> cp;
  cp.clusters.reserve(2 * n - 1);
  cp.phi.reserve(2 * n - 1);
  // boundary positions k_0 = 0 and k_n = N+1 close the ends
  std::vector<long long> kpos;
  kpos.reserve(n + 1);
  kpos.push_back(0);
  for (long long k : fr.cross_border) kpos.push_back(k);
  kpos.push_back(N + 1);
  const auto& vi = fr.profile.V_int;
  const auto& vf = fr.profile.V_frac;
  for (long long i = 1; i <= n; ++i) {
    const long long lo = kpos[i - 1] + 1;   // first unit after the previous crossing
    const long long hi = kpos[i] - 1;       // last unit before this crossing
    cp.clusters.emplace_back(lo, hi);
    // mass of units lo..hi as a profile difference; exact 0 for empty runs
    // and exact 1 for the full-boundary run even in float mode
    T mass = T(static_cast<long long>(vi[hi < lo ? lo - 1 : hi] - vi[lo - 1]));
    if (hi >= lo) mass += vf[hi] - vf[lo - 1];
    cp.phi.push_back(mass);
    if (i < n) {
      cp.clusters.emplace_back(kpos[i], kpos[i]);
      cp.phi.push_back(fr.params.probs[kpos[i] - 1]);
    }
  }
  return cp;
}

// Two-stage equivalent of the sequential design: stage 1 runs the
// sequential scan over the cluster masses (phi values of 0 and 1 resolve
// deterministically inside the scan), stage 2 picks one unit inside each
// selected cluster with probability pi_k / phi. One uniform per cluster in
// stage 1, then one uniform per selected cluster in stage 2, in cluster
// order.
template <class T>
Sample two_stage_sample(const ClusteredPopulation<T>& cp, const Frame<T>& fr,
                        UniformSource& rng, std::uint64_t seed = 0) {
  ChromyScan<T> scan(rng);
  for (long long c = 0; c < cp.size(); ++c) scan.push(c, cp.phi[c]);
  std::vector<long long> chosen = scan.finish();
  Sample out;
  for (long long c : chosen) {
    const auto [lo, hi] = cp.clusters[c];
    T target;
    if constexpr (std::is_same_v<T, double>) {
      target = rng.next() * cp.phi[c];
    } else {
      target = Rational(BigInt(rng.raw53()), BigInt(1) << 53) * cp.phi[c];
    }
    T cum(0);
    long long pick = hi;
    for (long long u = lo; u <= hi; ++u) {
      cum += fr.params.probs[u - 1];
      if (cum > target) {
        pick = u;
        break;
      }
    }
    out.selected.push_back(pick);
  }
  std::sort(out.selected.begin(), out.selected.end());
  out.seed = seed;
  return out;
}

// Conditional transition law of the ordered sample through the clusters:
// given the position of the i-th selected unit among {u_{2i-2}, u_{2i-1},
// u_{2i}}, the distribution of the (i+1)-th over {u_2i, u_{2i+1}, u_{2i+2}}.
// The first two rows coincide, and the end conventions are b_0 = a_n = 0.
template <class T>
struct TransitionTable {
  // rows[t][src][tgt], t = 0..n-2; src 0,1 are the pre-crossing states,
  // src 2 is the crossing singleton; tgt spans the next three clusters
  std::vector<std::array<std::array<T, 3>, 3>> rows;
};

template <class T>
TransitionTable<T> transition_table(const Frame<T>& fr) {
  const long long n = fr.n();
  if (n < 2)
    throw ValidationError("transition table needs a design with n >= 2");
  TransitionTable<T> tt;
  tt.rows.resize(n - 1);
  for (long long t = 0; t < n - 1; ++t) {
    const T& ai = fr.a[t];
    const T& bi = fr.b[t];
    const T an = (t + 1 < n - 1) ? fr.a[t + 1] : T(0);
    const T da = T(1) - ai;
    const T db = T(1) - bi;
    if (da == 0 || db == 0)
      throw DegenerateDenominator("boundary split of 1 at crossing " + std::to_string(t + 1));
    const T inner = T(1) - ai - bi;
    std::array<T, 3> pre = {bi / da, (db - an) * inner / (da * db), an * inner / (da * db)};
    std::array<T, 3> cb = {T(0), (db - an) / db, an / db};
    tt.rows[t] = {pre, pre, cb};
  }
  return tt;
}

}  // namespace seqpps
