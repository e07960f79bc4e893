#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "seqpps/chromy.hpp"
#include "seqpps/frame.hpp"
#include "seqpps/rng.hpp"

namespace seqpps {

enum class MatrixProvenance { closed_form, permutation_averaged, monte_carlo };

template <class T>
struct JointProbabilityMatrix {
  long long N = 0;
  std::vector<T> v;  // dense row-major N*N, symmetric, diagonal = first order
  MatrixProvenance provenance = MatrixProvenance::closed_form;
  long long mc_draws = 0;

  T& at(long long i, long long j) { return v[i * N + j]; }
  const T& at(long long i, long long j) const { return v[i * N + j]; }
};

namespace detail {

template <class T>
T cross_factor(const T& a, const T& b) {
  return a * b / ((T(1) - a) * (T(1) - b));
}

// Closed-form pair probability for the non-randomized sequential design.
// Positions are 0-based and ordered, pk < pl. The geometry arguments come
// either from a Frame directly or from a precomputed rotation layout.
//
// The four shapes: two interior units of the same microstratum exclude each
// other; across microstrata the product pi_k * pi_l is damped by a chain of
// cross-factors c_i = a_i b_i / ((1-a_i)(1-b_i)), one per boundary strictly
// between the relevant strata, with extra edge terms when either endpoint is
// itself a cross-border unit. A boundary split with a_i = 0 zeroes its
// cross-factor and the chain with it.
template <class T, class Range>
T pair_value(const std::vector<T>& pi, const std::vector<int>& cbidx,
             const std::vector<int>& stratum, const std::vector<T>& b,
             long long pk, long long pl, Range&& crange) {
  const T& qk = pi[pk];
  const T& ql = pi[pl];
  const int ck = cbidx[pk];
  const int cl = cbidx[pl];
  if (ck < 0 && cl < 0) {
    const int si = stratum[pk], sj = stratum[pl];
    if (si == sj) return T(0);
    return qk * ql * (T(1) - crange(si, sj));
  }
  if (ck >= 0 && cl < 0) {
    const int si = ck + 1, sj = stratum[pl];
    return qk * ql * (T(1) - b[ck] * (T(1) - qk) / (qk * (T(1) - b[ck])) * crange(si, sj));
  }
  if (ck < 0 && cl >= 0) {
    const int si = stratum[pk], sj = cl + 1;
    return qk * ql * (T(1) - (T(1) - ql) * (T(1) - b[cl]) / (ql * b[cl]) * crange(si, sj));
  }
  const int si = ck + 1, sj = cl + 1;
  return qk * ql *
         (T(1) - b[ck] * (T(1) - b[cl]) * (T(1) - qk) * (T(1) - ql) /
                     (qk * ql * b[cl] * (T(1) - b[ck])) * crange(si, sj));
}

// Per-rotation layout with O(1) chain-product lookups. The double path
// stores prefix log-sums plus explicit zero counts (raw prefix products can
// leave the double range once a design has many boundaries); the exact path
// keeps the factors and multiplies the short chains directly.
template <class T>
struct RotationGeometry {
  std::vector<T> pi;
  std::vector<int> cbidx;    // crossing index per position, -1 for interior
  std::vector<int> stratum;  // crossings strictly before the position
  std::vector<T> b;
  std::vector<T> cfac;
  std::vector<double> lcf;  // prefix sums of log cfac (double path)
  std::vector<int> zcnt;    // prefix counts of zero cfac

  T crange(int si, int sj) const {
    if constexpr (std::is_same_v<T, double>) {
      if (zcnt[sj] - zcnt[si] > 0) return 0.0;
      return std::exp(lcf[sj] - lcf[si]);
    } else {
      T r(1);
      for (int m = si; m < sj; ++m) r *= cfac[m];
      return r;
    }
  }

  T eval(long long pk, long long pl) const {
    return pair_value(pi, cbidx, stratum, b, pk, pl,
                      [this](int si, int sj) { return crange(si, sj); });
  }
};

template <class T>
RotationGeometry<T> rotation_geometry(const DesignParams<T>& params, long long start) {
  const long long N = params.N();
  DesignParams<T> rot;
  rot.n = params.n;
  rot.probs.resize(N);
  for (long long j = 0; j < N; ++j) rot.probs[j] = params.probs[(start + j) % N];
  Frame<T> fr = build_frame(std::move(rot));
  RotationGeometry<T> g;
  g.pi = std::move(fr.params.probs);
  g.b = fr.b;
  g.cbidx.assign(N, -1);
  g.stratum.resize(N);
  const long long nc = static_cast<long long>(fr.cross_border.size());
  for (long long c = 0; c < nc; ++c) g.cbidx[fr.cross_border[c] - 1] = static_cast<int>(c);
  long long passed = 0;
  for (long long pos = 0; pos < N; ++pos) {
    g.stratum[pos] = static_cast<int>(passed);
    if (g.cbidx[pos] >= 0) ++passed;
  }
  g.cfac.resize(nc);
  for (long long c = 0; c < nc; ++c) g.cfac[c] = cross_factor(fr.a[c], fr.b[c]);
  if constexpr (std::is_same_v<T, double>) {
    g.lcf.assign(nc + 1, 0.0);
    g.zcnt.assign(nc + 1, 0);
    for (long long c = 0; c < nc; ++c) {
      g.lcf[c + 1] = g.lcf[c] + (g.cfac[c] > 0.0 ? std::log(g.cfac[c]) : 0.0);
      g.zcnt[c + 1] = g.zcnt[c] + (g.cfac[c] == 0.0 ? 1 : 0);
    }
  }
  return g;
}

}  // namespace detail

// Closed-form second-order inclusion probability of the plain sequential
// design for one unit pair (1-based, k != l).
template <class T>
T second_order_chromy(const Frame<T>& fr, long long k, long long l) {
  if (k == l || k < 1 || l < 1 || k > fr.N() || l > fr.N())
    throw DimensionMismatch("pair indices must be distinct units in 1..N");
  if (k > l) std::swap(k, l);
  const auto& cb = fr.cross_border;
  const auto crossing_of = [&](long long u) -> int {
    auto it = std::lower_bound(cb.begin(), cb.end(), u);
    if (it != cb.end() && *it == u) return static_cast<int>(it - cb.begin());
    return -1;
  };
  const auto stratum_of = [&](long long u) -> int {
    return static_cast<int>(std::lower_bound(cb.begin(), cb.end(), u) - cb.begin());
  };
  std::vector<int> cbidx = {crossing_of(k), crossing_of(l)};
  std::vector<int> stratum = {stratum_of(k), stratum_of(l)};
  std::vector<T> pi = {fr.params.probs[k - 1], fr.params.probs[l - 1]};
  const auto crange = [&](int si, int sj) {
    T r(1);
    for (int m = si; m < sj; ++m) r *= detail::cross_factor(fr.a[m], fr.b[m]);
    return r;
  };
  return detail::pair_value(pi, cbidx, stratum, fr.b, 0, 1, crange);
}

// Permutation-averaged matrix: the pair probability of the randomized design
// is the pi_s/n - weighted average of the closed form over all N circular
// rotations. Cost O(N^3) with O(1) per pair and rotation.
//
// Serial reference: rotation-major accumulation in textbook order.
template <class T>
JointProbabilityMatrix<T> randomized_matrix_serial(const DesignParams<T>& params) {
  const long long N = params.N();
  JointProbabilityMatrix<T> M;
  M.N = N;
  M.v.assign(N * N, T(0));
  M.provenance = MatrixProvenance::permutation_averaged;
  for (long long s = 0; s < N; ++s) {
    const detail::RotationGeometry<T> g = detail::rotation_geometry(params, s);
    const T w = params.probs[s] / T(params.n);
    for (long long k = 0; k < N; ++k) {
      for (long long l = k + 1; l < N; ++l) {
        long long pk = (k - s + N) % N;
        long long pl = (l - s + N) % N;
        if (pk > pl) std::swap(pk, pl);
        M.at(k, l) += w * g.eval(pk, pl);
      }
    }
  }
  for (long long k = 0; k < N; ++k) {
    M.at(k, k) = params.probs[k];
    for (long long l = k + 1; l < N; ++l) M.at(l, k) = M.at(k, l);
  }
  return M;
}

// Parallel kernel: pairs-major, each worker owns disjoint matrix entries and
// walks the rotations in a fixed order, so the result is bit-identical for
// any thread count.
template <class T>
JointProbabilityMatrix<T> randomized_matrix(const DesignParams<T>& params) {
  const long long N = params.N();
  std::vector<detail::RotationGeometry<T>> geoms;
  geoms.reserve(N);
  for (long long s = 0; s < N; ++s) geoms.push_back(detail::rotation_geometry(params, s));
  std::vector<T> w(N);
  for (long long s = 0; s < N; ++s) w[s] = params.probs[s] / T(params.n);
  JointProbabilityMatrix<T> M;
  M.N = N;
  M.v.assign(N * N, T(0));
  M.provenance = MatrixProvenance::permutation_averaged;
  const long long npairs = N * (N - 1) / 2;
#pragma omp parallel for schedule(dynamic, 64)
  for (long long idx = 0; idx < npairs; ++idx) {
    // unrank the (k,l) pair, k < l, from the flat index
    long long k = static_cast<long long>(
        (2 * N - 1 - std::sqrt(static_cast<double>((2 * N - 1) * (2 * N - 1) - 8 * idx))) / 2);
    while ((k + 1) * (2 * N - k - 2) / 2 <= idx) ++k;
    while (k * (2 * N - k - 1) / 2 > idx) --k;
    const long long l = k + 1 + (idx - k * (2 * N - k - 1) / 2);
    T acc(0);
    for (long long s = 0; s < N; ++s) {
      long long pk = (k - s + N) % N;
      long long pl = (l - s + N) % N;
      if (pk > pl) std::swap(pk, pl);
      acc += w[s] * geoms[s].eval(pk, pl);
    }
    M.at(k, l) = acc;
    M.at(l, k) = acc;
  }
  for (long long k = 0; k < N; ++k) M.at(k, k) = params.probs[k];
  return M;
}

// Empirical matrix over seeded randomized draws, sharded for parallelism;
// shard counts are integers, so the merged result is independent of
// scheduling. One shard is 65536 draws.
inline JointProbabilityMatrix<double> monte_carlo_matrix(const DesignParams<double>& params,
                                                         long long draws,
                                                         std::uint64_t seed) {
  if (draws < 1) throw ValidationError("monte-carlo matrix needs at least one draw");
  const long long N = params.N();
  constexpr long long kShard = 65536;
  const long long shards = (draws + kShard - 1) / kShard;
  std::vector<std::uint64_t> counts(N * N, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(N * N, 0);
    std::vector<long long> sel;
    sel.reserve(params.n);
#pragma omp for schedule(dynamic)
    for (long long sh = 0; sh < shards; ++sh) {
      UniformSource rng(derive_seed(seed, static_cast<std::uint64_t>(sh)));
      const long long lo = sh * kShard;
      const long long hi = std::min(draws, lo + kShard);
      for (long long d = lo; d < hi; ++d) {
        sel.clear();
        const long long start = detail::pick_start(params, rng);
        detail::ProfileWalker<double> w;
        long long count = 0;
        for (long long j = 0; j < N; ++j) {
          const long long orig = (start + j) % N;
          const long long prev_int = w.v_int;
          const double prev_frac = w.v_frac;
          w.advance(params.probs[orig]);
          const double p = detail::transition_prob(prev_int, prev_frac, w.v_int,
                                                   w.v_frac, params.probs[orig], count);
          if (bernoulli(rng, p)) {
            ++count;
            sel.push_back(orig);
          }
          if (count < w.v_int || count > w.v_int + 1)
            throw InvariantViolation(j + 1, count, w.v_int, w.v_int + 1);
        }
        for (std::size_t i = 0; i < sel.size(); ++i) {
          ++local[sel[i] * N + sel[i]];
          for (std::size_t j = i + 1; j < sel.size(); ++j) {
            const long long a = std::min(sel[i], sel[j]);
            const long long b = std::max(sel[i], sel[j]);
            ++local[a * N + b];
          }
        }
      }
    }
#pragma omp critical
    for (long long i = 0; i < N * N; ++i) counts[i] += local[i];
  }
  JointProbabilityMatrix<double> M;
  M.N = N;
  M.v.assign(N * N, 0.0);
  M.provenance = MatrixProvenance::monte_carlo;
  M.mc_draws = draws;
  const double inv = 1.0 / static_cast<double>(draws);
  for (long long k = 0; k < N; ++k) {
    M.at(k, k) = static_cast<double>(counts[k * N + k]) * inv;
    for (long long l = k + 1; l < N; ++l) {
      const double p = static_cast<double>(counts[k * N + l]) * inv;
      M.at(k, l) = p;
      M.at(l, k) = p;
    }
  }
  return M;
}

}  // namespace seqpps
