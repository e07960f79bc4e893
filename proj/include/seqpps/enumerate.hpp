#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqpps/cluster.hpp"
#include "seqpps/frame.hpp"

namespace seqpps {

enum class SamplerTag { chromy, pivotal, two_stage, randomized_chromy };

inline const char* sampler_tag_name(SamplerTag t) {
  switch (t) {
    case SamplerTag::chromy: return "chromy";
    case SamplerTag::pivotal: return "pivotal";
    case SamplerTag::two_stage: return "two-stage";
    case SamplerTag::randomized_chromy: return "randomized-chromy";
  }
  return "?";
}

// Exact law of a sampling algorithm over all samples, as a map from the
// sorted unit set to its rational probability. Ground truth for the
// equivalence and unbiasedness tests.
struct DesignDistribution {
  SamplerTag tag = SamplerTag::chromy;
  long long N = 0;
  long long n = 0;
  std::map<std::vector<long long>, Rational> p;

  Rational total() const {
    Rational t = 0;
    for (const auto& [s, q] : p) t += q;
    return t;
  }
};

namespace detail {

// Depth-first traversal of the sequential scan's decision tree over an
// arbitrary probability vector with integer total (cluster masses of 0 or 1
// resolve deterministically, so those branches never fork). emit receives
// the 0-based selected indices and the leaf probability.
template <class Emit>
void enumerate_scan_tree(const std::vector<Rational>& probs, Emit&& emit) {
  const long long N = static_cast<long long>(probs.size());
  std::vector<long long> sel;
  ProfileWalker<Rational> w;
  const auto rec = [&](auto&& self, long long k, ProfileWalker<Rational> state,
                       long long count, const Rational& pr) -> void {
    if (k == N) {
      emit(sel, pr);
      return;
    }
    ProfileWalker<Rational> next = state;
    next.advance(probs[k]);
    const Rational ps = transition_prob(state.v_int, state.v_frac, next.v_int,
                                        next.v_frac, probs[k], count);
    if (ps != 0) {
      sel.push_back(k);
      self(self, k + 1, next, count + 1, pr * ps);
      sel.pop_back();
    }
    if (ps != 1) self(self, k + 1, next, count, pr * (1 - ps));
  };
  rec(rec, 0, w, 0, Rational(1));
}

template <class Emit>
void enumerate_duel_tree(std::vector<Rational>& res, long long duels, const Rational& pr,
                         Emit&& emit) {
  const long long N = static_cast<long long>(res.size());
  long long f = 0;
  while (f < N && (res[f] == 0 || res[f] == 1)) ++f;
  long long s = f + 1;
  while (s < N && (res[s] == 0 || res[s] == 1)) ++s;
  if (s >= N) {
    if (f < N)
      throw NonTermination("duel tree left a fractional residual");
    std::vector<long long> sel;
    for (long long k = 0; k < N; ++k)
      if (res[k] == 1) sel.push_back(k);
    emit(sel, pr);
    return;
  }
  if (duels >= N - 1)
    throw NonTermination("duel tree exceeded N-1 duels");
  const Rational sum = res[f] + res[s];
  if (sum <= 1) {
    const Rational pf = res[f] / sum;
    {
      std::vector<Rational> r = res;
      r[f] = sum;
      r[s] = 0;
      enumerate_duel_tree(r, duels + 1, pr * pf, emit);
    }
    {
      std::vector<Rational> r = res;
      r[f] = 0;
      r[s] = sum;
      enumerate_duel_tree(r, duels + 1, pr * (1 - pf), emit);
    }
  } else {
    const Rational pf = (1 - res[s]) / (2 - sum);
    {
      std::vector<Rational> r = res;
      r[f] = 1;
      r[s] = sum - 1;
      enumerate_duel_tree(r, duels + 1, pr * pf, emit);
    }
    {
      std::vector<Rational> r = res;
      r[f] = sum - 1;
      r[s] = 1;
      enumerate_duel_tree(r, duels + 1, pr * (1 - pf), emit);
    }
  }
}

inline void add_sample(DesignDistribution& d, std::vector<long long> key, const Rational& pr) {
  if (pr == 0) return;
  auto it = d.p.find(key);
  if (it == d.p.end())
    d.p.emplace(std::move(key), pr);
  else
    it->second += pr;
}

}  // namespace detail

inline DesignDistribution enumerate_design(SamplerTag tag,
                                           const DesignParams<Rational>& params,
                                           long long cap = 12) {
  const long long N = params.N();
  if (N > cap) throw PopulationTooLarge(N, cap);
  DesignDistribution d;
  d.tag = tag;
  d.N = N;
  d.n = params.n;
  switch (tag) {
    case SamplerTag::chromy: {
      detail::enumerate_scan_tree(params.probs, [&](const std::vector<long long>& sel,
                                                    const Rational& pr) {
        std::vector<long long> key(sel.size());
        for (std::size_t i = 0; i < sel.size(); ++i) key[i] = sel[i] + 1;
        detail::add_sample(d, std::move(key), pr);
      });
      break;
    }
    case SamplerTag::pivotal: {
      std::vector<Rational> res = params.probs;
      detail::enumerate_duel_tree(res, 0, Rational(1),
                                  [&](const std::vector<long long>& sel, const Rational& pr) {
                                    std::vector<long long> key(sel.size());
                                    for (std::size_t i = 0; i < sel.size(); ++i)
                                      key[i] = sel[i] + 1;
                                    detail::add_sample(d, std::move(key), pr);
                                  });
      break;
    }
    case SamplerTag::two_stage: {
      const Frame<Rational> fr = build_frame(params);
      const ClusteredPopulation<Rational> cp = build_clustered(fr);
      detail::enumerate_scan_tree(cp.phi, [&](const std::vector<long long>& csel,
                                              const Rational& pr) {
        // expand stage 2: one unit per selected cluster, probability pi/phi
        std::vector<long long> units;
        const auto expand = [&](auto&& self, std::size_t i, const Rational& q) -> void {
          if (i == csel.size()) {
            detail::add_sample(d, units, q);
            return;
          }
          const auto [lo, hi] = cp.clusters[csel[i]];
          for (long long u = lo; u <= hi; ++u) {
            units.push_back(u);
            self(self, i + 1, q * params.probs[u - 1] / cp.phi[csel[i]]);
            units.pop_back();
          }
        };
        expand(expand, 0, pr);
      });
      break;
    }
    case SamplerTag::randomized_chromy: {
      for (long long s = 0; s < N; ++s) {
        const Rational w = params.probs[s] / params.n;
        std::vector<Rational> rot(N);
        for (long long j = 0; j < N; ++j) rot[j] = params.probs[(s + j) % N];
        detail::enumerate_scan_tree(rot, [&](const std::vector<long long>& sel,
                                             const Rational& pr) {
          std::vector<long long> key(sel.size());
          for (std::size_t i = 0; i < sel.size(); ++i) key[i] = (sel[i] + s) % N + 1;
          std::sort(key.begin(), key.end());
          detail::add_sample(d, std::move(key), w * pr);
        });
      }
      break;
    }
  }
  return d;
}

// Exact design moments: first- and second-order inclusion probabilities and,
// when a value vector is supplied, the exact expectation and variance of the
// weighted total estimator under the enumerated law.
struct DesignMoments {
  std::vector<Rational> first_order;
  std::vector<std::vector<Rational>> second;
  std::optional<Rational> e_ht;
  std::optional<Rational> var_ht;
};

inline DesignMoments design_moments(const DesignDistribution& d,
                                    const std::vector<Rational>* y = nullptr) {
  const long long N = d.N;
  if (y && static_cast<long long>(y->size()) != N)
    throw DimensionMismatch("value vector has " + std::to_string(y->size()) +
                            " entries for a population of " + std::to_string(N));
  DesignMoments m;
  m.first_order.assign(N, Rational(0));
  m.second.assign(N, std::vector<Rational>(N, Rational(0)));
  for (const auto& [s, pr] : d.p) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      m.first_order[s[i] - 1] += pr;
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        m.second[s[i] - 1][s[j] - 1] += pr;
        m.second[s[j] - 1][s[i] - 1] += pr;
      }
    }
  }
  for (long long k = 0; k < N; ++k) m.second[k][k] = m.first_order[k];
  if (y) {
    Rational e = 0, e2 = 0;
    for (const auto& [s, pr] : d.p) {
      Rational ht = 0;
      for (long long k : s) ht += (*y)[k - 1] / m.first_order[k - 1];
      e += pr * ht;
      e2 += pr * ht * ht;
    }
    m.e_ht = e;
    m.var_ht = e2 - e * e;
  }
  return m;
}

}  // namespace seqpps
