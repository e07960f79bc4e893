#pragma once

// Shared fixtures: the two worked populations, the reference randomized
// matrix entries, and a grid-valued random population generator whose totals
// are exactly integer in both float and rational arithmetic.

#include <random>
#include <vector>

#include "seqpps/params.hpp"

namespace testsup {

inline std::vector<double> worked5() { return {0.4, 0.8, 0.5, 0.6, 0.7}; }

inline std::vector<seqpps::Rational> worked5_rational() {
  using seqpps::Rational;
  return {Rational(2, 5), Rational(4, 5), Rational(1, 2), Rational(3, 5), Rational(7, 10)};
}

inline std::vector<double> n8() { return {0.2, 0.4, 0.7, 0.4, 0.6, 0.6, 0.3, 0.8}; }

inline std::vector<seqpps::Rational> n8_rational() {
  std::vector<seqpps::Rational> v;
  for (int c : {2, 4, 7, 4, 6, 6, 3, 8}) v.emplace_back(c, 10);
  return v;
}

struct ReferenceEntry {
  int k, l;  // 0-based
  double v;  // reference 3-decimal value
};

inline const std::vector<ReferenceEntry>& n8_reference() {
  static const std::vector<ReferenceEntry> e = {
      {0, 1, 0.041}, {0, 2, 0.133}, {0, 3, 0.075}, {0, 4, 0.116}, {0, 5, 0.108},
      {0, 6, 0.046}, {0, 7, 0.081}, {1, 2, 0.171}, {1, 3, 0.142}, {1, 4, 0.224},
      {1, 5, 0.227}, {1, 6, 0.099}, {1, 7, 0.297}, {2, 3, 0.209}, {2, 4, 0.410},
      {2, 5, 0.415}, {2, 6, 0.207}, {2, 7, 0.555}, {3, 4, 0.118}, {3, 5, 0.224},
      {3, 6, 0.113}, {3, 7, 0.319}, {4, 5, 0.293}, {4, 6, 0.165}, {4, 7, 0.474},
      {5, 6, 0.065}, {5, 7, 0.469}, {6, 7, 0.205}};
  return e;
}

// Probabilities c_k/100 with c_k in 1..99 and sum exactly 100n. The greedy
// adjustment spreads the rounding remainder one count at a time.
inline std::vector<int> random_grid(std::mt19937_64& gen, long long N, long long n) {
  std::uniform_int_distribution<int> d(1, 99);
  for (;;) {
    std::vector<int> c(N);
    for (int& x : c) x = d(gen);
    long long s = 0;
    for (int x : c) s += x;
    const long long t = 100 * n;
    long long cur = 0;
    for (int& x : c) {
      x = std::max(1, std::min<int>(99, static_cast<int>(std::llround(
                                             static_cast<double>(x) * t / s))));
      cur += x;
    }
    long long rem = t - cur;
    for (long long i = 0, guard = 0; rem != 0 && guard < 10000; ++i, ++guard) {
      int& x = c[i % N];
      if (rem > 0 && x < 99) { ++x; --rem; }
      else if (rem < 0 && x > 1) { --x; ++rem; }
    }
    if (rem == 0) return c;
  }
}

inline std::vector<double> grid_to_double(const std::vector<int>& c) {
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i] / 100.0;
  return v;
}

inline std::vector<seqpps::Rational> grid_to_rational(const std::vector<int>& c) {
  std::vector<seqpps::Rational> v;
  v.reserve(c.size());
  for (int x : c) v.emplace_back(x, 100);
  return v;
}

}  // namespace testsup
