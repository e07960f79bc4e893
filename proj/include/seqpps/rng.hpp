#pragma once

#include <cstdint>
#include <random>

#include "seqpps/rational.hpp"

namespace seqpps {

// Seeded uniform generator. The mapping (x >> 11) * 2^-53 yields a uniform
// with exactly 53 random bits, so the same value is representable both as a
// double and as the exact dyadic rational mantissa / 2^53. All samplers
// consume draws through bernoulli() below, one draw per decision.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw53() { return gen_() >> 11; }
  double next() { return static_cast<double>(raw53()) * 0x1.0p-53; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline bool bernoulli(UniformSource& u, double p) { return u.next() < p; }

inline bool bernoulli(UniformSource& u, const Rational& p) {
  // u < p compared exactly: u = m / 2^53 with m in [0, 2^53)
  std::uint64_t m = u.raw53();
  return Rational(BigInt(m), BigInt(1) << 53) < p;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Documented seed-splitting rule: worker/replicate streams are derived from
// one master seed so parallel work stays reproducible regardless of
// scheduling. Stream ids are small consecutive integers chosen per use site.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

}  // namespace seqpps
