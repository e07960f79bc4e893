// Times the serial and the parallel randomized-matrix kernels on growing
// populations and checks that they produce bitwise-identical results.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "seqpps/joint.hpp"

using namespace seqpps;

namespace {

DesignParams<double> make_population(long long N, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> du(0.2, 0.8);
  std::vector<double> x(N);
  double s = 0;
  for (double& v : x) {
    v = du(gen);
    s += v;
  }
  const long long n = std::llround(s);
  for (double& v : x) v *= static_cast<double>(n) / s;
  return validate_params(std::move(x));
}

template <class F>
double time_ms(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%8s %6s %12s %12s %9s %s\n", "N", "n", "serial (ms)", "parallel (ms)",
              "speedup", "identical");
  for (long long N : {64, 128, 256, 512}) {
    const auto params = make_population(N, 0xBE57 + static_cast<std::uint64_t>(N));
    JointProbabilityMatrix<double> serial, parallel;
    const double ts = time_ms([&] { serial = randomized_matrix_serial(params); });
    const double tp = time_ms([&] { parallel = randomized_matrix(params); });
    bool same = serial.N == parallel.N;
    for (std::size_t i = 0; same && i < serial.v.size(); ++i)
      same = serial.v[i] == parallel.v[i];
    std::printf("%8lld %6lld %12.1f %12.1f %8.2fx %s\n", N, params.n, ts, tp, ts / tp,
                same ? "yes" : "NO");
    if (!same) return 1;
  }
  return 0;
}
