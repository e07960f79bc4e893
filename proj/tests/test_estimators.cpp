#include <doctest.h>

#include "seqpps/enumerate.hpp"
#include "seqpps/estimators.hpp"
#include "support.hpp"

using namespace seqpps;

namespace {

JointProbabilityMatrix<Rational> matrix_from_moments(const DesignMoments& m, long long N) {
  JointProbabilityMatrix<Rational> out;
  out.N = N;
  out.v.assign(N * N, Rational(0));
  for (long long k = 0; k < N; ++k)
    for (long long l = 0; l < N; ++l) out.at(k, l) = m.second[k][l];
  return out;
}

}  // namespace

TEST_CASE("weighted total by hand") {
  DesignParams<double> params{{0.5, 0.5}, 1};
  Sample s;
  s.selected = {1};
  CHECK(horvitz_thompson(s, {1.0, 3.0}, params) == 2.0);
  s.selected = {2};
  CHECK(horvitz_thompson(s, {1.0, 3.0}, params) == 6.0);
  s.selected = {1, 2};
  CHECK(horvitz_thompson(s, {1.0, 3.0}, params) == 8.0);
  s.selected = {3};
  CHECK_THROWS_AS((void)horvitz_thompson(s, {1.0, 3.0}, params), DimensionMismatch);
  s.selected = {1};
  CHECK_THROWS_AS((void)horvitz_thompson(s, {1.0}, params), DimensionMismatch);
}

TEST_CASE("variance estimator is exactly unbiased over the enumerated law") {
  std::mt19937_64 gen(121);
  for (int trial = 0; trial < 6; ++trial) {
    const long long N = 3 + static_cast<long long>(gen() % 4);
    const long long n = 2 + static_cast<long long>(gen() % (N - 2 > 0 ? N - 2 : 1));
    if (n >= N) continue;
    const auto params =
        validate_params(testsup::grid_to_rational(testsup::random_grid(gen, N, n)));
    std::vector<Rational> y;
    for (long long k = 0; k < N; ++k)
      y.emplace_back(1 + static_cast<long long>(gen() % 50),
                     1 + static_cast<long long>(gen() % 9));
    const DesignDistribution d = enumerate_design(SamplerTag::randomized_chromy, params);
    const DesignMoments mom = design_moments(d, &y);
    const JointProbabilityMatrix<Rational> m = matrix_from_moments(mom, N);

    Rational expected = 0;
    for (const auto& [sel, pr] : d.p) {
      Sample s;
      s.selected = sel;
      expected += pr * syg_variance(s, y, params, m);
    }
    REQUIRE(expected == *mom.var_ht);
    REQUIRE(variance_from_matrix(m, y, params) == *mom.var_ht);
  }
}

TEST_CASE("jointly impossible sampled pairs are rejected") {
  DesignParams<double> params{{0.5, 0.5, 0.5, 0.5}, 2};
  JointProbabilityMatrix<double> m;
  m.N = 4;
  m.v.assign(16, 0.1);
  m.at(0, 1) = 0.0;
  m.at(1, 0) = 0.0;
  Sample s;
  s.selected = {1, 2};
  CHECK_THROWS_AS((void)syg_variance(s, {1.0, 2.0, 3.0, 4.0}, params, m),
                  ZeroJointProbability);
}

TEST_CASE("interval record") {
  const EstimateRecord r = make_estimate_record(100.0, 4.0, 2.0);
  CHECK(r.ht == 100.0);
  CHECK(r.ci_low == 96.0);
  CHECK(r.ci_high == 104.0);
  // a negative estimate collapses the interval instead of poisoning it
  const EstimateRecord neg = make_estimate_record(100.0, -1.0, 2.0);
  CHECK(neg.ci_low == 100.0);
  CHECK(neg.ci_high == 100.0);
}

TEST_CASE("replication summaries by hand") {
  std::vector<EstimateRecord> reps = {
      make_estimate_record(10.0, 2.0, 1.0),   // interval [8.59, 11.41]
      make_estimate_record(10.0, 6.0, 1.0),   // interval [7.55, 12.45]
      make_estimate_record(20.0, 4.0, 1.0),   // interval [18, 22] -> misses below
      make_estimate_record(0.0, 4.0, 1.0),    // interval [-2, 2] -> misses above
  };
  const McSummary s = mc_summaries(reps, 10.0, 4.0);
  CHECK(s.B == 4);
  // mean deviation of the variance estimates: (-2 + 2 + 0 + 0) / 4 = 0
  CHECK(s.rb == doctest::Approx(0.0));
  CHECK(s.rrmse == doctest::Approx(100.0 * std::sqrt(2.0) / 4.0));
  CHECK(s.cover_low == doctest::Approx(0.25));
  CHECK(s.cover_high == doctest::Approx(0.25));
  CHECK(s.cover_total == doctest::Approx(0.5));

  CHECK_THROWS_AS((void)mc_summaries({}, 10.0, 4.0), ValidationError);
  CHECK_THROWS_AS((void)mc_summaries(reps, 10.0, 0.0), ZeroTrueVariance);
}
