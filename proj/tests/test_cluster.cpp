#include <doctest.h>

#include "seqpps/cluster.hpp"
#include "support.hpp"

using namespace seqpps;

TEST_CASE("worked example clusters are the five singletons") {
  const Frame<Rational> fr = build_frame(validate_params(testsup::worked5_rational()));
  const ClusteredPopulation<Rational> cp = build_clustered(fr);
  REQUIRE(cp.size() == 5);
  for (long long c = 0; c < 5; ++c) {
    CHECK(cp.clusters[c] == std::pair<long long, long long>{c + 1, c + 1});
    CHECK(cp.phi[c] == fr.params.probs[c]);
  }
}

TEST_CASE("full-mass and empty clusters keep exact 0/1 masses in float mode") {
  SUBCASE("interior run carrying mass exactly 1") {
    const Frame<double> fr = build_frame(validate_params(std::vector<double>{0.5, 0.5, 0.5, 0.5}));
    const ClusteredPopulation<double> cp = build_clustered(fr);
    REQUIRE(cp.size() == 3);
    CHECK(cp.clusters[0] == std::pair<long long, long long>{1, 2});
    CHECK(cp.phi[0] == 1.0);
    CHECK(cp.clusters[1] == std::pair<long long, long long>{3, 3});
    CHECK(cp.phi[1] == 0.5);
    CHECK(cp.clusters[2] == std::pair<long long, long long>{4, 4});
    CHECK(cp.phi[2] == 0.5);
  }
  SUBCASE("adjacent crossings leave an empty run with mass exactly 0") {
    const Frame<double> fr = build_frame(validate_params(std::vector<double>{0.9, 0.9, 0.8, 0.4}));
    const ClusteredPopulation<double> cp = build_clustered(fr);
    REQUIRE(cp.size() == 5);
    CHECK(cp.clusters[2].first > cp.clusters[2].second);
    CHECK(cp.phi[2] == 0.0);
    double total = 0;
    for (double v : cp.phi) total += v;
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("cluster masses always sum to n") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const long long N = 3 + static_cast<long long>(gen() % 8);
    const long long n = 2 + static_cast<long long>(gen() % (N - 1));
    if (n >= N) continue;
    const auto grid = testsup::random_grid(gen, N, n);
    const Frame<Rational> fr = build_frame(validate_params(testsup::grid_to_rational(grid)));
    const ClusteredPopulation<Rational> cp = build_clustered(fr);
    REQUIRE(cp.size() == 2 * n - 1);
    Rational total = 0;
    for (const Rational& v : cp.phi) total += v;
    CHECK(total == n);
  }
}

TEST_CASE("two-stage draws: size, determinism, first-order agreement") {
  const Frame<double> fr = build_frame(validate_params(testsup::worked5()));
  const ClusteredPopulation<double> cp = build_clustered(fr);
  UniformSource r1(14), r2(14);
  CHECK(two_stage_sample(cp, fr, r1).selected == two_stage_sample(cp, fr, r2).selected);

  const int B = 30000;
  std::vector<long long> hits(5, 0);
  for (int b = 0; b < B; ++b) {
    UniformSource rng(derive_seed(15, b));
    const Sample s = two_stage_sample(cp, fr, rng);
    REQUIRE(s.selected.size() == 3);
    for (long long k : s.selected) ++hits[k - 1];
  }
  for (int k = 0; k < 5; ++k) {
    const double p = fr.params.probs[k];
    const double se = std::sqrt(p * (1 - p) / B);
    CHECK(std::abs(static_cast<double>(hits[k]) / B - p) < 4.5 * se);
  }
}

TEST_CASE("two-stage honors degenerate cluster masses") {
  const Frame<double> fr = build_frame(validate_params(std::vector<double>{0.9, 0.9, 0.8, 0.4}));
  const ClusteredPopulation<double> cp = build_clustered(fr);
  for (int b = 0; b < 200; ++b) {
    UniformSource rng(derive_seed(16, b));
    const Sample s = two_stage_sample(cp, fr, rng);
    REQUIRE(s.selected.size() == 3);
    // the empty cluster can never contribute a unit
    for (long long k : s.selected) CHECK(k >= 1);
  }
}

TEST_CASE("transition rows: worked value, exact row sums, shared first rows") {
  const Frame<Rational> fr = build_frame(validate_params(testsup::worked5_rational()));
  const TransitionTable<Rational> tt = transition_table(fr);
  REQUIRE(tt.rows.size() == 2);
  // b_1 / (1 - a_1) = (1/5) / (2/5) = 1/2
  CHECK(tt.rows[0][0][0] == Rational(1, 2));
  CHECK(tt.rows[0][2][0] == 0);

  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 60; ++trial) {
    const long long N = 4 + static_cast<long long>(gen() % 6);
    const long long n = 2 + static_cast<long long>(gen() % (N - 2));
    if (n >= N) continue;
    const auto grid = testsup::random_grid(gen, N, n);
    const Frame<Rational> f = build_frame(validate_params(testsup::grid_to_rational(grid)));
    const TransitionTable<Rational> t = transition_table(f);
    REQUIRE(t.rows.size() == static_cast<std::size_t>(n - 1));
    for (const auto& row : t.rows) {
      CHECK(row[0] == row[1]);
      for (int src = 0; src < 3; ++src)
        CHECK(row[src][0] + row[src][1] + row[src][2] == 1);
    }
  }
}

TEST_CASE("transition table needs at least two selections") {
  const Frame<Rational> fr =
      build_frame(validate_params(std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  CHECK_THROWS_AS((void)transition_table(fr), ValidationError);
}
