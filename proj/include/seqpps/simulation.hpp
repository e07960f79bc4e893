#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seqpps/estimators.hpp"
#include "seqpps/params.hpp"

namespace seqpps {

// Law of the auxiliary size variable, before the affine rescale to [1, 10].
struct XLaw {
  enum class Kind { gamma, lognormal };
  Kind kind = Kind::gamma;
  double p1 = 2.0;  // gamma shape / lognormal mu
  double p2 = 2.0;  // gamma scale / lognormal sigma
};

// Per-model coefficients, with d = x - mean(x). The trailing entry of each
// array is the noise scale sigma:
//   y1 = c0 + c1*d + sigma*eps              (linear)
//   y2 = c0 + c1*d^2 + sigma*eps            (quadratic)
//   y3 = exp(c0 + c1*d) + sigma*eps         (exponential)
//   y4 = c0 + c1*d^2 - c2*exp(-c3*d^2) + sigma*eps  (bump)
struct ModelCoeffs {
  std::array<double, 3> y1{10.0, 2.4, 1.0};
  std::array<double, 3> y2{8.0, 1.9, 1.0};
  std::array<double, 3> y3{2.3, 0.19, 1.0};
  std::array<double, 5> y4{11.0, 1.75, 8.0, 1.0, 1.0};
};

struct PopulationSpec {
  long long N = 500;
  XLaw x_law;
  ModelCoeffs coeffs;
};

struct GeneratedPopulation {
  std::vector<double> x;                   // rescaled to [1, 10]
  std::array<std::vector<double>, 4> y;    // four study variables
  std::array<double, 4> mu{};              // realized means of y1..y4
  std::array<double, 4> s2{};              // realized variances (divisor N-1)
};

GeneratedPopulation generate_population(const PopulationSpec& spec, std::mt19937_64& gen);

// Size-proportional probabilities summing to n, with iterative removal of
// certainty units (pi >= 1 becomes exactly 1 and the remainder is rescaled).
struct PipsResult {
  std::vector<double> pi;                // length N, certainties hold exactly 1.0
  std::vector<long long> certainties;    // 1-based unit positions with pi == 1
};

PipsResult pips_probabilities(const std::vector<double>& x, long long n);

struct ExperimentConfig {
  PopulationSpec pop;
  std::vector<long long> n_values{100};
  long long replicates = 1000;
  double quantile = kDefaultNormalQuantile;
  long long exact_cutoff = 600;    // above this N, fall back to Monte Carlo pi_kl
  long long mc_draws = 1000000;
  std::uint64_t seed = 1;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);

struct ExperimentRow {
  std::string variable;
  long long n = 0;
  long long n_noncertain = 0;
  long long certainties = 0;
  double true_total = 0.0;
  double true_var = 0.0;
  double rb = 0.0;
  double rrmse = 0.0;
  double cover_low = 0.0;
  double cover_high = 0.0;
  double cover_total = 0.0;
  double min_pi = 0.0;
  double max_pi = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> warnings;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_results_csv(const std::string& path, const ExperimentResult& res);

}  // namespace seqpps
