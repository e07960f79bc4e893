#pragma once

#include <cmath>
#include <vector>

#include "seqpps/joint.hpp"
#include "seqpps/params.hpp"

namespace seqpps {

constexpr double kDefaultNormalQuantile = 1.959964;  // two-sided 95%

// Weighted total over the sampled units.
template <class T>
T horvitz_thompson(const Sample& sample, const std::vector<T>& y,
                   const DesignParams<T>& params) {
  if (static_cast<long long>(y.size()) != params.N())
    throw DimensionMismatch("value vector length does not match the design");
  T acc(0);
  for (long long k : sample.selected) {
    if (k < 1 || k > params.N())
      throw DimensionMismatch("sampled unit " + std::to_string(k) + " outside 1..N");
    acc += y[k - 1] / params.probs[k - 1];
  }
  return acc;
}

// Fixed-size variance estimator: half the sum over sampled pairs of
// (pi_k pi_l - pi_kl) / pi_kl times the squared contrast of the weighted
// values. Nonnegative whenever the matrix satisfies pi_kl <= pi_k pi_l on
// the sampled pairs; requires every sampled pair to be jointly reachable.
template <class T>
T syg_variance(const Sample& sample, const std::vector<T>& y,
               const DesignParams<T>& params, const JointProbabilityMatrix<T>& m) {
  if (static_cast<long long>(y.size()) != params.N() || m.N != params.N())
    throw DimensionMismatch("value vector or matrix does not match the design");
  const auto& sel = sample.selected;
  T acc(0);
  for (std::size_t i = 0; i < sel.size(); ++i) {
    const long long k = sel[i] - 1;
    for (std::size_t j = i + 1; j < sel.size(); ++j) {
      const long long l = sel[j] - 1;
      const T& pkl = m.at(k, l);
      if (pkl == 0) throw ZeroJointProbability(k + 1, l + 1);
      const T d = y[k] / params.probs[k] - y[l] / params.probs[l];
      acc += (params.probs[k] * params.probs[l] - pkl) / pkl * d * d;
    }
  }
  return acc;
}

// Design variance of the weighted total from a full second-order matrix:
// sum over all k,l of (pi_kl - pi_k pi_l) times the weighted values, with
// the diagonal contributing pi_k (1 - pi_k) terms.
template <class T>
T variance_from_matrix(const JointProbabilityMatrix<T>& m, const std::vector<T>& y,
                       const DesignParams<T>& params) {
  const long long N = params.N();
  if (static_cast<long long>(y.size()) != N || m.N != N)
    throw DimensionMismatch("value vector or matrix does not match the design");
  std::vector<T> z(N);
  for (long long k = 0; k < N; ++k) z[k] = y[k] / params.probs[k];
  T acc(0);
  for (long long k = 0; k < N; ++k) {
    acc += (params.probs[k] - params.probs[k] * params.probs[k]) * z[k] * z[k];
    for (long long l = k + 1; l < N; ++l) {
      const T c = (m.at(k, l) - params.probs[k] * params.probs[l]) * z[k] * z[l];
      acc += c + c;
    }
  }
  return acc;
}

struct EstimateRecord {
  double ht = 0;
  double syg_var = 0;
  double ci_low = 0;
  double ci_high = 0;
};

inline EstimateRecord make_estimate_record(double ht, double syg_var,
                                           double quantile = kDefaultNormalQuantile) {
  const double half = quantile * std::sqrt(syg_var > 0 ? syg_var : 0.0);
  return EstimateRecord{ht, syg_var, ht - half, ht + half};
}

// Replication summaries: relative bias and relative root mean square error
// of the variance estimator (in percent), plus the per-tail and total error
// rates of the normality-based intervals against the true total.
struct McSummary {
  long long B = 0;
  double rb = 0;
  double rrmse = 0;
  double cover_low = 0;   // share of intervals entirely above the true total
  double cover_high = 0;  // share entirely below
  double cover_total = 0;
};

inline McSummary mc_summaries(const std::vector<EstimateRecord>& reps, double true_total,
                              double true_variance) {
  if (reps.empty()) throw ValidationError("replication summary needs at least one replicate");
  if (true_variance == 0) throw ZeroTrueVariance();
  const double B = static_cast<double>(reps.size());
  double sum = 0, sumsq = 0;
  long long low = 0, high = 0;
  for (const EstimateRecord& r : reps) {
    sum += r.syg_var - true_variance;
    sumsq += (r.syg_var - true_variance) * (r.syg_var - true_variance);
    if (r.ci_low > true_total) ++low;
    if (r.ci_high < true_total) ++high;
  }
  McSummary s;
  s.B = reps.size();
  s.rb = 100.0 * (sum / B) / true_variance;
  s.rrmse = 100.0 * std::sqrt(sumsq / B) / true_variance;
  s.cover_low = static_cast<double>(low) / B;
  s.cover_high = static_cast<double>(high) / B;
  s.cover_total = static_cast<double>(low + high) / B;
  return s;
}

}  // namespace seqpps
