#include "seqpps/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "seqpps/chromy.hpp"
#include "seqpps/csv.hpp"
#include "seqpps/frame.hpp"
#include "seqpps/joint.hpp"
#include "seqpps/rng.hpp"

namespace seqpps {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known)
      throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
  }
}

template <std::size_t K>
std::array<double, K> read_coeffs(const json& j, const char* name,
                                  const std::array<double, K>& def) {
  if (!j.contains(name)) return def;
  const json& a = j.at(name);
  if (!a.is_array() || a.size() != K)
    throw ValidationError(std::string("config: '") + name + "' must be an array of " +
                          std::to_string(K) + " numbers");
  std::array<double, K> out{};
  for (std::size_t i = 0; i < K; ++i) out[i] = a[i].get<double>();
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

GeneratedPopulation generate_population(const PopulationSpec& spec, std::mt19937_64& gen) {
  if (spec.N < 1) throw ValidationError("population size must be positive");
  GeneratedPopulation pop;
  pop.x.resize(spec.N);
  if (spec.x_law.kind == XLaw::Kind::gamma) {
    std::gamma_distribution<double> law(spec.x_law.p1, spec.x_law.p2);
    for (double& v : pop.x) v = law(gen);
  } else {
    std::lognormal_distribution<double> law(spec.x_law.p1, spec.x_law.p2);
    for (double& v : pop.x) v = law(gen);
  }
  const auto [mn_it, mx_it] = std::minmax_element(pop.x.begin(), pop.x.end());
  const double mn = *mn_it, mx = *mx_it;
  if (!(mx > mn)) throw DegenerateX();
  // (v-mn)/(mx-mn) hits 0 and 1 exactly at the extremes, so the rescaled
  // range is [1, 10] without any post-hoc clamping.
  for (double& v : pop.x) v = 1.0 + 9.0 * ((v - mn) / (mx - mn));

  double mu_x = 0.0;
  for (double v : pop.x) mu_x += v;
  mu_x /= static_cast<double>(spec.N);

  const ModelCoeffs& c = spec.coeffs;
  std::normal_distribution<double> eps(0.0, 1.0);
  for (auto& col : pop.y) col.resize(spec.N);
  for (long long k = 0; k < spec.N; ++k) {
    const double d = pop.x[k] - mu_x;
    pop.y[0][k] = c.y1[0] + c.y1[1] * d + c.y1[2] * eps(gen);
    pop.y[1][k] = c.y2[0] + c.y2[1] * d * d + c.y2[2] * eps(gen);
    pop.y[2][k] = std::exp(c.y3[0] + c.y3[1] * d) + c.y3[2] * eps(gen);
    pop.y[3][k] = c.y4[0] + c.y4[1] * d * d - c.y4[2] * std::exp(-c.y4[3] * d * d) +
                  c.y4[4] * eps(gen);
  }
  for (int v = 0; v < 4; ++v) {
    double s = 0.0;
    for (double yv : pop.y[v]) s += yv;
    pop.mu[v] = s / static_cast<double>(spec.N);
    double q = 0.0;
    for (double yv : pop.y[v]) q += (yv - pop.mu[v]) * (yv - pop.mu[v]);
    pop.s2[v] = spec.N > 1 ? q / static_cast<double>(spec.N - 1) : 0.0;
  }
  return pop;
}

PipsResult pips_probabilities(const std::vector<double>& x, long long n) {
  const long long N = static_cast<long long>(x.size());
  if (n < 1 || n > N) throw InfeasibleSize(n, N);
  for (double v : x)
    if (!(v > 0.0)) throw ValidationError("size variable must be strictly positive");

  std::vector<char> certain(N, 0);
  long long ncert = 0;
  for (;;) {
    const long long m = n - ncert;
    if (m == 0) break;
    double s = 0.0;
    for (long long k = 0; k < N; ++k)
      if (!certain[k]) s += x[k];
    const double scale = static_cast<double>(m) / s;
    bool changed = false;
    for (long long k = 0; k < N; ++k) {
      if (!certain[k] && x[k] * scale >= 1.0) {
        certain[k] = 1;
        ++ncert;
        changed = true;
      }
    }
    if (!changed) break;
  }

  PipsResult r;
  r.pi.assign(N, 0.0);
  const long long m = n - ncert;
  double s = 0.0;
  for (long long k = 0; k < N; ++k)
    if (!certain[k]) s += x[k];
  for (long long k = 0; k < N; ++k) {
    if (certain[k]) {
      r.pi[k] = 1.0;
      r.certainties.push_back(k + 1);
    } else if (m > 0) {
      r.pi[k] = x[k] * (static_cast<double>(m) / s);
    }
  }
  return r;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    reject_unknown_keys(j, {"population", "n", "replicates", "quantile",
                            "exact_cutoff", "mc_draws", "seed"}, "the top level");
    ExperimentConfig cfg;
    if (j.contains("population")) {
      const json& p = j.at("population");
      reject_unknown_keys(p, {"N", "x", "coefficients"}, "'population'");
      if (p.contains("N")) cfg.pop.N = p.at("N").get<long long>();
      if (p.contains("x")) {
        const json& xs = p.at("x");
        reject_unknown_keys(xs, {"law", "p1", "p2"}, "'population.x'");
        if (xs.contains("law")) {
          const std::string law = xs.at("law").get<std::string>();
          if (law == "gamma")
            cfg.pop.x_law.kind = XLaw::Kind::gamma;
          else if (law == "lognormal")
            cfg.pop.x_law.kind = XLaw::Kind::lognormal;
          else
            throw ValidationError("config: x law must be 'gamma' or 'lognormal'");
        }
        if (xs.contains("p1")) cfg.pop.x_law.p1 = xs.at("p1").get<double>();
        if (xs.contains("p2")) cfg.pop.x_law.p2 = xs.at("p2").get<double>();
      }
      if (p.contains("coefficients")) {
        const json& co = p.at("coefficients");
        reject_unknown_keys(co, {"y1", "y2", "y3", "y4"}, "'population.coefficients'");
        cfg.pop.coeffs.y1 = read_coeffs<3>(co, "y1", cfg.pop.coeffs.y1);
        cfg.pop.coeffs.y2 = read_coeffs<3>(co, "y2", cfg.pop.coeffs.y2);
        cfg.pop.coeffs.y3 = read_coeffs<3>(co, "y3", cfg.pop.coeffs.y3);
        cfg.pop.coeffs.y4 = read_coeffs<5>(co, "y4", cfg.pop.coeffs.y4);
      }
    }
    if (j.contains("n")) {
      cfg.n_values.clear();
      const json& nv = j.at("n");
      if (nv.is_array())
        for (const json& e : nv) cfg.n_values.push_back(e.get<long long>());
      else
        cfg.n_values.push_back(nv.get<long long>());
      if (cfg.n_values.empty())
        throw ValidationError("config: 'n' must list at least one sample size");
    }
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<long long>();
    if (j.contains("quantile")) cfg.quantile = j.at("quantile").get<double>();
    if (j.contains("exact_cutoff")) cfg.exact_cutoff = j.at("exact_cutoff").get<long long>();
    if (j.contains("mc_draws")) cfg.mc_draws = j.at("mc_draws").get<long long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (cfg.replicates < 1) throw ValidationError("config: replicates must be at least 1");
    if (cfg.quantile <= 0) throw ValidationError("config: quantile must be positive");
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::mt19937_64 popgen(derive_seed(cfg.seed, 0));
  const GeneratedPopulation pop = generate_population(cfg.pop, popgen);
  const long long N = cfg.pop.N;

  std::array<double, 4> true_total{};
  for (int v = 0; v < 4; ++v) {
    double s = 0.0;
    for (double yv : pop.y[v]) s += yv;
    true_total[v] = s;
  }
  static const char* kNames[4] = {"y1", "y2", "y3", "y4"};

  for (std::size_t j = 0; j < cfg.n_values.size(); ++j) {
    const long long n = cfg.n_values[j];
    const PipsResult pips = pips_probabilities(pop.x, n);
    std::vector<long long> noncert;  // 0-based positions in the full table
    for (long long k = 0; k < N; ++k)
      if (pips.pi[k] < 1.0) noncert.push_back(k);
    const long long ncert = static_cast<long long>(pips.certainties.size());
    const long long m = n - ncert;
    if (m < 1) {
      res.warnings.push_back("n=" + std::to_string(n) +
                             ": every draw is a certainty unit; rows excluded");
      continue;
    }

    std::vector<double> sp;
    sp.reserve(noncert.size());
    for (long long k : noncert) sp.push_back(pips.pi[k]);
    const DesignParams<double> sub = validate_params(std::move(sp));
    if (sub.n != m)
      throw ValidationError("non-certainty probabilities do not sum to the reduced size");
    const long long nn = static_cast<long long>(noncert.size());

    JointProbabilityMatrix<double> mat;
    if (nn <= cfg.exact_cutoff) {
      mat = randomized_matrix(sub);
    } else {
      res.warnings.push_back(
          "n=" + std::to_string(n) + ": " + std::to_string(nn) +
          " non-certainty units exceed the exact cutoff; using a Monte Carlo "
          "matrix with " + std::to_string(cfg.mc_draws) + " draws");
      mat = monte_carlo_matrix(sub, cfg.mc_draws,
                               derive_seed(cfg.seed, 0x4D000000ULL + j));
    }

    std::array<std::vector<double>, 4> z;
    std::array<double, 4> cert_sum{};
    std::array<double, 4> tv{};
    for (int v = 0; v < 4; ++v) {
      z[v].resize(nn);
      for (long long i = 0; i < nn; ++i) z[v][i] = pop.y[v][noncert[i]];
      for (long long k : pips.certainties) cert_sum[v] += pop.y[v][k - 1];
      tv[v] = variance_from_matrix(mat, z[v], sub);
      if (tv[v] == 0)
        res.warnings.push_back(std::string(kNames[v]) + ", n=" + std::to_string(n) +
                               ": true variance is zero; row excluded");
    }

    const Frame<double> fr = build_frame(sub);
    const long long B = cfg.replicates;
    std::array<std::vector<EstimateRecord>, 4> recs;
    for (auto& r : recs) r.resize(B);
    std::vector<std::string> errs(B);

#pragma omp parallel for schedule(dynamic)
    for (long long b = 0; b < B; ++b) {
      try {
        UniformSource rng(derive_seed(
            cfg.seed, ((static_cast<std::uint64_t>(j) + 1) << 32) +
                          static_cast<std::uint64_t>(b)));
        const Sample s = randomized_chromy_sample(fr, rng);
        for (int v = 0; v < 4; ++v) {
          const double ht = cert_sum[v] + horvitz_thompson(s, z[v], sub);
          const double sv = syg_variance(s, z[v], sub, mat);
          recs[v][b] = make_estimate_record(ht, sv, cfg.quantile);
        }
      } catch (const std::exception& e) {
        errs[b] = e.what();
      }
    }
    for (const std::string& e : errs)
      if (!e.empty()) throw ValidationError("replicate failed: " + e);

    const double min_pi = *std::min_element(sub.probs.begin(), sub.probs.end());
    const double max_pi = *std::max_element(sub.probs.begin(), sub.probs.end());
    for (int v = 0; v < 4; ++v) {
      if (tv[v] == 0) continue;
      const McSummary s = mc_summaries(recs[v], true_total[v], tv[v]);
      ExperimentRow row;
      row.variable = kNames[v];
      row.n = n;
      row.n_noncertain = m;
      row.certainties = ncert;
      row.true_total = true_total[v];
      row.true_var = tv[v];
      row.rb = s.rb;
      row.rrmse = s.rrmse;
      row.cover_low = s.cover_low;
      row.cover_high = s.cover_high;
      row.cover_total = s.cover_total;
      row.min_pi = min_pi;
      row.max_pi = max_pi;
      res.rows.push_back(row);
    }
  }
  return res;
}

void write_results_csv(const std::string& path, const ExperimentResult& res) {
  std::string body =
      "variable,n,n_noncertain,certainties,true_total,true_var,"
      "rb_pct,rrmse_pct,cover_low,cover_high,cover_total,min_pi,max_pi\n";
  for (const ExperimentRow& r : res.rows) {
    body += r.variable;
    body += ',' + std::to_string(r.n);
    body += ',' + std::to_string(r.n_noncertain);
    body += ',' + std::to_string(r.certainties);
    body += ',' + fmt("%.10g", r.true_total);
    body += ',' + fmt("%.10g", r.true_var);
    body += ',' + fmt("%.4f", r.rb);
    body += ',' + fmt("%.4f", r.rrmse);
    body += ',' + fmt("%.4f", r.cover_low);
    body += ',' + fmt("%.4f", r.cover_high);
    body += ',' + fmt("%.4f", r.cover_total);
    body += ',' + fmt("%.8f", r.min_pi);
    body += ',' + fmt("%.8f", r.max_pi);
    body += '\n';
  }
  atomic_write(path, body);
}

}  // namespace seqpps
