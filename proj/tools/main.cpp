#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "seqpps/chromy.hpp"
#include "seqpps/cluster.hpp"
#include "seqpps/csv.hpp"
#include "seqpps/enumerate.hpp"
#include "seqpps/estimators.hpp"
#include "seqpps/joint.hpp"
#include "seqpps/pivotal.hpp"
#include "seqpps/simulation.hpp"

namespace {

using nlohmann::json;
using namespace seqpps;

int fail(const char* cls, const std::string& msg, int code) {
  json e;
  e["error"] = cls;
  e["message"] = msg;
  std::cerr << e.dump() << "\n";
  return code;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Population loaders. A probability column carries its own n (the rounded
// total); a size column needs --n and is converted to n*x/sum(x).
DesignParams<double> params_double(const PopulationFile& pf,
                                   std::optional<long long> n_opt) {
  if (!pf.is_size) {
    DesignParams<double> params = validate_params(pf.values);
    if (n_opt && *n_opt != params.n)
      throw ValidationError("--n disagrees with the probability column total " +
                            std::to_string(params.n));
    return params;
  }
  if (!n_opt) throw UsageError("--n is required when the input has a size column");
  double s = 0.0;
  for (double v : pf.values) {
    if (!(v > 0.0)) throw ValidationError("size values must be strictly positive");
    s += v;
  }
  std::vector<double> pi(pf.values.size());
  for (std::size_t k = 0; k < pi.size(); ++k)
    pi[k] = static_cast<double>(*n_opt) * pf.values[k] / s;
  return validate_params(std::move(pi));
}

DesignParams<Rational> params_rational(const PopulationFile& pf,
                                       std::optional<long long> n_opt) {
  std::vector<Rational> vals = parse_rationals(pf.raw);
  if (!pf.is_size) {
    DesignParams<Rational> params = validate_params(std::move(vals));
    if (n_opt && *n_opt != params.n)
      throw ValidationError("--n disagrees with the probability column total " +
                            std::to_string(params.n));
    return params;
  }
  if (!n_opt) throw UsageError("--n is required when the input has a size column");
  Rational s = 0;
  for (const Rational& v : vals) {
    if (v <= 0) throw ValidationError("size values must be strictly positive");
    s += v;
  }
  std::vector<Rational> pi(vals.size());
  for (std::size_t k = 0; k < pi.size(); ++k) pi[k] = Rational(*n_opt) * vals[k] / s;
  return validate_params(std::move(pi));
}

json num_json(double v) { return v; }
json num_json(const Rational& v) { return format_rational(v); }

template <class T>
json frame_json(const Frame<T>& fr, bool with_clusters) {
  json out;
  out["N"] = fr.N();
  out["n"] = fr.n();
  json prof = json::array();
  for (long long k = 0; k <= fr.N(); ++k) {
    if constexpr (std::is_same_v<T, double>)
      prof.push_back(static_cast<double>(fr.profile.V_int[k]) + fr.profile.V_frac[k]);
    else
      prof.push_back(format_rational(Rational(fr.profile.V_int[k]) + fr.profile.V_frac[k]));
  }
  out["V"] = prof;
  out["cross_border"] = fr.cross_border;
  json aj = json::array(), bj = json::array();
  for (const T& v : fr.a) aj.push_back(num_json(v));
  for (const T& v : fr.b) bj.push_back(num_json(v));
  out["a"] = aj;
  out["b"] = bj;
  json ms = json::array();
  for (const auto& [lo, hi] : fr.microstrata) ms.push_back(json::array({lo, hi}));
  out["microstrata"] = ms;
  if (with_clusters) {
    const ClusteredPopulation<T> cp = build_clustered(fr);
    json cj = json::array();
    for (std::size_t c = 0; c < cp.clusters.size(); ++c) {
      json e;
      const auto& [lo, hi] = cp.clusters[c];
      e["units"] = lo > hi ? json::array() : json::array({lo, hi});
      e["phi"] = num_json(cp.phi[c]);
      cj.push_back(e);
    }
    out["clusters"] = cj;
    json tj = json::array();
    if (fr.n() >= 2) {
      const TransitionTable<T> tt = transition_table(fr);
      for (const auto& row : tt.rows) {
        json r = json::array();
        for (const auto& src : row) {
          json s = json::array();
          for (const T& v : src) s.push_back(num_json(v));
          r.push_back(s);
        }
        tj.push_back(r);
      }
    }
    out["transition_table"] = tj;
  }
  return out;
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty())
    std::cout << text;
  else
    atomic_write(output, text);
}

struct Options {
  std::optional<std::uint64_t> seed;
  bool rational = false;
  int threads = 0;

  std::string input, output;
  std::optional<long long> n;
  std::string method = "chromy";
  bool exact = false;
  std::optional<long long> mc_draws;
  std::string sample_path, values_path, matrix_path;
  double quantile = kDefaultNormalQuantile;
  bool clusters = false;
  std::string config_path, out_path;
};

void cmd_sample(const Options& opt) {
  const PopulationFile pf = read_population_csv(opt.input);
  const std::uint64_t seed = opt.seed ? *opt.seed : entropy_seed();
  UniformSource rng(seed);
  Sample s;
  if (opt.rational) {
    const Frame<Rational> fr = build_frame(params_rational(pf, opt.n));
    s = opt.method == "pivotal"            ? pivotal_sample(fr, rng, seed)
        : opt.method == "randomized-chromy" ? randomized_chromy_sample(fr, rng, seed)
                                            : chromy_sample(fr, rng, seed);
  } else {
    const Frame<double> fr = build_frame(params_double(pf, opt.n));
    s = opt.method == "pivotal"            ? pivotal_sample(fr, rng, seed)
        : opt.method == "randomized-chromy" ? randomized_chromy_sample(fr, rng, seed)
                                            : chromy_sample(fr, rng, seed);
  }
  write_sample_csv(opt.output, s, pf.ids, opt.method);
}

void cmd_jip(const Options& opt) {
  if (!opt.exact && !opt.mc_draws) throw UsageError("jip needs --exact or --mc DRAWS");
  const PopulationFile pf = read_population_csv(opt.input);
  JointProbabilityMatrix<double> m;
  if (opt.exact) {
    if (opt.rational) {
      const JointProbabilityMatrix<Rational> mr =
          randomized_matrix(params_rational(pf, opt.n));
      m.N = mr.N;
      m.v.resize(mr.v.size());
      for (std::size_t i = 0; i < mr.v.size(); ++i) m.v[i] = to_double(mr.v[i]);
      m.provenance = mr.provenance;
    } else {
      m = randomized_matrix(params_double(pf, opt.n));
    }
  } else {
    const std::uint64_t seed = opt.seed ? *opt.seed : entropy_seed();
    m = monte_carlo_matrix(params_double(pf, opt.n), *opt.mc_draws, seed);
  }
  write_matrix_csv(opt.output, m, pf.ids);
}

void cmd_enumerate(const Options& opt) {
  const PopulationFile pf = read_population_csv(opt.input);
  const DesignParams<Rational> params = params_rational(pf, opt.n);
  SamplerTag tag = SamplerTag::chromy;
  if (opt.method == "pivotal") tag = SamplerTag::pivotal;
  else if (opt.method == "two-stage") tag = SamplerTag::two_stage;
  else if (opt.method == "randomized-chromy") tag = SamplerTag::randomized_chromy;
  const DesignDistribution d = enumerate_design(tag, params);
  json out;
  out["method"] = sampler_tag_name(d.tag);
  out["N"] = d.N;
  out["n"] = d.n;
  json samples = json::object();
  for (const auto& [sel, pr] : d.p) {
    std::vector<long long> ids(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) ids[i] = pf.ids[sel[i] - 1];
    std::sort(ids.begin(), ids.end());
    std::string key;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) key += ',';
      key += std::to_string(ids[i]);
    }
    samples[key] = format_rational(pr);
  }
  out["samples"] = samples;
  emit(opt.output, out.dump(2) + "\n");
}

void cmd_estimate(const Options& opt) {
  const MatrixFile mf = read_matrix_csv(opt.matrix_path);
  const Sample s = read_sample_csv(opt.sample_path, mf.ids);
  const std::map<long long, double> yv = read_values_csv(opt.values_path);
  const long long N = mf.m.N;
  DesignParams<double> params;
  params.probs.resize(N);
  double tot = 0.0;
  for (long long k = 0; k < N; ++k) {
    params.probs[k] = mf.m.at(k, k);
    if (!(params.probs[k] > 0.0) || params.probs[k] > 1.0)
      throw ValidationError("matrix diagonal entry " + std::to_string(k + 1) +
                            " is not a probability");
    tot += params.probs[k];
  }
  params.n = std::llround(tot);
  std::vector<double> y(N, 0.0);
  for (long long k : s.selected) {
    auto it = yv.find(mf.ids[k - 1]);
    if (it == yv.end())
      throw ValidationError("no value for sampled unit id " +
                            std::to_string(mf.ids[k - 1]));
    y[k - 1] = it->second;
  }
  const double ht = horvitz_thompson(s, y, params);
  const double sv = syg_variance(s, y, params, mf.m);
  const EstimateRecord r = make_estimate_record(ht, sv, opt.quantile);
  json out;
  out["ht"] = r.ht;
  out["syg_var"] = r.syg_var;
  out["ci_low"] = r.ci_low;
  out["ci_high"] = r.ci_high;
  out["quantile"] = opt.quantile;
  out["sample_size"] = s.selected.size();
  emit(opt.output, out.dump(2) + "\n");
}

void cmd_simulate(const Options& opt) {
  ExperimentConfig cfg = parse_experiment_config(read_file(opt.config_path));
  if (opt.seed) cfg.seed = *opt.seed;
  const ExperimentResult res = run_experiment(cfg);
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
  write_results_csv(opt.out_path, res);
}

void cmd_inspect(const Options& opt) {
  const PopulationFile pf = read_population_csv(opt.input);
  json out;
  if (opt.rational)
    out = frame_json(build_frame(params_rational(pf, opt.n)), opt.clusters);
  else
    out = frame_json(build_frame(params_double(pf, opt.n)), opt.clusters);
  out["unit_ids"] = pf.ids;
  emit(opt.output, out.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Sequential unequal-probability sampling: Chromy and ordered pivotal "
               "designs, exact joint inclusion probabilities, design enumeration, "
               "Horvitz-Thompson estimation and replication experiments"};
  app.require_subcommand(1);
  app.add_option("--seed", opt.seed, "Master RNG seed (default: OS entropy, printed to stderr)");
  auto* rat = app.add_flag("--rational", opt.rational, "Exact rational arithmetic");
  app.add_flag("--float", "Float64 arithmetic (default)")->excludes(rat);
  app.add_option("--threads", opt.threads, "Worker threads (default: all cores)");

  const auto dispatch = [&opt](void (*fn)(const Options&)) {
    return [&opt, fn] {
#ifdef _OPENMP
      if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif
      fn(opt);
    };
  };

  auto* sample = app.add_subcommand("sample", "Draw one fixed-size sample");
  sample->fallthrough();
  sample->add_option("--method", opt.method, "chromy | randomized-chromy | pivotal")
      ->check(CLI::IsMember({"chromy", "randomized-chromy", "pivotal"}));
  sample->add_option("--input", opt.input, "Population CSV (unit_id,prob or unit_id,size)")
      ->required();
  sample->add_option("--output", opt.output, "Sample CSV path (sidecar: <path>.json)")
      ->required();
  sample->add_option("--n", opt.n, "Sample size (required for a size column)");
  sample->callback(dispatch(&cmd_sample));

  auto* jip = app.add_subcommand("jip", "Joint inclusion probability matrix");
  jip->fallthrough();
  auto* exact = jip->add_flag("--exact", opt.exact, "Permutation-averaged exact matrix");
  jip->add_option("--mc", opt.mc_draws, "Monte Carlo matrix with this many draws")
      ->excludes(exact);
  jip->add_option("--input", opt.input, "Population CSV")->required();
  jip->add_option("--output", opt.output, "Matrix CSV path (sidecar: <path>.json)")
      ->required();
  jip->add_option("--n", opt.n, "Sample size (required for a size column)");
  jip->callback(dispatch(&cmd_jip));

  auto* enumerate = app.add_subcommand("enumerate", "Exact sampling design (rational)");
  enumerate->fallthrough();
  enumerate
      ->add_option("--method", opt.method,
                   "chromy | pivotal | two-stage | randomized-chromy")
      ->check(CLI::IsMember({"chromy", "pivotal", "two-stage", "randomized-chromy"}));
  enumerate->add_option("--input", opt.input, "Population CSV")->required();
  enumerate->add_option("--output", opt.output, "Design JSON path (default: stdout)");
  enumerate->add_option("--n", opt.n, "Sample size (required for a size column)");
  enumerate->callback(dispatch(&cmd_enumerate));

  auto* estimate = app.add_subcommand("estimate", "Horvitz-Thompson total with SYG variance");
  estimate->fallthrough();
  estimate->add_option("--sample", opt.sample_path, "Sample CSV from `sample`")->required();
  estimate->add_option("--values", opt.values_path, "Values CSV (unit_id,<value>)")->required();
  estimate->add_option("--matrix", opt.matrix_path, "Matrix CSV from `jip`")->required();
  estimate->add_option("--quantile", opt.quantile, "CI quantile (default two-sided 95%)");
  estimate->add_option("--output", opt.output, "Output JSON path (default: stdout)");
  estimate->callback(dispatch(&cmd_estimate));

  auto* simulate = app.add_subcommand("simulate", "Replication experiment from a JSON config");
  simulate->fallthrough();
  simulate->add_option("--config", opt.config_path, "Experiment config JSON")->required();
  simulate->add_option("--out", opt.out_path, "Results CSV path")->required();
  simulate->callback(dispatch(&cmd_simulate));

  auto* inspect = app.add_subcommand("inspect", "Frame geometry as JSON");
  inspect->fallthrough();
  inspect->add_option("--input", opt.input, "Population CSV")->required();
  inspect->add_flag("--clusters", opt.clusters, "Include clusters and transition table");
  inspect->add_option("--output", opt.output, "Output JSON path (default: stdout)");
  inspect->add_option("--n", opt.n, "Sample size (required for a size column)");
  inspect->callback(dispatch(&cmd_inspect));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  } catch (const UsageError& e) {
    return fail("UsageError", e.what(), 2);
  } catch (const IoError& e) {
    return fail("IoError", e.what(), 3);
  } catch (const ValidationError& e) {
    return fail("ValidationError", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 4);
  }
  return 0;
}
