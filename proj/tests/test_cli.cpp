// End-to-end checks of the seqpps binary: exit codes, file outputs, reproducibility.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "seqpps/csv.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliDir {
  fs::path path;
  CliDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("seqpps_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~CliDir() { std::error_code ec; fs::remove_all(path, ec); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const CliDir& dir, const std::string& args) {
  const fs::path so = dir / "cli_stdout.txt";
  const fs::path se = dir / "cli_stderr.txt";
  const std::string cmd =
      std::string(SEQPPS_BIN) + " " + args + " >" + so.string() + " 2>" + se.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string worked5_csv() {
  return "unit_id,prob\n1,0.4\n2,0.8\n3,0.5\n4,0.6\n5,0.7\n";
}

std::string n8_csv() {
  std::ostringstream ss;
  ss << "unit_id,prob\n";
  const auto probs = testsup::n8();
  for (std::size_t k = 0; k < probs.size(); ++k) ss << (k + 1) << "," << probs[k] << "\n";
  return ss.str();
}

}  // namespace

TEST_CASE("cli: help exits zero and lists the subcommands") {
  CliDir dir;
  const auto r = run_cli(dir, "--help");
  CHECK(r.exit_code == 0);
  for (const char* name : {"sample", "jip", "enumerate", "estimate", "simulate", "inspect"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
}

TEST_CASE("cli: enumerate reproduces the exact design for the five-unit population") {
  CliDir dir;
  write_file(dir / "pop.csv", worked5_csv());
  const auto r = run_cli(dir, "enumerate --method chromy --input " + (dir / "pop.csv").string());
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("method") == "chromy");
  CHECK(doc.at("N") == 5);
  CHECK(doc.at("n") == 3);
  const auto& samples = doc.at("samples");
  CHECK(samples.size() == 8);
  CHECK(samples.at("1,2,4") == "3/35");
  CHECK(samples.at("2,4,5") == "9/40");
  CHECK(samples.at("1,3,5") == "1/14");
}

TEST_CASE("cli: sample output is reproducible under a pinned seed") {
  CliDir dir;
  write_file(dir / "pop.csv", worked5_csv());
  const std::string base = "--seed 4711 sample --method randomized-chromy --input " +
                           (dir / "pop.csv").string() + " --output ";
  const auto r1 = run_cli(dir, base + (dir / "a.csv").string());
  REQUIRE(r1.exit_code == 0);
  const auto r2 = run_cli(dir, base + (dir / "b.csv").string());
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  const json meta = json::parse(slurp(dir / "a.csv.json"));
  CHECK(meta.at("method") == "randomized-chromy");
  CHECK(meta.at("seed") == 4711);
  CHECK(meta.at("n") == 3);

  // The sample itself names three distinct frame units.
  const auto smp = seqpps::read_sample_csv((dir / "a.csv").string(),
                                           std::vector<long long>{1, 2, 3, 4, 5});
  CHECK(smp.selected.size() == 3);
}

TEST_CASE("cli: a size column needs an explicit sample size") {
  CliDir dir;
  write_file(dir / "pop.csv", "unit_id,size\n1,10\n2,20\n3,30\n4,40\n");
  const std::string input = " --input " + (dir / "pop.csv").string();
  const std::string output = " --output " + (dir / "s.csv").string();

  const auto bad = run_cli(dir, "--seed 9 sample --method chromy" + input + output);
  CHECK(bad.exit_code == 2);

  const auto good = run_cli(dir, "--seed 9 sample --method chromy --n 2" + input + output);
  REQUIRE(good.exit_code == 0);
  const auto smp = seqpps::read_sample_csv((dir / "s.csv").string(),
                                           std::vector<long long>{1, 2, 3, 4});
  CHECK(smp.selected.size() == 2);
}

TEST_CASE("cli: jip, sample, and estimate round-trip through files") {
  CliDir dir;
  write_file(dir / "pop.csv", n8_csv());
  const std::string pop = (dir / "pop.csv").string();

  const auto jip = run_cli(dir, "jip --exact --input " + pop + " --output " +
                                    (dir / "m.csv").string());
  REQUIRE(jip.exit_code == 0);
  const auto mat = seqpps::read_matrix_csv((dir / "m.csv").string());
  REQUIRE(mat.m.N == 8);
  CHECK(std::abs(mat.m.at(0, 1) - 0.041) <= 0.0005);
  const json meta = json::parse(slurp(dir / "m.csv.json"));
  CHECK(meta.at("provenance") == "permutation-averaged");

  const auto smp = run_cli(dir, "--seed 99 sample --method randomized-chromy --input " + pop +
                                    " --output " + (dir / "s.csv").string());
  REQUIRE(smp.exit_code == 0);

  std::ostringstream vals;
  vals << "unit_id,value\n";
  for (int k = 1; k <= 8; ++k) vals << k << "," << (10.0 * k) << "\n";
  write_file(dir / "y.csv", vals.str());

  const auto est = run_cli(dir, "estimate --sample " + (dir / "s.csv").string() + " --values " +
                                    (dir / "y.csv").string() + " --matrix " +
                                    (dir / "m.csv").string());
  REQUIRE(est.exit_code == 0);
  const json doc = json::parse(est.out);
  CHECK(doc.at("sample_size") == 4);
  CHECK(doc.at("ht").is_number());
  CHECK(doc.at("syg_var").is_number());
  CHECK(double(doc.at("ci_low")) <= double(doc.at("ht")));
  CHECK(double(doc.at("ci_high")) >= double(doc.at("ht")));
}

TEST_CASE("cli: jip needs a mode flag") {
  CliDir dir;
  write_file(dir / "pop.csv", worked5_csv());
  const auto r = run_cli(dir, "jip --input " + (dir / "pop.csv").string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli: inspect reports the frame geometry") {
  CliDir dir;
  write_file(dir / "pop.csv", worked5_csv());
  const auto r = run_cli(dir, "inspect --clusters --input " + (dir / "pop.csv").string());
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("N") == 5);
  CHECK(doc.at("n") == 3);
  CHECK(doc.at("cross_border") == json::array({2, 4}));
  CHECK(doc.at("clusters").size() == 5);
  CHECK(doc.at("transition_table").is_array());
}

TEST_CASE("cli: simulate writes a results table") {
  CliDir dir;
  const json cfg = {
      {"population", {{"N", 30}}},
      {"n", 6},
      {"replicates", 25},
      {"seed", 31},
  };
  write_file(dir / "cfg.json", cfg.dump());
  const auto r = run_cli(dir, "simulate --config " + (dir / "cfg.json").string() + " --out " +
                                  (dir / "res.csv").string());
  REQUIRE(r.exit_code == 0);
  const std::string table = slurp(dir / "res.csv");
  CHECK(table.find("variable,n,") == 0);
  CHECK(table.find("y1,") != std::string::npos);
  CHECK(table.find("y4,") != std::string::npos);
}

TEST_CASE("cli: error classes map to distinct exit codes") {
  CliDir dir;

  // Missing input file: I/O error.
  const auto io = run_cli(dir, "inspect --input " + (dir / "absent.csv").string());
  CHECK(io.exit_code == 3);
  CHECK(json::parse(io.err).at("error") == "IoError");

  // Unknown flag: usage error.
  const auto usage = run_cli(dir, "inspect --no-such-flag");
  CHECK(usage.exit_code == 2);

  // Probabilities that do not sum to an integer: validation error.
  write_file(dir / "bad.csv", "unit_id,prob\n1,0.4\n2,0.3\n");
  const auto bad = run_cli(dir, "inspect --input " + (dir / "bad.csv").string());
  CHECK(bad.exit_code == 1);
  CHECK(json::parse(bad.err).at("error") == "ValidationError");
}
