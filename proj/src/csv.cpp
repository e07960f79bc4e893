#include "seqpps/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

namespace seqpps {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + ": " + std::strerror(errno));
  return in;
}

long long parse_id(const std::string& s, const std::string& path) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError(path + ": malformed unit id '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(path + ": malformed number '" + s + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PopulationFile read_population_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "unit_id" ||
      (header[1] != "prob" && header[1] != "size"))
    throw ValidationError(path + ": expected header 'unit_id,prob' or 'unit_id,size'");
  PopulationFile pf;
  pf.is_size = header[1] == "size";
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) throw ValidationError(path + ": expected two fields per row");
    pf.ids.push_back(parse_id(f[0], path));
    pf.raw.push_back(f[1]);
    pf.values.push_back(parse_double(f[1], path));
  }
  if (pf.ids.empty()) throw ValidationError(path + ": no units");
  std::vector<long long> sorted = pf.ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError(path + ": duplicate unit ids");
  return pf;
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& raw) {
  std::vector<Rational> out;
  out.reserve(raw.size());
  for (const std::string& s : raw) out.push_back(parse_decimal(s));
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? "." : target.parent_path();
  const fs::path tmp = dir / (target.filename().string() + ".tmp" +
                              std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno));
    out << content;
    if (!out.flush()) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

void write_sample_csv(const std::string& path, const Sample& sample,
                      const std::vector<long long>& ids, const std::string& method) {
  std::string body = "unit_id\n";
  for (long long k : sample.selected) {
    if (k < 1 || k > static_cast<long long>(ids.size()))
      throw DimensionMismatch("sample position outside the id table");
    body += std::to_string(ids[k - 1]);
    body += '\n';
  }
  atomic_write(path, body);
  nlohmann::json side;
  side["method"] = method;
  side["seed"] = sample.seed;
  side["n"] = sample.selected.size();
  if (sample.permutation_start)
    side["permutation_start"] = ids[*sample.permutation_start - 1];
  else
    side["permutation_start"] = nullptr;
  atomic_write(path + ".json", side.dump(2) + "\n");
}

Sample read_sample_csv(const std::string& path, const std::vector<long long>& ids) {
  std::ifstream in = open_input(path);
  std::map<long long, long long> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<long long>(i) + 1;
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"unit_id"})
    throw ValidationError(path + ": expected header 'unit_id'");
  Sample s;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const long long id = parse_id(strip(line), path);
    auto it = pos.find(id);
    if (it == pos.end())
      throw ValidationError(path + ": unit id " + std::to_string(id) +
                            " is not in the population");
    s.selected.push_back(it->second);
  }
  std::sort(s.selected.begin(), s.selected.end());
  if (std::adjacent_find(s.selected.begin(), s.selected.end()) != s.selected.end())
    throw ValidationError(path + ": duplicate sampled unit");
  return s;
}

std::map<long long, double> read_values_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "unit_id")
    throw ValidationError(path + ": expected header 'unit_id,<value>'");
  std::map<long long, double> out;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) throw ValidationError(path + ": expected two fields per row");
    const long long id = parse_id(f[0], path);
    if (!out.emplace(id, parse_double(f[1], path)).second)
      throw ValidationError(path + ": duplicate unit id " + std::to_string(id));
  }
  return out;
}

void write_matrix_csv(const std::string& path, const JointProbabilityMatrix<double>& m,
                      const std::vector<long long>& ids) {
  if (static_cast<long long>(ids.size()) != m.N)
    throw DimensionMismatch("id table does not match the matrix");
  std::string body = "unit_id";
  for (long long id : ids) {
    body += ',';
    body += std::to_string(id);
  }
  body += '\n';
  for (long long k = 0; k < m.N; ++k) {
    body += std::to_string(ids[k]);
    for (long long l = 0; l < m.N; ++l) {
      body += ',';
      body += fmt(m.at(k, l));
    }
    body += '\n';
  }
  atomic_write(path, body);
  nlohmann::json side;
  switch (m.provenance) {
    case MatrixProvenance::closed_form: side["provenance"] = "closed-form-exact"; break;
    case MatrixProvenance::permutation_averaged: side["provenance"] = "permutation-averaged"; break;
    case MatrixProvenance::monte_carlo: side["provenance"] = "monte-carlo"; break;
  }
  if (m.provenance == MatrixProvenance::monte_carlo) side["draws"] = m.mc_draws;
  side["N"] = m.N;
  atomic_write(path + ".json", side.dump(2) + "\n");
}

MatrixFile read_matrix_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "unit_id")
    throw ValidationError(path + ": expected matrix header 'unit_id,<ids...>'");
  MatrixFile mf;
  for (std::size_t i = 1; i < header.size(); ++i)
    mf.ids.push_back(parse_id(header[i], path));
  const long long N = static_cast<long long>(mf.ids.size());
  mf.m.N = N;
  mf.m.v.assign(N * N, 0.0);
  long long row = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    if (row >= N) throw ValidationError(path + ": more rows than header ids");
    auto f = split_csv_line(line);
    if (static_cast<long long>(f.size()) != N + 1)
      throw ValidationError(path + ": row width does not match header");
    if (parse_id(f[0], path) != mf.ids[row])
      throw ValidationError(path + ": row order does not match header ids");
    for (long long l = 0; l < N; ++l) mf.m.at(row, l) = parse_double(f[l + 1], path);
    ++row;
  }
  if (row != N) throw ValidationError(path + ": fewer rows than header ids");
  return mf;
}

}  // namespace seqpps
