#pragma once

#include <map>
#include <string>
#include <vector>

#include "seqpps/joint.hpp"
#include "seqpps/params.hpp"

namespace seqpps {

// Population file: unit ids with the probability (or size) column kept both
// as parsed doubles and as the verbatim strings, so exact mode can ingest
// the decimals without a float round-trip.
struct PopulationFile {
  std::vector<long long> ids;
  std::vector<std::string> raw;
  std::vector<double> values;
  bool is_size = false;  // header said "size" instead of "prob"
};

PopulationFile read_population_csv(const std::string& path);

std::vector<Rational> parse_rationals(const std::vector<std::string>& raw);

// Sample CSV (one unit_id per row, header "unit_id") plus a JSON sidecar at
// path + ".json" holding seed, method and permutation start. Samples are
// stored under the original ids; the id vector maps them to unit positions.
void write_sample_csv(const std::string& path, const Sample& sample,
                      const std::vector<long long>& ids, const std::string& method);

Sample read_sample_csv(const std::string& path, const std::vector<long long>& ids);

std::map<long long, double> read_values_csv(const std::string& path);

// Full symmetric matrix CSV: header "unit_id,<id1>,<id2>,..." then one row
// per unit. A JSON sidecar at path + ".json" records the provenance.
void write_matrix_csv(const std::string& path, const JointProbabilityMatrix<double>& m,
                      const std::vector<long long>& ids);

struct MatrixFile {
  std::vector<long long> ids;
  JointProbabilityMatrix<double> m;
};

MatrixFile read_matrix_csv(const std::string& path);

// Writes content to a temporary file in the target directory and renames it
// into place, so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace seqpps
