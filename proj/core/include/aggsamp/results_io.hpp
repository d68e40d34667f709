#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aggsamp/linalg.hpp"

namespace aggsamp {

struct GraphSpec {
  std::string kind = "erdos_renyi";  ///< erdos_renyi | cycle | factor | edges | table
  Index nodes = 20;
  double p = 0.2;
  bool symmetric = true;
  std::string path;         ///< for edges / table
  double threshold = 0.01;  ///< table ingestion
  std::vector<double> strengths{64.0, 16.0, 4.0, 1.0};  ///< factor graphs
  double scale = 0.05;      ///< factor graphs: background weight spread

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

/// Everything needed to rerun an experiment. Node and support indices are
/// 0-based here and 1-based in the JSON form.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  GraphSpec graph;
  std::string shift = "adjacency";
  Index bandwidth = 3;
  std::string support = "first";  ///< first | random | list
  std::vector<Index> support_list;
  std::string noise = "none";  ///< none | observation | signal | frequency
  double sigma2 = 0.0;
  Index plan_first = 0;
  Index plan_stride = 1;
  Index plan_count = 0;  ///< rows kept; 0 means K
  Index shifts = 0;  ///< aggregation length L; 0 means N
  Index node = 0;
  Index trials = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ResultRecord {
  std::string name;
  std::map<std::string, double> values;
  std::map<std::string, std::string> labels;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

struct ResultsDocument {
  ExperimentConfig config;
  std::vector<ResultRecord> results;
  std::map<std::string, std::string> versions;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultsDocument&, const ResultsDocument&) = default;
};

/// Decimal text with 17 significant digits ("inf", "-inf", "nan" for the
/// non-finite values); parses back to the identical double.
std::string format_exact(double v);
double parse_exact(const std::string& text);

std::string config_to_json(const ExperimentConfig& config);
/// Missing fields keep their defaults; wrong types or unknown keys throw
/// SchemaMismatch.
ExperimentConfig config_from_json(const std::string& text);

std::string results_to_json(const ResultsDocument& doc);
ResultsDocument results_from_json(const std::string& text);

/// IOFailure on filesystem errors, SchemaMismatch on malformed documents.
void save_results(const std::string& path, const ResultsDocument& doc);
ResultsDocument load_results(const std::string& path);

/// Library version string.
std::string version();

}  // namespace aggsamp
