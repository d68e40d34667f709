#include "aggsamp/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "aggsamp/errors.hpp"
#include "aggsamp/graph.hpp"
#include "json.hpp"

namespace aggsamp {

namespace {

using nlohmann::json;

std::string seed_text(std::uint64_t seed) { return std::to_string(seed); }

std::uint64_t parse_seed(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (!s.empty() && s[0] != '-' && end == s.c_str() + s.size()) return v;
  }
  throw Error(ErrorCode::SchemaMismatch, "seed must be a nonnegative 64-bit integer");
}

double number_of(const json& j, const char* key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_exact(j.get<std::string>());
  throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be a number");
}

Index index_of(const json& j, const char* key) {
  if (!j.is_number_integer())
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be an integer");
  return static_cast<Index>(j.get<std::int64_t>());
}

std::string string_of(const json& j, const char* key) {
  if (!j.is_string())
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be a string");
  return j.get<std::string>();
}

bool bool_of(const json& j, const char* key) {
  if (!j.is_boolean())
    throw Error(ErrorCode::SchemaMismatch, std::string("field '") + key + "' must be a boolean");
  return j.get<bool>();
}

json config_json(const ExperimentConfig& c) {
  json support = json::array();
  for (Index k : c.support_list) support.push_back(k + 1);
  json strengths = json::array();
  for (double v : c.graph.strengths) strengths.push_back(format_exact(v));
  return json{
      {"seed", seed_text(c.seed)},
      {"graph",
       {{"kind", c.graph.kind},
        {"nodes", c.graph.nodes},
        {"p", format_exact(c.graph.p)},
        {"symmetric", c.graph.symmetric},
        {"path", c.graph.path},
        {"threshold", format_exact(c.graph.threshold)},
        {"strengths", strengths},
        {"scale", format_exact(c.graph.scale)}}},
      {"shift", c.shift},
      {"bandwidth", c.bandwidth},
      {"support", c.support},
      {"support_list", support},
      {"noise", c.noise},
      {"sigma2", format_exact(c.sigma2)},
      {"plan_first", c.plan_first + 1},
      {"plan_stride", c.plan_stride},
      {"plan_count", c.plan_count},
      {"shifts", c.shifts},
      {"node", c.node + 1},
      {"trials", c.trials},
  };
}

ExperimentConfig config_of(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") c.seed = parse_seed(value);
    else if (key == "graph") {
      if (!value.is_object()) throw Error(ErrorCode::SchemaMismatch, "graph must be an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "kind") c.graph.kind = string_of(gv, "graph.kind");
        else if (gk == "nodes") c.graph.nodes = index_of(gv, "graph.nodes");
        else if (gk == "p") c.graph.p = number_of(gv, "graph.p");
        else if (gk == "symmetric") c.graph.symmetric = bool_of(gv, "graph.symmetric");
        else if (gk == "path") c.graph.path = string_of(gv, "graph.path");
        else if (gk == "threshold") c.graph.threshold = number_of(gv, "graph.threshold");
        else if (gk == "scale") c.graph.scale = number_of(gv, "graph.scale");
        else if (gk == "strengths") {
          if (!gv.is_array()) throw Error(ErrorCode::SchemaMismatch, "graph.strengths must be an array");
          c.graph.strengths.clear();
          for (const auto& v : gv) c.graph.strengths.push_back(number_of(v, "graph.strengths"));
        }
        else throw Error(ErrorCode::SchemaMismatch, "unknown graph field '" + gk + "'");
      }
    } else if (key == "shift") c.shift = string_of(value, "shift");
    else if (key == "bandwidth") c.bandwidth = index_of(value, "bandwidth");
    else if (key == "support") c.support = string_of(value, "support");
    else if (key == "support_list") {
      if (!value.is_array()) throw Error(ErrorCode::SchemaMismatch, "support_list must be an array");
      c.support_list.clear();
      for (const auto& k : value) c.support_list.push_back(index_of(k, "support_list") - 1);
    } else if (key == "noise") c.noise = string_of(value, "noise");
    else if (key == "sigma2") c.sigma2 = number_of(value, "sigma2");
    else if (key == "plan_first") c.plan_first = index_of(value, "plan_first") - 1;
    else if (key == "plan_stride") c.plan_stride = index_of(value, "plan_stride");
    else if (key == "plan_count") c.plan_count = index_of(value, "plan_count");
    else if (key == "shifts") c.shifts = index_of(value, "shifts");
    else if (key == "node") c.node = index_of(value, "node") - 1;
    else if (key == "trials") c.trials = index_of(value, "trials");
    else throw Error(ErrorCode::SchemaMismatch, "unknown config field '" + key + "'");
  }
  return c;
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string format_exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_exact(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw Error(ErrorCode::SchemaMismatch, "'" + text + "' is not a decimal number");
  return v;
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig config_from_json(const std::string& text) { return config_of(parse_document(text)); }

std::string results_to_json(const ResultsDocument& doc) {
  json results = json::array();
  for (const auto& r : doc.results) {
    json values = json::object();
    for (const auto& [k, v] : r.values) values[k] = format_exact(v);
    results.push_back({{"name", r.name}, {"values", values}, {"labels", r.labels}});
  }
  const json j{{"config", config_json(doc.config)},
               {"results", results},
               {"versions", doc.versions},
               {"seed", seed_text(doc.seed)}};
  return j.dump(2) + "\n";
}

ResultsDocument results_from_json(const std::string& text) {
  const json j = parse_document(text);
  if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "results document must be an object");
  for (const char* key : {"config", "results", "versions", "seed"})
    if (!j.contains(key)) throw Error(ErrorCode::SchemaMismatch, std::string("missing '") + key + "'");
  ResultsDocument doc;
  doc.config = config_of(j.at("config"));
  doc.seed = parse_seed(j.at("seed"));
  if (!j.at("versions").is_object()) throw Error(ErrorCode::SchemaMismatch, "versions must be an object");
  for (const auto& [k, v] : j.at("versions").items()) doc.versions[k] = string_of(v, "versions");
  if (!j.at("results").is_array()) throw Error(ErrorCode::SchemaMismatch, "results must be an array");
  for (const auto& r : j.at("results")) {
    if (!r.is_object() || !r.contains("name"))
      throw Error(ErrorCode::SchemaMismatch, "each result needs a name");
    ResultRecord rec;
    rec.name = string_of(r.at("name"), "name");
    if (r.contains("values")) {
      if (!r.at("values").is_object()) throw Error(ErrorCode::SchemaMismatch, "values must be an object");
      for (const auto& [k, v] : r.at("values").items()) rec.values[k] = number_of(v, "values");
    }
    if (r.contains("labels")) {
      if (!r.at("labels").is_object()) throw Error(ErrorCode::SchemaMismatch, "labels must be an object");
      for (const auto& [k, v] : r.at("labels").items()) rec.labels[k] = string_of(v, "labels");
    }
    doc.results.push_back(std::move(rec));
  }
  return doc;
}

void save_results(const std::string& path, const ResultsDocument& doc) {
  write_text_file(path, results_to_json(doc));
}

ResultsDocument load_results(const std::string& path) { return results_from_json(read_text_file(path)); }

std::string version() { return "0.1.0"; }

}  // namespace aggsamp
