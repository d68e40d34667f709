#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + AGGSAMP_CLI + std::string(" ") + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  Run r;
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double num(const json& record, const std::string& key) {
  return std::stod(record.at("values").at(key).get<std::string>());
}

std::vector<json> records(const json& doc, const std::string& name) {
  std::vector<json> out;
  for (const auto& r : doc.at("results"))
    if (r.at("name") == name) out.push_back(r);
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(Cli, CycleEigenvaluesInCanonicalOrder) {
  const auto r = cli("decompose --graph cycle --nodes 4");
  ASSERT_EQ(r.code, 0);
  const auto ev = records(json::parse(r.out), "eigenvalue");
  ASSERT_EQ(ev.size(), 4u);
  const double want[4][2] = {{1, 0}, {0, -1}, {0, 1}, {-1, 0}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(num(ev[k], "re"), want[k][0], 1e-12);
    EXPECT_NEAR(num(ev[k], "im"), want[k][1], 1e-12);
    EXPECT_EQ(ev[k].at("labels").at("index"), std::to_string(k + 1));
  }
}

TEST(Cli, SameSeedSameBytes) {
  const std::string args = "recover --nodes 14 --bandwidth 3 --noise observation --sigma2 0.01 --plan-count 5 --trials 8";
  const auto a = cli(args + " --seed 5");
  const auto b = cli(args + " --seed 5");
  const auto c = cli(args + " --seed 6");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SeedFallsBackToEnvironment) {
  const auto flag = cli("decompose --nodes 12 --seed 21");
  const auto env = cli("decompose --nodes 12", "GSP_SEED=21");
  ASSERT_EQ(flag.code, 0);
  EXPECT_EQ(flag.out, env.out);
}

TEST(Cli, ZeroNoiseMatchesNoiseless) {
  const std::string args = "recover --nodes 12 --bandwidth 3 --trials 5 --seed 3";
  const auto clean = json::parse(cli(args).out);
  const auto zero = json::parse(cli(args + " --noise observation --sigma2 0").out);
  const auto a = records(clean, "trial");
  const auto b = records(zero, "trial");
  ASSERT_EQ(a.size(), 5u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT(num(a[i], "error"), 1e-8);
    EXPECT_LT(num(b[i], "error"), 1e-8);
  }
}

TEST(Cli, FrequencyWhiteDesignTiesEveryNode) {
  const auto r = cli("design --nodes 10 --bandwidth 2 --noise frequency --sigma2 1 --seed 4");
  ASSERT_EQ(r.code, 0);
  const auto ranking = records(json::parse(r.out), "node_ranking");
  ASSERT_EQ(ranking.size(), 1u);
  EXPECT_EQ(num(ranking[0], "all_tied"), 1.0);
}

TEST(Cli, OutWritesJsonAndCsv) {
  const std::string stem = temp_path("aggsamp_cli_out");
  const auto r = cli("spaceshift --nodes 12 --trials 3 --out " + stem);
  ASSERT_EQ(r.code, 0);
  std::ifstream js(stem + ".json");
  std::ifstream csv(stem + ".csv");
  ASSERT_TRUE(js.good());
  ASSERT_TRUE(csv.good());
  const auto doc = json::parse(js);
  EXPECT_EQ(records(doc, "strategy").size(), 6u);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("record,", 0), 0u);
  EXPECT_NE(header.find(",metric,value"), std::string::npos);
  std::filesystem::remove(stem + ".json");
  std::filesystem::remove(stem + ".csv");
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const std::string path = temp_path("aggsamp_cli_config.json");
  std::ofstream(path) << R"({"seed": 9, "bandwidth": 2, "graph": {"nodes": 11, "p": 0.3}})";
  const auto doc = json::parse(cli("decompose --config " + path + " --nodes 13").out);
  EXPECT_EQ(doc.at("config").at("bandwidth"), 2);
  EXPECT_EQ(doc.at("config").at("graph").at("nodes"), 13);
  EXPECT_EQ(doc.at("seed"), "9");
  EXPECT_EQ(records(doc, "eigenvalue").size(), 13u);
  std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("decompose --bogus").code, 1);
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("decompose --graph edges --graph-file /nonexistent/edges.csv").code, 3);

  const std::string table = temp_path("aggsamp_cli_bad_table.csv");
  std::ofstream(table) << "0,1\n1\n";
  EXPECT_EQ(cli("decompose --graph table --graph-file " + table).code, 1);
  std::filesystem::remove(table);

  const std::string config = temp_path("aggsamp_cli_bad_config.json");
  std::ofstream(config) << R"({"bandwidth": "three"})";
  EXPECT_EQ(cli("decompose --config " + config).code, 1);
  std::filesystem::remove(config);
}

TEST(Cli, SweepReportsRate) {
  const auto r = cli("recover --sweep --graphs 5 --seed 2");
  ASSERT_EQ(r.code, 0);
  const auto sweep = records(json::parse(r.out), "sweep");
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_GE(num(sweep[0], "rate"), 0.99);
}
