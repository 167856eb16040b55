#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zslab/cli_app.hpp"

using namespace zslab;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zslab-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_diagonal_potential(const TempDir& dir, const std::string& name,
                                     double amp, double mean, int n_modes = 16) {
  json j;
  j["n_modes"] = n_modes;
  j["diagonal_of"] = {
      {"harmonics",
       {{"0", {mean, 0.0}}, {"1", {amp / 2, 0.0}}, {"-1", {amp / 2, 0.0}}}}};
  const std::string p = dir.file(name);
  write_text_file(p, j.dump());
  return p;
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST(Cli, SpectrumOfZeroPotential) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "zero.json", 0.0, 0.0);
  std::string out;
  const int code = run_cli({"--command", "spectrum", "--input", in, "--n-spec", "2"}, &out);
  EXPECT_EQ(code, cli::kExitPass);
  const json j = json::parse(out);
  EXPECT_EQ(j.at("kind"), "ZS");
  for (const auto& e : j.at("entries")) {
    const double expect = e.at("n").get<int>() * std::numbers::pi;
    EXPECT_NEAR(e.at("lam_minus").get<double>(), expect, 1e-10);
    EXPECT_NEAR(e.at("gap").get<double>(), 0.0, 1e-10);
  }
  EXPECT_EQ(j.at("discs").size(), 5u);
}

TEST(Cli, DiscriminantSweepIsEvenForDiagonalPotentials) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.5, 0.2);
  const std::string out_path = dir.file("sweep.csv");
  const int code = run_cli({"--command", "discriminant", "--input", in, "--output", out_path,
                            "--lambda-min", "-4", "--lambda-max", "4", "--samples", "17"});
  EXPECT_EQ(code, cli::kExitPass);
  std::ifstream in_csv(out_path);
  std::string header;
  std::getline(in_csv, header);
  EXPECT_EQ(header, "lambda,re_delta,im_delta,re_ddelta,im_ddelta");
  std::vector<std::array<double, 5>> rows;
  std::string line;
  while (std::getline(in_csv, line)) {
    std::array<double, 5> r{};
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r[0], &r[1], &r[2], &r[3], &r[4]);
    rows.push_back(r);
  }
  ASSERT_EQ(rows.size(), 17u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& lhs = rows[i];
    const auto& rhs = rows[rows.size() - 1 - i];
    EXPECT_NEAR(lhs[0], -rhs[0], 1e-12);
    EXPECT_NEAR(lhs[1], rhs[1], 1e-8);  // Delta even in lambda
  }
}

TEST(Cli, ActionsReportIncludesBothFamilies) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.5, 0.25);
  std::string out;
  const int code = run_cli({"--command", "actions", "--input", in, "--n-spec", "1",
                            "--levels", "1,2"}, &out);
  EXPECT_EQ(code, cli::kExitPass);
  const json j = json::parse(out);
  int i_count = 0, j_count = 0;
  for (const auto& rec : j.at("actions")) {
    if (rec.at("kind") == "I") ++i_count;
    if (rec.at("kind") == "J") ++j_count;
    EXPECT_TRUE(rec.at("value").is_array());
    EXPECT_EQ(rec.at("value").size(), 2u);
  }
  EXPECT_EQ(i_count, 6);  // n in {-1,0,1} x k in {1,2}
  EXPECT_EQ(j_count, 2);  // n = 1, k in {1,2}
}

TEST(Cli, DeterministicOutputs) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.4, 0.1);
  std::string first, second;
  EXPECT_EQ(run_cli({"--command", "spectrum", "--input", in, "--n-spec", "2"}, &first),
            cli::kExitPass);
  EXPECT_EQ(run_cli({"--command", "spectrum", "--input", in, "--n-spec", "2"}, &second),
            cli::kExitPass);
  EXPECT_EQ(first, second);
}

TEST(Cli, FlowProducesTrajectoryAndSummary) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.4, 0.0);
  const std::string out_path = dir.file("traj.csv");
  const int code = run_cli({"--command", "flow", "--input", in, "--field", "mkdv_defocusing",
                            "--t-end", "0.001", "--dt", "1e-5", "--record-every", "50",
                            "--output", out_path});
  EXPECT_EQ(code, cli::kExitPass);
  EXPECT_TRUE(fs::exists(out_path));
  EXPECT_TRUE(fs::exists(out_path + ".summary.json"));
  std::ifstream sf(out_path + ".summary.json");
  const json summary = json::parse(sf);
  EXPECT_EQ(summary.at("field"), "mkdv_defocusing");
  EXPECT_LT(summary.at("drift").at("mean").get<double>(), 1e-12);
}

TEST(Cli, HamiltoniansReportClosedForms) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.3, 0.05);
  std::string out;
  const int code = run_cli({"--command", "hamiltonians", "--input", in}, &out);
  EXPECT_EQ(code, cli::kExitPass);
  const json j = json::parse(out);
  EXPECT_TRUE(j.at("closed_form").contains("K1"));
  EXPECT_TRUE(j.at("closed_form").contains("S4"));
  EXPECT_TRUE(j.at("asymptotic").contains("S1"));
  // S_2(u,u) = 0 in closed form
  EXPECT_LT(std::abs(j.at("closed_form").at("S2")[0].get<double>()), 1e-12);
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  TempDir dir;
  const std::string in = write_diagonal_potential(dir, "pot.json", 0.4, 0.0);
  json cfg;
  cfg["command"] = "spectrum";
  cfg["input"] = in;
  cfg["n_spec"] = 1;
  const std::string cfg_path = dir.file("cfg.json");
  write_text_file(cfg_path, cfg.dump());

  std::string out;
  EXPECT_EQ(run_cli({"--config", cfg_path}, &out), cli::kExitPass);
  EXPECT_EQ(json::parse(out).at("entries").size(), 3u);

  // the flag wins over the file
  EXPECT_EQ(run_cli({"--config", cfg_path, "--n-spec", "2"}, &out), cli::kExitPass);
  EXPECT_EQ(json::parse(out).at("entries").size(), 5u);
}

TEST(Cli, UsageErrors) {
  TempDir dir;
  std::string err;
  EXPECT_EQ(run_cli({"--command", "spectrum"}, nullptr, &err), cli::kExitUsage);
  EXPECT_NE(err.find("requires --input"), std::string::npos);

  EXPECT_EQ(run_cli({"--command", "bogus", "--input", "x.json"}, nullptr, &err),
            cli::kExitUsage);

  const std::string bad = dir.file("bad.json");
  write_text_file(bad, "{ not json");
  err.clear();
  EXPECT_EQ(run_cli({"--command", "spectrum", "--input", bad}, nullptr, &err),
            cli::kExitUsage);
  EXPECT_NE(err.find("malformed JSON"), std::string::npos);

  EXPECT_EQ(run_cli({"--command", "spectrum", "--input", "nonexistent.json"}, nullptr, &err),
            cli::kExitUsage);

  // tolerance floor
  EXPECT_EQ(run_cli({"--command", "verify", "--tol.mean_cosh", "1e-13"}, nullptr, &err),
            cli::kExitUsage);
  EXPECT_NE(err.find("1e-12 floor"), std::string::npos);
}

TEST(Cli, NumericalFailuresExitWithOne) {
  TempDir dir;
  // complex diagonal potential: the spectrum precondition rejects it
  json j;
  j["n_modes"] = 16;
  j["diagonal_of"] = {{"harmonics", {{"1", {0.2, 0.3}}}}};
  const std::string in = dir.file("complex.json");
  write_text_file(in, j.dump());
  std::string err;
  EXPECT_EQ(run_cli({"--command", "spectrum", "--input", in}, nullptr, &err),
            cli::kExitUsage);  // invalid_argument from the class check
}
