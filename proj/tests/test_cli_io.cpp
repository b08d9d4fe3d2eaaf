#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cqed/cli.hpp"
#include "oracles.hpp"

namespace cqed {
namespace {

namespace fs = std::filesystem;
namespace frozen = oracle::frozen;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"cqed"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cqed_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto cfg = io::parse_config(
      "# optimal cavity\n"
      "g0_ghz = 8.0\n"
      "kappa_ghz=8   # trailing comment\n"
      "\n"
      "gamma_ghz = 0.16\r\n"
      "values = 3.2, 8.0,16\n"
      "format = json\n"
      "points = 11\n"
      "reference = true\n");
  EXPECT_EQ(*cfg.g0_ghz, 8.0);
  EXPECT_EQ(*cfg.kappa_ghz, 8.0);
  EXPECT_EQ(*cfg.gamma_ghz, 0.16);
  EXPECT_EQ(cfg.values_ghz, (std::vector<double>{3.2, 8.0, 16.0}));
  EXPECT_EQ(cfg.format, io::Format::Json);
  EXPECT_EQ(cfg.points, 11u);
  EXPECT_TRUE(cfg.reference);
  EXPECT_EQ(io::to_params(cfg), oracle::reference());
}

TEST(Config, RejectsMalformedInput) {
  auto field_of = [](const char* text) {
    try {
      io::parse_config(text);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field_of("g0_ghz = eight\n"), "g0_ghz");
  EXPECT_EQ(field_of("omega = 1\n"), "omega");
  EXPECT_EQ(field_of("g0_ghz 8\n"), "line 1");
  EXPECT_EQ(field_of("points = 2.5\n"), "points");
  EXPECT_EQ(field_of("format = xml\n"), "format");
  EXPECT_EQ(field_of("values = 1,,2\n"), "values");
  EXPECT_EQ(field_of("reference = maybe\n"), "reference");
}

TEST(Config, MissingAndInvalidParametersNameTheKey) {
  io::RunConfig cfg;
  cfg.kappa_ghz = 8.0;
  cfg.gamma_ghz = 0.16;
  try {
    io::to_params(cfg);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "g0_ghz");
  }
  cfg.g0_ghz = 8.0;
  cfg.gamma_ghz = -0.1;
  try {
    io::to_params(cfg);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "gamma_ghz");
  }
  EXPECT_THROW(io::load_config("/nonexistent/dir/run.cfg"), IoError);
}

TEST(Cli, EfficiencyForReferenceParameters) {
  const auto r = run_cli({"efficiency", "--g0-ghz", "8.0", "--kappa-ghz", "8.0", "--gamma-ghz", "0.16"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eta_q=0.961169\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("coupling=Strong\n"), std::string::npos);
  EXPECT_NE(r.out.find("cavity=Optimal\n"), std::string::npos);
  EXPECT_NE(r.out.find("C0=25.000000\n"), std::string::npos);
  EXPECT_NE(r.out.find("fwhm_ps=31.563"), std::string::npos);
}

TEST(Cli, EfficiencyLosslessEmitter) {
  const auto r = run_cli({"efficiency", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eta_q=1.000000\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("C0=inf\n"), std::string::npos);
}

TEST(Cli, EfficiencyDetunedReportsNumericValue) {
  const auto r = run_cli({"efficiency", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16",
                          "--delta-ghz", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eta_q_numeric="), std::string::npos);
  EXPECT_EQ(r.out.find("fwhm_ps="), std::string::npos);
}

TEST(Cli, MissingCouplingIsValidationError) {
  const auto r = run_cli({"efficiency", "--kappa-ghz", "8", "--gamma-ghz", "0.16"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("g0_ghz"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UnknownFlagAndMissingCommand) {
  EXPECT_EQ(run_cli({"efficiency", "--omega", "3"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(cli::kVersion), std::string::npos);
}

TEST_F(TempDir, ConfigFileWithFlagOverride) {
  {
    std::ofstream f(path("run.cfg"));
    f << "g0_ghz = 8\nkappa_ghz = 3.2\ngamma_ghz = 0.16\n";
  }
  const auto base = run_cli({"efficiency", "--config", path("run.cfg").c_str()});
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_NE(base.out.find("eta_q=0.944822\n"), std::string::npos) << base.out;
  const auto over = run_cli({"efficiency", "--config", path("run.cfg").c_str(), "--kappa-ghz", "16"});
  ASSERT_EQ(over.code, 0) << over.err;
  EXPECT_NE(over.out.find("eta_q=0.952018\n"), std::string::npos) << over.out;
}

TEST(Cli, MissingConfigFileIsIoError) {
  const auto r = run_cli({"efficiency", "--config", "/nonexistent/dir/run.cfg"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("/nonexistent/dir/run.cfg"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsIoError) {
  const auto r = run_cli({"efficiency", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16", "--out",
                          "/nonexistent/dir/out.txt"});
  EXPECT_EQ(r.code, 4);
}

TEST(Cli, LedgerViolationIsNumericFailure) {
  const auto r = run_cli({"simulate", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16", "--dt-ns",
                          "0.05", "--t-max-ns", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numeric failure"), std::string::npos);
}

TEST(Cli, SimulateWritesTrajectoryWithReference) {
  const auto r = run_cli({"simulate", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16", "--t-max-ns",
                          "1", "--dt-ns", "1e-4", "--reference", "true"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 10002u);
  ASSERT_EQ(rows[0].size(), 15u);
  EXPECT_EQ(rows[0][0], "t_ns");
  EXPECT_EQ(rows[0][14], "im_C_ref");
  EXPECT_EQ(std::stod(rows[1][0]), 0.0);
  EXPECT_EQ(std::stod(rows[1][1]), 1.0);
  EXPECT_EQ(std::stod(rows[1][7]), 0.0);
  EXPECT_NEAR(std::stod(rows.back()[0]), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(rows.back()[7]), 0.96117, 1e-4);
  double worst_ledger = 0.0, worst_ref = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    worst_ledger = std::max(worst_ledger, std::abs(std::stod(rows[i][10])));
    for (int c = 0; c < 4; ++c)
      worst_ref = std::max(worst_ref, std::abs(std::stod(rows[i][1 + c]) - std::stod(rows[i][11 + c])));
  }
  EXPECT_LE(worst_ledger, 1e-8);
  EXPECT_LE(worst_ref, 1e-8);
}

TEST(Cli, SweepOverKappa) {
  const auto r = run_cli({"sweep", "--g0-ghz", "8", "--gamma-ghz", "0.16", "--axis", "kappa", "--values",
                          "3.2,8.0,16.0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "axis_value");
  EXPECT_NEAR(std::stod(rows[1][1]), frozen::eta_q_3p2, 1e-8);
  EXPECT_NEAR(std::stod(rows[2][1]), frozen::eta_q_8p0, 1e-8);
  EXPECT_NEAR(std::stod(rows[3][1]), frozen::eta_q_16, 1e-8);
  EXPECT_NEAR(std::stod(rows[2][2]) * 1e3, frozen::fwhm_ps_8p0, 1e-5);
  EXPECT_EQ(rows[1][4], "Strong/Good");
  EXPECT_EQ(rows[2][4], "Strong/Optimal");
  EXPECT_EQ(rows[3][4], "Weak/Bad");
}

TEST(Cli, SweepWithFailingPointKeepsGoing) {
  const auto r = run_cli({"sweep", "--g0-ghz", "8", "--kappa-ghz", "8", "--axis", "gamma", "--values",
                          "-0.1,0.16,0.3"});
  EXPECT_EQ(r.code, 2);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[1][1].empty());
  EXPECT_NE(rows[1][5].find("gamma"), std::string::npos);
  EXPECT_NEAR(std::stod(rows[2][1]), frozen::eta_q_8p0, 1e-8);
}

TEST(Cli, SweepNeedsAxis) {
  const auto r = run_cli({"sweep", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("axis"), std::string::npos);
}

TEST(Cli, OptimizeFindsCouplingRate) {
  const auto r = run_cli({"optimize", "--g0-ghz", "8", "--gamma-ghz", "0.16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "kappa_star_ghz");
  EXPECT_NEAR(std::stod(rows[1][0]), 8.0, 8.0e-3);
  EXPECT_NEAR(std::stod(rows[1][1]), frozen::eta_q_star, 1e-8);
  EXPECT_EQ(rows[1][5], "interior");
  EXPECT_EQ(rows[1][6], "false");
}

TEST(Cli, SpectrumIntegratesToEfficiency) {
  const auto r = run_cli({"spectrum", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16", "--points",
                          "8001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 8002u);
  double area = 0.0;
  for (std::size_t i = 2; i < rows.size(); ++i)
    area += 0.5 * (std::stod(rows[i][1]) + std::stod(rows[i - 1][1])) *
            (std::stod(rows[i][0]) - std::stod(rows[i - 1][0]));
  EXPECT_NEAR(area, frozen::eta_q_8p0, 1e-3);
}

TEST(Cli, JsonOutputRoundTripsExactly) {
  const auto r = run_cli({"efficiency", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16", "--format",
                          "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto expected = efficiency(oracle::reference());
  EXPECT_EQ(j["eta_q"].get<double>(), expected.eta_q);
  EXPECT_EQ(j["eta_c"].get<double>(), expected.eta_c);
  EXPECT_EQ(j["law_kimble_error"].get<double>(), expected.law_kimble_error);
  EXPECT_EQ(j["params"]["g0_ghz"].get<double>(), 8.0);

  const auto traj_out = run_cli({"simulate", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16",
                                 "--t-max-ns", "0.1", "--format", "json"});
  ASSERT_EQ(traj_out.code, 0) << traj_out.err;
  const auto t = nlohmann::json::parse(traj_out.out);
  IntegrationConfig cfg;
  cfg.t_max = 0.1;
  const auto traj = integrate(oracle::reference(), cfg);
  ASSERT_EQ(t["P_out"].size(), traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ASSERT_EQ(t["P_out"][i].get<double>(), traj.P_out[i]);
    ASSERT_EQ(t["re_C"][i].get<double>(), traj.C[i].real());
  }
}

TEST_F(TempDir, RepeatedRunsAreByteIdentical) {
  const std::string a = path("a.csv"), b = path("b.csv");
  for (const std::string& out : {a, b}) {
    const auto r = run_cli({"simulate", "--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16",
                            "--seedless", "--out", out.c_str()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
  }
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  const auto meta = nlohmann::json::parse(slurp(a + ".meta.json"));
  EXPECT_EQ(meta["command"], "simulate");
  EXPECT_EQ(meta["config"]["kappa_ghz"].get<double>(), 8.0);
  EXPECT_EQ(slurp(a + ".meta.json"), slurp(b + ".meta.json"));
}

}  // namespace
}  // namespace cqed
