#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"

namespace fs = std::filesystem;
using qprob::cli::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const json& overrides, const json& file_cfg = nullptr) {
  std::ostringstream out, err;
  int code = 0;
  try {
    code = qprob::cli::run_command(command, qprob::cli::effective_config(command, file_cfg, overrides), out, err);
  } catch (const qprob::InvalidArgument& e) {
    code = 2;
  }
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qprob_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Prospect, BellLikeRawInterference) {
  const auto r = run("prospect", {{"preset", "bell-like"}, {"weights", "0.70710678118654752,0.70710678118654752"}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["raw"]["q"][0].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["raw"]["q"][1].get<double>(), -0.25, 1e-12);
  EXPECT_NEAR(j["normalized"]["p"][0].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j["checks"]["sum_p_is_one"].get<bool>());
}

TEST(Prospect, MaxEntangledHasNoInterference) {
  const auto r = run("prospect", {{"preset", "max-entangled"}, {"M", 2}, {"weights", "0.7071,0.7071"}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const auto& q : j["raw"]["q"]) EXPECT_LT(std::abs(q.get<double>()), 1e-12);
}

TEST(Prospect, MalformedWeightsAreValidationErrors) {
  EXPECT_EQ(run("prospect", {{"preset", "bell-like"}, {"weights", "0.6,0.6"}, {"strict", true}}).code, 2);
  EXPECT_EQ(run("prospect", {{"preset", "bell-like"}, {"weights", "0.6,zz"}}).code, 2);
  EXPECT_EQ(run("prospect", {{"preset", "bell-like"}, {"weights", "1,0,0"}}).code, 2);
  EXPECT_EQ(run("prospect", {{"preset", "nonsense"}}).code, 2);
  // Non-strict mode normalizes.
  EXPECT_EQ(run("prospect", {{"preset", "bell-like"}, {"weights", "0.6,0.6"}}).code, 0);
}

TEST_F(Scratch, DegenerateFamilyIsNumericalFailure) {
  std::ofstream(path("deg.json")) << R"({"dimA": 2, "dimB": 2, "rho": [[0.5,0,0,0],[0,0,0,0],[0,0,0.5,0],[0,0,0,0]]})";
  const json cfg = {{"preset", "file"}, {"state", path("deg.json")}, {"weights", "0,1"}};
  EXPECT_EQ(run("prospect", cfg).code, 3);
  json raw = cfg;
  raw["mode"] = "raw";
  EXPECT_EQ(run("prospect", raw).code, 0);
}

TEST_F(Scratch, ProspectFromStateFile) {
  std::ofstream(path("state.json")) << R"({"dimA": 2, "dimB": 2, "rho": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]]})";
  const auto r = run("prospect", {{"preset", "file"}, {"state", path("state.json")}, {"weights", "0.6,0.8"}});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ofstream(path("bad.json")) << R"({"dimA": 2, "dimB": 2, "rho": [[0.6,0,0,0],[0,0.6,0,0],[0,0,0,0],[0,0,0,0]]})";
  EXPECT_EQ(run("prospect", {{"preset", "file"}, {"state", path("bad.json")}}).code, 2);
}

TEST(Measure, PlusStateAndUnion) {
  const auto r = run("measure", {{"preset", "plus"}, {"weights", "0.70710678118654752,0.70710678118654752"}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["events"]["p"][0].get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(j["uncertain"]["q"].get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(j["uncertain"]["p"].get<double>(), 1.0, 1e-15);
}

TEST(Measure, InvalidStateRejected) {
  EXPECT_EQ(run("measure", {{"preset", "diag"}, {"diag", "0.5,0.6"}}).code, 2);
  EXPECT_EQ(run("measure", {{"preset", "diag"}, {"diag", "0.5,0.5"}}).code, 0);
}

TEST(QuarterLaw, SymmetricGridIsQuarter) {
  const auto r = run("quarter-law", json::object());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.front(), "alpha,beta,mu,nu,lambdaPlus,qPlus,qMinus,residual");
  ASSERT_EQ(ls.size(), 5u);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    EXPECT_NE(ls[i].find(",0.25,-0.25,0"), std::string::npos) << ls[i];
  }
}

TEST(QuarterLaw, ExplicitRows) {
  const json rows = json::array({{{"alpha", 1}, {"beta", 1}, {"mu", 1}, {"nu", 1}},
                                 {{"alpha", 2}, {"beta", 1}, {"mu", 4}, {"nu", 5}, {"lambdaPlus", 0.4}}});
  for (bool numeric : {false, true}) {
    const auto r = run("quarter-law", {{"rows", rows}, {"numeric", numeric}});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 3u);
    std::vector<double> v;
    std::stringstream row(ls[2]);
    for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
    EXPECT_NEAR(v[5], 0.26667, 1e-5);
    EXPECT_NEAR(v[7], 0.0, 1e-9);
  }
}

TEST(QuarterLaw, NonPositiveShapeIsValidationError) {
  EXPECT_EQ(run("quarter-law", {{"alpha", "0,1"}}).code, 2);
}

TEST_F(Scratch, BecSimWritesCsvReportAndPlot) {
  const auto out = path("run.csv");
  const auto r = run("bec-sim", {{"b", 0.25}, {"tmax", 2.0}, {"dt", 1e-3}, {"stride", 100}, {"paths", 64},
                                 {"out", out}, {"plot", true}, {"seed", 7}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = lines(slurp(out));
  EXPECT_EQ(csv.front(), "t,p1,p2,f1,f2,q1,q2,stderr1");
  EXPECT_EQ(csv.size(), 1u + 2000 / 100 + 1);
  const auto report = json::parse(slurp(path("run.json")));
  EXPECT_EQ(report["regime"], "Rabi");
  EXPECT_EQ(report["rows"], 21);
  const auto svg = slurp(path("run.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(svg.find("Rabi"), std::string::npos);
}

TEST_F(Scratch, BecSimSupercriticalRegime) {
  const auto r = run("bec-sim", {{"b", 0.5}, {"tmax", 1.0}, {"stride", 100}, {"paths", 8}, {"out", path("j.csv")}});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(path("j.json")))["regime"], "Josephson");
}

TEST_F(Scratch, BecSimZeroNoiseGivesZeroInterference) {
  const auto r = run("bec-sim", {{"sigma", 0.0}, {"tmax", 3.0}, {"stride", 50}, {"paths", 16}, {"out", path("z.csv")}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = lines(slurp(path("z.csv")));
  for (std::size_t i = 1; i < csv.size(); ++i) {
    std::vector<std::string> cells;
    std::stringstream row(csv[i]);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_EQ(cells[5], "0") << csv[i];
  }
}

TEST_F(Scratch, BecSimRowCountFollowsStride) {
  const auto r = run("bec-sim", {{"tmax", 1.0}, {"dt", 0.01}, {"stride", 3}, {"paths", 4}, {"out", path("s.csv")}});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(path("s.csv"))).size(), 1u + 100 / 3 + 1);
}

TEST_F(Scratch, BecSimValidation) {
  EXPECT_EQ(run("bec-sim", {{"s0", 1.2}, {"out", path("v.csv")}}).code, 2);
  EXPECT_EQ(run("bec-sim", {{"dt", -1}, {"out", path("v.csv")}}).code, 2);
  EXPECT_EQ(run("bec-sim", {{"stride", 0}, {"out", path("v.csv")}}).code, 2);
}

TEST_F(Scratch, BecSimNumericalFailureExitCode) {
  // s0 = 0, x0 = pi leaves the critical amplitude undefined.
  const auto r = run("bec-sim", {{"s0", 0.0}, {"x0", M_PI}, {"tmax", 1.0}, {"paths", 4}, {"out", path("n.csv")}});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(path("n.csv")));
}

TEST_F(Scratch, ReportsAreByteIdenticalOnRerun) {
  const json cfg = {{"tmax", 2.0}, {"stride", 100}, {"paths", 100}, {"plot", true}};
  json a = cfg, b = cfg;
  a["out"] = path("a.csv");
  b["out"] = path("a2.csv");
  a["report"] = b["report"] = path("r.json");
  ASSERT_EQ(run("bec-sim", a).code, 0);
  const auto first = slurp(path("r.json"));
  const auto first_csv = slurp(path("a.csv"));
  ASSERT_EQ(run("bec-sim", a).code, 0);
  EXPECT_EQ(slurp(path("r.json")), first);
  EXPECT_EQ(slurp(path("a.csv")), first_csv);
  ASSERT_EQ(run("prospect", {{"preset", "product"}, {"out", path("p.json")}}).code, 0);
  const auto prospect_first = slurp(path("p.json"));
  ASSERT_EQ(run("prospect", {{"preset", "product"}, {"out", path("p.json")}}).code, 0);
  EXPECT_EQ(slurp(path("p.json")), prospect_first);
}

TEST(Verify, FilterRunsOnlyNamedSuite) {
  const auto r = run("verify", {{"filter", "quarterlaw"}});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("[quarterlaw]"), std::string::npos);
  EXPECT_EQ(r.out.find("[bec]"), std::string::npos);
  EXPECT_EQ(r.out.find("[prospects]"), std::string::npos);
}

TEST(Verify, CorruptedStateFailsNamingTheCheck) {
  const auto r = run("verify", {{"filter", "prospects"}, {"corrupt-state", true}});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("prospect probability normalization"), std::string::npos) << r.err;
}

TEST(Verify, UnknownSuiteIsValidationError) { EXPECT_EQ(run("verify", {{"filter", "nope"}}).code, 2); }

TEST_F(Scratch, ConfigFileLayering) {
  std::ofstream(path("cfg.json")) << R"({"tmax": 1.0, "stride": 10, "paths": 4, "b": 0.5})";
  const auto file_cfg = qprob::cli::detail::read_json_file(path("cfg.json"));
  const auto cfg = qprob::cli::effective_config("bec-sim", file_cfg, {{"b", 0.25}});
  EXPECT_EQ(cfg["b"].get<double>(), 0.25);
  EXPECT_EQ(cfg["tmax"].get<double>(), 1.0);
  EXPECT_EQ(cfg["sigma"].get<double>(), 0.1);
}

TEST_F(Scratch, BinaryExitCodes) {
  const std::string exe = QPROB_CLI_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  EXPECT_EQ(shell(exe + " --help" + quiet), 0);
  EXPECT_EQ(shell(exe + " --version" + quiet), 0);
  EXPECT_EQ(shell(exe + " prospect --preset bell-like" + quiet), 0);
  EXPECT_EQ(shell(exe + " prospect --bogus" + quiet), 2);
  EXPECT_EQ(shell(exe + " frobnicate" + quiet), 2);
  EXPECT_EQ(shell(exe + " bec-sim --s0 2 --out " + path("x.csv") + quiet), 2);
  EXPECT_EQ(shell(exe + " verify --filter prospects --corrupt-state" + quiet), 1);
  EXPECT_EQ(shell(exe + " bec-sim --config " + path("missing.json") + quiet), 2);
  EXPECT_EQ(shell(exe + " bec-sim --tmax 1 --stride 10 --paths 4 --out " + path("ok.csv") + quiet), 0);
  EXPECT_TRUE(fs::exists(path("ok.json")));
}

TEST_F(Scratch, ShippedConfigsRun) {
  for (const auto& entry : fs::directory_iterator(QPROB_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto cfg = qprob::cli::detail::read_json_file(entry.path().string());
    ASSERT_TRUE(cfg.contains("command")) << entry.path();
    const std::string command = cfg["command"];
    if (command == "bec-sim") continue;  // full-length runs; exercised by the acceptance binary
    json overrides = json::object();
    overrides["out"] = path("cfg_out");
    EXPECT_EQ(run(command, overrides, cfg).code, 0) << entry.path();
  }
}
