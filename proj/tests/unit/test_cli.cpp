#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unistd.h>

#include "stc/cli/commands.hpp"
#include "stc/cli/experiment.hpp"

namespace {

using namespace stc;
using namespace stc::cli;
namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("stc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int call(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  std::vector<const char*> argv{"stc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

const char* kSmallSpec = R"(# defaults
horizon.t = 400
seed = 1, 2

[iid]
switch.n = 4
load.kind = uniform-iid
load.lambda = 0.3, 0.6
policy.kind = MSL, LLF-SS, MSL-RS

[cross]
switch.n = 4
load.kind = cross-heavy
load.lambda1 = 0.5
load.lambda2 = 0.05
policy.kind = MSL-pSEL
policy.period = 8
policy.ell = 0, 1
)";

TEST(ParseExperiment, SectionsDefaultsAndSweeps) {
  const auto spec = parse_experiment(kSmallSpec);
  ASSERT_EQ(spec.experiments.size(), 2u);
  const auto& iid = spec.experiments[0];
  EXPECT_EQ(iid.name, "iid");
  EXPECT_EQ(iid.n, 4);
  EXPECT_EQ(iid.horizon, 400);
  EXPECT_EQ(iid.sweep, (std::vector<double>{0.3, 0.6}));
  EXPECT_EQ(iid.policies.size(), 3u);
  EXPECT_EQ(iid.seeds, (std::vector<std::uint64_t>{1, 2}));
  const auto& cross = spec.experiments[1];
  EXPECT_EQ(cross.policies.size(), 2u);
  EXPECT_EQ(cross.policies[1].lead_cap, 1);
  EXPECT_EQ(cross.policies[0].period, 8);
  EXPECT_EQ(expand(spec).size(), 2u * 3u * 2u + 2u * 2u);
}

TEST(ParseExperiment, EmptyFileHasNoExperiments) {
  EXPECT_TRUE(parse_experiment("").experiments.empty());
  EXPECT_TRUE(parse_experiment("# nothing\n\n").experiments.empty());
}

TEST(ParseExperiment, SectionlessFileIsOneEntry) {
  const auto spec = parse_experiment("switch.n = 2\nhorizon.t = 10\nload.lambda = 0.5\npolicy.kind = MSL\nseed = 3\n");
  ASSERT_EQ(spec.experiments.size(), 1u);
  EXPECT_EQ(spec.experiments[0].name, "default");
}

void expect_parse_error(const std::string& text, int line) {
  try {
    parse_experiment(text);
    FAIL() << "no error for:\n" << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_GE(e.column(), 1);
    EXPECT_EQ(std::string(e.what()).rfind(std::to_string(line) + ":", 0), 0u) << e.what();
  }
}

TEST(ParseExperiment, ErrorsCarryLineAndColumn) {
  expect_parse_error("[a]\nswitch.n = 4\nbogus.key = 1\n", 3);
  expect_parse_error("[a]\nswitch.n = four\n", 2);
  expect_parse_error("[a]\nswitch.n 4\n", 2);
  expect_parse_error("[a]\nseed = 1\nseed = 2\n", 3);
  expect_parse_error("[a\n", 1);
  expect_parse_error("[a]\npolicy.kind = EDF\nload.lambda = 0.5\nseed = 1\n", 2);
  expect_parse_error("[a]\nload.kind = parallel-heavy\nload.lambda1 = 0.3\n", 1);  // no lambda2
}

TEST(CmdRun, WritesCsvAndJson) {
  TempDir dir;
  const auto spec = dir.write("spec.txt", kSmallSpec);
  std::string out, err;
  ASSERT_EQ(call({"run", "--spec", spec.string(), "--out", (dir.path() / "o").string()}, &out, &err), kExitOk) << err;
  const auto csv = slurp(dir.path() / "o" / "runs.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, kCsvHeader);
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 16u);
  const auto json = nlohmann::json::parse(slurp(dir.path() / "o" / "summary.json"));
  EXPECT_TRUE(json.is_object());
}

TEST(CmdRun, EmptySpecGivesHeaderOnlyCsv) {
  TempDir dir;
  const auto spec = dir.write("empty.txt", "");
  ASSERT_EQ(call({"run", "--spec", spec.string(), "--out", dir.path().string()}), kExitOk);
  EXPECT_EQ(slurp(dir.path() / "runs.csv"), std::string(kCsvHeader) + "\n");
}

TEST(CmdRun, ParallelismDoesNotChangeOutput) {
  TempDir dir;
  const auto spec = dir.write("spec.txt", kSmallSpec);
  ASSERT_EQ(call({"run", "--spec", spec.string(), "--out", (dir.path() / "p1").string()}), kExitOk);
  ASSERT_EQ(call({"run", "--spec", spec.string(), "--out", (dir.path() / "p3").string(), "--parallel", "3"}), kExitOk);
  EXPECT_EQ(slurp(dir.path() / "p1" / "runs.csv"), slurp(dir.path() / "p3" / "runs.csv"));
  EXPECT_EQ(slurp(dir.path() / "p1" / "summary.json"), slurp(dir.path() / "p3" / "summary.json"));
}

TEST(CmdRun, ParseErrorExitsTwo) {
  TempDir dir;
  const auto spec = dir.write("bad.txt", "[a]\nswitch.n = 4\nload.lambda = x\n");
  std::string err;
  EXPECT_EQ(call({"run", "--spec", spec.string(), "--out", dir.path().string()}, nullptr, &err), kExitParse);
  EXPECT_NE(err.find(":3:"), std::string::npos) << err;
  EXPECT_EQ(call({"run", "--spec", (dir.path() / "missing.txt").string()}), kExitParse);
}

TEST(CmdRun, InadmissibleRandomSubsetExitsThree) {
  TempDir dir;
  const auto spec = dir.write("rs.txt",
                              "[rs]\nswitch.n = 2\nhorizon.t = 10\nload.kind = custom\n"
                              "load.matrix = 0.9 0.3 0.1 0.1\nload.scale = 1\npolicy.kind = MSL-RS\nseed = 1\n");
  std::string err;
  EXPECT_EQ(call({"run", "--spec", spec.string(), "--out", dir.path().string()}, nullptr, &err), kExitDomain);
  EXPECT_FALSE(err.empty());
}

TEST(CmdRun, OutputDirectoryFromEnvironment) {
  TempDir dir;
  const auto spec = dir.write("empty.txt", "");
  const auto target = dir.path() / "env_out";
  ::setenv(kOutDirEnv, target.c_str(), 1);
  const int code = call({"run", "--spec", spec.string()});
  ::unsetenv(kOutDirEnv);
  ASSERT_EQ(code, kExitOk);
  EXPECT_TRUE(fs::exists(target / "runs.csv"));
}

TEST(CommandLine, UsageErrorsExitTwo) {
  EXPECT_EQ(call({}), kExitParse);
  EXPECT_EQ(call({"frobnicate"}), kExitParse);
  EXPECT_EQ(call({"run"}), kExitParse);
  EXPECT_EQ(call({"verify", "--level", "medium"}), kExitParse);
  EXPECT_EQ(call({"dp-regions", "--fix", "nonsense"}), kExitParse);
  EXPECT_EQ(call({"--help"}), kExitOk);
}

TEST(CmdVerify, FastLevelPassesWithReport) {
  std::ostringstream report, err;
  ASSERT_EQ(cmd_verify(VerifyLevel::Fast, {}, report, err), kExitOk) << report.str();
  const auto j = nlohmann::json::parse(report.str());
  EXPECT_TRUE(j["passed"].get<bool>());
  std::set<std::string> names;
  for (const auto& p : j["properties"]) names.insert(p["name"].get<std::string>());
  for (const char* want : {"myopic-optimality-never-idle", "gamma-monotonicity", "subset-algebra",
                           "matching-oracle", "bv-reconstruction", "msl-exact-partial-optimality"}) {
    EXPECT_TRUE(names.count(want)) << want;
  }
}

TEST(CmdVerify, FaultyMatcherIsCaught) {
  VerifyHooks hooks;
  hooks.matcher = [](const WeightMatrix& w) { return Configuration::identity(w.n()); };
  std::ostringstream report, err;
  EXPECT_NE(cmd_verify(VerifyLevel::Fast, hooks, report, err), kExitOk);
  const auto j = nlohmann::json::parse(report.str());
  bool found = false;
  for (const auto& p : j["properties"]) {
    if (p["name"] == "matching-oracle") {
      found = true;
      EXPECT_FALSE(p["passed"].get<bool>());
      EXPECT_NE(p["counterexample"].get<std::string>().find("matrix"), std::string::npos);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CmdDpRegions, SingleQueueGivesTwoBands) {
  std::string out;
  ASSERT_EQ(call({"dp-regions", "--n", "1", "--horizon", "20", "--slot", "15", "--p", "0.5"}, &out), kExitOk);
  std::istringstream lines(out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "n1,action");
  std::vector<int> actions;
  for (std::string l; std::getline(lines, l);) actions.push_back(l.back() - '0');
  ASSERT_EQ(actions.size(), 15u);
  // serve (1) for small counts, idle (0) above the threshold
  const auto first_idle = std::find(actions.begin(), actions.end(), 0);
  EXPECT_NE(first_idle, actions.begin());
  EXPECT_TRUE(std::all_of(first_idle, actions.end(), [](int a) { return a == 0; }));
}

TEST(CmdDpRegions, DefaultSliceAndBudget) {
  RegionParams rp;
  std::ostringstream csv, err;
  ASSERT_EQ(cmd_dp_regions(rp, csv, err), kExitOk) << err.str();
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "n1,n2,action");
  rp.state_budget = 50;
  std::ostringstream csv2, err2;
  EXPECT_EQ(cmd_dp_regions(rp, csv2, err2), kExitDomain);
  EXPECT_EQ(call({"dp-regions", "--budget", "50"}), kExitDomain);
}

TEST(CmdDpRegions, ByteStableAcrossRuns) {
  std::string a, b;
  ASSERT_EQ(call({"dp-regions", "--p", "0.3"}, &a), kExitOk);
  ASSERT_EQ(call({"dp-regions", "--p", "0.3"}, &b), kExitOk);
  EXPECT_EQ(a, b);
}

}  // namespace
