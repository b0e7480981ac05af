#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "crewplan/cli.hpp"
#include "test_support.hpp"

using namespace crewplan;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "crewplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("crewplan-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(cli::kOutputRootEnv);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  std::string golden() const {
    const auto p = path("golden.txt");
    save_instance(testing_support::golden_instance(), p);
    return p;
  }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateSolveEvaluatePipeline) {
  auto g = run({"generate", "--seed", "1", "--tasks", "10", "--scenarios", "2", "--holdout", "2", "--out", path("gen")});
  ASSERT_EQ(g.code, 0) << g.err;
  for (const char* f : {"instance.txt", "holdout.txt", "manifest.json"}) EXPECT_TRUE(fs::exists(path("gen/") + f)) << f;
  auto s = run({"solve", "benders", path("gen/instance.txt"), "--threads", "1", "--out", path("solve")});
  ASSERT_EQ(s.code, 0) << s.err;
  for (const char* f : {"report.json", "solution.json", "iterations.jsonl", "summary.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(path("solve/") + f)) << f;
  auto e = run({"evaluate", path("gen/instance.txt"), "--report", path("solve/report.json"), "--days",
                path("gen/holdout.txt"), "--threads", "1", "--out", path("eval")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(fs::exists(path("eval/evaluation.csv")));
  EXPECT_TRUE(fs::exists(path("eval/manifest.json")));
  std::istringstream rows(e.out);
  int lines = 0;
  for (std::string l; std::getline(rows, l);) ++lines;
  EXPECT_EQ(lines, 1 + 2 + 1);  // header, two days, average

  const auto manifest = nlohmann::json::parse(cli::read_file(path("gen/manifest.json")));
  EXPECT_EQ(manifest["seed"], 1);
  EXPECT_EQ(manifest["versions"]["crewplan"], cli::kVersion);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST_F(CliTest, ExtensiveAgreesWithBendersOnGolden) {
  const auto inst = golden();
  auto b = run({"solve", "benders", inst, "--threads", "1", "--out", path("b")});
  auto x = run({"solve", "extensive", inst, "--out", path("x")});
  ASSERT_EQ(b.code, 0) << b.err;
  ASSERT_EQ(x.code, 0) << x.err;
  const auto rb = read_report(path("b/report.json"));
  const auto rx = read_report(path("x/report.json"));
  EXPECT_EQ(rb.gap, 0.0);
  EXPECT_NEAR(rb.upper_bound, rx.upper_bound, 1e-6 * rx.upper_bound);
}

TEST_F(CliTest, BenchmarkRejectsRestrictedGamma) {
  auto r = run({"solve", "benchmark", golden(), "--gamma", "1", "--out", path("b")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("\"error\":\"input\""), std::string::npos);
}

TEST_F(CliTest, InfeasibleRosteringIsASolveError) {
  auto inst = testing_support::golden_instance();
  inst.rostering_constraints = {{"need-early", {-1, 0, 0}, -2}, {"no-early", {1, 0, 0}, 1}};
  save_instance(inst, path("bad.txt"));
  auto r = run({"solve", "benders", path("bad.txt"), "--out", path("o")});
  EXPECT_EQ(r.code, cli::kSolveError);
  EXPECT_NE(r.err.find("need-early"), std::string::npos);
}

TEST_F(CliTest, InputErrors) {
  EXPECT_EQ(run({"solve", "benders", path("missing.txt")}).code, cli::kInputError);
  EXPECT_EQ(run({"solve", "simplex", golden()}).code, cli::kInputError);
  EXPECT_EQ(run({"solve", "benders", golden(), "--gamma", "zero"}).code, cli::kInputError);
  EXPECT_EQ(run({"solve", "benders", golden(), "--excess-cost", "5"}).code, cli::kInputError);  // below template cost
  EXPECT_EQ(run({"generate", "--profile", "funday", "--out", path("g")}).code, cli::kInputError);
  EXPECT_EQ(run({}).code, cli::kInputError);
  auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("solve"), std::string::npos);
}

TEST_F(CliTest, ConfigFileYieldsToFlags) {
  cli::write_file(path("cfg.txt"), "# overrides\nparam gamma 1\nparam no-pareto 1\n");
  const auto inst = golden();
  auto a = run({"solve", "benders", inst, "--config", path("cfg.txt"), "--threads", "1", "--out", path("a")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(read_report(path("a/report.json")).template_types(), 1);
  auto b = run({"solve", "benders", inst, "--config", path("cfg.txt"), "--gamma", "2", "--threads", "1", "--out",
                path("b")});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto m = nlohmann::json::parse(cli::read_file(path("b/manifest.json")));
  EXPECT_EQ(m["settings"]["gamma"], "2");
  EXPECT_EQ(m["settings"]["no-pareto"], "1");
  EXPECT_LE(read_report(path("b/report.json")).template_types(), 2);

  cli::write_file(path("bad.txt"), "param colour blue\n");
  EXPECT_EQ(run({"solve", "benders", inst, "--config", path("bad.txt"), "--out", path("c")}).code, cli::kInputError);
  cli::write_file(path("bad2.txt"), "gamma 3\n");
  EXPECT_EQ(run({"solve", "benders", inst, "--config", path("bad2.txt"), "--out", path("c")}).code, cli::kInputError);
}

TEST_F(CliTest, RepeatedRunsWriteIdenticalArtifacts) {
  ASSERT_EQ(run({"generate", "--seed", "7", "--tasks", "10", "--scenarios", "2", "--out", path("g1")}).code, 0);
  ASSERT_EQ(run({"generate", "--seed", "7", "--tasks", "10", "--scenarios", "2", "--out", path("g2")}).code, 0);
  EXPECT_EQ(cli::read_file(path("g1/instance.txt")), cli::read_file(path("g2/instance.txt")));
  for (const char* out : {"s1", "s2"})
    ASSERT_EQ(run({"solve", "benders", path("g1/instance.txt"), "--threads", "2", "--out", path(out)}).code, 0);
  for (const char* f : {"solution.json", "summary.csv", "manifest.json"})
    EXPECT_EQ(cli::read_file(path("s1/") + f), cli::read_file(path("s2/") + f)) << f;
}

TEST_F(CliTest, OutputRootFromEnvironment) {
  setenv(cli::kOutputRootEnv, dir_.c_str(), 1);
  auto r = run({"generate", "--seed", "2", "--tasks", "8", "--scenarios", "1", "--out", "rooted"});
  unsetenv(cli::kOutputRootEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "rooted" / "instance.txt"));
}

TEST_F(CliTest, ReportSubcommandSummarises) {
  const auto inst = golden();
  ASSERT_EQ(run({"solve", "extensive", inst, "--out", path("x")}).code, 0);
  auto r = run({"report", path("x/report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("method,instance", 0), 0u);
  EXPECT_NE(r.out.find("extensive,golden-small,optimal"), std::string::npos);
  auto p = run({"report", path("x/report.json"), "--plot", inst});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(run({"report", path("x/report.json"), "--format", "xml"}).code, cli::kInputError);
}
