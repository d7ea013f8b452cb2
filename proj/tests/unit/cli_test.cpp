#include "tissue/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace tissue;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args, bool replay_client = false) {
    args.insert(args.begin(), replay_client ? "tcreplay" : "tissue");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = replay_client ? run_tcreplay(int(argv.size()), argv.data(), out, err)
                                   : run_cli(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("tissue_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string at(const std::string& name) const { return (dir / name).string(); }

    // gen-data, two runs, policies, stats, evaluation and plot series
    void pipeline(const fs::path& root) {
        fs::create_directories(root);
        const auto p = [&](const std::string& n) { return (root / n).string(); };
        ASSERT_EQ(cli({"gen-data", "--label", "normal", "--seed", "1", "--events", "300", "--out", p("normal.log")}).code, 0);
        ASSERT_EQ(cli({"gen-data", "--label", "success", "--seed", "2", "--events", "300", "--out", p("success.log")}).code, 0);
        auto r = cli({"run-twocell", "--data", p("normal.log"), "--out-dir", p("runs"), "--repeats", "2", "--tail-s",
                      "2", "--record-locks"});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NE(r.out.find("2 of 2 runs completed"), std::string::npos);
        ASSERT_EQ(cli({"merge-policy", "--in-dir", p("runs"), "--out", p("merged.policy")}).code, 0);
        ASSERT_EQ(cli({"naive-policy", "--data", p("normal.log"), "--out", p("naive.policy")}).code, 0);
        ASSERT_EQ(cli({"stats", "--runs-dir", p("runs"), "--data", p("normal.log"), "--out", p("stats.csv")}).code, 0);
        ASSERT_EQ(cli({"eval-policy", "--policy", p("naive.policy"), p("merged.policy"), "--labels",
                       p("success.log.labels"), "--out", p("eval.csv")})
                      .code,
                  0);
        ASSERT_EQ(cli({"plotdata", "--kind", "response-rate", "--data", p("normal.log"), "--responses",
                       p("runs/run_000.responses.csv"), "--out", p("rate.csv")})
                      .code,
                  0);
        ASSERT_EQ(cli({"plotdata", "--kind", "vr-locks", "--probes", p("runs/run_000.probes.csv"), "--responses",
                       p("runs/run_000.responses.csv"), "--out", p("locks.csv")})
                      .code,
                  0);
        ASSERT_EQ(cli({"plotdata", "--kind", "signal-compare", "--signal-dir", p("runs"), "--fixed-dir", p("runs"),
                       "--out", p("compare.csv")})
                      .code,
                  0);
    }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, exit_usage);
    EXPECT_EQ(cli({"frobnicate"}).code, exit_usage);
    EXPECT_EQ(cli({"gen-data", "--label", "evil", "--out", at("x.log")}).code, exit_usage);
    EXPECT_FALSE(fs::exists(at("x.log")));
    EXPECT_EQ(cli({"run-twocell", "--data", at("x.log")}).code, exit_usage);  // --out-dir missing
    EXPECT_EQ(cli({"run-twocell", "--data", at("x.log"), "--out-dir", at("o"), "--rate", "-2"}).code, exit_usage);
    EXPECT_EQ(cli({"plotdata", "--kind", "histogram", "--out", at("p.csv")}).code, exit_usage);
    EXPECT_EQ(cli({"--rate", "0", "--log", "x"}, true).code, exit_usage);
}

TEST_F(Cli, HelpIsSuccess) {
    const auto r = cli({"--help"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_NE(r.out.find("run-twocell"), std::string::npos);
    EXPECT_EQ(cli({"--help"}, true).code, exit_ok);
}

TEST_F(Cli, DataErrorsLeaveNothingBehind) {
    EXPECT_EQ(cli({"naive-policy", "--data", at("missing.log"), "--out", at("n.policy")}).code, exit_data);
    EXPECT_FALSE(fs::exists(at("n.policy")));
    // the replay log is written before the label file fails to open
    EXPECT_EQ(cli({"gen-data", "--label", "normal", "--out", at("d.log"), "--labels", at("no/such/dir.labels")}).code,
              exit_data);
    EXPECT_FALSE(fs::exists(at("d.log")));
    std::ofstream(at("bad.policy")) << "permit 3\nallow 4\n";
    const auto r = cli({"merge-policy", at("bad.policy"), "--out", at("m.policy")});
    EXPECT_EQ(r.code, exit_data);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(at("m.policy")));
    EXPECT_EQ(cli({"--log", at("missing.log")}, true).code, exit_data);
}

TEST_F(Cli, FailedRunsExitWithRuntimeError) {
    ASSERT_EQ(cli({"gen-data", "--label", "normal", "--events", "5", "--out", at("d.log")}).code, 0);
    const auto r = cli({"run-twocell", "--data", at("d.log"), "--out-dir", at("runs"), "--realtime", "--addr",
                        "not-an-address", "--lead-in-s", "0", "--tail-s", "0"});
    EXPECT_EQ(r.code, exit_runtime);
    EXPECT_NE(r.out.find("0 of 1 runs completed"), std::string::npos);
    EXPECT_NE(slurp(at("runs/summary.csv")).find("not-an-address"), std::string::npos);
}

TEST_F(Cli, ReplayWithoutServerIsRuntimeError) {
    std::ofstream(at("one.log")) << "0 A 6\n";
    EXPECT_EQ(cli({"--log", at("one.log"), "--addr", "127.0.0.1:1"}, true).code, exit_runtime);
}

TEST_F(Cli, PipelineOutputsAndDeterminism) {
    pipeline(dir / "a");
    pipeline(dir / "b");
    const auto a = tree(dir / "a");
    const auto b = tree(dir / "b");
    EXPECT_EQ(a, b);
    for (const char* f : {"runs/summary.csv", "runs/run_000.policy", "runs/run_001.probes.csv", "merged.policy",
                          "naive.policy", "stats.csv", "eval.csv", "rate.csv", "locks.csv", "compare.csv",
                          "success.log.labels"})
        EXPECT_TRUE(a.contains(f)) << f;
    EXPECT_EQ(a.at("stats.csv").substr(0, 24), "syscall,name,freq,mean,s");
    EXPECT_EQ(a.at("eval.csv").substr(0, 55), "dataset,policy,permit_pct,deny_pct,normal_pct,attack_pc");
    EXPECT_NE(a.at("eval.csv").find("success,naive,"), std::string::npos);
    EXPECT_EQ(a.at("merged.policy").rfind("# provenance merged\n", 0), 0u);
}
