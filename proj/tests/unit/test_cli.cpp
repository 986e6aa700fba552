// End-to-end checks of the randsentry executable.
#include "test_util.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

namespace {

struct Run
{
    int exit_code = -1;
    std::string out;
    std::string err;
};

Run run_cli(const std::string& args)
{
    testutil::TempDir tmp;
    const auto err_path = tmp.path() / "stderr.txt";
    const std::string cmd = std::string("'") + RANDSENTRY_CLI + "' " + args + " 2>'" + err_path.string() + "'";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = testutil::read_file(err_path);
    return r;
}

std::string quoted(const std::filesystem::path& p)
{
    return "'" + p.string() + "'";
}

} // namespace

TEST(Cli, AnalyzeFig1Text)
{
    const auto r = run_cli("analyze " + quoted(testutil::fixture("ground_truth/v05_keccak_cast.sol")));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("HIGH_RISK"), std::string::npos);
    EXPECT_NE(r.out.find("G2"), std::string::npos);
    EXPECT_NE(r.out.find("G3"), std::string::npos);
}

TEST(Cli, AnalyzeJsonIsOneDocument)
{
    const auto r =
        run_cli("analyze --format json " + quoted(testutil::fixture("verdict/b_modifier_on_vulnerable_function.sol")));
    EXPECT_EQ(r.exit_code, 0);
    const auto j = nlohmann::json::parse(r.out); // throws on trailing garbage
    EXPECT_EQ(j["final_risk_level"], "LOW_RISK");
    EXPECT_TRUE(r.err.empty());
}

TEST(Cli, AnalyzeFalsePositiveExitsOne)
{
    const auto r = run_cli("analyze " + quoted(testutil::fixture("verdict/a_modifier_on_wrong_function.sol")));
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, CorpusEmptyDirectory)
{
    testutil::TempDir in;
    testutil::TempDir out;
    const auto r = run_cli("corpus " + quoted(in.path()) + " --out " + quoted(out.path() / "o"));
    EXPECT_EQ(r.exit_code, 0);
    const auto j = nlohmann::json::parse(testutil::read_file(out.path() / "o" / "summary.json"));
    EXPECT_EQ(j["files"], 0);
}

TEST(Cli, CorpusJsonAndExitCode)
{
    testutil::TempDir out;
    const auto r = run_cli("corpus " + quoted(testutil::fixture("mini")) + " --out " + quoted(out.path())
                           + " --jobs 2 --format json");
    EXPECT_EQ(r.exit_code, 1);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["risk_levels"]["HIGH_RISK"], 2);
}

TEST(Cli, EvalPrintsMetricsLine)
{
    testutil::TempDir out;
    ASSERT_EQ(run_cli("corpus " + quoted(testutil::fixture("ground_truth")) + " --out " + quoted(out.path()))
                  .exit_code,
              1);
    const auto r = run_cli("eval --reports " + quoted(out.path()) + " --ground-truth "
                           + quoted(testutil::fixture("ground_truth/ground_truth.csv")));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("tp=22 tn=10 fp=0 fn=0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("acc=1.000 prec=1.000 rec=1.000 f1=1.000"), std::string::npos) << r.out;
}

TEST(Cli, EvalMissingReportFails)
{
    testutil::TempDir out;
    (void)run_cli("corpus " + quoted(testutil::fixture("mini")) + " --out " + quoted(out.path()));
    const auto r = run_cli("eval --reports " + quoted(out.path()) + " --ground-truth "
                           + quoted(testutil::fixture("ground_truth/ground_truth.csv")));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, PatternsListCounts)
{
    const auto r = run_cli("patterns list");
    EXPECT_EQ(r.exit_code, 0);
    for (const char* line : {"G1  10", "G2  11", "G3  15", "G4   1", "G5   4", "G6  10", "G7   2", "G8   3",
                             "G9   2", "total 58"}) {
        EXPECT_NE(r.out.find(line), std::string::npos) << line;
    }
    const auto j = nlohmann::json::parse(run_cli("patterns list --format json").out);
    EXPECT_EQ(j.size(), 58U);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run_cli("").exit_code, 2);
    EXPECT_EQ(run_cli("analyze").exit_code, 2);
    EXPECT_EQ(run_cli("analyze /nonexistent.sol").exit_code, 2);
    EXPECT_EQ(run_cli("corpus " + quoted(testutil::fixture("mini")) + " --out /tmp/x --jobs 0").exit_code, 2);
    const auto bad = run_cli("analyze --format yaml " + quoted(testutil::fixture("mini/high_plain.sol")));
    EXPECT_EQ(bad.exit_code, 2);
    EXPECT_TRUE(bad.out.empty());
    EXPECT_FALSE(bad.err.empty());
}
