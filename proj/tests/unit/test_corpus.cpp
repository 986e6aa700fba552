#include "test_util.hpp"

#include "randsentry/corpus.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace randsentry;
namespace fs = std::filesystem;

TEST(Metrics, PerfectScore)
{
    const auto m = compute_metrics(22, 10, 0, 0);
    EXPECT_DOUBLE_EQ(*m.accuracy, 1.0);
    EXPECT_DOUBLE_EQ(*m.precision, 1.0);
    EXPECT_DOUBLE_EQ(*m.recall, 1.0);
    EXPECT_DOUBLE_EQ(*m.f1, 1.0);
    EXPECT_EQ(metrics_line(m), "acc=1.000 prec=1.000 rec=1.000 f1=1.000");
}

TEST(Metrics, AllNegativeCorpus)
{
    const auto m = compute_metrics(0, 5, 0, 0);
    EXPECT_DOUBLE_EQ(*m.accuracy, 1.0);
    EXPECT_FALSE(m.precision.has_value());
    EXPECT_FALSE(m.recall.has_value());
    EXPECT_FALSE(m.f1.has_value());
    EXPECT_EQ(metrics_line(m), "acc=1.000 prec=n/a rec=n/a f1=n/a");
    EXPECT_TRUE(to_json(m)["precision"].is_null());
}

TEST(Metrics, MixedMatrix)
{
    const auto m = compute_metrics(3, 1, 1, 1);
    EXPECT_DOUBLE_EQ(*m.accuracy, 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(*m.precision, 0.75);
    EXPECT_DOUBLE_EQ(*m.recall, 0.75);
    EXPECT_DOUBLE_EQ(*m.f1, 0.75);
}

TEST(Metrics, EmptyMatrixHasNoAccuracy)
{
    EXPECT_FALSE(compute_metrics(0, 0, 0, 0).accuracy.has_value());
}

TEST(Metrics, IdentitiesOnRandomMatrices)
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> count(0, 40);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t tp = count(rng);
        const std::size_t tn = count(rng);
        const std::size_t fp = k % 7 == 0 ? 0 : count(rng);
        const std::size_t fn = k % 11 == 0 ? 0 : count(rng);
        const auto m = compute_metrics(tp, tn, fp, fn);
        const double total = static_cast<double>(tp + tn + fp + fn);
        if (total == 0) {
            EXPECT_FALSE(m.accuracy.has_value());
        } else {
            ASSERT_TRUE(m.accuracy.has_value());
            EXPECT_NEAR(*m.accuracy, static_cast<double>(tp + tn) / total, 1e-12);
        }
        EXPECT_EQ(m.precision.has_value(), tp + fp > 0);
        EXPECT_EQ(m.recall.has_value(), tp + fn > 0);
        if (m.precision) {
            EXPECT_NEAR(*m.precision, static_cast<double>(tp) / static_cast<double>(tp + fp), 1e-12);
        }
        if (m.recall) {
            EXPECT_NEAR(*m.recall, static_cast<double>(tp) / static_cast<double>(tp + fn), 1e-12);
        }
        const bool f1_defined = m.precision && m.recall && (*m.precision + *m.recall) > 0;
        EXPECT_EQ(m.f1.has_value(), f1_defined);
        if (f1_defined) {
            // F1 = 2tp / (2tp + fp + fn)
            EXPECT_NEAR(*m.f1, 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn), 1e-12);
            EXPECT_GE(*m.f1, 0.0);
            EXPECT_LE(*m.f1, 1.0);
        }
    }
}

TEST(Evaluate, MissingReportThrows)
{
    AnalysisReport r;
    r.file_id = "a.sol";
    std::vector<AnalysisReport> reports{r};
    std::map<std::string, GroundTruthLabel> truth{{"a.sol", GroundTruthLabel::NotVulnerable},
                                                  {"b.sol", GroundTruthLabel::Vulnerable}};
    try {
        (void)evaluate(reports, truth);
        FAIL();
    } catch (const MissingReport& e) {
        EXPECT_EQ(e.file_id(), "b.sol");
    }
}

TEST(Evaluate, GroundTruthFixtures)
{
    const auto summary = run_corpus(testutil::fixture("ground_truth"), CorpusConfig{2, {}});
    const auto truth = load_ground_truth(testutil::fixture("ground_truth/ground_truth.csv"));
    ASSERT_EQ(truth.size(), 32U);
    const auto m = evaluate(summary.reports, truth);
    EXPECT_EQ(m.tp, 22U);
    EXPECT_EQ(m.tn, 10U);
    EXPECT_EQ(m.fp, 0U);
    EXPECT_EQ(m.fn, 0U);
}

TEST(GroundTruth, RejectsBadRows)
{
    testutil::TempDir dir;
    testutil::write_file(dir.path() / "bad.csv", "file_id,label\na.sol,maybe\n");
    EXPECT_THROW((void)load_ground_truth(dir.path() / "bad.csv"), std::exception);
    testutil::write_file(dir.path() / "header.csv", "name,kind\na.sol,safe\n");
    EXPECT_THROW((void)load_ground_truth(dir.path() / "header.csv"), std::exception);
    EXPECT_THROW((void)load_ground_truth(dir.path() / "missing.csv"), IoError);
}

TEST(Corpus, MiniCorpusSummary)
{
    const auto summary = run_corpus(testutil::fixture("mini"), CorpusConfig{1, {}});
    const auto j = summary_json(summary.reports);
    EXPECT_EQ(j["files"], 4);
    EXPECT_EQ(j["risk_levels"]["SAFE"], 1);
    EXPECT_EQ(j["risk_levels"]["HIGH_RISK"], 2);
    EXPECT_EQ(j["risk_levels"]["LOW_RISK"], 1);
    EXPECT_EQ(j["risk_levels"]["MEDIUM_RISK"], 0);
    EXPECT_TRUE(summary.has_finding());
}

TEST(Corpus, EmptyDirectory)
{
    testutil::TempDir in;
    testutil::TempDir out;
    const auto summary = run_corpus(in.path(), CorpusConfig{1, out.path()});
    EXPECT_TRUE(summary.reports.empty());
    EXPECT_FALSE(summary.has_finding());
    const auto j = nlohmann::json::parse(testutil::read_file(out.path() / "summary.json"));
    EXPECT_EQ(j["files"], 0);
    for (const auto& [k, v] : j["final_labels"].items()) {
        EXPECT_EQ(v, 0) << k;
    }
    for (const auto& [k, v] : j["risk_levels"].items()) {
        EXPECT_EQ(v, 0) << k;
    }
}

TEST(Corpus, MissingDirectoryThrows)
{
    EXPECT_THROW((void)run_corpus("/nonexistent/randsentry", CorpusConfig{1, {}}), IoError);
}

TEST(Corpus, OneReportPerFileIncludingBrokenOnes)
{
    testutil::TempDir in;
    testutil::write_file(in.path() / "ok.sol", "contract A { function f() public { } }");
    testutil::write_file(in.path() / "sub/broken.sol", "contract B { function f() public { x = now % 2; ");
    testutil::write_file(in.path() / "notes.txt", "ignored");
    const auto summary = run_corpus(in.path(), CorpusConfig{2, {}});
    ASSERT_EQ(summary.reports.size(), 2U);
    EXPECT_EQ(summary.reports[0].file_id, "ok.sol");
    EXPECT_EQ(summary.reports[1].file_id, "sub/broken.sol");
    EXPECT_EQ(summary.reports[1].final_label, FinalLabel::ParseError);
}

TEST(Corpus, JobsDoNotChangeOutputs)
{
    testutil::TempDir one;
    testutil::TempDir eight;
    (void)run_corpus(testutil::fixture(""), CorpusConfig{1, one.path()});
    (void)run_corpus(testutil::fixture(""), CorpusConfig{8, eight.path()});
    for (const char* name : {"summary.json", "summary.csv"}) {
        const auto a = testutil::read_file(one.path() / name);
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, testutil::read_file(eight.path() / name)) << name;
    }
}

TEST(Corpus, DiscoveryOrderDoesNotMatter)
{
    // Same files written in opposite orders into two directories.
    const auto ids = discover_sources(testutil::fixture("ground_truth"));
    testutil::TempDir a;
    testutil::TempDir b;
    for (const auto& id : ids) {
        testutil::write_file(a.path() / id, testutil::read_file(testutil::fixture("ground_truth") / id));
    }
    for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
        testutil::write_file(b.path() / *it, testutil::read_file(testutil::fixture("ground_truth") / *it));
    }
    const auto sa = run_corpus(a.path(), CorpusConfig{3, {}});
    const auto sb = run_corpus(b.path(), CorpusConfig{3, {}});
    EXPECT_EQ(summary_json(sa.reports), summary_json(sb.reports));
    EXPECT_EQ(summary_csv(sa.reports), summary_csv(sb.reports));
}

TEST(Corpus, WrittenReportsLoadBack)
{
    testutil::TempDir out;
    const auto summary = run_corpus(testutil::fixture("mini"), CorpusConfig{2, out.path()});
    EXPECT_TRUE(fs::exists(out.path() / "reports" / "safe_vrf.sol.json"));
    const auto loaded = load_reports(out.path());
    ASSERT_EQ(loaded.size(), summary.reports.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        EXPECT_EQ(loaded[i].file_id, summary.reports[i].file_id);
        EXPECT_EQ(loaded[i].final_label, summary.reports[i].final_label);
        EXPECT_EQ(loaded[i].final_level, summary.reports[i].final_level);
    }
    EXPECT_EQ(summary_csv(loaded), summary_csv(summary.reports));
}

TEST(Corpus, CsvHeader)
{
    const auto csv = summary_csv({});
    EXPECT_EQ(csv, "file_id,final_label,risk_level,verdict,n_hits,groups,context\n");
}
