/**
 * @file corpus.hpp
 * @brief Directory runs, corpus summaries and ground-truth evaluation.
 */
#pragma once

#include "randsentry/report.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace randsentry {

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class MissingReport : public std::runtime_error
{
public:
    explicit MissingReport(std::string file_id);
    [[nodiscard]] const std::string& file_id() const noexcept { return file_id_; }

private:
    std::string file_id_;
};

struct CorpusConfig
{
    std::size_t jobs = 1;
    /// Empty: analyze only, write nothing.
    std::filesystem::path output_dir;
};

struct CorpusSummary
{
    /// Sorted by file_id.
    std::vector<AnalysisReport> reports;

    [[nodiscard]] bool has_finding() const noexcept;
};

/// `.sol` files under `dir` (recursive), as sorted '/'-separated relative ids.
[[nodiscard]] std::vector<std::string> discover_sources(const std::filesystem::path& dir);

/**
 * Analyze every `.sol` file under `directory`. When config.output_dir is set,
 * writes reports/<file_id>.json, summary.json and summary.csv there.
 * Output is independent of config.jobs and of discovery order.
 */
CorpusSummary run_corpus(const std::filesystem::path& directory, const CorpusConfig& config);

/// Deterministic corpus summary (no timings).
[[nodiscard]] nlohmann::json summary_json(std::span<const AnalysisReport> reports);
/// One row per report: file_id,final_label,risk_level,verdict,n_hits,groups,context.
[[nodiscard]] std::string summary_csv(std::span<const AnalysisReport> reports);

void write_outputs(const CorpusSummary& summary, const std::filesystem::path& output_dir);

/// Reads every report JSON under `dir` (or `dir`/reports when present).
[[nodiscard]] std::vector<AnalysisReport> load_reports(const std::filesystem::path& dir);

enum class GroundTruthLabel { Vulnerable, NotVulnerable };

/// CSV with header `file_id,label`, label in {vulnerable, safe}.
[[nodiscard]] std::map<std::string, GroundTruthLabel> load_ground_truth(const std::filesystem::path& csv);

struct EvalMetrics
{
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

/// Ratios from raw counts; undefined ratios stay empty.
[[nodiscard]] EvalMetrics compute_metrics(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

/// Throws MissingReport when a ground-truth file_id has no report.
[[nodiscard]] EvalMetrics evaluate(std::span<const AnalysisReport> reports,
                                   const std::map<std::string, GroundTruthLabel>& ground_truth);

[[nodiscard]] nlohmann::json to_json(const EvalMetrics& m);
/// "acc=1.000 prec=1.000 rec=1.000 f1=1.000"; undefined ratios print as n/a.
[[nodiscard]] std::string metrics_line(const EvalMetrics& m);

} // namespace randsentry
