/**
 * @file report.hpp
 * @brief Per-file analysis across all five phases and its JSON form.
 */
#pragma once

#include "randsentry/context.hpp"
#include "randsentry/pipeline.hpp"
#include "randsentry/validator.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

enum class FinalLabel { NotCandidate, ParseError, NoMatch, Excluded, Safe, NeedsManualReview, Vulnerable };

[[nodiscard]] std::string_view to_string(FinalLabel label) noexcept;
[[nodiscard]] std::optional<FinalLabel> parse_final_label(std::string_view text) noexcept;

struct ContextResult
{
    ContextCategory category;
    FinalDisposition disposition;
};

/// Outcome for one contract (or for code outside every contract).
struct ContractResult
{
    /// Empty for the file-level scope.
    std::string name;
    int phase_reached = 2;
    Labeling::Kind labeling = Labeling::Kind::NoMatch;
    std::optional<RiskAssessment> risk;
    std::optional<ValidationVerdict> verdict;
    std::optional<ContextResult> context;
    FinalLabel final_label = FinalLabel::NoMatch;
    /// Set for Safe and Vulnerable.
    std::optional<RiskLevel> final_level;
    std::string note;
};

struct AnalysisReport
{
    std::string file_id;
    int phase_reached = 1;
    std::optional<Labeling::Kind> labeling;
    std::optional<RiskAssessment> risk;
    std::optional<ValidationVerdict> verdict;
    std::optional<ContextResult> context;
    FinalLabel final_label = FinalLabel::NotCandidate;
    std::optional<RiskLevel> final_level;
    std::vector<PatternHit> hits;
    std::vector<ContractResult> contracts;
    /// Wall-clock milliseconds per phase; absent for phases not run.
    std::array<std::optional<double>, 5> timings_ms{};
    std::optional<std::string> error;
    std::string note;

    /// HIGH_RISK final label or a FALSE_POSITIVE verdict anywhere in the file.
    [[nodiscard]] bool has_finding() const noexcept;
    /// Binary prediction used by evaluation.
    [[nodiscard]] bool predicted_vulnerable() const noexcept;
};

/**
 * Run all phases over one file. Multi-contract files are assessed per
 * contract and the worst contract result becomes the file result.
 * Never throws for malformed sources; parse failures become ParseError.
 */
[[nodiscard]] AnalysisReport analyze_source(std::string source_text, std::string file_id);

[[nodiscard]] nlohmann::json to_json(const AnalysisReport& report, bool include_timings = true);
[[nodiscard]] nlohmann::json to_json(const PatternHit& hit);

/// Reads back the fields needed for evaluation and summaries.
[[nodiscard]] AnalysisReport report_from_json(const nlohmann::json& j);

/// Human-readable report for `analyze --format text`.
[[nodiscard]] std::string to_text(const AnalysisReport& report);

} // namespace randsentry
