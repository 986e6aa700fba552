/**
 * @file pipeline.hpp
 * @brief Keyword filter, vulnerability labeling and four-level risk
 *        classification.
 */
#pragma once

#include "randsentry/mitigation.hpp"
#include "randsentry/patterns.hpp"
#include "randsentry/source_model.hpp"
#include "randsentry/source_text.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace randsentry {

/// Ordered: SAFE < LOW_RISK < MEDIUM_RISK < HIGH_RISK.
enum class RiskLevel { Safe, LowRisk, MediumRisk, HighRisk };

[[nodiscard]] std::string_view to_string(RiskLevel level) noexcept;
[[nodiscard]] std::optional<RiskLevel> parse_risk_level(std::string_view text) noexcept;

/// Which attacker classes can exploit a contract at a given level.
struct AttackerMatrix
{
    bool external = false;
    bool miner = false;
    bool owner = false;

    friend constexpr bool operator==(const AttackerMatrix&, const AttackerMatrix&) = default;
};

[[nodiscard]] constexpr AttackerMatrix attacker_matrix(RiskLevel level) noexcept
{
    switch (level) {
    case RiskLevel::Safe:
        return {false, false, false};
    case RiskLevel::LowRisk:
        return {false, false, true};
    case RiskLevel::MediumRisk:
        return {false, true, true};
    case RiskLevel::HighRisk:
        return {true, true, true};
    }
    return {true, true, true};
}

struct RiskAssessment
{
    RiskLevel level = RiskLevel::HighRisk;
    std::optional<MitigationKind> mitigation;
    std::vector<PatternHit> hits;
    AttackerMatrix attackers = attacker_matrix(RiskLevel::HighRisk);
};

struct Labeling
{
    enum class Kind { Safe, Vulnerable, NoMatch };

    Kind kind = Kind::NoMatch;
    /// Set when kind == Safe.
    std::optional<MitigationKind> safe_mechanism;
    /// Hits inside the analyzed scope (also kept for Safe labelings).
    std::vector<PatternHit> hits;
};

[[nodiscard]] std::string_view to_string(Labeling::Kind kind) noexcept;

[[nodiscard]] bool phase1_filter(std::string_view source_text);
[[nodiscard]] bool phase1_filter(const SourceText& source);

/**
 * Safe if a safe mechanism is detected (regardless of hits), Vulnerable if
 * any pattern matches inside the scope of `model`, NoMatch otherwise.
 *
 * The scope is the union of the model's contract spans, or the whole file
 * when the model has no contracts.
 */
[[nodiscard]] Labeling phase2_label(const SourceText& source, const ContractModel& model);

/// Same, reusing hits already computed for the whole file.
[[nodiscard]] Labeling phase2_label(const SourceText& source, const ContractModel& model,
                                    std::span<const PatternHit> file_hits);

/// Requires labeling.kind != NoMatch.
[[nodiscard]] RiskAssessment phase3_classify(const Labeling& labeling, const SourceText& source,
                                             const ContractModel& model);

} // namespace randsentry
