#include "randsentry/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace randsentry {

namespace {

bool in_scope(const PatternHit& hit, const ContractModel& model) noexcept
{
    if (model.contracts.empty()) {
        return true;
    }
    return std::any_of(model.contracts.begin(), model.contracts.end(),
                       [&](const ContractUnit& unit) { return unit.span.contains(hit.span); });
}

} // namespace

std::string_view to_string(RiskLevel level) noexcept
{
    switch (level) {
    case RiskLevel::Safe:
        return "SAFE";
    case RiskLevel::LowRisk:
        return "LOW_RISK";
    case RiskLevel::MediumRisk:
        return "MEDIUM_RISK";
    case RiskLevel::HighRisk:
        return "HIGH_RISK";
    }
    return "HIGH_RISK";
}

std::optional<RiskLevel> parse_risk_level(std::string_view text) noexcept
{
    for (auto level : {RiskLevel::Safe, RiskLevel::LowRisk, RiskLevel::MediumRisk, RiskLevel::HighRisk}) {
        if (to_string(level) == text) {
            return level;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Labeling::Kind kind) noexcept
{
    switch (kind) {
    case Labeling::Kind::Safe:
        return "Safe";
    case Labeling::Kind::Vulnerable:
        return "Vulnerable";
    case Labeling::Kind::NoMatch:
        return "NoMatch";
    }
    return "NoMatch";
}

bool phase1_filter(std::string_view source_text)
{
    return block_attribute_present(source_text);
}

bool phase1_filter(const SourceText& source)
{
    return block_attribute_present(source);
}

Labeling phase2_label(const SourceText& source, const ContractModel& model)
{
    const auto hits = match_vulnerability_patterns(source, model);
    return phase2_label(source, model, hits);
}

Labeling phase2_label(const SourceText& source, const ContractModel& model, std::span<const PatternHit> file_hits)
{
    Labeling labeling;
    for (const auto& hit : file_hits) {
        if (in_scope(hit, model)) {
            labeling.hits.push_back(hit);
        }
    }
    if (auto safe = detect_safe_mechanism(source, model)) {
        labeling.kind = Labeling::Kind::Safe;
        labeling.safe_mechanism = safe;
    } else if (!labeling.hits.empty()) {
        labeling.kind = Labeling::Kind::Vulnerable;
    }
    return labeling;
}

RiskAssessment phase3_classify(const Labeling& labeling, const SourceText& source, const ContractModel& model)
{
    if (labeling.kind == Labeling::Kind::NoMatch) {
        throw std::invalid_argument("phase3_classify requires a Safe or Vulnerable labeling");
    }
    RiskAssessment out;
    out.hits = labeling.hits;
    if (labeling.kind == Labeling::Kind::Safe) {
        out.level = RiskLevel::Safe;
        out.mitigation = labeling.safe_mechanism;
    } else if (auto partial = detect_partial_mitigation(source, model)) {
        out.mitigation = partial;
        out.level = *partial == MitigationKind::AccessControl ? RiskLevel::LowRisk : RiskLevel::MediumRisk;
    } else {
        out.level = RiskLevel::HighRisk;
    }
    out.attackers = attacker_matrix(out.level);
    return out;
}

} // namespace randsentry
