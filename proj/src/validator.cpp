#include "randsentry/validator.hpp"

#include <stdexcept>
#include <utility>

namespace randsentry {

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Correct:
        return "CORRECT";
    case Verdict::FalsePositive:
        return "FALSE_POSITIVE";
    case Verdict::NoPatternInFunctions:
        return "NO_PATTERN_IN_FUNCTIONS";
    }
    return "CORRECT";
}

std::string_view to_string(OffenseRoute r) noexcept
{
    return r == OffenseRoute::Direct ? "direct" : "via call-chain";
}

ValidationVerdict validate(const ContractUnit& unit, const SourceText& source, std::span<const PatternHit> hits,
                           MitigationKind expected)
{
    if (is_safe_mechanism(expected)) {
        throw std::invalid_argument("validate expects a partial mitigation kind");
    }

    ValidationVerdict out;
    out.checked_mitigation = expected;

    std::vector<const FunctionRecord*> vulnerable;
    for (const auto& fn : unit.functions) {
        for (const auto& hit : hits) {
            if (fn.body_span.contains(hit.span)) {
                vulnerable.push_back(&fn);
                out.vulnerable_functions.push_back(fn.name);
                break;
            }
        }
    }
    if (vulnerable.empty()) {
        out.verdict = hits.empty() ? Verdict::Correct : Verdict::NoPatternInFunctions;
        return out;
    }

    auto guarded = [&](const FunctionRecord& fn) {
        return has_mitigation(fn, source.neutralized_slice(fn.body_span), expected);
    };

    for (const FunctionRecord* fn : vulnerable) {
        if (fn->is_constructor) {
            out.deployment_only.push_back(fn->name);
            continue;
        }
        if (fn->visibility == Visibility::Public || fn->visibility == Visibility::External) {
            if (!guarded(*fn)) {
                out.offenders.push_back(Offender{
                    fn->name, OffenseRoute::Direct,
                    std::string(to_string(fn->visibility)) + " function lacks " + std::string(to_string(expected)),
                    {}});
            }
            continue;
        }
        const auto callers = public_callers(*fn, unit);
        if (callers.empty()) {
            out.unreachable.push_back(fn->name);
            continue;
        }
        Offender offender{fn->name, OffenseRoute::CallChain, {}, {}};
        for (const FunctionRecord* caller : callers) {
            if (!guarded(*caller)) {
                offender.unguarded_callers.push_back(caller->name);
            }
        }
        if (!offender.unguarded_callers.empty()) {
            offender.reason = std::string(to_string(fn->visibility))
                            + " function reachable from unguarded public caller(s): ";
            for (std::size_t k = 0; k < offender.unguarded_callers.size(); ++k) {
                offender.reason += (k == 0 ? "" : ", ") + offender.unguarded_callers[k];
            }
            out.offenders.push_back(std::move(offender));
        }
    }
    out.verdict = out.offenders.empty() ? Verdict::Correct : Verdict::FalsePositive;
    return out;
}

} // namespace randsentry
