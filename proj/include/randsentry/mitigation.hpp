#pragma once

#include "randsentry/source_model.hpp"
#include "randsentry/source_text.hpp"

#include <optional>
#include <string_view>

namespace randsentry {

/// VRF and CommitReveal are safe mechanisms; the rest only narrow the attacker set.
enum class MitigationKind { AccessControl, TxOriginCheck, FutureBlock, VRF, CommitReveal };

[[nodiscard]] std::string_view to_string(MitigationKind k) noexcept;
[[nodiscard]] std::optional<MitigationKind> parse_mitigation(std::string_view text) noexcept;

[[nodiscard]] constexpr bool is_safe_mechanism(MitigationKind k) noexcept
{
    return k == MitigationKind::VRF || k == MitigationKind::CommitReveal;
}

/**
 * VRF when a VRFConsumerBase / requestRandomWords / fulfillRandomness marker
 * occurs in the model's contracts; CommitReveal when the model has both a
 * function named like "commit" and one named like "reveal". VRF wins.
 *
 * Detection is restricted to the spans of `model.contracts`; a model with no
 * contracts covers the whole text.
 */
[[nodiscard]] std::optional<MitigationKind> detect_safe_mechanism(const SourceText& source,
                                                                  const ContractModel& model);

/**
 * Contract-level partial mitigation: AccessControl if any access-control
 * token appears, else TxOriginCheck, else FutureBlock.
 */
[[nodiscard]] std::optional<MitigationKind> detect_partial_mitigation(const SourceText& source,
                                                                      const ContractModel& model);

/**
 * Whether `kind` is applied at `fn` itself: as a declared modifier for
 * access control, or as a guard statement in `body_text` (the neutralized
 * slice of fn.body_span).
 */
[[nodiscard]] bool has_mitigation(const FunctionRecord& fn, std::string_view body_text, MitigationKind kind);

} // namespace randsentry
