/**
 * @file validator.hpp
 * @brief Function-level mitigation validation.
 *
 * Checks that the mitigation credited at contract level is applied to every
 * function that contains a pattern hit: directly for public/external
 * functions, and on every public caller for internal/private ones.
 */
#pragma once

#include "randsentry/mitigation.hpp"
#include "randsentry/patterns.hpp"
#include "randsentry/source_model.hpp"
#include "randsentry/source_text.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

enum class Verdict { Correct, FalsePositive, NoPatternInFunctions };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

/// How an offender escaped protection.
enum class OffenseRoute { Direct, CallChain };

[[nodiscard]] std::string_view to_string(OffenseRoute r) noexcept;

struct Offender
{
    std::string function;
    OffenseRoute route = OffenseRoute::Direct;
    std::string reason;
    /// Call-chain offenders: the public entry points lacking the mitigation.
    std::vector<std::string> unguarded_callers;
};

struct ValidationVerdict
{
    Verdict verdict = Verdict::NoPatternInFunctions;
    std::vector<Offender> offenders;
    MitigationKind checked_mitigation = MitigationKind::AccessControl;
    /// Vulnerable internal functions with no public caller (treated as protected).
    std::vector<std::string> unreachable;
    /// Vulnerable constructors; they run once, from the deployer.
    std::vector<std::string> deployment_only;
    /// Vulnerable functions found, in declaration order.
    std::vector<std::string> vulnerable_functions;
};

/**
 * `hits` must belong to `unit`; hits whose enclosing function is absent are
 * ignored for the function set but still decide NO_PATTERN_IN_FUNCTIONS.
 * `expected` must be AccessControl, TxOriginCheck or FutureBlock.
 */
[[nodiscard]] ValidationVerdict validate(const ContractUnit& unit, const SourceText& source,
                                         std::span<const PatternHit> hits, MitigationKind expected);

} // namespace randsentry
