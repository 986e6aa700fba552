#pragma once

#include "randsentry/source_model.hpp"
#include "randsentry/source_text.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

enum class ContextKind { Mining, Lottery, Unknown };

[[nodiscard]] std::string_view to_string(ContextKind k) noexcept;

struct ContextCategory
{
    ContextKind kind = ContextKind::Unknown;
    std::size_t mining_count = 0;
    std::size_t lottery_count = 0;
};

struct FinalDisposition
{
    enum class Kind { Excluded, ConfirmedHighRisk, NeedsManualReview };

    Kind kind = Kind::NeedsManualReview;
    /// Nonempty when kind == Excluded.
    std::string reason;
};

[[nodiscard]] std::string_view to_string(FinalDisposition::Kind k) noexcept;

/// Lower-cased words of an identifier, split at underscores, digits and case changes.
[[nodiscard]] std::vector<std::string> identifier_words(std::string_view identifier);

/**
 * Tally mining keywords (mint, difficulty, nonce, mining, reward) against
 * lottery keywords (lottery, jackpot, prize, bet, gamble) over identifier
 * words inside the model's contracts. Strict majority decides; ties and
 * zero counts are Unknown.
 */
[[nodiscard]] ContextCategory classify_context(const SourceText& source, const ContractModel& model);

[[nodiscard]] FinalDisposition refine(const ContextCategory& category);

} // namespace randsentry
