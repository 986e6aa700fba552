#include "randsentry/context.hpp"

#include <array>
#include <cctype>

namespace randsentry {

namespace {

constexpr std::array<std::string_view, 5> kMiningWords = {"mint", "difficulty", "nonce", "mining", "reward"};
constexpr std::array<std::string_view, 5> kLotteryWords = {"lottery", "jackpot", "prize", "bet", "gamble"};

bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }

/// Exact keyword or its plural.
bool word_is(std::string_view word, std::string_view keyword) noexcept
{
    if (word == keyword) {
        return true;
    }
    return word.size() == keyword.size() + 1 && word.back() == 's' && word.starts_with(keyword);
}

template <std::size_t N>
bool in_family(std::string_view word, const std::array<std::string_view, N>& family) noexcept
{
    for (auto kw : family) {
        if (word_is(word, kw)) {
            return true;
        }
    }
    return false;
}

void tally(std::string_view text, ContextCategory& out)
{
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_identifier_start(text[i]) || (i > 0 && is_identifier_char(text[i - 1]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_identifier_char(text[j])) {
            ++j;
        }
        const std::string_view ident = text.substr(i, j - i);
        const bool block_member = i >= 6 && text.substr(i - 6, 6) == "block.";
        if (!block_member) {
            for (const auto& word : identifier_words(ident)) {
                if (in_family(word, kMiningWords)) {
                    ++out.mining_count;
                } else if (in_family(word, kLotteryWords)) {
                    ++out.lottery_count;
                }
            }
        }
        i = j;
    }
}

} // namespace

std::string_view to_string(ContextKind k) noexcept
{
    switch (k) {
    case ContextKind::Mining:
        return "Mining";
    case ContextKind::Lottery:
        return "Lottery";
    case ContextKind::Unknown:
        return "Unknown";
    }
    return "Unknown";
}

std::string_view to_string(FinalDisposition::Kind k) noexcept
{
    switch (k) {
    case FinalDisposition::Kind::Excluded:
        return "Excluded";
    case FinalDisposition::Kind::ConfirmedHighRisk:
        return "ConfirmedHighRisk";
    case FinalDisposition::Kind::NeedsManualReview:
        return "NeedsManualReview";
    }
    return "NeedsManualReview";
}

std::vector<std::string> identifier_words(std::string_view identifier)
{
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            words.push_back(current);
            current.clear();
        }
    };
    for (std::size_t i = 0; i < identifier.size(); ++i) {
        const char c = identifier[i];
        if (!is_lower(c) && !is_upper(c)) {
            flush();
            continue;
        }
        if (is_upper(c) && !current.empty()) {
            const char prev = identifier[i - 1];
            const bool next_lower = i + 1 < identifier.size() && is_lower(identifier[i + 1]);
            // "placeBet" -> place|Bet, "HTTPServer" -> HTTP|Server
            if (is_lower(prev) || (is_upper(prev) && next_lower)) {
                flush();
            }
        }
        current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    flush();
    return words;
}

ContextCategory classify_context(const SourceText& source, const ContractModel& model)
{
    ContextCategory out;
    if (model.contracts.empty()) {
        tally(source.neutralized(), out);
    } else {
        for (const auto& unit : model.contracts) {
            tally(source.neutralized_slice(unit.span), out);
        }
    }
    if (out.mining_count > out.lottery_count) {
        out.kind = ContextKind::Mining;
    } else if (out.lottery_count > out.mining_count) {
        out.kind = ContextKind::Lottery;
    } else {
        out.kind = ContextKind::Unknown;
    }
    return out;
}

FinalDisposition refine(const ContextCategory& category)
{
    switch (category.kind) {
    case ContextKind::Mining:
        return {FinalDisposition::Kind::Excluded, "proof-of-work, not randomness"};
    case ContextKind::Lottery:
        return {FinalDisposition::Kind::ConfirmedHighRisk, {}};
    case ContextKind::Unknown:
        return {FinalDisposition::Kind::NeedsManualReview, {}};
    }
    return {FinalDisposition::Kind::NeedsManualReview, {}};
}

} // namespace randsentry
