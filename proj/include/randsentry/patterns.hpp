/**
 * @file patterns.hpp
 * @brief Bad-randomness pattern catalog (nine groups, 58 expressions) and
 *        the block-attribute keyword filter.
 */
#pragma once

#include "randsentry/source_model.hpp"
#include "randsentry/source_text.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

enum class PatternGroup : std::uint8_t { G1 = 1, G2, G3, G4, G5, G6, G7, G8, G9 };

inline constexpr std::size_t kGroupCount = 9;

/// Number of expressions per group, G1 first.
inline constexpr std::array<std::size_t, kGroupCount> kExpectedGroupSizes = {10, 11, 15, 1, 4, 10, 2, 3, 2};
inline constexpr std::size_t kExpectedPatternCount = 58;

[[nodiscard]] std::string_view to_string(PatternGroup g) noexcept;
[[nodiscard]] std::string_view group_title(PatternGroup g) noexcept;
[[nodiscard]] std::optional<PatternGroup> parse_group(std::string_view text) noexcept;

struct VulnPattern
{
    PatternGroup group;
    std::string pattern_id;
    std::string expression;
    std::string description;
};

struct PatternHit
{
    std::string pattern_id;
    PatternGroup group;
    Span span;
    std::size_t line = 0;
    std::optional<std::string> enclosing_contract;
    /// Absent when the match lies outside every function body.
    std::optional<std::string> enclosing_function;
};

/**
 * Immutable, process-wide catalog of compiled expressions.
 *
 * Construction checks the per-group cardinalities against
 * kExpectedGroupSizes and throws std::logic_error on mismatch.
 */
class PatternRegistry
{
public:
    static const PatternRegistry& instance();

    PatternRegistry(const PatternRegistry&) = delete;
    PatternRegistry& operator=(const PatternRegistry&) = delete;
    ~PatternRegistry();

    [[nodiscard]] std::span<const VulnPattern> patterns() const noexcept { return patterns_; }
    [[nodiscard]] std::size_t size() const noexcept { return patterns_.size(); }
    [[nodiscard]] std::size_t count(PatternGroup g) const noexcept;
    [[nodiscard]] const VulnPattern* find(std::string_view pattern_id) const noexcept;

    /// Raw matches of every pattern in a whitespace-normalized text, as
    /// (pattern index, begin, end) in normalized offsets.
    struct RawMatch
    {
        std::size_t pattern_index;
        std::size_t begin;
        std::size_t end;
    };
    [[nodiscard]] std::vector<RawMatch> scan(const std::string& normalized) const;

    /// True if `text`, taken whole, matches the expression of `pattern_id`.
    [[nodiscard]] bool matches_whole(std::string_view pattern_id, const std::string& text) const;

private:
    PatternRegistry();

    struct Compiled;
    std::vector<VulnPattern> patterns_;
    std::vector<std::unique_ptr<Compiled>> compiled_;
};

/**
 * Phase-1 keyword filter: block.timestamp, blockhash, block.difficulty,
 * block.number, block.coinbase, block.gaslimit, block.prevrandao, gasleft(
 * or the standalone token `now`. Comments and strings are ignored.
 */
[[nodiscard]] bool block_attribute_present(std::string_view source_text);
[[nodiscard]] bool block_attribute_present(const SourceText& source);

/// All hits of all patterns, sorted by (begin, pattern_id), each annotated
/// with its enclosing contract and function from `model`.
[[nodiscard]] std::vector<PatternHit> match_vulnerability_patterns(const SourceText& source,
                                                                   const ContractModel& model);
[[nodiscard]] std::vector<PatternHit> match_vulnerability_patterns(std::string_view source_text,
                                                                   const ContractModel& model);

} // namespace randsentry
