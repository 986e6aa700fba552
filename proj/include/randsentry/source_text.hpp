#pragma once

#include "randsentry/source_model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

/**
 * One source file prepared for matching.
 *
 * Holds the original text, the neutralized text (comments and string
 * literals blanked, same length) and a whitespace-collapsed copy of the
 * neutralized text with a map from every collapsed offset back to the
 * original offset. Patterns run on the collapsed text so expressions split
 * across lines still match.
 */
class SourceText
{
public:
    explicit SourceText(std::string original);

    [[nodiscard]] const std::string& original() const noexcept { return original_; }
    [[nodiscard]] const std::string& neutralized() const noexcept { return neutralized_; }
    [[nodiscard]] const std::string& normalized() const noexcept { return normalized_; }

    /// Original offset of the character at `normalized_pos`.
    [[nodiscard]] std::size_t to_original(std::size_t normalized_pos) const noexcept
    {
        return offsets_[normalized_pos];
    }

    /// Original span covered by normalized range [begin, end); `end > begin`.
    [[nodiscard]] Span to_original(std::size_t begin, std::size_t end) const noexcept
    {
        return Span{offsets_[begin], offsets_[end - 1] + 1};
    }

    /// 1-based line number of an original offset.
    [[nodiscard]] std::size_t line_of(std::size_t pos) const noexcept;

    [[nodiscard]] std::string_view neutralized_slice(const Span& span) const noexcept
    {
        return std::string_view(neutralized_).substr(span.begin, span.length());
    }

private:
    std::string original_;
    std::string neutralized_;
    std::string normalized_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> line_starts_;
};

/// Collapse every run of whitespace to one space.
[[nodiscard]] std::string collapse_whitespace(std::string_view text);

} // namespace randsentry
