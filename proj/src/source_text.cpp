#include "randsentry/source_text.hpp"

#include <algorithm>
#include <utility>

namespace randsentry {

namespace {

bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

SourceText::SourceText(std::string original)
    : original_(std::move(original))
    , neutralized_(neutralize(original_))
{
    normalized_.reserve(neutralized_.size());
    offsets_.reserve(neutralized_.size());
    bool in_space = false;
    for (std::size_t i = 0; i < neutralized_.size(); ++i) {
        const char c = neutralized_[i];
        if (is_space(c)) {
            if (!in_space) {
                normalized_.push_back(' ');
                offsets_.push_back(i);
                in_space = true;
            }
            continue;
        }
        in_space = false;
        normalized_.push_back(c);
        offsets_.push_back(i);
    }

    line_starts_.push_back(0);
    for (std::size_t i = 0; i < original_.size(); ++i) {
        if (original_[i] == '\n') {
            line_starts_.push_back(i + 1);
        }
    }
}

std::size_t SourceText::line_of(std::size_t pos) const noexcept
{
    const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), pos);
    return static_cast<std::size_t>(it - line_starts_.begin());
}

std::string collapse_whitespace(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool in_space = false;
    for (char c : text) {
        if (is_space(c)) {
            if (!in_space) {
                out.push_back(' ');
                in_space = true;
            }
            continue;
        }
        in_space = false;
        out.push_back(c);
    }
    return out;
}

} // namespace randsentry
