/**
 * @file source_model.hpp
 * @brief Lexical structural model of a Solidity source file.
 *
 * The model is built by neutralizing comments and string literals and then
 * counting braces; it is not a grammar-driven parser.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace randsentry {

/// Half-open character range [begin, end) into the original source.
struct Span
{
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] constexpr std::size_t length() const noexcept { return end - begin; }
    [[nodiscard]] constexpr bool contains(std::size_t pos) const noexcept
    {
        return pos >= begin && pos < end;
    }
    [[nodiscard]] constexpr bool contains(const Span& other) const noexcept
    {
        return other.begin >= begin && other.end <= end;
    }
    [[nodiscard]] constexpr bool overlaps(const Span& other) const noexcept
    {
        return begin < other.end && other.begin < end;
    }

    friend constexpr bool operator==(const Span&, const Span&) = default;
};

enum class Visibility { Public, External, Internal, Private };

enum class ContractKind { Contract, Library, Interface };

[[nodiscard]] std::string_view to_string(Visibility v) noexcept;
[[nodiscard]] std::string_view to_string(ContractKind k) noexcept;

struct FunctionRecord
{
    std::string name;
    Visibility visibility = Visibility::Public;
    std::vector<std::string> modifiers;
    Span body_span;
    std::vector<std::string> callees;
    bool is_constructor = false;

    [[nodiscard]] bool is_entry_point() const noexcept
    {
        return !is_constructor
            && (visibility == Visibility::Public || visibility == Visibility::External);
    }
};

struct ContractUnit
{
    std::string name;
    ContractKind kind = ContractKind::Contract;
    std::vector<FunctionRecord> functions;
    std::vector<std::string> declared_modifiers;
    Span span;

    [[nodiscard]] const FunctionRecord* find_function(std::string_view fn_name) const noexcept;
    /// Function whose body contains `pos`, if any.
    [[nodiscard]] const FunctionRecord* enclosing_function(std::size_t pos) const noexcept;
};

struct ContractModel
{
    std::string file_id;
    std::vector<ContractUnit> contracts;
    std::size_t raw_length = 0;

    /// Contract whose span contains `pos`, if any.
    [[nodiscard]] const ContractUnit* enclosing_contract(std::size_t pos) const noexcept;
};

/// Thrown when brace depth does not return to zero (or goes negative).
class UnbalancedBraces : public std::runtime_error
{
public:
    UnbalancedBraces(std::string file_id, std::size_t position);

    [[nodiscard]] const std::string& file_id() const noexcept { return file_id_; }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::string file_id_;
    std::size_t position_;
};

/**
 * Replace line comments, block comments and string literals with spaces.
 *
 * Newlines are kept and the output has exactly the input's length, so every
 * offset into the result is an offset into the original text.
 */
[[nodiscard]] std::string neutralize(std::string_view source);

[[nodiscard]] ContractModel parse_contract(std::string_view source_text, std::string file_id);

/// Same as parse_contract, for callers that already hold the neutralized text.
[[nodiscard]] ContractModel parse_neutralized(std::string_view neutralized, std::string file_id);

/**
 * Public/external functions from which `target` is reachable through the
 * name-based callee graph of `unit`. Constructors are not entry points.
 * The target itself is included only if it reaches itself through a cycle.
 */
[[nodiscard]] std::vector<const FunctionRecord*> public_callers(const FunctionRecord& target,
                                                                const ContractUnit& unit);

[[nodiscard]] bool is_identifier_start(char c) noexcept;
[[nodiscard]] bool is_identifier_char(char c) noexcept;

} // namespace randsentry
