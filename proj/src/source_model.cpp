#include "randsentry/source_model.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <string>
#include <unordered_set>
#include <utility>

namespace randsentry {

namespace {

enum class TokenKind { Identifier, Number, Punct };

struct Token
{
    TokenKind kind;
    std::string_view text;
    std::size_t pos;

    [[nodiscard]] bool is(std::string_view s) const noexcept { return text == s; }
    [[nodiscard]] bool is_punct(char c) const noexcept
    {
        return kind == TokenKind::Punct && text.size() == 1 && text[0] == c;
    }
};

constexpr std::array kMutabilityWords = {std::string_view{"view"}, std::string_view{"pure"},
                                         std::string_view{"payable"}, std::string_view{"constant"},
                                         std::string_view{"nonpayable"}, std::string_view{"virtual"}};

std::optional<Visibility> visibility_keyword(std::string_view word) noexcept
{
    if (word == "public") {
        return Visibility::Public;
    }
    if (word == "external") {
        return Visibility::External;
    }
    if (word == "internal") {
        return Visibility::Internal;
    }
    if (word == "private") {
        return Visibility::Private;
    }
    return std::nullopt;
}

bool is_mutability_keyword(std::string_view word) noexcept
{
    return std::find(kMutabilityWords.begin(), kMutabilityWords.end(), word) != kMutabilityWords.end();
}

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> tokens;
    tokens.reserve(text.size() / 4);
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (is_identifier_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && is_identifier_char(text[j])) {
                ++j;
            }
            tokens.push_back({TokenKind::Identifier, text.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (c >= '0' && c <= '9') {
            std::size_t j = i + 1;
            while (j < text.size() && (is_identifier_char(text[j]) || text[j] == '.')) {
                ++j;
            }
            tokens.push_back({TokenKind::Number, text.substr(i, j - i), i});
            i = j;
            continue;
        }
        tokens.push_back({TokenKind::Punct, text.substr(i, 1), i});
        ++i;
    }
    return tokens;
}

/// For every opening bracket token, the index of its closing partner (and vice versa).
std::vector<std::size_t> match_brackets(const std::vector<Token>& tokens, char open, char close)
{
    constexpr auto npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> partner(tokens.size(), npos);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].is_punct(open)) {
            stack.push_back(i);
        } else if (tokens[i].is_punct(close) && !stack.empty()) {
            partner[i] = stack.back();
            partner[stack.back()] = i;
            stack.pop_back();
        }
    }
    return partner;
}

void check_brace_balance(std::string_view neutralized, const std::string& file_id)
{
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < neutralized.size(); ++i) {
        if (neutralized[i] == '{') {
            open.push_back(i);
        } else if (neutralized[i] == '}') {
            if (open.empty()) {
                throw UnbalancedBraces(file_id, i);
            }
            open.pop_back();
        }
    }
    if (!open.empty()) {
        throw UnbalancedBraces(file_id, open.front());
    }
}

class UnitParser
{
public:
    UnitParser(const std::vector<Token>& tokens, const std::vector<std::size_t>& braces,
               const std::vector<std::size_t>& parens)
        : tokens_(tokens)
        , braces_(braces)
        , parens_(parens)
    {}

    /// Parses the body tokens (open, close) of one contract into `unit`.
    void parse_body(std::size_t open, std::size_t close, ContractUnit& unit)
    {
        std::size_t i = open + 1;
        while (i < close) {
            const Token& tok = tokens_[i];
            if (tok.is_punct('{')) {
                i = braces_[i] + 1;
                continue;
            }
            if (tok.is_punct('(')) {
                i = skip_group(i);
                continue;
            }
            if (tok.kind != TokenKind::Identifier) {
                ++i;
                continue;
            }
            if (tok.is("function")) {
                i = parse_function(i, close, unit, /*is_keyword_ctor=*/false);
            } else if ((tok.is("constructor") || tok.is("fallback") || tok.is("receive"))
                       && next_is_punct(i, '(')) {
                i = parse_function(i, close, unit, tok.is("constructor"));
            } else if (tok.is("modifier")) {
                i = parse_modifier(i, close, unit);
            } else {
                ++i;
            }
        }
        resolve_callees(unit);
    }

private:
    bool next_is_punct(std::size_t i, char c) const noexcept
    {
        return i + 1 < tokens_.size() && tokens_[i + 1].is_punct(c);
    }

    std::size_t skip_group(std::size_t i) const noexcept
    {
        return parens_[i] == static_cast<std::size_t>(-1) ? i + 1 : parens_[i] + 1;
    }

    std::size_t parse_function(std::size_t start, std::size_t limit, ContractUnit& unit,
                               bool is_keyword_ctor)
    {
        FunctionRecord fn;
        std::size_t i = start + 1;
        const std::string_view keyword = tokens_[start].text;
        if (keyword == "function") {
            if (i < limit && tokens_[i].kind == TokenKind::Identifier) {
                fn.name = std::string(tokens_[i].text);
                ++i;
            } else {
                fn.name = "fallback";
            }
        } else {
            fn.name = std::string(keyword);
            if (keyword != "constructor") {
                fn.visibility = Visibility::External;
            }
        }
        fn.is_constructor = is_keyword_ctor || (keyword == "function" && fn.name == unit.name);

        if (i >= limit || !tokens_[i].is_punct('(')) {
            return i;
        }
        i = skip_group(i);

        bool visibility_seen = false;
        while (i < limit) {
            const Token& tok = tokens_[i];
            if (tok.is_punct('{')) {
                const std::size_t close = braces_[i];
                fn.body_span = Span{tok.pos, tokens_[close].pos + 1};
                collect_calls(i, close, fn);
                unit.functions.push_back(std::move(fn));
                return close + 1;
            }
            if (tok.is_punct(';') || tok.is_punct('}')) {
                // Declaration without a body (interface or abstract member).
                return i + 1;
            }
            if (tok.kind != TokenKind::Identifier) {
                ++i;
                continue;
            }
            if (auto vis = visibility_keyword(tok.text)) {
                if (!visibility_seen) {
                    fn.visibility = *vis;
                    visibility_seen = true;
                }
                ++i;
            } else if (is_mutability_keyword(tok.text)) {
                ++i;
            } else if (tok.is("returns") || tok.is("override")) {
                i = next_is_punct(i, '(') ? skip_group(i + 1) : i + 1;
            } else if (tok.is("function") || tok.is("modifier") || tok.is("constructor")) {
                return i;
            } else {
                if (std::find(fn.modifiers.begin(), fn.modifiers.end(), tok.text) == fn.modifiers.end()) {
                    fn.modifiers.emplace_back(tok.text);
                }
                i = next_is_punct(i, '(') ? skip_group(i + 1) : i + 1;
            }
        }
        return i;
    }

    std::size_t parse_modifier(std::size_t start, std::size_t limit, ContractUnit& unit)
    {
        std::size_t i = start + 1;
        if (i < limit && tokens_[i].kind == TokenKind::Identifier) {
            unit.declared_modifiers.emplace_back(tokens_[i].text);
            ++i;
        }
        while (i < limit) {
            if (tokens_[i].is_punct('{')) {
                return braces_[i] + 1;
            }
            if (tokens_[i].is_punct(';')) {
                return i + 1;
            }
            if (tokens_[i].is_punct('(')) {
                i = skip_group(i);
                continue;
            }
            ++i;
        }
        return i;
    }

    void collect_calls(std::size_t open, std::size_t close, FunctionRecord& fn) const
    {
        for (std::size_t i = open + 1; i < close; ++i) {
            const Token& tok = tokens_[i];
            if (tok.kind != TokenKind::Identifier || !next_is_punct(i, '(')) {
                continue;
            }
            if (i > 0) {
                const Token& prev = tokens_[i - 1];
                if (prev.is_punct('.')) {
                    const bool self_call = i >= 2
                        && (tokens_[i - 2].is("this") || tokens_[i - 2].is("super"));
                    if (!self_call) {
                        continue;
                    }
                }
                if (prev.is("new") || prev.is("emit")) {
                    continue;
                }
            }
            const std::string name(tok.text);
            if (std::find(fn.callees.begin(), fn.callees.end(), name) == fn.callees.end()) {
                fn.callees.push_back(name);
            }
        }
    }

    static void resolve_callees(ContractUnit& unit)
    {
        std::unordered_set<std::string> names;
        for (const auto& fn : unit.functions) {
            names.insert(fn.name);
        }
        for (auto& fn : unit.functions) {
            std::erase_if(fn.callees, [&](const std::string& c) { return !names.contains(c); });
        }
    }

    const std::vector<Token>& tokens_;
    const std::vector<std::size_t>& braces_;
    const std::vector<std::size_t>& parens_;
};

} // namespace

std::string_view to_string(Visibility v) noexcept
{
    switch (v) {
    case Visibility::Public:
        return "public";
    case Visibility::External:
        return "external";
    case Visibility::Internal:
        return "internal";
    case Visibility::Private:
        return "private";
    }
    return "public";
}

std::string_view to_string(ContractKind k) noexcept
{
    switch (k) {
    case ContractKind::Contract:
        return "contract";
    case ContractKind::Library:
        return "library";
    case ContractKind::Interface:
        return "interface";
    }
    return "contract";
}

bool is_identifier_start(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_identifier_char(char c) noexcept
{
    return is_identifier_start(c) || (c >= '0' && c <= '9');
}

const FunctionRecord* ContractUnit::find_function(std::string_view fn_name) const noexcept
{
    for (const auto& fn : functions) {
        if (fn.name == fn_name) {
            return &fn;
        }
    }
    return nullptr;
}

const FunctionRecord* ContractUnit::enclosing_function(std::size_t pos) const noexcept
{
    for (const auto& fn : functions) {
        if (fn.body_span.contains(pos)) {
            return &fn;
        }
    }
    return nullptr;
}

const ContractUnit* ContractModel::enclosing_contract(std::size_t pos) const noexcept
{
    for (const auto& unit : contracts) {
        if (unit.span.contains(pos)) {
            return &unit;
        }
    }
    return nullptr;
}

UnbalancedBraces::UnbalancedBraces(std::string file_id, std::size_t position)
    : std::runtime_error("unbalanced braces in '" + file_id + "' at offset " + std::to_string(position))
    , file_id_(std::move(file_id))
    , position_(position)
{}

std::string neutralize(std::string_view source)
{
    enum class State { Code, LineComment, BlockComment, String };

    std::string out(source);
    State state = State::Code;
    char quote = '\0';
    auto blank = [&](std::size_t i) {
        if (out[i] != '\n') {
            out[i] = ' ';
        }
    };

    for (std::size_t i = 0; i < source.size(); ++i) {
        const char c = source[i];
        const char next = i + 1 < source.size() ? source[i + 1] : '\0';
        switch (state) {
        case State::Code:
            if (c == '/' && next == '/') {
                state = State::LineComment;
                blank(i);
            } else if (c == '/' && next == '*') {
                state = State::BlockComment;
                blank(i);
                blank(++i);
            } else if (c == '"' || c == '\'') {
                state = State::String;
                quote = c;
                blank(i);
            }
            break;
        case State::LineComment:
            if (c == '\n') {
                state = State::Code;
            } else {
                blank(i);
            }
            break;
        case State::BlockComment:
            blank(i);
            if (c == '*' && next == '/') {
                blank(++i);
                state = State::Code;
            }
            break;
        case State::String:
            if (c == '\n') {
                // Unterminated literal: Solidity strings cannot span lines.
                state = State::Code;
                break;
            }
            blank(i);
            if (c == '\\' && next != '\0' && next != '\n') {
                blank(++i);
            } else if (c == quote) {
                state = State::Code;
            }
            break;
        }
    }
    return out;
}

ContractModel parse_contract(std::string_view source_text, std::string file_id)
{
    return parse_neutralized(neutralize(source_text), std::move(file_id));
}

ContractModel parse_neutralized(std::string_view neutralized, std::string file_id)
{
    check_brace_balance(neutralized, file_id);

    ContractModel model;
    model.file_id = std::move(file_id);
    model.raw_length = neutralized.size();

    const auto tokens = tokenize(neutralized);
    const auto braces = match_brackets(tokens, '{', '}');
    const auto parens = match_brackets(tokens, '(', ')');
    UnitParser parser(tokens, braces, parens);

    std::size_t i = 0;
    while (i < tokens.size()) {
        const Token& tok = tokens[i];
        if (tok.is_punct('{')) {
            i = braces[i] + 1;
            continue;
        }
        const bool is_unit_keyword = tok.kind == TokenKind::Identifier
            && (tok.is("contract") || tok.is("library") || tok.is("interface"));
        if (!is_unit_keyword || i + 1 >= tokens.size()
            || tokens[i + 1].kind != TokenKind::Identifier) {
            ++i;
            continue;
        }

        ContractUnit unit;
        unit.kind = tok.is("library")     ? ContractKind::Library
                  : tok.is("interface")   ? ContractKind::Interface
                                          : ContractKind::Contract;
        unit.name = std::string(tokens[i + 1].text);
        std::size_t begin = tok.pos;
        if (i > 0 && tokens[i - 1].is("abstract")) {
            begin = tokens[i - 1].pos;
        }

        std::size_t j = i + 2;
        while (j < tokens.size() && !tokens[j].is_punct('{') && !tokens[j].is_punct(';')) {
            ++j;
        }
        if (j >= tokens.size() || tokens[j].is_punct(';')) {
            i = j + 1;
            continue;
        }
        const std::size_t close = braces[j];
        unit.span = Span{begin, tokens[close].pos + 1};
        parser.parse_body(j, close, unit);
        model.contracts.push_back(std::move(unit));
        i = close + 1;
    }
    return model;
}

std::vector<const FunctionRecord*> public_callers(const FunctionRecord& target, const ContractUnit& unit)
{
    const auto& fns = unit.functions;
    std::vector<std::vector<std::size_t>> callers_of(fns.size());
    for (std::size_t caller = 0; caller < fns.size(); ++caller) {
        for (const auto& callee_name : fns[caller].callees) {
            for (std::size_t callee = 0; callee < fns.size(); ++callee) {
                if (fns[callee].name == callee_name) {
                    callers_of[callee].push_back(caller);
                }
            }
        }
    }

    std::size_t target_index = fns.size();
    for (std::size_t k = 0; k < fns.size(); ++k) {
        if (&fns[k] == &target || (fns[k].name == target.name && fns[k].body_span == target.body_span)) {
            target_index = k;
            break;
        }
    }
    if (target_index == fns.size()) {
        return {};
    }

    std::vector<bool> visited(fns.size(), false);
    std::deque<std::size_t> queue(callers_of[target_index].begin(), callers_of[target_index].end());
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        if (visited[k]) {
            continue;
        }
        visited[k] = true;
        for (std::size_t caller : callers_of[k]) {
            if (!visited[caller]) {
                queue.push_back(caller);
            }
        }
    }

    std::vector<const FunctionRecord*> result;
    for (std::size_t k = 0; k < fns.size(); ++k) {
        if (visited[k] && fns[k].is_entry_point()) {
            result.push_back(&fns[k]);
        }
    }
    return result;
}

} // namespace randsentry
