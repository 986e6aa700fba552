#include "randsentry/mitigation.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace randsentry {

namespace {

const std::string kPrivileged = R"re((?i:\w*(?:owner|admin)\w*)(?:\s*\(\s*\))?)re";

const boost::regex& access_token()
{
    static const boost::regex re(R"re(\bonly[A-Z_]\w*\b)re", boost::regex::perl);
    return re;
}

const boost::regex& sender_guard()
{
    static const boost::regex re(R"re(\b(?:require|assert)\s*\(\s*msg\.sender\s*==\s*)re" + kPrivileged
                                     + R"re(|\b(?:require|assert)\s*\(\s*)re" + kPrivileged
                                     + R"re(\s*==\s*msg\.sender\b|\bif\s*\(\s*msg\.sender\s*!=\s*)re" + kPrivileged
                                     + R"re(|\bif\s*\(\s*)re" + kPrivileged + R"re(\s*!=\s*msg\.sender\b)re",
                                 boost::regex::perl);
    return re;
}

const boost::regex& tx_origin_guard()
{
    static const boost::regex re(
        R"re(\btx\.origin\s*(?:==|!=)\s*msg\.sender\b|\bmsg\.sender\s*(?:==|!=)\s*tx\.origin\b)re",
        boost::regex::perl);
    return re;
}

const boost::regex& future_block_expr()
{
    static const boost::regex re(R"re(\bblock\.number\s*\+\s*[\w(])re", boost::regex::perl);
    return re;
}

const boost::regex& future_block_guard()
{
    static const boost::regex re(
        R"re(\bblock\.number\s*\+\s*[\w(]|\b(?:require|assert)\s*\(\s*block\.number\s*>)re", boost::regex::perl);
    return re;
}

const boost::regex& vrf_marker()
{
    static const boost::regex re(R"re(VRFConsumerBase|requestRandomWords|fulfillRandomness)re", boost::regex::perl);
    return re;
}

const boost::regex& access_modifier_name()
{
    static const boost::regex re(R"re(only[A-Z_0-9]\w*|onlyowner|onlyadmin|\w*(?:Owner|Admin)Only|is(?:Owner|Admin))re",
                                 boost::regex::perl);
    return re;
}

const boost::regex& eoa_modifier_name()
{
    static const boost::regex re(R"re((?i)\w*(?:human|eoa|notcontract|nocontract)\w*)re", boost::regex::perl);
    return re;
}

bool search(std::string_view text, const boost::regex& re)
{
    return boost::regex_search(text.begin(), text.end(), re);
}

std::vector<std::string_view> scoped_texts(const SourceText& source, const ContractModel& model)
{
    std::vector<std::string_view> out;
    if (model.contracts.empty()) {
        out.emplace_back(source.neutralized());
        return out;
    }
    for (const auto& unit : model.contracts) {
        out.push_back(source.neutralized_slice(unit.span));
    }
    return out;
}

bool any_scoped(const SourceText& source, const ContractModel& model, const boost::regex& re)
{
    const auto texts = scoped_texts(source, model);
    return std::any_of(texts.begin(), texts.end(), [&](std::string_view t) { return search(t, re); });
}

bool name_contains(std::string_view name, std::string_view needle)
{
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lowered.find(needle) != std::string::npos;
}

} // namespace

std::string_view to_string(MitigationKind k) noexcept
{
    switch (k) {
    case MitigationKind::AccessControl:
        return "AccessControl";
    case MitigationKind::TxOriginCheck:
        return "TxOriginCheck";
    case MitigationKind::FutureBlock:
        return "FutureBlock";
    case MitigationKind::VRF:
        return "VRF";
    case MitigationKind::CommitReveal:
        return "CommitReveal";
    }
    return "AccessControl";
}

std::optional<MitigationKind> parse_mitigation(std::string_view text) noexcept
{
    for (auto k : {MitigationKind::AccessControl, MitigationKind::TxOriginCheck, MitigationKind::FutureBlock,
                   MitigationKind::VRF, MitigationKind::CommitReveal}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<MitigationKind> detect_safe_mechanism(const SourceText& source, const ContractModel& model)
{
    if (any_scoped(source, model, vrf_marker())) {
        return MitigationKind::VRF;
    }
    bool has_commit = false;
    bool has_reveal = false;
    for (const auto& unit : model.contracts) {
        for (const auto& fn : unit.functions) {
            has_commit = has_commit || name_contains(fn.name, "commit");
            has_reveal = has_reveal || name_contains(fn.name, "reveal");
        }
    }
    if (has_commit && has_reveal) {
        return MitigationKind::CommitReveal;
    }
    return std::nullopt;
}

std::optional<MitigationKind> detect_partial_mitigation(const SourceText& source, const ContractModel& model)
{
    if (any_scoped(source, model, access_token()) || any_scoped(source, model, sender_guard())) {
        return MitigationKind::AccessControl;
    }
    if (any_scoped(source, model, tx_origin_guard())) {
        return MitigationKind::TxOriginCheck;
    }
    if (any_scoped(source, model, future_block_expr())) {
        return MitigationKind::FutureBlock;
    }
    return std::nullopt;
}

bool has_mitigation(const FunctionRecord& fn, std::string_view body_text, MitigationKind kind)
{
    auto modifier_matches = [&](const boost::regex& re) {
        return std::any_of(fn.modifiers.begin(), fn.modifiers.end(),
                           [&](const std::string& m) { return boost::regex_match(m, re); });
    };
    switch (kind) {
    case MitigationKind::AccessControl:
        return modifier_matches(access_modifier_name()) || search(body_text, sender_guard());
    case MitigationKind::TxOriginCheck:
        return search(body_text, tx_origin_guard()) || modifier_matches(eoa_modifier_name());
    case MitigationKind::FutureBlock:
        return search(body_text, future_block_guard());
    case MitigationKind::VRF:
        return search(body_text, vrf_marker());
    case MitigationKind::CommitReveal:
        return name_contains(fn.name, "commit") || name_contains(fn.name, "reveal");
    }
    return false;
}

} // namespace randsentry
