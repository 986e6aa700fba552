#include "randsentry/patterns.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace randsentry {

namespace {

// Building blocks. Every expression embeds at least one block attribute,
// `now`, blockhash, prevrandao or gasleft() so that a hit implies the
// keyword filter passes.
const std::string kAttr =
    R"re((?:\bblock\.(?:timestamp|number|difficulty|prevrandao|coinbase|gaslimit|blockhash)\b|\bnow\b|\bgasleft\s*\(\s*\)|\bblockhash\s*\())re";
const std::string kAttrArith = R"re((?:\bblock\.(?:timestamp|number|difficulty|prevrandao|gaslimit)\b|\bnow\b))re";
const std::string kArgs = R"re([^;{}]*?)re";
const std::string kModTail = R"re([^;{}]*?\)\s*%)re";
const std::string kAssign = R"re(\s*[-+*^|]?=(?!=)\s*[^;{}]*?)re";
const std::string kSeedName = R"re(\b(?i:\w*(?:seed|random|entropy)\w*))re";
const std::string kCastPrefix = R"re((?:(?:bytes32|uint256|uint)\s*\(\s*)?)re";
const std::string kBlockhashCall = R"re((?:\bblock\.)?\bblockhash\s*\()re";
const std::string kBalancedCall = R"re(\((?:[^()]|\([^()]*\))*\))re";

std::vector<VulnPattern> build_catalog()
{
    std::vector<VulnPattern> p;
    auto add = [&p](PatternGroup g, std::string id, std::string expr, std::string desc) {
        p.push_back(VulnPattern{g, std::move(id), std::move(expr), std::move(desc)});
    };
    using G = PatternGroup;

    // G1: direct modulo over a block attribute.
    add(G::G1, "G1.01", R"re(\bblock\.timestamp\s*%)re", "block.timestamp % n");
    add(G::G1, "G1.02", R"re(\bnow\s*%)re", "now % n");
    add(G::G1, "G1.03", R"re(\bblock\.number\s*%)re", "block.number % n");
    add(G::G1, "G1.04", R"re(\bblock\.difficulty\s*%)re", "block.difficulty % n");
    add(G::G1, "G1.05", R"re(\bblock\.prevrandao\s*%)re", "block.prevrandao % n");
    add(G::G1, "G1.06", R"re(\bblock\.gaslimit\s*%)re", "block.gaslimit % n");
    add(G::G1, "G1.07", R"re(\buint(?:160|256)?\s*\(\s*block\.coinbase\s*\)\s*%)re", "uint(block.coinbase) % n");
    add(G::G1, "G1.08", R"re(\bgasleft\s*\(\s*\)\s*%)re", "gasleft() % n");
    add(G::G1, "G1.09", R"re(\bblockhash\s*)re" + kBalancedCall + R"re(\s*%)re", "blockhash(x) % n");
    add(G::G1, "G1.10", R"re(\([^();{}%]*?)re" + kAttrArith + R"re([^();{}%]*\)\s*%)re",
        "parenthesized block-attribute expression % n");

    // G2: keccak256/sha3 digest cast to uint.
    const std::string encode_packed = R"re(\s*\(\s*keccak256\s*\(\s*abi\.encodePacked\s*\()re";
    const std::string encode_plain = R"re(\s*\(\s*keccak256\s*\(\s*abi\.encode\s*\()re";
    const std::string keccak_direct = R"re(\s*\(\s*keccak256\s*\((?!\s*abi\.))re";
    add(G::G2, "G2.01", R"re(\buint256)re" + encode_packed + kArgs + kAttr,
        "uint256(keccak256(abi.encodePacked(<block attr>...)))");
    add(G::G2, "G2.02", R"re(\buint)re" + encode_packed + kArgs + kAttr,
        "uint(keccak256(abi.encodePacked(<block attr>...)))");
    add(G::G2, "G2.03", R"re(\buint256)re" + encode_plain + kArgs + kAttr,
        "uint256(keccak256(abi.encode(<block attr>...)))");
    add(G::G2, "G2.04", R"re(\buint)re" + encode_plain + kArgs + kAttr,
        "uint(keccak256(abi.encode(<block attr>...)))");
    add(G::G2, "G2.05", R"re(\buint256)re" + keccak_direct + kArgs + kAttr,
        "uint256(keccak256(<block attr>, ...)) legacy variadic form");
    add(G::G2, "G2.06", R"re(\buint)re" + keccak_direct + kArgs + kAttr,
        "uint(keccak256(<block attr>, ...)) legacy variadic form");
    add(G::G2, "G2.07", R"re(\buint256\s*\(\s*sha3\s*\()re" + kArgs + kAttr, "uint256(sha3(<block attr>...))");
    add(G::G2, "G2.08", R"re(\buint\s*\(\s*sha3\s*\()re" + kArgs + kAttr, "uint(sha3(<block attr>...))");
    add(G::G2, "G2.09", R"re(\buint(?:8|16|32|64|128)\s*\(\s*(?:keccak256|sha3)\s*\()re" + kArgs + kAttr,
        "narrow uintN(keccak256/sha3(<block attr>...))");
    add(G::G2, "G2.10", R"re(\buint(?:256)?\s*\(\s*sha256\s*\()re" + kArgs + kAttr,
        "uint(sha256(<block attr>...))");
    add(G::G2, "G2.11", R"re(\buint(?:256)?\s*\(\s*bytes32\s*\(\s*(?:keccak256|sha3)\s*\()re" + kArgs + kAttr,
        "uint(bytes32(keccak256(<block attr>...)))");

    // G3: hashed block attributes reduced with modulo.
    const std::string packed = R"re(\bkeccak256\s*\(\s*abi\.encodePacked\s*\()re" + kArgs;
    add(G::G3, "G3.01", packed + R"re(\bblock\.timestamp\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.timestamp...)) % n");
    add(G::G3, "G3.02", packed + R"re(\bblock\.difficulty\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.difficulty...)) % n");
    add(G::G3, "G3.03", packed + R"re(\bblock\.number\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.number...)) % n");
    add(G::G3, "G3.04", packed + R"re(\bblockhash\s*\()re" + kModTail,
        "keccak256(abi.encodePacked(blockhash(...)...)) % n");
    add(G::G3, "G3.05", packed + R"re(\bnow\b)re" + kModTail, "keccak256(abi.encodePacked(now...)) % n");
    add(G::G3, "G3.06", packed + R"re(\bblock\.coinbase\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.coinbase...)) % n");
    add(G::G3, "G3.07", packed + R"re(\bblock\.prevrandao\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.prevrandao...)) % n");
    add(G::G3, "G3.08", packed + R"re(\bblock\.gaslimit\b)re" + kModTail,
        "keccak256(abi.encodePacked(block.gaslimit...)) % n");
    add(G::G3, "G3.09", packed + R"re(\bgasleft\s*\(\s*\))re" + kModTail,
        "keccak256(abi.encodePacked(gasleft()...)) % n");
    add(G::G3, "G3.10", R"re(\bkeccak256\s*\(\s*abi\.encode\s*\()re" + kArgs + kAttr + kModTail,
        "keccak256(abi.encode(<block attr>...)) % n");
    add(G::G3, "G3.11", R"re(\bkeccak256\s*\((?!\s*abi\.))re" + kArgs + kAttr + kModTail,
        "keccak256(<block attr>, ...) % n legacy variadic form");
    add(G::G3, "G3.12", R"re(\bsha3\s*\()re" + kArgs + kAttr + kModTail, "sha3(<block attr>...) % n");
    add(G::G3, "G3.13", R"re(\bsha256\s*\()re" + kArgs + kAttr + kModTail, "sha256(<block attr>...) % n");
    add(G::G3, "G3.14",
        R"re(\bkeccak256\s*\(\s*abi\.encodePacked\s*\(\s*msg\.sender\s*,)re" + kArgs + kAttr + kModTail,
        "keccak256(abi.encodePacked(msg.sender, <block attr>...)) % n");
    add(G::G3, "G3.15", R"re(\b(?:keccak256|sha3)\s*\()re" + kArgs + kAttr + kModTail + R"re(\s*\w+\.length\b)re",
        "hash of block attributes % array.length");

    // G4: hash over the deprecated block.blockhash.
    add(G::G4, "G4.01", R"re(\b(?:keccak256|sha3)\s*\()re" + kArgs + R"re(\bblock\.blockhash\s*\()re",
        "keccak256/sha3(block.blockhash(...))");

    // G5: blockhash used as the answer or compared against a guess.
    add(G::G5, "G5.01", R"re(\b(?i:\w*(?:answer|result)\w*)\s*=(?!=)\s*)re" + kCastPrefix + kBlockhashCall,
        "answer/result = blockhash(...)");
    add(G::G5, "G5.02", kBlockhashCall + R"re((?:[^()]|\([^()]*\))*\)\s*(?:==|!=))re",
        "blockhash(...) == x");
    add(G::G5, "G5.03", R"re((?:==|!=)\s*)re" + kCastPrefix + kBlockhashCall, "x == blockhash(...)");
    add(G::G5, "G5.04", R"re(\b(?i:\w*(?:answer|result|guess)\w*)\s*(?:==|!=)\s*)re" + kCastPrefix + kBlockhashCall,
        "answer/guess == blockhash(...)");

    // G6: seed/random variables assigned from predictable sources.
    add(G::G6, "G6.01", kSeedName + kAssign + R"re(\bblock\.timestamp\b)re", "seed = ... block.timestamp");
    add(G::G6, "G6.02", kSeedName + kAssign + R"re(\bnow\b)re", "seed = ... now");
    add(G::G6, "G6.03", kSeedName + kAssign + R"re(\bblock\.number\b)re", "seed = ... block.number");
    add(G::G6, "G6.04", kSeedName + kAssign + R"re(\bblock\.difficulty\b)re", "seed = ... block.difficulty");
    add(G::G6, "G6.05", kSeedName + kAssign + R"re(\bblock\.prevrandao\b)re", "seed = ... block.prevrandao");
    add(G::G6, "G6.06", kSeedName + kAssign + R"re(\bblock\.coinbase\b)re", "seed = ... block.coinbase");
    add(G::G6, "G6.07", kSeedName + kAssign + R"re(\bblock\.gaslimit\b)re", "seed = ... block.gaslimit");
    add(G::G6, "G6.08", kSeedName + kAssign + R"re(\bblockhash\s*\()re", "seed = ... blockhash(...)");
    add(G::G6, "G6.09", kSeedName + kAssign + R"re(\bgasleft\s*\(\s*\))re", "seed = ... gasleft()");
    add(G::G6, "G6.10", kSeedName + R"re(\s*=(?!=)\s*)re" + kCastPrefix + R"re((?:keccak256|sha3|sha256)\s*\()re"
                            + kArgs + kAttr,
        "seed = keccak256(<block attr>...)");

    // G7: winner selection driven by block attributes.
    add(G::G7, "G7.01", R"re(\b(?i:\w*winner\w*)\s*=(?!=)\s*[^;{}]*?)re" + kAttr, "winner = f(<block attr>)");
    add(G::G7, "G7.02",
        R"re(\b(?i:\w*(?:player|participant|entrant|ticket|bettor|candidate|entries|entry)\w*)\s*\[\s*[^\[\];{}]*?)re"
            + kAttr,
        "players[<block attr> ...]");

    // G8: stored block numbers fed to blockhash, uint casts of blockhash.
    add(G::G8, "G8.01", R"re(\buint(?:256)?\s*\(\s*blockhash\s*\()re", "uint(blockhash(...))");
    add(G::G8, "G8.02", R"re(\buint(?:256)?\s*\(\s*block\.blockhash\s*\()re", "uint(block.blockhash(...))");
    add(G::G8, "G8.03",
        kBlockhashCall + R"re(\s*(?!block\.number\b)[A-Za-z_]\w*(?:\.\w+)*(?:\[[^\[\];{}]*\])?\s*\))re",
        "blockhash(storedBlockNumber)");

    // G9: randomness vocabulary around keccak256 over block attributes.
    add(G::G9, "G9.01",
        R"re(\b(?i:\w*(?:rand|lucky|dice|roll|lotto|lottery|draw)\w*)\s*=(?!=)\s*)re" + kCastPrefix
            + R"re((?:keccak256|sha3)\s*\()re" + kArgs + kAttr,
        "random-named variable = keccak256(<block attr>...)");
    add(G::G9, "G9.02",
        R"re(\b(?:keccak256|sha3)\s*\()re" + kArgs + kAttr + R"re([^;{}]*?\b(?i:\w*(?:nonce|salt|seed|random|entropy)\w*)\b)re",
        "keccak256(<block attr>, nonce/salt/seed ...)");

    return p;
}

std::size_t group_index(PatternGroup g) noexcept
{
    return static_cast<std::size_t>(g) - 1;
}

bool token_at(std::string_view text, std::size_t pos, std::size_t len) noexcept
{
    const bool left_ok = pos == 0 || !is_identifier_char(text[pos - 1]);
    const bool right_ok = pos + len >= text.size() || !is_identifier_char(text[pos + len]);
    return left_ok && right_ok;
}

bool keyword_scan(std::string_view text)
{
    static constexpr std::array<std::string_view, 8> kSubstrings = {
        "block.timestamp", "blockhash",    "block.difficulty", "block.number",
        "block.coinbase",  "block.gaslimit", "block.prevrandao", "gasleft("};
    for (auto kw : kSubstrings) {
        if (text.find(kw) != std::string_view::npos) {
            return true;
        }
    }
    for (std::size_t pos = text.find("now"); pos != std::string_view::npos; pos = text.find("now", pos + 1)) {
        if (token_at(text, pos, 3)) {
            return true;
        }
    }
    return false;
}

} // namespace

struct PatternRegistry::Compiled
{
    boost::regex regex;
};

std::string_view to_string(PatternGroup g) noexcept
{
    static constexpr std::array<std::string_view, kGroupCount> kNames = {"G1", "G2", "G3", "G4", "G5",
                                                                         "G6", "G7", "G8", "G9"};
    return kNames[group_index(g)];
}

std::string_view group_title(PatternGroup g) noexcept
{
    static constexpr std::array<std::string_view, kGroupCount> kTitles = {
        "Direct modulo with block attributes",
        "Type cast from keccak256/sha3 to uint",
        "keccak256 hash with modulo operator",
        "keccak256 with block.blockhash",
        "blockhash as answer/comparison",
        "Seed/random variable with predictable source",
        "Winner selection using block attributes",
        "Stored block number and uint cast from blockhash",
        "Randomness context with keccak256",
    };
    return kTitles[group_index(g)];
}

std::optional<PatternGroup> parse_group(std::string_view text) noexcept
{
    if (text.size() == 2 && text[0] == 'G' && text[1] >= '1' && text[1] <= '9') {
        return static_cast<PatternGroup>(text[1] - '0');
    }
    return std::nullopt;
}

const PatternRegistry& PatternRegistry::instance()
{
    static const PatternRegistry registry;
    return registry;
}

PatternRegistry::PatternRegistry()
    : patterns_(build_catalog())
{
    std::array<std::size_t, kGroupCount> counts{};
    for (const auto& pattern : patterns_) {
        ++counts[group_index(pattern.group)];
        if (std::count_if(patterns_.begin(), patterns_.end(),
                          [&](const VulnPattern& other) { return other.pattern_id == pattern.pattern_id; })
            != 1) {
            throw std::logic_error("duplicate pattern id " + pattern.pattern_id);
        }
    }
    if (counts != kExpectedGroupSizes || patterns_.size() != kExpectedPatternCount) {
        throw std::logic_error("pattern registry cardinality does not match the nine-group catalog");
    }

    compiled_.reserve(patterns_.size());
    for (const auto& pattern : patterns_) {
        auto c = std::make_unique<Compiled>();
        c->regex.assign(pattern.expression, boost::regex::perl | boost::regex::optimize);
        compiled_.push_back(std::move(c));
    }
}

PatternRegistry::~PatternRegistry() = default;

std::size_t PatternRegistry::count(PatternGroup g) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(patterns_.begin(), patterns_.end(), [g](const VulnPattern& p) { return p.group == g; }));
}

const VulnPattern* PatternRegistry::find(std::string_view pattern_id) const noexcept
{
    for (const auto& pattern : patterns_) {
        if (pattern.pattern_id == pattern_id) {
            return &pattern;
        }
    }
    return nullptr;
}

std::vector<PatternRegistry::RawMatch> PatternRegistry::scan(const std::string& normalized) const
{
    std::vector<RawMatch> out;
    for (std::size_t k = 0; k < compiled_.size(); ++k) {
        const auto& re = compiled_[k]->regex;
        for (boost::sregex_iterator it(normalized.begin(), normalized.end(), re), end; it != end; ++it) {
            const auto& m = *it;
            if (m.length() == 0) {
                continue;
            }
            const auto begin = static_cast<std::size_t>(m.position());
            out.push_back(RawMatch{k, begin, begin + static_cast<std::size_t>(m.length())});
        }
    }
    return out;
}

bool PatternRegistry::matches_whole(std::string_view pattern_id, const std::string& text) const
{
    for (std::size_t k = 0; k < patterns_.size(); ++k) {
        if (patterns_[k].pattern_id == pattern_id) {
            return boost::regex_match(text, compiled_[k]->regex);
        }
    }
    return false;
}

bool block_attribute_present(std::string_view source_text)
{
    return keyword_scan(neutralize(source_text));
}

bool block_attribute_present(const SourceText& source)
{
    return keyword_scan(source.neutralized());
}

std::vector<PatternHit> match_vulnerability_patterns(const SourceText& source, const ContractModel& model)
{
    const auto& registry = PatternRegistry::instance();
    std::vector<PatternHit> hits;
    if (!keyword_scan(source.neutralized())) {
        return hits;
    }
    for (const auto& raw : registry.scan(source.normalized())) {
        const VulnPattern& pattern = registry.patterns()[raw.pattern_index];
        PatternHit hit;
        hit.pattern_id = pattern.pattern_id;
        hit.group = pattern.group;
        hit.span = source.to_original(raw.begin, raw.end);
        hit.line = source.line_of(hit.span.begin);
        if (const ContractUnit* unit = model.enclosing_contract(hit.span.begin)) {
            hit.enclosing_contract = unit->name;
            if (const FunctionRecord* fn = unit->enclosing_function(hit.span.begin);
                fn != nullptr && fn->body_span.contains(hit.span)) {
                hit.enclosing_function = fn->name;
            }
        }
        hits.push_back(std::move(hit));
    }
    std::sort(hits.begin(), hits.end(), [](const PatternHit& a, const PatternHit& b) {
        if (a.span.begin != b.span.begin) {
            return a.span.begin < b.span.begin;
        }
        return a.pattern_id < b.pattern_id;
    });
    return hits;
}

std::vector<PatternHit> match_vulnerability_patterns(std::string_view source_text, const ContractModel& model)
{
    return match_vulnerability_patterns(SourceText(std::string(source_text)), model);
}

} // namespace randsentry
