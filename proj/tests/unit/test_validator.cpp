#include "generator.hpp"
#include "test_util.hpp"
#include "verdict_cases.hpp"

#include "randsentry/validator.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace randsentry;

namespace {

std::string fixture_text(const std::string& rel)
{
    return testutil::read_file(testutil::fixture(rel));
}

std::vector<oracle::Node> nodes_of(const gen::ContractSpec& spec)
{
    std::vector<oracle::Node> nodes;
    for (const auto& f : spec.functions) {
        oracle::Node n;
        n.name = f.name;
        n.constructor = f.is_constructor;
        n.entry = !f.is_constructor && (f.visibility == "public" || f.visibility == "external");
        n.guarded = std::find(f.modifiers.begin(), f.modifiers.end(), "onlyOwner") != f.modifiers.end();
        n.vulnerable = f.vulnerable;
        n.calls = f.calls;
        nodes.push_back(std::move(n));
    }
    return nodes;
}

gen::Options verdict_options()
{
    gen::Options options;
    options.max_functions = 8;
    options.vulnerable_probability = 0.35;
    options.guard_probability = 0.4;
    options.call_probability = 0.2;
    options.with_constructor = true;
    return options;
}

std::vector<std::string> sorted(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST(Verdict, Strings)
{
    EXPECT_EQ(to_string(Verdict::Correct), "CORRECT");
    EXPECT_EQ(to_string(Verdict::FalsePositive), "FALSE_POSITIVE");
    EXPECT_EQ(to_string(Verdict::NoPatternInFunctions), "NO_PATTERN_IN_FUNCTIONS");
    EXPECT_EQ(to_string(OffenseRoute::CallChain), "via call-chain");
}

TEST(Validate, HandcraftedFixtures)
{
    for (const auto& c : verdict_cases::cases()) {
        SCOPED_TRACE(c.label);
        const auto v = verdict_cases::validate_source(fixture_text(c.file));
        EXPECT_EQ(v.verdict, c.expected);
        EXPECT_EQ(verdict_cases::offender_names(v), c.offenders);
        EXPECT_EQ(sorted(v.unreachable), c.unreachable);
        EXPECT_EQ(v.checked_mitigation, MitigationKind::AccessControl);

        const auto o = oracle::evaluate(c.graph, c.stray_hits);
        EXPECT_EQ(verdict_cases::to_verdict(o.outcome), v.verdict);
        EXPECT_EQ(o.offenders, verdict_cases::offender_names(v));
        EXPECT_EQ(o.unreachable, sorted(v.unreachable));
    }
}

TEST(Validate, CallChainOffenderNamesUnguardedCaller)
{
    const auto v = verdict_cases::validate_source(fixture_text("verdict/d_internal_unguarded_caller.sol"));
    ASSERT_EQ(v.offenders.size(), 1U);
    EXPECT_EQ(v.offenders[0].route, OffenseRoute::CallChain);
    EXPECT_EQ(v.offenders[0].unguarded_callers, std::vector<std::string>{"play"});
    EXPECT_NE(v.offenders[0].reason.find("play"), std::string::npos);
}

TEST(Validate, TxOriginExpectation)
{
    const auto src = fixture_text("ground_truth/v20_stored_block_txorigin.sol");
    const auto v = verdict_cases::validate_source(src, MitigationKind::TxOriginCheck);
    EXPECT_EQ(v.verdict, Verdict::FalsePositive);
    EXPECT_EQ(verdict_cases::offender_names(v), std::vector<std::string>{"claim"});
    const auto ok = verdict_cases::validate_source(fixture_text("ground_truth/v07_narrow_cast_txorigin.sol"),
                                                   MitigationKind::TxOriginCheck);
    EXPECT_EQ(ok.verdict, Verdict::Correct);
}

TEST(Validate, ConstructorHitsAreDeploymentOnly)
{
    const std::string src = "contract K {\n"
                            "  address owner;\n"
                            "  uint seed;\n"
                            "  modifier onlyOwner() { require(msg.sender == owner); _; }\n"
                            "  constructor() { seed = block.timestamp % 10; }\n"
                            "  function f() public { }\n"
                            "}\n";
    const auto v = verdict_cases::validate_source(src);
    EXPECT_EQ(v.verdict, Verdict::Correct);
    EXPECT_EQ(v.deployment_only, std::vector<std::string>{"constructor"});
}

TEST(Validate, RejectsSafeMechanismExpectation)
{
    const auto src = fixture_text("verdict/a_modifier_on_wrong_function.sol");
    EXPECT_THROW((void)verdict_cases::validate_source(src, MitigationKind::VRF), std::invalid_argument);
}

TEST(Validate, AgreesWithReachabilityOracleOnGeneratedContracts)
{
    const auto options = verdict_options();
    std::mt19937_64 rng(999);
    int false_positives = 0;
    for (int k = 0; k < 300; ++k) {
        const auto spec = gen::random_spec(rng, options);
        const auto v = verdict_cases::validate_source(gen::render(spec, options));
        const auto o = oracle::evaluate(nodes_of(spec));
        ASSERT_EQ(verdict_cases::to_verdict(o.outcome), v.verdict) << gen::render(spec, options);
        EXPECT_EQ(o.offenders, verdict_cases::offender_names(v));
        EXPECT_EQ(o.unreachable, sorted(v.unreachable));
        EXPECT_EQ(v.verdict == Verdict::FalsePositive, !v.offenders.empty());
        false_positives += v.verdict == Verdict::FalsePositive ? 1 : 0;
    }
    // The generator must exercise both outcomes.
    EXPECT_GT(false_positives, 30);
    EXPECT_LT(false_positives, 270);
}

TEST(Validate, InvariantUnderFunctionReordering)
{
    const auto options = verdict_options();
    std::mt19937_64 rng(4242);
    for (int k = 0; k < 100; ++k) {
        auto spec = gen::random_spec(rng, options);
        const auto before = verdict_cases::validate_source(gen::render(spec, options));
        std::shuffle(spec.functions.begin(), spec.functions.end(), rng);
        const auto after = verdict_cases::validate_source(gen::render(spec, options));
        EXPECT_EQ(before.verdict, after.verdict);
        EXPECT_EQ(verdict_cases::offender_names(before), verdict_cases::offender_names(after));
        EXPECT_EQ(sorted(before.unreachable), sorted(after.unreachable));
    }
}

TEST(Validate, GuardingOffendersFlipsToCorrect)
{
    const auto options = verdict_options();
    std::mt19937_64 rng(77);
    int flipped = 0;
    for (int k = 0; k < 150; ++k) {
        auto spec = gen::random_spec(rng, options);
        const auto v = verdict_cases::validate_source(gen::render(spec, options));
        if (v.verdict != Verdict::FalsePositive) {
            continue;
        }
        const auto to_guard = verdict_cases::functions_to_guard(v);
        for (auto& f : spec.functions) {
            if (std::find(to_guard.begin(), to_guard.end(), f.name) != to_guard.end()) {
                f.modifiers.insert(f.modifiers.begin(), "onlyOwner");
            }
        }
        EXPECT_EQ(verdict_cases::validate_source(gen::render(spec, options)).verdict, Verdict::Correct);
        ++flipped;
    }
    EXPECT_GT(flipped, 10);
}

TEST(Validate, MetamorphicOnFixturesAAndD)
{
    for (const std::string file : {"verdict/a_modifier_on_wrong_function.sol", "verdict/d_internal_unguarded_caller.sol"}) {
        SCOPED_TRACE(file);
        const auto original = fixture_text(file);
        const auto v = verdict_cases::validate_source(original);
        ASSERT_EQ(v.verdict, Verdict::FalsePositive);
        std::string guarded = original;
        for (const auto& name : verdict_cases::functions_to_guard(v)) {
            guarded = verdict_cases::add_modifier(guarded, name, "onlyOwner");
        }
        EXPECT_EQ(verdict_cases::validate_source(guarded).verdict, Verdict::Correct);
        std::string restored = guarded;
        for (const auto& name : verdict_cases::functions_to_guard(v)) {
            restored = verdict_cases::remove_modifier(restored, name, "onlyOwner");
        }
        EXPECT_EQ(restored, original);
        const auto back = verdict_cases::validate_source(restored);
        EXPECT_EQ(back.verdict, Verdict::FalsePositive);
        EXPECT_EQ(verdict_cases::offender_names(back), verdict_cases::offender_names(v));
    }
}

TEST(Validate, NoPatternOnlyWhenAllHitsOutsideFunctions)
{
    for (const auto& entry : std::filesystem::recursive_directory_iterator(testutil::fixture(""))) {
        if (entry.path().extension() != ".sol") {
            continue;
        }
        const auto src = testutil::read_file(entry.path());
        const SourceText text(src);
        const auto model = parse_contract(src, "x");
        for (const auto& unit : model.contracts) {
            std::vector<PatternHit> hits;
            for (const auto& h : match_vulnerability_patterns(text, model)) {
                if (unit.span.contains(h.span)) {
                    hits.push_back(h);
                }
            }
            const auto v = validate(unit, text, hits, MitigationKind::AccessControl);
            const bool all_outside = std::all_of(hits.begin(), hits.end(),
                                                 [](const PatternHit& h) { return !h.enclosing_function; });
            EXPECT_EQ(v.verdict == Verdict::NoPatternInFunctions, !hits.empty() && all_outside) << entry.path();
        }
    }
}
