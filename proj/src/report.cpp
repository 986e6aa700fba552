#include "randsentry/report.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <utility>

namespace randsentry {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

int severity(const ContractResult& r) noexcept
{
    const int base = static_cast<int>(r.final_label) * 10;
    return r.final_level ? base + static_cast<int>(*r.final_level) : base;
}

ContractModel single_unit_model(const ContractModel& model, const ContractUnit& unit)
{
    ContractModel scoped;
    scoped.file_id = model.file_id;
    scoped.raw_length = model.raw_length;
    scoped.contracts.push_back(unit);
    return scoped;
}

/// Original text with every contract span blanked (newlines kept).
std::string outside_contracts(const std::string& original, const ContractModel& model)
{
    std::string out = original;
    for (const auto& unit : model.contracts) {
        for (std::size_t i = unit.span.begin; i < unit.span.end; ++i) {
            if (out[i] != '\n') {
                out[i] = ' ';
            }
        }
    }
    return out;
}

struct PhaseClock
{
    std::array<std::optional<double>, 5>& timings;

    void add(int phase, Clock::time_point since)
    {
        auto& slot = timings[static_cast<std::size_t>(phase - 1)];
        slot = slot.value_or(0.0) + elapsed_ms(since);
    }
};

ContractResult assess_scope(const SourceText& source, const ContractModel& scope_model, const ContractUnit& unit,
                            std::span<const PatternHit> file_hits, PhaseClock& clock)
{
    ContractResult result;
    result.name = unit.name;

    auto t = Clock::now();
    const Labeling labeling = phase2_label(source, scope_model, file_hits);
    clock.add(2, t);
    result.labeling = labeling.kind;
    result.phase_reached = 2;
    if (labeling.kind == Labeling::Kind::NoMatch) {
        result.final_label = FinalLabel::NoMatch;
        return result;
    }

    t = Clock::now();
    RiskAssessment risk = phase3_classify(labeling, source, scope_model);
    clock.add(3, t);
    result.phase_reached = 3;
    const RiskLevel level = risk.level;
    const std::optional<MitigationKind> mitigation = risk.mitigation;
    result.risk = std::move(risk);
    if (level == RiskLevel::Safe) {
        result.final_label = FinalLabel::Safe;
        result.final_level = RiskLevel::Safe;
        return result;
    }
    if (level == RiskLevel::HighRisk) {
        result.final_label = FinalLabel::Vulnerable;
        result.final_level = RiskLevel::HighRisk;
        return result;
    }

    t = Clock::now();
    ValidationVerdict verdict = validate(unit, source, labeling.hits, *mitigation);
    clock.add(4, t);
    result.phase_reached = 4;
    const Verdict value = verdict.verdict;
    result.verdict = std::move(verdict);
    if (value == Verdict::Correct) {
        result.final_label = FinalLabel::Vulnerable;
        result.final_level = level;
        if (!result.verdict->unreachable.empty()) {
            result.note = "vulnerable code only in functions with no public caller";
        }
        return result;
    }
    if (value == Verdict::FalsePositive) {
        result.final_label = FinalLabel::Vulnerable;
        result.final_level = RiskLevel::HighRisk;
        result.note = "reclassified from " + std::string(to_string(level))
                    + ": the credited mitigation does not guard the vulnerable function(s)";
        return result;
    }

    t = Clock::now();
    ContextResult context;
    context.category = classify_context(source, scope_model);
    context.disposition = refine(context.category);
    clock.add(5, t);
    result.phase_reached = 5;
    switch (context.disposition.kind) {
    case FinalDisposition::Kind::Excluded:
        result.final_label = FinalLabel::Excluded;
        result.note = context.disposition.reason;
        break;
    case FinalDisposition::Kind::ConfirmedHighRisk:
        result.final_label = FinalLabel::Vulnerable;
        result.final_level = RiskLevel::HighRisk;
        result.note = "pattern outside functions in a lottery context";
        break;
    case FinalDisposition::Kind::NeedsManualReview:
        result.final_label = FinalLabel::NeedsManualReview;
        result.note = "pattern outside functions; context inconclusive";
        break;
    }
    result.context = std::move(context);
    return result;
}

nlohmann::json optional_string(const std::optional<std::string>& s)
{
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

nlohmann::json risk_json(const std::optional<RiskAssessment>& risk)
{
    if (!risk) {
        return nullptr;
    }
    return {
        {"level", to_string(risk->level)},
        {"mitigation", risk->mitigation ? nlohmann::json(to_string(*risk->mitigation)) : nlohmann::json(nullptr)},
        {"attackers",
         {{"external", risk->attackers.external}, {"miner", risk->attackers.miner}, {"owner", risk->attackers.owner}}},
    };
}

nlohmann::json verdict_json(const std::optional<ValidationVerdict>& v)
{
    if (!v) {
        return nullptr;
    }
    nlohmann::json offenders = nlohmann::json::array();
    for (const auto& o : v->offenders) {
        offenders.push_back({{"function", o.function},
                             {"route", to_string(o.route)},
                             {"reason", o.reason},
                             {"unguarded_callers", o.unguarded_callers}});
    }
    return {
        {"value", to_string(v->verdict)},
        {"mitigation", to_string(v->checked_mitigation)},
        {"offenders", std::move(offenders)},
        {"vulnerable_functions", v->vulnerable_functions},
        {"unreachable", v->unreachable},
        {"deployment_only", v->deployment_only},
    };
}

nlohmann::json context_json(const std::optional<ContextResult>& c)
{
    if (!c) {
        return nullptr;
    }
    return {
        {"category", to_string(c->category.kind)},
        {"mining_keywords", c->category.mining_count},
        {"lottery_keywords", c->category.lottery_count},
        {"disposition", to_string(c->disposition.kind)},
        {"reason", c->disposition.reason},
    };
}

nlohmann::json level_json(const std::optional<RiskLevel>& level)
{
    return level ? nlohmann::json(to_string(*level)) : nlohmann::json(nullptr);
}

std::optional<RiskLevel> level_from_json(const nlohmann::json& j)
{
    return j.is_string() ? parse_risk_level(j.get<std::string>()) : std::nullopt;
}

Labeling::Kind labeling_from_json(const nlohmann::json& j)
{
    for (auto kind : {Labeling::Kind::Safe, Labeling::Kind::Vulnerable, Labeling::Kind::NoMatch}) {
        if (j.is_string() && to_string(kind) == j.get<std::string>()) {
            return kind;
        }
    }
    return Labeling::Kind::NoMatch;
}

std::optional<RiskAssessment> risk_from_json(const nlohmann::json& risk)
{
    if (!risk.is_object()) {
        return std::nullopt;
    }
    RiskAssessment a;
    a.level = parse_risk_level(risk.at("level").get<std::string>()).value_or(RiskLevel::HighRisk);
    if (risk.at("mitigation").is_string()) {
        a.mitigation = parse_mitigation(risk.at("mitigation").get<std::string>());
    }
    a.attackers = attacker_matrix(a.level);
    return a;
}

std::optional<ValidationVerdict> verdict_from_json(const nlohmann::json& v)
{
    if (!v.is_object()) {
        return std::nullopt;
    }
    ValidationVerdict vv;
    const auto value = v.at("value").get<std::string>();
    for (auto candidate : {Verdict::Correct, Verdict::FalsePositive, Verdict::NoPatternInFunctions}) {
        if (to_string(candidate) == value) {
            vv.verdict = candidate;
        }
    }
    vv.checked_mitigation = parse_mitigation(v.value("mitigation", "")).value_or(MitigationKind::AccessControl);
    for (const auto& o : v.value("offenders", nlohmann::json::array())) {
        vv.offenders.push_back(Offender{o.value("function", ""),
                                        o.value("route", "") == to_string(OffenseRoute::Direct)
                                            ? OffenseRoute::Direct
                                            : OffenseRoute::CallChain,
                                        o.value("reason", ""),
                                        o.value("unguarded_callers", std::vector<std::string>{})});
    }
    vv.vulnerable_functions = v.value("vulnerable_functions", std::vector<std::string>{});
    vv.unreachable = v.value("unreachable", std::vector<std::string>{});
    vv.deployment_only = v.value("deployment_only", std::vector<std::string>{});
    return vv;
}

std::optional<ContextResult> context_from_json(const nlohmann::json& c)
{
    if (!c.is_object()) {
        return std::nullopt;
    }
    ContextResult cr;
    const auto cat = c.at("category").get<std::string>();
    for (auto kind : {ContextKind::Mining, ContextKind::Lottery, ContextKind::Unknown}) {
        if (to_string(kind) == cat) {
            cr.category.kind = kind;
        }
    }
    cr.category.mining_count = c.value("mining_keywords", std::size_t{0});
    cr.category.lottery_count = c.value("lottery_keywords", std::size_t{0});
    cr.disposition = refine(cr.category);
    cr.disposition.reason = c.value("reason", cr.disposition.reason);
    return cr;
}

} // namespace

std::string_view to_string(FinalLabel label) noexcept
{
    switch (label) {
    case FinalLabel::NotCandidate:
        return "NOT_CANDIDATE";
    case FinalLabel::ParseError:
        return "PARSE_ERROR";
    case FinalLabel::NoMatch:
        return "NO_MATCH";
    case FinalLabel::Excluded:
        return "EXCLUDED";
    case FinalLabel::Safe:
        return "SAFE";
    case FinalLabel::NeedsManualReview:
        return "NEEDS_MANUAL_REVIEW";
    case FinalLabel::Vulnerable:
        return "VULNERABLE";
    }
    return "NOT_CANDIDATE";
}

std::optional<FinalLabel> parse_final_label(std::string_view text) noexcept
{
    for (auto label : {FinalLabel::NotCandidate, FinalLabel::ParseError, FinalLabel::NoMatch, FinalLabel::Excluded,
                       FinalLabel::Safe, FinalLabel::NeedsManualReview, FinalLabel::Vulnerable}) {
        if (to_string(label) == text) {
            return label;
        }
    }
    return std::nullopt;
}

bool AnalysisReport::has_finding() const noexcept
{
    if (final_label == FinalLabel::Vulnerable && final_level == RiskLevel::HighRisk) {
        return true;
    }
    if (verdict && verdict->verdict == Verdict::FalsePositive) {
        return true;
    }
    for (const auto& c : contracts) {
        if ((c.final_label == FinalLabel::Vulnerable && c.final_level == RiskLevel::HighRisk)
            || (c.verdict && c.verdict->verdict == Verdict::FalsePositive)) {
            return true;
        }
    }
    return false;
}

bool AnalysisReport::predicted_vulnerable() const noexcept
{
    return final_label == FinalLabel::Vulnerable || final_label == FinalLabel::NeedsManualReview;
}

AnalysisReport analyze_source(std::string source_text, std::string file_id)
{
    AnalysisReport report;
    report.file_id = std::move(file_id);
    PhaseClock clock{report.timings_ms};

    auto t = Clock::now();
    const SourceText source(std::move(source_text));
    const bool candidate = phase1_filter(source);
    clock.add(1, t);
    report.phase_reached = 1;
    if (!candidate) {
        report.final_label = FinalLabel::NotCandidate;
        return report;
    }

    t = Clock::now();
    ContractModel model;
    try {
        model = parse_neutralized(source.neutralized(), report.file_id);
    } catch (const UnbalancedBraces& e) {
        clock.add(2, t);
        report.phase_reached = 2;
        report.final_label = FinalLabel::ParseError;
        report.error = e.what();
        return report;
    }
    report.hits = match_vulnerability_patterns(source, model);
    clock.add(2, t);

    if (model.contracts.empty()) {
        const ContractUnit file_scope;
        report.contracts.push_back(assess_scope(source, model, file_scope, report.hits, clock));
    } else {
        for (const auto& unit : model.contracts) {
            report.contracts.push_back(
                assess_scope(source, single_unit_model(model, unit), unit, report.hits, clock));
        }
        std::vector<PatternHit> stray;
        for (const auto& hit : report.hits) {
            if (!hit.enclosing_contract) {
                stray.push_back(hit);
            }
        }
        if (!stray.empty()) {
            const SourceText outside(outside_contracts(source.original(), model));
            ContractModel empty_model;
            empty_model.file_id = model.file_id;
            empty_model.raw_length = model.raw_length;
            const ContractUnit file_scope;
            report.contracts.push_back(assess_scope(outside, empty_model, file_scope, stray, clock));
        }
    }

    const ContractResult* worst = &report.contracts.front();
    for (const auto& c : report.contracts) {
        if (severity(c) > severity(*worst)) {
            worst = &c;
        }
    }
    report.phase_reached = 2;
    for (const auto& c : report.contracts) {
        report.phase_reached = std::max(report.phase_reached, c.phase_reached);
    }
    report.labeling = worst->labeling;
    report.risk = worst->risk;
    report.verdict = worst->verdict;
    report.context = worst->context;
    report.final_label = worst->final_label;
    report.final_level = worst->final_level;
    report.note = worst->note;
    return report;
}

nlohmann::json to_json(const PatternHit& hit)
{
    return {
        {"pattern_id", hit.pattern_id},
        {"group", to_string(hit.group)},
        {"line", hit.line},
        {"function", optional_string(hit.enclosing_function)},
        {"contract", optional_string(hit.enclosing_contract)},
        {"span", {hit.span.begin, hit.span.end}},
    };
}

nlohmann::json to_json(const AnalysisReport& report, bool include_timings)
{
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& hit : report.hits) {
        hits.push_back(to_json(hit));
    }
    nlohmann::json contracts = nlohmann::json::array();
    for (const auto& c : report.contracts) {
        contracts.push_back({
            {"name", c.name},
            {"phase_reached", c.phase_reached},
            {"labeling", to_string(c.labeling)},
            {"final_label", to_string(c.final_label)},
            {"final_risk_level", level_json(c.final_level)},
            {"risk", risk_json(c.risk)},
            {"verdict", verdict_json(c.verdict)},
            {"context", context_json(c.context)},
            {"note", c.note},
        });
    }
    nlohmann::json j = {
        {"file_id", report.file_id},
        {"phase_reached", report.phase_reached},
        {"labeling", report.labeling ? nlohmann::json(to_string(*report.labeling)) : nlohmann::json(nullptr)},
        {"final_label", to_string(report.final_label)},
        {"final_risk_level", level_json(report.final_level)},
        {"risk", risk_json(report.risk)},
        {"verdict", verdict_json(report.verdict)},
        {"context", context_json(report.context)},
        {"hits", std::move(hits)},
        {"contracts", std::move(contracts)},
        {"error", optional_string(report.error)},
        {"note", report.note},
    };
    if (include_timings) {
        nlohmann::json timings = nlohmann::json::object();
        for (std::size_t i = 0; i < report.timings_ms.size(); ++i) {
            const auto& t = report.timings_ms[i];
            timings["phase" + std::to_string(i + 1)] = t ? nlohmann::json(*t) : nlohmann::json(nullptr);
        }
        j["timings_ms"] = std::move(timings);
    }
    return j;
}

AnalysisReport report_from_json(const nlohmann::json& j)
{
    AnalysisReport r;
    r.file_id = j.at("file_id").get<std::string>();
    r.phase_reached = j.value("phase_reached", 1);
    if (const auto& labeling = j.value("labeling", nlohmann::json()); labeling.is_string()) {
        r.labeling = labeling_from_json(labeling);
    }
    r.final_label = parse_final_label(j.at("final_label").get<std::string>()).value_or(FinalLabel::NotCandidate);
    r.final_level = level_from_json(j.value("final_risk_level", nlohmann::json()));
    r.risk = risk_from_json(j.value("risk", nlohmann::json()));
    r.verdict = verdict_from_json(j.value("verdict", nlohmann::json()));
    r.context = context_from_json(j.value("context", nlohmann::json()));
    for (const auto& h : j.value("hits", nlohmann::json::array())) {
        PatternHit hit;
        hit.pattern_id = h.at("pattern_id").get<std::string>();
        hit.group = parse_group(h.at("group").get<std::string>()).value_or(PatternGroup::G1);
        hit.line = h.value("line", std::size_t{0});
        if (h.at("function").is_string()) {
            hit.enclosing_function = h.at("function").get<std::string>();
        }
        if (h.value("contract", nlohmann::json()).is_string()) {
            hit.enclosing_contract = h.at("contract").get<std::string>();
        }
        if (const auto& span = h.value("span", nlohmann::json()); span.is_array() && span.size() == 2) {
            hit.span = Span{span[0].get<std::size_t>(), span[1].get<std::size_t>()};
        }
        r.hits.push_back(std::move(hit));
    }
    for (const auto& c : j.value("contracts", nlohmann::json::array())) {
        ContractResult cr;
        cr.name = c.value("name", "");
        cr.phase_reached = c.value("phase_reached", 2);
        cr.labeling = labeling_from_json(c.value("labeling", nlohmann::json()));
        cr.final_label = parse_final_label(c.value("final_label", "")).value_or(FinalLabel::NoMatch);
        cr.final_level = level_from_json(c.value("final_risk_level", nlohmann::json()));
        cr.risk = risk_from_json(c.value("risk", nlohmann::json()));
        cr.verdict = verdict_from_json(c.value("verdict", nlohmann::json()));
        cr.context = context_from_json(c.value("context", nlohmann::json()));
        cr.note = c.value("note", "");
        r.contracts.push_back(std::move(cr));
    }
    if (const auto& error = j.value("error", nlohmann::json()); error.is_string()) {
        r.error = error.get<std::string>();
    }
    r.note = j.value("note", "");
    if (const auto& timings = j.value("timings_ms", nlohmann::json()); timings.is_object()) {
        for (std::size_t i = 0; i < r.timings_ms.size(); ++i) {
            const auto& t = timings.value("phase" + std::to_string(i + 1), nlohmann::json());
            if (t.is_number()) {
                r.timings_ms[i] = t.get<double>();
            }
        }
    }
    return r;
}

std::string to_text(const AnalysisReport& report)
{
    std::ostringstream os;
    os << report.file_id << ": " << to_string(report.final_label);
    if (report.final_level) {
        os << " (" << to_string(*report.final_level) << ")";
    }
    os << "  [phase " << report.phase_reached << "]\n";
    if (report.error) {
        os << "  error: " << *report.error << "\n";
    }
    if (report.risk) {
        os << "  initial risk: " << to_string(report.risk->level);
        if (report.risk->mitigation) {
            os << " via " << to_string(*report.risk->mitigation);
        }
        os << "\n";
    }
    if (report.verdict) {
        os << "  validation: " << to_string(report.verdict->verdict) << " ("
           << to_string(report.verdict->checked_mitigation) << ")\n";
        for (const auto& o : report.verdict->offenders) {
            os << "    offender " << o.function << " [" << to_string(o.route) << "]: " << o.reason << "\n";
        }
        for (const auto& u : report.verdict->unreachable) {
            os << "    unreachable " << u << "\n";
        }
    }
    if (report.context) {
        os << "  context: " << to_string(report.context->category.kind) << " -> "
           << to_string(report.context->disposition.kind) << "\n";
    }
    if (!report.note.empty()) {
        os << "  note: " << report.note << "\n";
    }
    if (!report.hits.empty()) {
        std::vector<std::string_view> groups;
        for (const auto& hit : report.hits) {
            const auto g = to_string(hit.group);
            if (std::find(groups.begin(), groups.end(), g) == groups.end()) {
                groups.push_back(g);
            }
        }
        std::sort(groups.begin(), groups.end());
        os << "  groups:";
        for (std::size_t i = 0; i < groups.size(); ++i) {
            os << (i == 0 ? " " : ",") << groups[i];
        }
        os << "\n";
        for (const auto& hit : report.hits) {
            os << "  " << hit.pattern_id << "  line " << hit.line << "  "
               << (hit.enclosing_function ? *hit.enclosing_function : std::string("<outside functions>")) << "\n";
        }
    }
    return os.str();
}

} // namespace randsentry
