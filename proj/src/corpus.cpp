#include "randsentry/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace randsentry {

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
}

std::string csv_field(std::string_view value)
{
    if (value.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(value);
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    for (auto& f : fields) {
        const auto first = f.find_first_not_of(" \t");
        const auto last = f.find_last_not_of(" \t");
        f = first == std::string::npos ? std::string() : f.substr(first, last - first + 1);
    }
    return fields;
}

std::string groups_of(const AnalysisReport& r)
{
    std::set<std::string_view> groups;
    for (const auto& hit : r.hits) {
        groups.insert(to_string(hit.group));
    }
    std::string out;
    for (auto g : groups) {
        if (!out.empty()) {
            out += ';';
        }
        out += g;
    }
    return out;
}

std::string format_ratio(const std::optional<double>& v)
{
    if (!v) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

} // namespace

MissingReport::MissingReport(std::string file_id)
    : std::runtime_error("no report for ground-truth file '" + file_id + "'")
    , file_id_(std::move(file_id))
{}

bool CorpusSummary::has_finding() const noexcept
{
    return std::any_of(reports.begin(), reports.end(), [](const AnalysisReport& r) { return r.has_finding(); });
}

std::vector<std::string> discover_sources(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError("not a readable directory: " + dir.string());
    }
    std::vector<std::string> ids;
    fs::recursive_directory_iterator it(dir, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    }
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            throw IoError("cannot list " + dir.string() + ": " + ec.message());
        }
        if (it->is_regular_file() && it->path().extension() == ".sol") {
            ids.push_back(fs::relative(it->path(), dir).generic_string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

CorpusSummary run_corpus(const fs::path& directory, const CorpusConfig& config)
{
    const auto ids = discover_sources(directory);
    CorpusSummary summary;
    summary.reports.resize(ids.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < ids.size(); k = next++) {
            AnalysisReport& slot = summary.reports[k];
            try {
                slot = analyze_source(read_file(directory / ids[k]), ids[k]);
            } catch (const std::exception& e) {
                slot = AnalysisReport{};
                slot.file_id = ids[k];
                slot.final_label = FinalLabel::ParseError;
                slot.error = e.what();
            }
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, std::max<std::size_t>(1, ids.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t t = 0; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    if (!config.output_dir.empty()) {
        write_outputs(summary, config.output_dir);
    }
    return summary;
}

nlohmann::json summary_json(std::span<const AnalysisReport> reports)
{
    nlohmann::json labels = nlohmann::json::object();
    for (auto label : {FinalLabel::NotCandidate, FinalLabel::ParseError, FinalLabel::NoMatch, FinalLabel::Excluded,
                       FinalLabel::Safe, FinalLabel::NeedsManualReview, FinalLabel::Vulnerable}) {
        labels[std::string(to_string(label))] = 0;
    }
    nlohmann::json levels = nlohmann::json::object();
    for (auto level : {RiskLevel::Safe, RiskLevel::LowRisk, RiskLevel::MediumRisk, RiskLevel::HighRisk}) {
        levels[std::string(to_string(level))] = 0;
    }
    nlohmann::json verdicts = nlohmann::json::object();
    for (auto v : {Verdict::Correct, Verdict::FalsePositive, Verdict::NoPatternInFunctions}) {
        verdicts[std::string(to_string(v))] = 0;
    }
    nlohmann::json groups = nlohmann::json::object();
    for (std::size_t g = 1; g <= kGroupCount; ++g) {
        groups[std::string(to_string(static_cast<PatternGroup>(g)))] = 0;
    }
    nlohmann::json manual = nlohmann::json::array();
    nlohmann::json errors = nlohmann::json::array();

    for (const auto& r : reports) {
        labels[std::string(to_string(r.final_label))] = labels[std::string(to_string(r.final_label))].get<int>() + 1;
        if (r.final_level) {
            auto& slot = levels[std::string(to_string(*r.final_level))];
            slot = slot.get<int>() + 1;
        }
        if (r.verdict) {
            auto& slot = verdicts[std::string(to_string(r.verdict->verdict))];
            slot = slot.get<int>() + 1;
        }
        std::set<PatternGroup> seen;
        for (const auto& hit : r.hits) {
            seen.insert(hit.group);
        }
        for (auto g : seen) {
            auto& slot = groups[std::string(to_string(g))];
            slot = slot.get<int>() + 1;
        }
        if (r.final_label == FinalLabel::NeedsManualReview) {
            manual.push_back(r.file_id);
        }
        if (r.final_label == FinalLabel::ParseError) {
            errors.push_back({{"file_id", r.file_id}, {"error", r.error.value_or("")}});
        }
    }
    return {
        {"files", reports.size()},
        {"final_labels", std::move(labels)},
        {"risk_levels", std::move(levels)},
        {"verdicts", std::move(verdicts)},
        {"files_per_group", std::move(groups)},
        {"needs_manual_review", std::move(manual)},
        {"parse_errors", std::move(errors)},
    };
}

std::string summary_csv(std::span<const AnalysisReport> reports)
{
    std::ostringstream os;
    os << "file_id,final_label,risk_level,verdict,n_hits,groups,context\n";
    for (const auto& r : reports) {
        os << csv_field(r.file_id) << ',' << to_string(r.final_label) << ','
           << (r.final_level ? to_string(*r.final_level) : "") << ','
           << (r.verdict ? to_string(r.verdict->verdict) : "") << ',' << r.hits.size() << ',' << groups_of(r) << ','
           << (r.context ? to_string(r.context->category.kind) : "") << '\n';
    }
    return os.str();
}

void write_outputs(const CorpusSummary& summary, const fs::path& output_dir)
{
    std::error_code ec;
    fs::create_directories(output_dir / "reports", ec);
    if (ec) {
        throw IoError("cannot create " + (output_dir / "reports").string() + ": " + ec.message());
    }
    for (const auto& r : summary.reports) {
        const fs::path target = output_dir / "reports" / fs::path(r.file_id + ".json");
        fs::create_directories(target.parent_path(), ec);
        write_file(target, to_json(r).dump(2) + "\n");
    }
    write_file(output_dir / "summary.json", summary_json(summary.reports).dump(2) + "\n");
    write_file(output_dir / "summary.csv", summary_csv(summary.reports));
}

std::vector<AnalysisReport> load_reports(const fs::path& dir)
{
    fs::path root = dir;
    std::error_code ec;
    if (fs::is_directory(dir / "reports", ec)) {
        root = dir / "reports";
    }
    if (!fs::is_directory(root, ec)) {
        throw IoError("not a readable directory: " + root.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json"
            && entry.path().filename() != "summary.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<AnalysisReport> reports;
    for (const auto& f : files) {
        try {
            reports.push_back(report_from_json(nlohmann::json::parse(read_file(f))));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed report " + f.string() + ": " + e.what());
        }
    }
    return reports;
}

std::map<std::string, GroundTruthLabel> load_ground_truth(const fs::path& csv)
{
    std::istringstream in(read_file(csv));
    std::map<std::string, GroundTruthLabel> out;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (header) {
            header = false;
            if (fields.size() >= 2 && fields[0] == "file_id") {
                continue;
            }
        }
        if (fields.size() < 2) {
            throw IoError(csv.string() + ":" + std::to_string(line_no) + ": expected file_id,label");
        }
        if (fields[1] == "vulnerable") {
            out[fields[0]] = GroundTruthLabel::Vulnerable;
        } else if (fields[1] == "safe") {
            out[fields[0]] = GroundTruthLabel::NotVulnerable;
        } else {
            throw IoError(csv.string() + ":" + std::to_string(line_no) + ": unknown label '" + fields[1] + "'");
        }
    }
    return out;
}

EvalMetrics compute_metrics(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn)
{
    EvalMetrics m{tp, tn, fp, fn, {}, {}, {}, {}};
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    if (const std::size_t total = tp + tn + fp + fn; total > 0) {
        m.accuracy = d(tp + tn) / d(total);
    }
    if (tp + fp > 0) {
        m.precision = d(tp) / d(tp + fp);
    }
    if (tp + fn > 0) {
        m.recall = d(tp) / d(tp + fn);
    }
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

EvalMetrics evaluate(std::span<const AnalysisReport> reports,
                     const std::map<std::string, GroundTruthLabel>& ground_truth)
{
    std::map<std::string_view, const AnalysisReport*> by_id;
    for (const auto& r : reports) {
        by_id[r.file_id] = &r;
    }
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (const auto& [file_id, truth] : ground_truth) {
        const auto it = by_id.find(file_id);
        if (it == by_id.end()) {
            throw MissingReport(file_id);
        }
        const bool predicted = it->second->predicted_vulnerable();
        const bool actual = truth == GroundTruthLabel::Vulnerable;
        if (predicted && actual) {
            ++tp;
        } else if (!predicted && !actual) {
            ++tn;
        } else if (predicted) {
            ++fp;
        } else {
            ++fn;
        }
    }
    return compute_metrics(tp, tn, fp, fn);
}

nlohmann::json to_json(const EvalMetrics& m)
{
    const auto ratio = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"tp", m.tp},
        {"tn", m.tn},
        {"fp", m.fp},
        {"fn", m.fn},
        {"accuracy", ratio(m.accuracy)},
        {"precision", ratio(m.precision)},
        {"recall", ratio(m.recall)},
        {"f1", ratio(m.f1)},
    };
}

std::string metrics_line(const EvalMetrics& m)
{
    return "acc=" + format_ratio(m.accuracy) + " prec=" + format_ratio(m.precision) + " rec="
         + format_ratio(m.recall) + " f1=" + format_ratio(m.f1);
}

} // namespace randsentry
