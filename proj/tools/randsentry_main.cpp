// randsentry: bad-randomness (SWC-120) scanner for Solidity sources.
//
// Findings go to stdout, diagnostics to stderr.
// Exit codes: 0 clean, 1 HIGH_RISK or FALSE_POSITIVE finding, 2 usage/IO error.

#include "randsentry/corpus.hpp"
#include "randsentry/patterns.hpp"
#include "randsentry/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace randsentry;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFinding = 1;
constexpr int kExitUsage = 2;

std::string read_source(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int cmd_analyze(const fs::path& file, const std::string& format)
{
    const auto report = analyze_source(read_source(file), file.filename().generic_string());
    if (format == "json") {
        std::cout << to_json(report).dump(2) << "\n";
    } else {
        std::cout << to_text(report);
    }
    return report.has_finding() ? kExitFinding : kExitClean;
}

int cmd_corpus(const fs::path& dir, const fs::path& out, std::size_t jobs, const std::string& format)
{
    const auto summary = run_corpus(dir, CorpusConfig{jobs, out});
    const auto j = summary_json(summary.reports);
    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "files: " << j["files"].get<std::size_t>() << "\n";
        for (const auto& [label, n] : j["final_labels"].items()) {
            std::cout << "  " << label << ": " << n.get<int>() << "\n";
        }
        std::cout << "risk levels:\n";
        for (const auto& [level, n] : j["risk_levels"].items()) {
            std::cout << "  " << level << ": " << n.get<int>() << "\n";
        }
        if (!j["needs_manual_review"].empty()) {
            std::cout << "needs manual review:\n";
            for (const auto& id : j["needs_manual_review"]) {
                std::cout << "  " << id.get<std::string>() << "\n";
            }
        }
        std::cout << "reports written to " << out.string() << "\n";
    }
    return summary.has_finding() ? kExitFinding : kExitClean;
}

int cmd_eval(const fs::path& reports_dir, const fs::path& ground_truth, const std::string& format)
{
    const auto reports = load_reports(reports_dir);
    const auto truth = load_ground_truth(ground_truth);
    const auto metrics = evaluate(reports, truth);
    if (format == "json") {
        std::cout << to_json(metrics).dump(2) << "\n";
    } else {
        std::cout << "tp=" << metrics.tp << " tn=" << metrics.tn << " fp=" << metrics.fp << " fn=" << metrics.fn
                  << "\n"
                  << metrics_line(metrics) << "\n";
    }
    return kExitClean;
}

int cmd_patterns(const std::string& format)
{
    const auto& registry = PatternRegistry::instance();
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& p : registry.patterns()) {
            j.push_back({{"id", p.pattern_id},
                         {"group", to_string(p.group)},
                         {"description", p.description},
                         {"expression", p.expression}});
        }
        std::cout << j.dump(2) << "\n";
        return kExitClean;
    }
    std::printf("%-6s  %-5s  %s\n", "id", "group", "description");
    for (const auto& p : registry.patterns()) {
        std::printf("%-6s  %-5s  %s\n", p.pattern_id.c_str(), std::string(to_string(p.group)).c_str(),
                    p.description.c_str());
    }
    std::printf("\n");
    for (std::size_t g = 1; g <= kGroupCount; ++g) {
        const auto group = static_cast<PatternGroup>(g);
        std::printf("%s  %2zu  %s\n", std::string(to_string(group)).c_str(), registry.count(group),
                    std::string(group_title(group)).c_str());
    }
    std::printf("total %zu\n", registry.size());
    return kExitClean;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"randsentry - bad-randomness (SWC-120) detector for Solidity sources"};
    app.require_subcommand(1);

    std::string format = "text";
    const auto format_check = CLI::IsMember({"json", "text"});

    fs::path analyze_file;
    auto* analyze = app.add_subcommand("analyze", "Analyze one .sol file");
    analyze->add_option("file", analyze_file, "Solidity source")->required()->check(CLI::ExistingFile);
    analyze->add_option("--format", format, "json|text")->check(format_check);

    fs::path corpus_dir;
    fs::path corpus_out;
    std::size_t jobs = 1;
    auto* corpus = app.add_subcommand("corpus", "Analyze every .sol file under a directory");
    corpus->add_option("dir", corpus_dir, "Input directory")->required()->check(CLI::ExistingDirectory);
    corpus->add_option("--out", corpus_out, "Output directory")->required();
    corpus->add_option("--jobs", jobs, "Worker threads")->envname("RANDSENTRY_JOBS")->check(CLI::PositiveNumber);
    corpus->add_option("--format", format, "json|text")->check(format_check);

    fs::path eval_reports;
    fs::path eval_truth;
    auto* eval = app.add_subcommand("eval", "Score reports against ground-truth labels");
    eval->add_option("--reports", eval_reports, "Report directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--ground-truth", eval_truth, "CSV file_id,label")->required()->check(CLI::ExistingFile);
    eval->add_option("--format", format, "json|text")->check(format_check);

    auto* patterns = app.add_subcommand("patterns", "Inspect the pattern registry");
    auto* patterns_list = patterns->add_subcommand("list", "Print every pattern");
    patterns->require_subcommand(1);
    patterns_list->add_option("--format", format, "json|text")->check(format_check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        (void)PatternRegistry::instance();
        if (*analyze) {
            return cmd_analyze(analyze_file, format);
        }
        if (*corpus) {
            return cmd_corpus(corpus_dir, corpus_out, jobs, format);
        }
        if (*eval) {
            return cmd_eval(eval_reports, eval_truth, format);
        }
        if (*patterns_list) {
            return cmd_patterns(format);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
