#include "flakiloc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "flakiloc/engine.hpp"
#include "flakiloc/error.hpp"
#include "flakiloc/io.hpp"
#include "flakiloc/kernels.hpp"
#include "flakiloc/synthgen.hpp"

namespace flakiloc::cli {

namespace {

const std::vector<std::string> kModeNames = {"sffl", "single", "union", "individual"};
const std::vector<std::string> kFormulaNames = {"tarantula", "ochiai", "dstar", "op2", "barinel"};
const std::vector<std::string> kOrderNames = {"same", "random", "auto"};
const std::vector<std::string> kRankKinds = {"best", "average", "worst"};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed: " + path);
}

void apply_thread_env() {
    if (const char* v = std::getenv("FLAKILOC_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && n > 0) kernels::set_thread_cap(static_cast<int>(n));
    }
}

struct LocalizeArgs {
    std::string runs, faults, out;
    std::string mode = "sffl", formula = "dstar", order = "same", format = "json", rank_kind = "average";
    std::uint64_t sloc = 0;
    unsigned dstar_exponent = 2;
    std::vector<std::uint64_t> cutoffs = kDefaultCutoffs;
};

struct EvaluateArgs {
    std::vector<std::string> runs, faults;
    std::string formula = "all", modes = "sffl,single,union,individual", order = "same", out, json_out;
    std::string rank_kind = "average";
    std::vector<std::uint64_t> sloc;
    unsigned dstar_exponent = 2;
    std::vector<std::uint64_t> cutoffs = kDefaultCutoffs;
};

struct SynthArgs {
    synth::SynthConfig cfg;
    std::string out, faults_out;
};

int run_localize(const LocalizeArgs& a, std::ostream& out) {
    const auto histories = io::parse_runs(a.runs);
    std::vector<FaultSpec> faults;
    if (!a.faults.empty()) faults = io::parse_ground_truth(a.faults);

    LocalizeOptions opt;
    opt.mode = *parse_aggregation_mode(a.mode);
    opt.formula = *parse_formula(a.formula);
    opt.order = *parse_order_selection(a.order);
    opt.score.dstar_exponent = a.dstar_exponent;
    if (a.sloc > 0) opt.sloc = a.sloc;
    opt.cutoffs = a.cutoffs;
    opt.rank_kind = *parse_rank_kind(a.rank_kind);

    const auto report = localize(histories, faults, opt);
    write_output(a.out, io::emit_report(report, a.format == "tsv" ? io::ReportFormat::tsv : io::ReportFormat::json),
                 out);
    return 0;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
    if (a.faults.size() != a.runs.size())
        throw CLI::ValidationError("--faults", "give one --faults file per --runs file");
    if (a.sloc.size() > 1 && a.sloc.size() != a.runs.size())
        throw CLI::ValidationError("--sloc", "give one value, or one per --runs file");

    EvaluateOptions opt;
    opt.formulas.clear();
    for (const auto& f : split(a.formula, ',')) {
        if (f == "all") {
            opt.formulas.assign(std::begin(kAllFormulas), std::end(kAllFormulas));
            break;
        }
        auto id = parse_formula(f);
        if (!id) throw CLI::ValidationError("--formula", "unknown formula '" + f + "'");
        opt.formulas.push_back(*id);
    }
    opt.modes.clear();
    for (const auto& m : split(a.modes, ',')) {
        auto id = parse_aggregation_mode(m);
        if (!id) throw CLI::ValidationError("--modes", "unknown mode '" + m + "'");
        opt.modes.push_back(*id);
    }
    if (opt.formulas.empty()) throw CLI::ValidationError("--formula", "no formula given");
    if (opt.modes.empty()) throw CLI::ValidationError("--modes", "no mode given");
    opt.order = *parse_order_selection(a.order);
    opt.score.dstar_exponent = a.dstar_exponent;
    opt.cutoffs = a.cutoffs;
    opt.rank_kind = *parse_rank_kind(a.rank_kind);

    std::vector<Project> projects;
    std::map<std::string, int> names;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        Project p;
        p.name = std::filesystem::path(a.runs[i]).stem().string();
        if (names[p.name]++ > 0) p.name += "#" + std::to_string(i + 1);
        p.histories = io::parse_runs(a.runs[i]);
        p.faults = io::parse_ground_truth(a.faults[i]);
        if (!a.sloc.empty()) p.sloc = a.sloc.size() == 1 ? a.sloc[0] : a.sloc[i];
        projects.push_back(std::move(p));
    }

    const auto report = evaluate(projects, opt);
    write_output(a.out, format_evaluation_text(report), out);
    if (!a.json_out.empty()) write_output(a.json_out, format_evaluation_json(report), out);
    return 0;
}

int run_synth(const SynthArgs& a, std::ostream& out) {
    const auto output = synth::generate(a.cfg);
    std::ostringstream runs;
    io::write_runs(runs, output.histories);
    write_output(a.out, runs.str(), out);
    if (!a.faults_out.empty()) {
        std::ostringstream gt;
        io::write_ground_truth(gt, output.ground_truth());
        write_output(a.faults_out, gt.str(), out);
    }
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectrum-based fault localization for flaky tests"};
    app.name("flakiloc");
    app.require_subcommand(1);

    LocalizeArgs la;
    auto* loc = app.add_subcommand("localize", "Rank statements by suspiciousness for one method");
    loc->add_option("--runs", la.runs, "Run file (newline-delimited JSON)")->required();
    loc->add_option("--faults", la.faults, "Ground-truth file; adds fault ranks and EXAM scores");
    loc->add_option("--mode", la.mode, "Aggregation mode")->check(CLI::IsMember(kModeNames))->capture_default_str();
    loc->add_option("--formula", la.formula, "Suspiciousness formula")->check(CLI::IsMember(kFormulaNames))->capture_default_str();
    loc->add_option("--order", la.order, "Order mode of the runs to use")->check(CLI::IsMember(kOrderNames))->capture_default_str();
    loc->add_option("--sloc", la.sloc, "Project source-line count N for EXAM (default: universe size)");
    loc->add_option("--dstar-exponent", la.dstar_exponent, "DStar exponent")->check(CLI::PositiveNumber)->capture_default_str();
    loc->add_option("--cutoffs", la.cutoffs, "Top-k cutoffs for the progression table")->delimiter(',');
    loc->add_option("--rank-kind", la.rank_kind, "Rank used for EXAM and progression")->check(CLI::IsMember(kRankKinds))->capture_default_str();
    loc->add_option("--format", la.format, "Report format")->check(CLI::IsMember({"json", "tsv"}))->capture_default_str();
    loc->add_option("--out", la.out, "Output file (default: stdout)");

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "Compare SFFL against baselines over labelled faults");
    ev->add_option("--runs", ea.runs, "Run file; repeat for several projects")->required();
    ev->add_option("--faults", ea.faults, "Ground-truth file, one per --runs")->required();
    ev->add_option("--formula", ea.formula, "Comma-separated formulas or 'all'")->capture_default_str();
    ev->add_option("--modes", ea.modes, "Comma-separated aggregation modes")->capture_default_str();
    ev->add_option("--order", ea.order, "Order mode of the runs to use")->check(CLI::IsMember(kOrderNames))->capture_default_str();
    ev->add_option("--sloc", ea.sloc, "Source-line count N, one value or one per project")->delimiter(',');
    ev->add_option("--dstar-exponent", ea.dstar_exponent, "DStar exponent")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_option("--cutoffs", ea.cutoffs, "Top-k cutoffs for the progression table")->delimiter(',');
    ev->add_option("--rank-kind", ea.rank_kind, "Rank used for EXAM and progression")->check(CLI::IsMember(kRankKinds))->capture_default_str();
    ev->add_option("--out", ea.out, "Comparison table destination (default: stdout)");
    ev->add_option("--json-out", ea.json_out, "Also write the full evaluation as JSON");

    SynthArgs sa;
    auto* sy = app.add_subcommand("synth", "Generate a synthetic flaky spectrum with one injected fault");
    sy->add_option("--seed", sa.cfg.seed, "Generator seed")->capture_default_str();
    sy->add_option("--tests", sa.cfg.n_tests, "Number of tests")->capture_default_str();
    sy->add_option("--statements", sa.cfg.n_statements, "Number of statements")->capture_default_str();
    sy->add_option("--flaky-ratio", sa.cfg.flaky_ratio, "Share of flaky tests, in (0,1)")->capture_default_str();
    sy->add_option("--runs", sa.cfg.n_runs, "Runs per test")->capture_default_str();
    sy->add_option("--failure-rate", sa.cfg.failure_rate, "Failure probability of a flaky run, in (0,1)")->capture_default_str();
    sy->add_option("--divergence", sa.cfg.divergence_ratio, "Share of post-fault statements that diverge, in [0,1]")->capture_default_str();
    sy->add_option("--out", sa.out, "Run file to write")->required();
    sy->add_option("--faults-out", sa.faults_out, "Ground-truth file to write");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) argv.push_back("flakiloc");
    for (const auto& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    apply_thread_env();
    try {
        if (loc->parsed()) return run_localize(la, out);
        if (ev->parsed()) return run_evaluate(ea, out);
        if (sy->parsed()) return run_synth(sa, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace flakiloc::cli
