#include "flakiloc/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flakiloc/error.hpp"
#include "flakiloc/stats.hpp"

namespace flakiloc {

std::optional<OrderSelection> parse_order_selection(std::string_view s) {
    if (s == "same") return OrderSelection::same;
    if (s == "random") return OrderSelection::random;
    if (s == "auto") return OrderSelection::automatic;
    return std::nullopt;
}

PreparedSpectrum prepare(std::span<const TestHistory> histories, OrderMode order) {
    std::vector<TestHistory> selected(histories.size());
    const auto n = static_cast<std::ptrdiff_t>(histories.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        selected[static_cast<std::size_t>(i)] = select_runs(histories[static_cast<std::size_t>(i)], order);

    PreparedSpectrum out;
    out.order = order;
    for (auto& h : selected) {
        if (h.empty()) continue;
        out.executions += h.size();
        out.verdicts.push_back(classify(h));
        out.histories.push_back(std::move(h));
    }
    out.universe = build_universe(out.histories);
    return out;
}

OrderMode resolve_order(std::span<const TestHistory> histories, OrderSelection selection) {
    if (selection == OrderSelection::same) return OrderMode::same;
    if (selection == OrderSelection::random) return OrderMode::random;

    bool has_same = false, has_random = false;
    for (const auto& h : histories)
        for (const auto& e : h.executions()) (e.order_mode == OrderMode::same ? has_same : has_random) = true;
    if (!has_same || !has_random)
        throw DomainError("order 'auto' needs both same-order and random-order runs");
    for (const auto& h : histories) {
        const auto s = select_runs(h, OrderMode::same);
        if (!s.empty() && classify(s) == Verdict::flaky) return OrderMode::same;
    }
    return OrderMode::random;
}

Localization localize_matrix(const PreparedSpectrum& spectrum, AggregationMode mode, FormulaId formula,
                             const ScoreConfig& cfg) {
    Localization out;
    out.matrix = build_matrix(spectrum.histories, spectrum.verdicts, spectrum.universe, mode);
    out.scores = score_matrix(out.matrix, formula, cfg);
    out.present = out.matrix.covered_by_any();
    return out;
}

namespace {

std::uint64_t effective_n(const std::optional<std::uint64_t>& sloc, const Universe& universe) {
    if (sloc) {
        if (*sloc < 1) throw DomainError("source line count must be >= 1");
        return *sloc;
    }
    return std::max<std::uint64_t>(1, universe.size());
}

}  // namespace

io::LocalizationReport localize(std::span<const TestHistory> histories, std::span<const FaultSpec> faults,
                                const LocalizeOptions& options) {
    const auto order = resolve_order(histories, options.order);
    const auto spectrum = prepare(histories, order);
    const auto loc = localize_matrix(spectrum, options.mode, options.formula, options.score);
    const auto& universe = spectrum.universe;
    const auto n = effective_n(options.sloc, universe);

    io::LocalizationReport rep;
    auto& m = rep.metadata;
    m.mode = options.mode;
    m.formula = options.formula;
    m.dstar_exponent = options.score.dstar_exponent;
    m.order = order;
    m.rank_kind = options.rank_kind;
    m.n = n;
    m.n_from_sloc = options.sloc.has_value();
    m.tests = spectrum.histories.size();
    m.flaky_tests = static_cast<std::size_t>(std::count(spectrum.verdicts.begin(), spectrum.verdicts.end(), Verdict::flaky));
    m.stable_tests = m.tests - m.flaky_tests;
    m.executions = spectrum.executions;
    m.rows = loc.matrix.rows.size();
    m.total_flaky = loc.matrix.total_flaky;
    m.total_stable = loc.matrix.total_stable;
    m.universe_size = universe.size();

    for (const auto& r : rank_all(loc.scores, universe))
        rep.statements.push_back({universe[r.index], loc.scores[r.index], r.rank});

    std::vector<std::optional<RankTriple>> ranks;
    for (const auto& f : faults) {
        io::ReportFault rf;
        rf.test_id = f.test_id;
        rf.rank = fault_rank(loc.scores, f, universe, &loc.present);
        if (rf.rank) rf.exam = exam(rank_value(*rf.rank, options.rank_kind), EvaluationContext{n});
        ranks.push_back(rf.rank);
        rep.faults.push_back(std::move(rf));
    }
    const auto fractions = progression(ranks, options.cutoffs, options.rank_kind);
    for (std::size_t i = 0; i < fractions.size(); ++i) rep.progression.push_back({options.cutoffs[i], fractions[i]});
    return rep;
}

// ---- evaluate ----

namespace {

struct FaultOutcome {
    std::optional<RankTriple> rank;
    std::optional<double> exam;
};

std::string method_label(FormulaId f, AggregationMode m) {
    return std::string(to_string(f)) + "/" + std::string(to_string(m));
}

}  // namespace

EvaluationReport evaluate(std::span<const Project> projects, const EvaluateOptions& options) {
    if (options.formulas.empty() || options.modes.empty())
        throw DomainError("evaluate: need at least one formula and one mode");

    EvaluationReport rep;
    rep.formulas = options.formulas;
    rep.modes = options.modes;
    rep.cutoffs = options.cutoffs;
    rep.rank_kind = options.rank_kind;
    rep.reference_formula = std::find(options.formulas.begin(), options.formulas.end(), FormulaId::dstar) !=
                                    options.formulas.end()
                                ? FormulaId::dstar
                                : options.formulas.front();

    // (formula, mode) -> test key -> outcome
    std::map<std::pair<FormulaId, AggregationMode>, std::map<std::string, FaultOutcome>> outcomes;
    std::vector<FaultSpec> keyed_faults;
    std::map<std::string, FlakinessCategory> categories;

    const bool prefix = projects.size() > 1;
    for (const auto& project : projects) {
        auto key_of = [&](const std::string& test) { return prefix ? project.name + "::" + test : test; };

        std::set<std::string> seen;
        for (const auto& f : project.faults)
            if (!seen.insert(f.test_id).second)
                throw DomainError("project '" + project.name + "': duplicate ground truth for test '" + f.test_id + "'");

        // Order mode per fault.
        std::vector<OrderMode> fault_order(project.faults.size());
        const auto project_order = resolve_order(project.histories, options.order);
        for (std::size_t i = 0; i < project.faults.size(); ++i) {
            fault_order[i] = project_order;
            if (options.order != OrderSelection::automatic) continue;
            const auto& test = project.faults[i].test_id;
            auto h = std::find_if(project.histories.begin(), project.histories.end(),
                                  [&](const TestHistory& x) { return x.test_id() == test; });
            if (h == project.histories.end()) continue;
            try {
                const auto cat = classify_category(select_runs(*h, OrderMode::same), select_runs(*h, OrderMode::random));
                categories[key_of(test)] = cat;
                fault_order[i] = cat == FlakinessCategory::OD ? OrderMode::random : OrderMode::same;
            } catch (const NotFlakyError&) {
            }
        }

        std::map<OrderMode, PreparedSpectrum> spectra;
        auto spectrum_for = [&](OrderMode o) -> const PreparedSpectrum& {
            auto it = spectra.find(o);
            if (it == spectra.end()) it = spectra.emplace(o, prepare(project.histories, o)).first;
            return it->second;
        };

        std::set<OrderMode> needed(fault_order.begin(), fault_order.end());
        needed.insert(project_order);
        for (auto order : needed) {
            const auto& spectrum = spectrum_for(order);
            const auto n = effective_n(project.sloc, spectrum.universe);
            for (auto mode : options.modes) {
                const auto matrix = build_matrix(spectrum.histories, spectrum.verdicts, spectrum.universe, mode);
                const auto present = matrix.covered_by_any();
                if (order == project_order) {
                    CoverageBits flaky_cover(spectrum.universe.size());
                    for (const auto& r : matrix.rows)
                        if (r.verdict == Verdict::flaky) flaky_cover |= r.covered;
                    rep.candidates.push_back({project.name, mode, flaky_cover.count()});
                }
                for (auto formula : options.formulas) {
                    const auto scores = score_matrix(matrix, formula, options.score);
                    auto& table = outcomes[{formula, mode}];
                    for (std::size_t i = 0; i < project.faults.size(); ++i) {
                        if (fault_order[i] != order) continue;
                        FaultOutcome fo;
                        fo.rank = fault_rank(scores, project.faults[i], spectrum.universe, &present);
                        if (fo.rank) fo.exam = exam(rank_value(*fo.rank, options.rank_kind), EvaluationContext{n});
                        table[key_of(project.faults[i].test_id)] = fo;
                    }
                }
            }
        }
        for (const auto& f : project.faults) {
            FaultSpec k = f;
            k.test_id = key_of(f.test_id);
            keyed_faults.push_back(std::move(k));
        }
    }
    rep.faults = keyed_faults.size();

    auto method = [&](FormulaId f, AggregationMode m) {
        MethodResult r;
        r.label = method_label(f, m);
        for (const auto& [key, fo] : outcomes[{f, m}]) r.exam[key] = fo.exam;
        return r;
    };

    for (auto f : options.formulas)
        for (auto m : options.modes) rep.methods.push_back(method(f, m));

    const bool has_sffl =
        std::find(options.modes.begin(), options.modes.end(), AggregationMode::sffl) != options.modes.end();
    if (has_sffl) {
        for (auto f : options.formulas) {
            const auto sffl = method(f, AggregationMode::sffl);
            std::vector<double> found;
            for (const auto& [k, v] : sffl.exam)
                if (v) found.push_back(*v);
            std::optional<double> mean;
            if (!found.empty()) mean = std::accumulate(found.begin(), found.end(), 0.0) / static_cast<double>(found.size());
            for (auto m : options.modes) {
                if (m == AggregationMode::sffl) continue;
                rep.comparisons.push_back({f, mean, m, compare(sffl, method(f, m))});
            }
        }

        const auto ref = method(rep.reference_formula, AggregationMode::sffl);
        const bool all_tagged = !keyed_faults.empty() && std::all_of(keyed_faults.begin(), keyed_faults.end(),
                                                                     [](const FaultSpec& f) { return f.root_cause.has_value(); });
        if (all_tagged) rep.root_causes = group_stats(ref, keyed_faults);

        if (!categories.empty()) {
            CategoryComparison cc;
            std::vector<double> od, nod;
            for (const auto& [key, cat] : categories) {
                (cat == FlakinessCategory::OD ? cc.od : cc.nod) += 1;
                auto it = ref.exam.find(key);
                if (it != ref.exam.end() && it->second) (cat == FlakinessCategory::OD ? od : nod).push_back(*it->second);
            }
            if (!od.empty() && !nod.empty()) {
                cc.p_value = stats::mann_whitney_u(od, nod);
                cc.a12 = stats::a12(od, nod);
            }
            rep.categories = cc;
        }
    }

    for (auto m : options.modes) {
        std::vector<std::optional<RankTriple>> ranks;
        for (const auto& [key, fo] : outcomes[{rep.reference_formula, m}]) ranks.push_back(fo.rank);
        rep.progression.emplace_back(m, progression(ranks, options.cutoffs, options.rank_kind));
    }
    return rep;
}

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string p_text(const std::optional<double>& p) {
    if (!p) return "-";
    if (*p < 0.001) return "<0.001";
    return fmt("%.3f", *p);
}

std::string opt_text(const std::optional<double>& v, const char* pattern, double scale = 1.0) {
    return v ? fmt(pattern, *v * scale) : std::string("-");
}

}  // namespace

std::string format_evaluation_text(const EvaluationReport& rep) {
    std::ostringstream os;
    char line[256];
    os << "# " << rep.faults << " faults; EXAM uses " << to_string(rep.rank_kind)
       << "-case ranks; wilcoxon_p is two-sided, zero differences by Pratt\n";
    std::snprintf(line, sizeof line, "%-10s %-14s %-11s %6s %9s %6s %9s %13s %10s\n", "formula", "sffl_mean_exam",
                  "baseline", "better", "unchanged", "worse", "not_found", "mean_impr_pct", "wilcoxon_p");
    os << line;
    for (const auto& r : rep.comparisons) {
        std::snprintf(line, sizeof line, "%-10s %-14s %-11s %6zu %9zu %6zu %9zu %13s %10s\n",
                      std::string(to_string(r.formula)).c_str(), opt_text(r.sffl_mean_exam, "%.4f").c_str(),
                      std::string(to_string(r.baseline)).c_str(), r.summary.better, r.summary.unchanged,
                      r.summary.worse, r.summary.not_found, opt_text(r.summary.mean_improvement, "%.1f", 100.0).c_str(),
                      p_text(r.summary.p_value).c_str());
        os << line;
    }

    if (!rep.root_causes.empty()) {
        os << "\n# root causes (" << to_string(rep.reference_formula) << ", sffl)\n";
        std::snprintf(line, sizeof line, "%-16s %5s %9s %8s %8s %8s\n", "root_cause", "tests", "not_found", "median",
                      "mean", "std");
        os << line;
        for (const auto& g : rep.root_causes) {
            std::snprintf(line, sizeof line, "%-16s %5zu %9zu %8s %8s %8s\n", std::string(to_string(g.cause)).c_str(),
                          g.count, g.not_found, opt_text(g.median, "%.3f").c_str(), opt_text(g.mean, "%.3f").c_str(),
                          opt_text(g.std_dev, "%.3f").c_str());
            os << line;
        }
    }

    if (rep.categories) {
        const auto& c = *rep.categories;
        os << "\n# OD vs NOD (" << to_string(rep.reference_formula) << ", sffl): od=" << c.od << " nod=" << c.nod
           << " mann_whitney_p=" << p_text(c.p_value) << " a12=" << opt_text(c.a12, "%.2f") << "\n";
    }

    os << "\n# rank progression (" << to_string(rep.reference_formula) << ", fraction located within top k)\n";
    os << "mode       ";
    for (auto k : rep.cutoffs) {
        std::snprintf(line, sizeof line, " %7s", ("k=" + std::to_string(k)).c_str());
        os << line;
    }
    os << "\n";
    for (const auto& [mode, fr] : rep.progression) {
        std::snprintf(line, sizeof line, "%-11s", std::string(to_string(mode)).c_str());
        os << line;
        for (double v : fr) os << fmt(" %7.3f", v);
        os << "\n";
    }

    if (!rep.candidates.empty()) {
        os << "\n# candidate statements (covered by at least one flaky row)\n";
        std::snprintf(line, sizeof line, "%-24s %-11s %10s\n", "project", "mode", "candidates");
        os << line;
        for (const auto& c : rep.candidates) {
            std::snprintf(line, sizeof line, "%-24s %-11s %10zu\n", c.project.c_str(),
                          std::string(to_string(c.mode)).c_str(), c.candidates);
            os << line;
        }
    }
    return os.str();
}

std::string format_evaluation_json(const EvaluationReport& rep) {
    using J = nlohmann::ordered_json;
    auto opt = [](const std::optional<double>& v) { return v ? J(*v) : J(nullptr); };
    J doc;
    doc["faults"] = rep.faults;
    doc["rank_kind"] = std::string(to_string(rep.rank_kind));
    doc["reference_formula"] = std::string(to_string(rep.reference_formula));

    J comparisons = J::array();
    for (const auto& r : rep.comparisons) {
        comparisons.push_back({{"formula", std::string(to_string(r.formula))},
                               {"sffl_mean_exam", opt(r.sffl_mean_exam)},
                               {"baseline", std::string(to_string(r.baseline))},
                               {"better", r.summary.better},
                               {"unchanged", r.summary.unchanged},
                               {"worse", r.summary.worse},
                               {"not_found", r.summary.not_found},
                               {"mean_improvement", opt(r.summary.mean_improvement)},
                               {"wilcoxon_p", opt(r.summary.p_value)}});
    }
    doc["comparisons"] = std::move(comparisons);
    doc["notes"] = {"mean_improvement averages (base - sffl) / base over faults found by both methods",
                    "not_found counts faults missed by at least one of the two methods",
                    "wilcoxon_p is two-sided; zero differences handled with Pratt's method"};

    J methods = J::array();
    for (const auto& m : rep.methods) {
        J exams = J::object();
        for (const auto& [k, v] : m.exam) exams[k] = opt(v);
        methods.push_back({{"label", m.label}, {"exam", std::move(exams)}});
    }
    doc["methods"] = std::move(methods);

    J groups = J::array();
    for (const auto& g : rep.root_causes)
        groups.push_back({{"root_cause", std::string(to_string(g.cause))},
                          {"tests", g.count},
                          {"not_found", g.not_found},
                          {"median", opt(g.median)},
                          {"mean", opt(g.mean)},
                          {"std", opt(g.std_dev)}});
    doc["root_causes"] = std::move(groups);

    if (rep.categories) {
        const auto& c = *rep.categories;
        doc["od_vs_nod"] = {{"od", c.od}, {"nod", c.nod}, {"mann_whitney_p", opt(c.p_value)}, {"a12", opt(c.a12)}};
    }

    J prog = J::array();
    for (const auto& [mode, fr] : rep.progression) prog.push_back({{"mode", std::string(to_string(mode))}, {"fractions", fr}});
    doc["progression"] = {{"cutoffs", rep.cutoffs}, {"curves", std::move(prog)}};

    J cands = J::array();
    for (const auto& c : rep.candidates)
        cands.push_back({{"project", c.project}, {"mode", std::string(to_string(c.mode))}, {"candidates", c.candidates}});
    doc["candidates"] = std::move(cands);
    return doc.dump(2) + "\n";
}

}  // namespace flakiloc
