// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/resource.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "flakiloc/engine.hpp"
#include "flakiloc/io.hpp"
#include "flakiloc/stats.hpp"
#include "flakiloc/synthgen.hpp"

namespace {

using namespace flakiloc;
using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    return true;
}

std::vector<TestHistory> permute_runs(std::vector<TestHistory> hs, std::mt19937_64& rng) {
    for (auto& h : hs) {
        std::vector<ExecutionRecord> ex(h.executions().begin(), h.executions().end());
        std::shuffle(ex.begin(), ex.end(), rng);
        h = TestHistory(h.test_id(), ex);
    }
    return hs;
}

Check gen_int_reproduction() {
    Check r;
    const auto t0 = Clock::now();
    const auto run1_first = testing::gen_int_example(false);
    const auto run2_first = testing::gen_int_example(true);
    const auto verdicts = testing::verdicts_of(run1_first);
    const auto universe = build_universe(run1_first);
    const auto single1 = score_matrix(build_matrix(run1_first, verdicts, universe, AggregationMode::single), FormulaId::tarantula);
    const auto single2 = score_matrix(build_matrix(run2_first, verdicts, universe, AggregationMode::single), FormulaId::tarantula);
    const auto sffl = score_matrix(build_matrix(run1_first, verdicts, universe, AggregationMode::sffl), FormulaId::tarantula);
    const double elapsed = seconds_since(t0);
    if (!bit_equal(single1, {0.5, 0.5, 0.5, 0, 0, 0.5})) r.fail("single(run1) vector differs");
    if (!bit_equal(single2, {0.5, 0.5, 0.5, 0.5, 0, 0})) r.fail("single(run2) vector differs");
    if (!bit_equal(sffl, {0.5, 0.5, 0.5, 0, 0, 0})) r.fail("sffl vector differs");
    if (elapsed >= 0.010) r.fail("took " + std::to_string(elapsed * 1e3) + " ms");
    if (r.ok) r.detail = std::to_string(elapsed * 1e3) + " ms";
    return r;
}

Check safe_division() {
    Check r;
    const double inf = std::numeric_limits<double>::infinity();
    for (auto f : kAllFormulas)
        for (std::uint64_t tf = 1; tf <= 20; ++tf)
            for (std::uint64_t ts = 0; ts <= 20; ++ts) {
                const double v = score(f, StatementCounts{0, 0, tf, ts});
                if (!(v == 0.0)) r.fail(std::string(to_string(f)) + " nonzero at (0,0)");
            }
    for (std::uint64_t f = 1; f <= 50; ++f)
        for (std::uint64_t ts : {0u, 1u, 50u}) {
            const double v = score(FormulaId::dstar, StatementCounts{f, 0, f, ts});
            if (v != inf) r.fail("dstar(f, 0, f) is not +inf");
        }
    const std::vector<double> scores = {std::numeric_limits<double>::max(), 1e308, 0.0, inf, 1.0, -1.0};
    const auto u = testing::line_universe(scores.size());
    if (!(rank_of(scores, u[3], u) == RankTriple{1, 1})) r.fail("+inf is not ranked first");
    if (rank_all(scores, u).front().index != 3) r.fail("+inf is not listed first");
    return r;
}

Check determinism() {
    Check r;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7001);
    std::size_t single_changed = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        synth::SynthConfig cfg;
        cfg.seed = 500 + i;
        cfg.n_statements = 200 + rng() % 300;
        cfg.n_tests = 10 + rng() % 30;
        cfg.n_runs = 3 + rng() % 8;
        cfg.flaky_ratio = 0.1 + 0.3 * static_cast<double>(rng() % 100) / 100.0;
        const auto out = synth::generate(cfg);
        const auto permuted = permute_runs(out.histories, rng);
        const auto gt = out.ground_truth();
        for (auto mode : kAllModes) {
            LocalizeOptions opt;
            opt.mode = mode;
            const auto a = io::emit_report(localize(out.histories, gt, opt), io::ReportFormat::json);
            const auto b = io::emit_report(localize(permuted, gt, opt), io::ReportFormat::json);
            if (mode == AggregationMode::single) {
                single_changed += a != b;
            } else if (a != b) {
                r.fail("instance " + std::to_string(i) + " mode " + std::string(to_string(mode)) + " changed");
            }
        }
    }
    const double elapsed = seconds_since(t0);
    if (single_changed == 0) r.fail("no instance shows a changed single-mode ranking");
    if (elapsed >= 5.0) r.fail("took " + std::to_string(elapsed) + " s");
    if (r.ok)
        r.detail = std::to_string(single_changed) + "/50 single-mode rankings changed, " + std::to_string(elapsed) + " s";
    return r;
}

// The 200 small instances shared by criteria 4 and 9.
std::vector<synth::SynthOutput> small_instances() {
    std::mt19937_64 rng(4004);
    std::vector<synth::SynthOutput> v;
    for (std::uint64_t seed = 0; seed < 200; ++seed) v.push_back(synth::generate(testing::small_config(rng, seed)));
    return v;
}

Check oracle_equivalence(const std::vector<synth::SynthOutput>& instances) {
    Check r;
    const auto t0 = Clock::now();
    std::size_t checks = 0;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (auto f : kAllFormulas)
            for (auto m : kAllModes) {
                ++checks;
                if (synth::oracle_localize(instances[i], f, m) != testing::engine_rank(instances[i], f, m))
                    r.fail("instance " + std::to_string(i) + " " + std::string(to_string(f)) + "/" +
                           std::string(to_string(m)));
            }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0) r.fail("took " + std::to_string(elapsed) + " s");
    if (r.ok) r.detail = std::to_string(checks) + " triples equal, " + std::to_string(elapsed) + " s";
    return r;
}

Check tie_rank_oracle() {
    Check r;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5005);
    for (int trial = 0; trial < 100; ++trial) {
        const auto scores = testing::random_tied_scores(rng, 200, 8);
        const auto u = testing::line_universe(scores.size());
        const std::size_t target = rng() % scores.size();
        const auto [lo, hi] = oracle::tie_permutation_rank(scores, target);
        if (!(rank_of(scores, u[target], u) == RankTriple{lo, hi})) r.fail("trial " + std::to_string(trial));
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) r.fail("took " + std::to_string(elapsed) + " s");
    if (r.ok) r.detail = std::to_string(elapsed) + " s";
    return r;
}

FaultLocalizationMatrix random_matrix(std::mt19937_64& rng) {
    const std::size_t n = 5 + rng() % 60;
    FaultLocalizationMatrix m;
    m.universe = testing::line_universe(n, "m.py");
    const std::size_t rows = 1 + rng() % 15;
    for (std::size_t i = 0; i < rows; ++i) {
        MatrixRow row;
        row.origin_test_id = "t" + std::to_string(i);
        row.verdict = rng() % 3 == 0 ? Verdict::flaky : Verdict::stable;
        row.covered = CoverageBits(n);
        const auto density = 1 + rng() % 4;
        for (std::size_t s = 0; s < n; ++s)
            if (rng() % 5 < density) row.covered.set(s);
        (row.verdict == Verdict::flaky ? m.total_flaky : m.total_stable) += 1;
        m.rows.push_back(std::move(row));
    }
    return m;
}

std::vector<RankTriple> ranking_of(const std::vector<double>& scores) {
    std::vector<RankTriple> v;
    for (std::size_t i = 0; i < scores.size(); ++i) v.push_back(rank_at(scores, i));
    return v;
}

Check repetition_invariance() {
    Check r;
    std::mt19937_64 rng(6006);
    for (int trial = 0; trial < 50; ++trial) {
        const auto base = random_matrix(rng);
        for (std::size_t k : {2u, 3u, 5u}) {
            FaultLocalizationMatrix rep;
            rep.universe = base.universe;
            for (std::size_t c = 0; c < k; ++c)
                for (const auto& row : base.rows) rep.rows.push_back(row);
            rep.total_flaky = k * base.total_flaky;
            rep.total_stable = k * base.total_stable;
            for (auto f : kAllFormulas) {
                const auto s1 = score_matrix(base, f), sk = score_matrix(rep, f);
                if (ranking_of(s1) != ranking_of(sk))
                    r.fail("trial " + std::to_string(trial) + " k=" + std::to_string(k) + " " + std::string(to_string(f)));
                const bool value_invariant =
                    f == FormulaId::tarantula || f == FormulaId::ochiai || f == FormulaId::barinel;
                if (value_invariant && !bit_equal(s1, sk))
                    r.fail("score values moved: " + std::string(to_string(f)));
            }
        }
    }
    return r;
}

Check statistics_oracles() {
    Check r;
    std::mt19937_64 rng(7007);
    double worst = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<double> d;
        for (std::size_t i = 0; i < n; ++i)
            d.push_back(rng() % 2 ? static_cast<double>(static_cast<int>(rng() % 9) - 4)
                                  : static_cast<double>(rng() % 2001) / 1000.0 - 1.0);
        const double diff = std::abs(stats::wilcoxon_signed_rank(d) - oracle::wilcoxon_enumerate(d));
        worst = std::max(worst, diff);
        if (diff > 1e-12) r.fail("wilcoxon trial " + std::to_string(trial));
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t na = 1 + rng() % 9;
        const std::size_t nb = 1 + rng() % (10 - na);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < na; ++i) a.push_back(unif(rng));
        const double shift = 0.5 * unif(rng);
        for (std::size_t i = 0; i < nb; ++i) b.push_back(unif(rng) + shift);
        const double diff = std::abs(stats::mann_whitney_u(a, b) - oracle::mann_whitney_enumerate(a, b));
        worst = std::max(worst, diff);
        if (diff > 1e-12) r.fail("mann-whitney trial " + std::to_string(trial));
    }
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> a(1 + rng() % 20), b(1 + rng() % 20);
        for (auto& x : a) x = static_cast<double>(rng() % 9);
        for (auto& x : b) x = static_cast<double>(rng() % 9);
        if (stats::a12(a, b) + stats::a12(b, a) != 1.0) r.fail("a12 complement trial " + std::to_string(trial));
    }
    if (r.ok) {
        std::ostringstream s;
        s << "max |p - p_enum| = " << worst;
        r.detail = s.str();
    }
    return r;
}

double peak_rss_mib() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_maxrss) / 1024.0;  // ru_maxrss is in KiB on Linux
}

Check performance() {
    Check r;
    synth::SynthConfig cfg;
    cfg.seed = 8008;
    cfg.n_statements = 10000;
    cfg.n_tests = 1000;
    cfg.n_runs = 100;
    const auto g0 = Clock::now();
    const auto out = synth::generate(cfg);
    const double gen_s = seconds_since(g0);
    LocalizeOptions opt;
    opt.mode = AggregationMode::sffl;
    opt.formula = FormulaId::dstar;
    const auto t0 = Clock::now();
    const auto report = localize(out.histories, out.ground_truth(), opt);
    const auto bytes = io::emit_report(report, io::ReportFormat::json);
    const double elapsed = seconds_since(t0);
    const double rss = peak_rss_mib();
    if (report.metadata.executions != 100000) r.fail("expected 100000 executions");
    if (elapsed >= 10.0) r.fail("localize took " + std::to_string(elapsed) + " s");
    if (rss >= 1024.0) r.fail("peak RSS " + std::to_string(rss) + " MiB");
    std::ostringstream s;
    s << "localize " << elapsed << " s (generation " << gen_s << " s), peak RSS " << rss << " MiB, report "
      << bytes.size() / 1024 << " KiB";
    if (r.ok) r.detail = s.str();
    return r;
}

Check evaluate_substitute(const std::vector<synth::SynthOutput>& instances) {
    Check r;
    std::vector<Project> projects;
    Project table;
    table.name = "gen_int";
    table.histories = testing::gen_int_example();
    table.faults = {FaultSpec{"t1", {StatementId("gen.py", 2), StatementId("gen.py", 3)}, RootCause::other}};
    table.sloc = 758;
    projects.push_back(table);
    for (std::uint64_t i = 0; i < 20; ++i) {
        synth::SynthConfig cfg;
        cfg.seed = 9000 + i;
        const auto out = synth::generate(cfg);
        projects.push_back(Project{"synth" + std::to_string(i), out.histories, out.ground_truth(), std::nullopt});
    }
    EvaluateOptions opt;
    opt.order = OrderSelection::same;
    const auto rep = evaluate(projects, opt);
    const auto text = format_evaluation_text(rep);

    std::istringstream lines(text);
    std::string header;
    while (std::getline(lines, header) && header.rfind("formula", 0) != 0) {
    }
    const std::string want = "formula\tsffl_mean_exam\tbaseline\tbetter\tunchanged\tworse\tnot_found\tmean_impr_pct\twilcoxon_p";
    std::string squashed;
    {
        std::istringstream h(header);
        std::string tok;
        while (h >> tok) squashed += (squashed.empty() ? "" : "\t") + tok;
    }
    if (squashed != want) r.fail("comparison table header is '" + header + "'");
    if (rep.comparisons.size() != 5 * 3) r.fail("expected 15 comparison rows");
    for (const auto& c : rep.comparisons) {
        const auto& s = c.summary;
        if (s.better + s.unchanged + s.worse + s.not_found != rep.faults) r.fail("counts do not sum to the fault count");
        if (!s.mean_improvement || !s.p_value) r.fail("missing mean improvement or p-value");
    }
    for (const auto& c : rep.candidates) {
        if (c.mode != AggregationMode::sffl) continue;
        for (const auto& d : rep.candidates)
            if (d.project == c.project && d.mode == AggregationMode::union_ && c.candidates > d.candidates)
                r.fail("sffl candidates exceed union in " + c.project);
    }
    std::size_t dominated = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto spectrum = prepare(instances[i].histories, OrderMode::same);
        const auto sffl = build_matrix(spectrum.histories, spectrum.verdicts, spectrum.universe, AggregationMode::sffl);
        const auto uni = build_matrix(spectrum.histories, spectrum.verdicts, spectrum.universe, AggregationMode::union_);
        if (testing::flaky_candidates(sffl) > testing::flaky_candidates(uni))
            r.fail("sffl candidate set larger than union on instance " + std::to_string(i));
        else
            ++dominated;
    }
    if (r.ok) r.detail = std::to_string(rep.faults) + " faults, " + std::to_string(dominated) + "/200 instances dominated";
    return r;
}

}  // namespace

int main() {
    const auto instances = small_instances();
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"two-test two-run example reproduced exactly", gen_int_reproduction},
        {"safe-division semantics", safe_division},
        {"determinism under run permutation", determinism},
        {"oracle equivalence", [&] { return oracle_equivalence(instances); }},
        {"tie-rank oracle", tie_rank_oracle},
        {"uniform-repetition ranking invariance", repetition_invariance},
        {"statistics oracles", statistics_oracles},
        {"performance", performance},
        {"evaluate substitute for headline numbers", [&] { return evaluate_substitute(instances); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.ok;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
