#pragma once

// Shared test inputs: the two-test, two-run gen_int example (t1 flaky, t2
// stable, lines 1-6 of gen.py) and small helpers for building records.

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include "flakiloc/engine.hpp"
#include "flakiloc/spectrum.hpp"
#include "flakiloc/synthgen.hpp"

namespace flakiloc::testing {

inline CoverageSet lines_of(const std::string& file, std::initializer_list<std::uint32_t> lines) {
    return CoverageSet(std::vector<CoverageSet::FileLines>{{file, std::vector<std::uint32_t>(lines)}});
}

inline ExecutionRecord exec(const std::string& test, const std::string& run, Outcome outcome,
                            std::initializer_list<std::uint32_t> lines, OrderMode mode = OrderMode::same,
                            const std::string& file = "gen.py") {
    ExecutionRecord e;
    e.test_id = test;
    e.run_id = run;
    e.order_mode = mode;
    e.outcome = outcome;
    e.covered = lines_of(file, lines);
    return e;
}

// run1: t1 pass {1,2,3,6}, t2 pass {1,2,3,6}
// run2: t1 fail {1,2,3,4}, t2 pass {1,2,3,4,5}
inline std::vector<TestHistory> gen_int_example(bool run2_first = false) {
    std::vector<ExecutionRecord> t1 = {exec("t1", "run1", Outcome::pass, {1, 2, 3, 6}),
                                       exec("t1", "run2", Outcome::fail, {1, 2, 3, 4})};
    std::vector<ExecutionRecord> t2 = {exec("t2", "run1", Outcome::pass, {1, 2, 3, 6}),
                                       exec("t2", "run2", Outcome::pass, {1, 2, 3, 4, 5})};
    if (run2_first) {
        std::swap(t1[0], t1[1]);
        std::swap(t2[0], t2[1]);
    }
    return {TestHistory("t1", t1), TestHistory("t2", t2)};
}

// Shuffled score vector of length 1..max_len made of tie groups of size 1..max_group.
// Group values are distinct; one group may be +inf.
template <class Rng>
std::vector<double> random_tied_scores(Rng& rng, std::size_t max_len, std::size_t max_group) {
    const std::size_t len = 1 + rng() % max_len;
    std::vector<double> v;
    std::size_t group = 0;
    const bool with_inf = rng() % 4 == 0;
    while (v.size() < len) {
        const std::size_t g = std::min<std::size_t>(1 + rng() % max_group, len - v.size());
        const double value = with_inf && group == 0 ? std::numeric_limits<double>::infinity()
                                                    : static_cast<double>(group) * 0.375 - 2.0;
        v.insert(v.end(), g, value);
        ++group;
    }
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

// Universe gen.py:1..n, aligned with a score vector of length n.
inline Universe line_universe(std::size_t n, const std::string& file = "gen.py") {
    std::vector<StatementId> s;
    for (std::size_t i = 0; i < n; ++i) s.emplace_back(file, static_cast<std::uint32_t>(i + 1));
    return Universe(s);
}

inline std::vector<Verdict> verdicts_of(const std::vector<TestHistory>& hs) {
    std::vector<Verdict> v;
    for (const auto& h : hs) v.push_back(classify(h));
    return v;
}

// The gen_int example as generator output, with the fault on lines 2 and 3.
inline synth::SynthOutput gen_int_output() {
    synth::SynthOutput out;
    out.histories = gen_int_example();
    out.fault = FaultSpec{"t1", {StatementId("gen.py", 2), StatementId("gen.py", 3)}, std::nullopt};
    out.flaky_tests = {"t1"};
    return out;
}

// Fault rank through the production pipeline.
inline std::optional<RankTriple> engine_rank(const synth::SynthOutput& out, FormulaId formula, AggregationMode mode,
                                             const ScoreConfig& cfg = {}) {
    const auto spectrum = prepare(out.histories, OrderMode::same);
    const auto loc = localize_matrix(spectrum, mode, formula, cfg);
    return fault_rank(loc.scores, out.fault, spectrum.universe, &loc.present);
}

// Small random generator configuration for property checks.
template <class Rng>
synth::SynthConfig small_config(Rng& rng, std::uint64_t seed) {
    synth::SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_statements = 2 + rng() % 49;
    cfg.n_tests = 1 + rng() % 10;
    cfg.n_runs = 2 + rng() % 5;
    cfg.flaky_ratio = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    cfg.failure_rate = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    cfg.divergence_ratio = static_cast<double>(rng() % 1001) / 1000.0;
    return cfg;
}

// Statements with at least one flaky row covering them.
inline std::size_t flaky_candidates(const FaultLocalizationMatrix& m) {
    CoverageBits b(m.universe.size());
    for (const auto& r : m.rows)
        if (r.verdict == Verdict::flaky) b |= r.covered;
    return b.count();
}

}  // namespace flakiloc::testing
