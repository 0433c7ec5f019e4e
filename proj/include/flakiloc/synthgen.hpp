#pragma once

// Seeded generator of synthetic flaky spectra with one injected fault, and a
// naive re-implementation of the localization pipeline used as a test oracle.
//
// Randomness is counter based: every draw is a pure function of
// (seed, domain, test index, run index, slot) through the SplitMix64
// finalizer, so a test's stream does not depend on how many tests exist and
// tests can be generated in any order or in parallel.
//
// Model, with statements indexed 0..n-1 (file pkg/modKKKK.py, 250 lines each):
//   * the first n/100 statements form a prelude covered by every execution;
//   * the fault sits at index uniform[prelude, n-2] (clamped to [0, n-2]);
//   * each test covers a contiguous region of length uniform[2 + n/200, 4 + n/20];
//     flaky tests' regions contain the fault and at least one later statement;
//   * in a flaky test, each region statement after the fault is divergent with
//     probability divergence_ratio (at least one always is) and then covered only
//     by passing or only by failing runs (fair coin per statement);
//   * 12% of stable tests have one jitter statement in their region, covered
//     by each run with probability 1/2;
//   * flaky runs fail with probability failure_rate; if a test ends up all-pass
//     (all-fail) the run with the lowest (highest) draw is flipped;
//   * stable tests always pass; all runs use same-order mode.

#include <cstdint>
#include <optional>
#include <vector>

#include "flakiloc/aggregation.hpp"
#include "flakiloc/ranking.hpp"
#include "flakiloc/spectrum.hpp"
#include "flakiloc/suspiciousness.hpp"

namespace flakiloc::synth {

struct SynthConfig {
    std::uint64_t seed = 7;
    std::size_t n_statements = 500;
    std::size_t n_tests = 50;
    double flaky_ratio = 0.1;
    std::size_t n_runs = 20;
    double failure_rate = 0.3;
    double divergence_ratio = 0.5;
};

struct SynthOutput {
    std::vector<TestHistory> histories;
    FaultSpec fault;  // the injected location; test_id names the first flaky test
    std::vector<std::string> flaky_tests;

    // One ground-truth record per flaky test, all naming the injected location.
    std::vector<FaultSpec> ground_truth() const;
};

// Throws DomainError for configurations outside the documented ranges.
SynthOutput generate(const SynthConfig& cfg);

// Statement at generator index i.
StatementId statement_at(std::size_t index);

// SplitMix64 finalizer and the keyed draw built on it.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t draw(std::uint64_t seed, std::uint64_t domain, std::uint64_t test, std::uint64_t run,
                   std::uint64_t slot);

// Rank of output.fault computed without bitsets, shared counters or the
// engine's ranking code: plain std::set algebra over the raw same-order
// records and a sort of all scores. nullopt when no location is covered by any
// aggregated row.
std::optional<RankTriple> oracle_localize(const SynthOutput& output, FormulaId formula,
                                          AggregationMode mode, const ScoreConfig& cfg = {});

}  // namespace flakiloc::synth
