#pragma once

// End-to-end pipelines: order selection -> classification -> universe ->
// aggregation -> scoring -> ranking, for one method (localize) or for a grid of
// formulas x aggregation modes over several projects (evaluate).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flakiloc/aggregation.hpp"
#include "flakiloc/evaluation.hpp"
#include "flakiloc/io.hpp"
#include "flakiloc/ranking.hpp"
#include "flakiloc/spectrum.hpp"
#include "flakiloc/suspiciousness.hpp"

namespace flakiloc {

// auto: random-order runs for order-dependent tests, same-order runs otherwise.
enum class OrderSelection { same, random, automatic };
std::optional<OrderSelection> parse_order_selection(std::string_view s);

// Histories restricted to one order mode, with their verdicts and universe.
// Tests left without a non-skip execution are dropped.
struct PreparedSpectrum {
    OrderMode order = OrderMode::same;
    std::vector<TestHistory> histories;
    std::vector<Verdict> verdicts;
    Universe universe;
    std::size_t executions = 0;
};

PreparedSpectrum prepare(std::span<const TestHistory> histories, OrderMode order);

// Project-level resolution of `automatic`: same order when some test is flaky in
// same order, random order otherwise. Throws DomainError unless both modes occur.
OrderMode resolve_order(std::span<const TestHistory> histories, OrderSelection selection);

struct Localization {
    FaultLocalizationMatrix matrix;
    std::vector<Score> scores;
    CoverageBits present;  // statements covered by at least one row
};

Localization localize_matrix(const PreparedSpectrum& spectrum, AggregationMode mode, FormulaId formula,
                             const ScoreConfig& cfg = {});

inline const std::vector<std::uint64_t> kDefaultCutoffs = {1, 5, 10, 25, 50, 100};

struct LocalizeOptions {
    AggregationMode mode = AggregationMode::sffl;
    FormulaId formula = FormulaId::dstar;
    ScoreConfig score;
    OrderSelection order = OrderSelection::same;
    std::optional<std::uint64_t> sloc;  // N for EXAM; universe size when absent
    std::vector<std::uint64_t> cutoffs = kDefaultCutoffs;
    RankKind rank_kind = RankKind::average;
};

io::LocalizationReport localize(std::span<const TestHistory> histories, std::span<const FaultSpec> faults,
                                const LocalizeOptions& options);

// ---- evaluation over several projects ----

struct Project {
    std::string name;
    std::vector<TestHistory> histories;
    std::vector<FaultSpec> faults;
    std::optional<std::uint64_t> sloc;
};

struct EvaluateOptions {
    std::vector<FormulaId> formulas = {std::begin(kAllFormulas), std::end(kAllFormulas)};
    std::vector<AggregationMode> modes = {std::begin(kAllModes), std::end(kAllModes)};
    ScoreConfig score;
    OrderSelection order = OrderSelection::automatic;
    std::vector<std::uint64_t> cutoffs = kDefaultCutoffs;
    RankKind rank_kind = RankKind::average;
};

struct ComparisonRow {
    FormulaId formula = FormulaId::dstar;
    std::optional<double> sffl_mean_exam;  // over found faults
    AggregationMode baseline = AggregationMode::single;
    ComparisonSummary summary;
};

struct CategoryComparison {
    std::size_t od = 0;
    std::size_t nod = 0;
    std::optional<double> p_value;  // Mann-Whitney U, OD vs NOD EXAM
    std::optional<double> a12;      // Vargha-Delaney, OD vs NOD
};

struct CandidateCounts {
    std::string project;
    AggregationMode mode = AggregationMode::sffl;
    std::size_t candidates = 0;  // statements with flaky(s) > 0
};

struct EvaluationReport {
    std::vector<FormulaId> formulas;
    std::vector<AggregationMode> modes;
    std::size_t faults = 0;
    std::vector<MethodResult> methods;  // formula-major, then mode
    std::vector<ComparisonRow> comparisons;
    FormulaId reference_formula = FormulaId::dstar;  // used for the tables below
    std::vector<GroupStats> root_causes;             // reference formula, sffl
    std::vector<std::pair<AggregationMode, std::vector<double>>> progression;
    std::vector<std::uint64_t> cutoffs;
    RankKind rank_kind = RankKind::average;
    std::optional<CategoryComparison> categories;
    std::vector<CandidateCounts> candidates;
};

EvaluationReport evaluate(std::span<const Project> projects, const EvaluateOptions& options);

// Plain-text table with the columns
// formula, sffl_mean_exam, baseline, better, unchanged, worse, not_found, mean_impr_pct, wilcoxon_p
std::string format_evaluation_text(const EvaluationReport& report);
std::string format_evaluation_json(const EvaluationReport& report);

}  // namespace flakiloc
