#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flakiloc/coverage_bits.hpp"
#include "flakiloc/spectrum.hpp"

namespace flakiloc {

// sffl: flaky tests contribute the intersection of their runs, stable tests the union.
// single: first execution only. union: union for every test.
// individual: one row per execution.
enum class AggregationMode { sffl, single, union_, individual };

std::string_view to_string(AggregationMode m);
std::optional<AggregationMode> parse_aggregation_mode(std::string_view s);
inline constexpr AggregationMode kAllModes[] = {AggregationMode::sffl, AggregationMode::single,
                                                AggregationMode::union_, AggregationMode::individual};

struct MatrixRow {
    std::string origin_test_id;
    Verdict verdict = Verdict::stable;
    CoverageBits covered;
};

struct FaultLocalizationMatrix {
    Universe universe;
    std::vector<MatrixRow> rows;
    std::size_t total_flaky = 0;
    std::size_t total_stable = 0;

    // Statements covered by at least one row. Locations outside this set are
    // not found by the method that built the matrix.
    CoverageBits covered_by_any() const;
};

// All four throw EmptyHistoryError on an empty history.
MatrixRow aggregate_sffl(const TestHistory& history, Verdict verdict, const Universe& universe);
MatrixRow aggregate_single(const TestHistory& history, Verdict verdict, const Universe& universe);
MatrixRow aggregate_union(const TestHistory& history, Verdict verdict, const Universe& universe);
std::vector<MatrixRow> aggregate_individual(const TestHistory& history, Verdict verdict,
                                            const Universe& universe);

// verdicts[i] belongs to histories[i]. Histories are aggregated in parallel;
// row order follows history order (then execution order for individual).
FaultLocalizationMatrix build_matrix(std::span<const TestHistory> histories,
                                     std::span<const Verdict> verdicts, const Universe& universe,
                                     AggregationMode mode);

}  // namespace flakiloc
