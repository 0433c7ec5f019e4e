#pragma once

// Data-parallel kernels behind matrix construction and scoring. Each kernel has
// an OpenMP implementation (parallel::) and a straightforward serial reference
// (serial::) that the tests and the benchmark compare it against. Both produce
// identical results for identical inputs.

#include <cstdint>
#include <span>
#include <vector>

#include "flakiloc/aggregation.hpp"
#include "flakiloc/suspiciousness.hpp"

namespace flakiloc::kernels {

struct ColumnCounts {
    std::vector<std::uint32_t> flaky;   // flaky(s) per universe position
    std::vector<std::uint32_t> stable;  // stable(s)
    friend bool operator==(const ColumnCounts&, const ColumnCounts&) = default;
};

// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_thread_cap(int n);
int thread_cap();

namespace serial {
// Rows of histories[i] land in out[i].
std::vector<std::vector<MatrixRow>> aggregate_histories(std::span<const TestHistory> histories,
                                                        std::span<const Verdict> verdicts,
                                                        const Universe& universe, AggregationMode mode);
ColumnCounts column_counts(const FaultLocalizationMatrix& matrix);
std::vector<Score> score_columns(const ColumnCounts& counts, std::uint64_t total_flaky,
                                 std::uint64_t total_stable, FormulaId formula, const ScoreConfig& cfg);
}  // namespace serial

namespace parallel {
std::vector<std::vector<MatrixRow>> aggregate_histories(std::span<const TestHistory> histories,
                                                        std::span<const Verdict> verdicts,
                                                        const Universe& universe, AggregationMode mode);
ColumnCounts column_counts(const FaultLocalizationMatrix& matrix);
std::vector<Score> score_columns(const ColumnCounts& counts, std::uint64_t total_flaky,
                                 std::uint64_t total_stable, FormulaId formula, const ScoreConfig& cfg);
}  // namespace parallel

}  // namespace flakiloc::kernels
