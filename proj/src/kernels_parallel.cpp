#include <omp.h>

#include <algorithm>
#include <atomic>
#include <exception>

#include "flakiloc/kernels.hpp"

namespace flakiloc::kernels {

namespace {
std::atomic<int> g_thread_cap{0};

int team_size() {
    const int cap = g_thread_cap.load(std::memory_order_relaxed);
    const int avail = omp_get_max_threads();
    return cap > 0 ? std::min(cap, avail) : avail;
}
}  // namespace

void set_thread_cap(int n) {
    g_thread_cap.store(n > 0 ? n : 0, std::memory_order_relaxed);
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}
int thread_cap() { return g_thread_cap.load(std::memory_order_relaxed); }

namespace parallel {

std::vector<std::vector<MatrixRow>> aggregate_histories(std::span<const TestHistory> histories,
                                                        std::span<const Verdict> verdicts,
                                                        const Universe& universe, AggregationMode mode) {
    std::vector<std::vector<MatrixRow>> out(histories.size());
    const auto n = static_cast<std::ptrdiff_t>(histories.size());
    // Exceptions may not cross the parallel region; keep the first (lowest index) one.
    std::exception_ptr first_error;
    std::ptrdiff_t first_index = n;

#pragma omp parallel for schedule(dynamic, 4) num_threads(team_size())
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& h = histories[static_cast<std::size_t>(i)];
            const auto v = verdicts[static_cast<std::size_t>(i)];
            auto& rows = out[static_cast<std::size_t>(i)];
            switch (mode) {
                case AggregationMode::sffl: rows.push_back(aggregate_sffl(h, v, universe)); break;
                case AggregationMode::single: rows.push_back(aggregate_single(h, v, universe)); break;
                case AggregationMode::union_: rows.push_back(aggregate_union(h, v, universe)); break;
                case AggregationMode::individual: rows = aggregate_individual(h, v, universe); break;
            }
        } catch (...) {
#pragma omp critical(flakiloc_aggregate_error)
            if (i < first_index) {
                first_index = i;
                first_error = std::current_exception();
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

ColumnCounts column_counts(const FaultLocalizationMatrix& matrix) {
    const std::size_t n = matrix.universe.size();
    ColumnCounts c{std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
    const auto words = static_cast<std::ptrdiff_t>(CoverageBits::word_count(n));

    // Each thread owns a disjoint range of 64-statement words, so no two
    // threads touch the same counter.
#pragma omp parallel for schedule(static) num_threads(team_size())
    for (std::ptrdiff_t w = 0; w < words; ++w) {
        const auto base = static_cast<std::size_t>(w) * CoverageBits::kWordBits;
        for (const auto& row : matrix.rows) {
            auto bits = row.covered.words()[static_cast<std::size_t>(w)];
            auto& target = row.verdict == Verdict::flaky ? c.flaky : c.stable;
            while (bits) {
                target[base + static_cast<std::size_t>(std::countr_zero(bits))] += 1;
                bits &= bits - 1;
            }
        }
    }
    return c;
}

std::vector<Score> score_columns(const ColumnCounts& counts, std::uint64_t total_flaky,
                                 std::uint64_t total_stable, FormulaId formula, const ScoreConfig& cfg) {
    std::vector<Score> out(counts.flaky.size());
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) num_threads(team_size())
    for (std::ptrdiff_t s = 0; s < n; ++s) {
        const auto i = static_cast<std::size_t>(s);
        out[i] = detail::score_unchecked(formula, counts.flaky[i], counts.stable[i], total_flaky,
                                         total_stable, cfg.dstar_exponent);
    }
    return out;
}

}  // namespace parallel
}  // namespace flakiloc::kernels
