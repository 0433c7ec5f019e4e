#include "flakiloc/kernels.hpp"

namespace flakiloc::kernels::serial {

std::vector<std::vector<MatrixRow>> aggregate_histories(std::span<const TestHistory> histories,
                                                        std::span<const Verdict> verdicts,
                                                        const Universe& universe, AggregationMode mode) {
    std::vector<std::vector<MatrixRow>> out(histories.size());
    for (std::size_t i = 0; i < histories.size(); ++i) {
        switch (mode) {
            case AggregationMode::sffl:
                out[i].push_back(aggregate_sffl(histories[i], verdicts[i], universe));
                break;
            case AggregationMode::single:
                out[i].push_back(aggregate_single(histories[i], verdicts[i], universe));
                break;
            case AggregationMode::union_:
                out[i].push_back(aggregate_union(histories[i], verdicts[i], universe));
                break;
            case AggregationMode::individual:
                out[i] = aggregate_individual(histories[i], verdicts[i], universe);
                break;
        }
    }
    return out;
}

ColumnCounts column_counts(const FaultLocalizationMatrix& matrix) {
    const std::size_t n = matrix.universe.size();
    ColumnCounts c{std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
    for (const auto& row : matrix.rows) {
        auto& target = row.verdict == Verdict::flaky ? c.flaky : c.stable;
        for (std::size_t s = 0; s < n; ++s)
            if (row.covered.test(s)) ++target[s];
    }
    return c;
}

std::vector<Score> score_columns(const ColumnCounts& counts, std::uint64_t total_flaky,
                                 std::uint64_t total_stable, FormulaId formula, const ScoreConfig& cfg) {
    std::vector<Score> out(counts.flaky.size());
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] = detail::score_unchecked(formula, counts.flaky[s], counts.stable[s], total_flaky,
                                         total_stable, cfg.dstar_exponent);
    return out;
}

}  // namespace flakiloc::kernels::serial
