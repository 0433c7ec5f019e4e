#include "flakiloc/aggregation.hpp"

#include "flakiloc/error.hpp"
#include "flakiloc/kernels.hpp"

namespace flakiloc {

std::string_view to_string(AggregationMode m) {
    switch (m) {
        case AggregationMode::sffl: return "sffl";
        case AggregationMode::single: return "single";
        case AggregationMode::union_: return "union";
        case AggregationMode::individual: return "individual";
    }
    return "?";
}

std::optional<AggregationMode> parse_aggregation_mode(std::string_view s) {
    if (s == "sffl") return AggregationMode::sffl;
    if (s == "single") return AggregationMode::single;
    if (s == "union") return AggregationMode::union_;
    if (s == "individual") return AggregationMode::individual;
    return std::nullopt;
}

CoverageBits FaultLocalizationMatrix::covered_by_any() const {
    CoverageBits any(universe.size());
    for (const auto& r : rows) any |= r.covered;
    return any;
}

namespace {

void require_non_empty(const TestHistory& h) {
    if (h.empty()) throw EmptyHistoryError("cannot aggregate empty history of '" + h.test_id() + "'");
}

MatrixRow reduce(const TestHistory& history, Verdict verdict, const Universe& universe, bool intersect) {
    require_non_empty(history);
    const auto execs = history.executions();
    MatrixRow row{history.test_id(), verdict, universe.project(execs[0].covered)};
    for (std::size_t i = 1; i < execs.size(); ++i) {
        const auto bits = universe.project(execs[i].covered);
        if (intersect)
            row.covered &= bits;
        else
            row.covered |= bits;
    }
    return row;
}

}  // namespace

MatrixRow aggregate_sffl(const TestHistory& history, Verdict verdict, const Universe& universe) {
    return reduce(history, verdict, universe, verdict == Verdict::flaky);
}

MatrixRow aggregate_single(const TestHistory& history, Verdict verdict, const Universe& universe) {
    require_non_empty(history);
    return MatrixRow{history.test_id(), verdict, universe.project(history.executions()[0].covered)};
}

MatrixRow aggregate_union(const TestHistory& history, Verdict verdict, const Universe& universe) {
    return reduce(history, verdict, universe, false);
}

std::vector<MatrixRow> aggregate_individual(const TestHistory& history, Verdict verdict,
                                            const Universe& universe) {
    require_non_empty(history);
    std::vector<MatrixRow> rows;
    rows.reserve(history.size());
    for (const auto& e : history.executions())
        rows.push_back(MatrixRow{history.test_id(), verdict, universe.project(e.covered)});
    return rows;
}

FaultLocalizationMatrix build_matrix(std::span<const TestHistory> histories,
                                     std::span<const Verdict> verdicts, const Universe& universe,
                                     AggregationMode mode) {
    if (histories.size() != verdicts.size())
        throw DomainError("build_matrix: one verdict per history required");

    auto per_history = kernels::parallel::aggregate_histories(histories, verdicts, universe, mode);

    FaultLocalizationMatrix m;
    m.universe = universe;
    for (auto& rows : per_history)
        for (auto& r : rows) {
            (r.verdict == Verdict::flaky ? m.total_flaky : m.total_stable) += 1;
            m.rows.push_back(std::move(r));
        }
    return m;
}

}  // namespace flakiloc
