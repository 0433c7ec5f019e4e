#include <algorithm>
#include <functional>
#include <iterator>
#include <set>

#include "flakiloc/synthgen.hpp"

namespace flakiloc::synth {

namespace {

using StatementSet = std::set<StatementId>;

StatementSet as_set(const CoverageSet& c) {
    StatementSet out;
    for (const auto& f : c.files())
        for (auto line : f.lines) {
            StatementId s;
            s.file = f.file;
            s.line = line;
            out.insert(std::move(s));
        }
    return out;
}

struct Row {
    bool flaky;
    StatementSet covered;
};

}  // namespace

std::optional<RankTriple> oracle_localize(const SynthOutput& output, FormulaId formula, AggregationMode mode,
                                          const ScoreConfig& cfg) {
    std::vector<Row> rows;
    StatementSet universe;

    for (const auto& h : output.histories) {
        std::vector<StatementSet> runs;
        bool passed = false, failed = false;
        for (const auto& e : h.executions()) {
            if (e.order_mode != OrderMode::same || e.outcome == Outcome::skip) continue;
            if (e.outcome == Outcome::pass)
                passed = true;
            else
                failed = true;
            runs.push_back(as_set(e.covered));
            universe.insert(runs.back().begin(), runs.back().end());
        }
        if (runs.empty()) continue;
        const bool flaky = passed && failed;

        auto fold = [&](bool intersect) {
            StatementSet acc = runs.front();
            for (std::size_t i = 1; i < runs.size(); ++i) {
                StatementSet next;
                if (intersect)
                    std::set_intersection(acc.begin(), acc.end(), runs[i].begin(), runs[i].end(),
                                          std::inserter(next, next.end()));
                else
                    std::set_union(acc.begin(), acc.end(), runs[i].begin(), runs[i].end(),
                                   std::inserter(next, next.end()));
                acc = std::move(next);
            }
            return acc;
        };

        switch (mode) {
            case AggregationMode::sffl: rows.push_back({flaky, fold(flaky)}); break;
            case AggregationMode::single: rows.push_back({flaky, runs.front()}); break;
            case AggregationMode::union_: rows.push_back({flaky, fold(false)}); break;
            case AggregationMode::individual:
                for (auto& r : runs) rows.push_back({flaky, r});
                break;
        }
    }

    std::uint64_t total_flaky = 0, total_stable = 0;
    for (const auto& r : rows) (r.flaky ? total_flaky : total_stable) += 1;

    std::vector<std::pair<StatementId, Score>> scored;
    for (const auto& s : universe) {
        StatementCounts c{0, 0, total_flaky, total_stable};
        for (const auto& r : rows)
            if (r.covered.count(s)) (r.flaky ? c.flaky_s : c.stable_s) += 1;
        scored.emplace_back(s, score(formula, c, cfg));
    }

    std::vector<Score> sorted;
    for (const auto& [s, v] : scored) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    std::optional<RankTriple> best;
    for (const auto& loc : output.fault.locations) {
        const bool covered = std::any_of(rows.begin(), rows.end(), [&](const Row& r) { return r.covered.count(loc) > 0; });
        if (!covered) continue;
        const auto it = std::find_if(scored.begin(), scored.end(), [&](const auto& p) { return p.first == loc; });
        const Score v = it->second;
        const auto first = std::find(sorted.begin(), sorted.end(), v);
        const auto last = std::find(sorted.rbegin(), sorted.rend(), v);
        const RankTriple r{static_cast<std::uint64_t>(first - sorted.begin()) + 1,
                           static_cast<std::uint64_t>(sorted.rend() - last)};
        if (!best) {
            best = r;
        } else {
            best->best = std::min(best->best, r.best);
            best->worst = std::min(best->worst, r.worst);
        }
    }
    return best;
}

}  // namespace flakiloc::synth
