#include "flakiloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flakiloc/error.hpp"
#include "flakiloc/stats.hpp"

namespace flakiloc {

ComparisonSummary compare(const MethodResult& sffl, const MethodResult& baseline) {
    if (sffl.exam.size() != baseline.exam.size())
        throw DomainError("compare: '" + sffl.label + "' and '" + baseline.label + "' cover different tests");

    ComparisonSummary out;
    std::vector<double> deltas;
    double improvement_sum = 0;
    std::size_t improvement_n = 0;

    for (const auto& [test, mine] : sffl.exam) {
        auto it = baseline.exam.find(test);
        if (it == baseline.exam.end())
            throw DomainError("compare: test '" + test + "' missing from '" + baseline.label + "'");
        const auto& theirs = it->second;
        if (!mine || !theirs) {
            ++out.not_found;
            continue;
        }
        if (*mine < *theirs)
            ++out.better;
        else if (*mine > *theirs)
            ++out.worse;
        else
            ++out.unchanged;
        deltas.push_back(*theirs - *mine);
        improvement_sum += (*theirs - *mine) / *theirs;
        ++improvement_n;
    }
    if (improvement_n > 0) {
        out.mean_improvement = improvement_sum / static_cast<double>(improvement_n);
        out.p_value = stats::wilcoxon_signed_rank(deltas);
    }
    return out;
}

Summary summarize(std::vector<double> values) {
    if (values.empty()) throw DomainError("summarize: empty sample");
    std::sort(values.begin(), values.end());
    Summary s;
    const auto n = values.size();
    s.median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

std::vector<GroupStats> group_stats(const MethodResult& results, std::span<const FaultSpec> faults) {
    std::map<std::string, const FaultSpec*> by_test;
    for (const auto& f : faults) by_test.emplace(f.test_id, &f);

    std::map<RootCause, std::pair<std::size_t, std::vector<double>>> groups;
    for (const auto& [test, value] : results.exam) {
        auto it = by_test.find(test);
        if (it == by_test.end() || !it->second->root_cause)
            throw DomainError("group_stats: test '" + test + "' has no root-cause tag");
        auto& g = groups[*it->second->root_cause];
        if (value)
            g.second.push_back(*value);
        else
            ++g.first;
    }

    std::vector<GroupStats> out;
    for (auto& [cause, g] : groups) {
        GroupStats gs;
        gs.cause = cause;
        gs.not_found = g.first;
        gs.count = g.first + g.second.size();
        if (!g.second.empty()) {
            const auto s = summarize(std::move(g.second));
            gs.median = s.median;
            gs.mean = s.mean;
            gs.std_dev = s.std_dev;
        }
        out.push_back(gs);
    }
    return out;
}

}  // namespace flakiloc
