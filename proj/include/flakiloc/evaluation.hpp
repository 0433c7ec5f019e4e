#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flakiloc/ranking.hpp"

namespace flakiloc {

// EXAM score per test for one (formula, aggregation mode) pair; nullopt = not found.
struct MethodResult {
    std::string label;
    std::map<std::string, std::optional<double>> exam;
};

struct ComparisonSummary {
    std::size_t better = 0;     // SFFL EXAM strictly lower
    std::size_t unchanged = 0;
    std::size_t worse = 0;
    std::size_t not_found = 0;  // fault missed by at least one of the two methods
    // Mean of (base - sffl) / base over tests found by both; nullopt if none.
    std::optional<double> mean_improvement;
    // Two-sided Wilcoxon signed-rank p over the same tests; nullopt if none.
    std::optional<double> p_value;
};

// Throws DomainError if the two results cover different test sets.
ComparisonSummary compare(const MethodResult& sffl, const MethodResult& baseline);

struct GroupStats {
    RootCause cause = RootCause::other;
    std::size_t count = 0;      // tests in the group, found or not
    std::size_t not_found = 0;
    std::optional<double> median;
    std::optional<double> mean;
    std::optional<double> std_dev;  // sample standard deviation; absent below two values
};

// Partitions `results` by the root cause of the matching FaultSpec (matched on
// test_id). Throws DomainError when a test has no fault or no root-cause tag.
std::vector<GroupStats> group_stats(const MethodResult& results, std::span<const FaultSpec> faults);

// Median, mean and sample standard deviation of a non-empty sample.
struct Summary {
    double median = 0;
    double mean = 0;
    std::optional<double> std_dev;
};
Summary summarize(std::vector<double> values);

}  // namespace flakiloc
