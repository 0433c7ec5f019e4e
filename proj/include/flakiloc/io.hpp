#pragma once

// File formats.
//
// Run file: UTF-8, one JSON object per line (blank lines ignored):
//   {"run_id": "run1", "order_mode": "same"|"random", "test_id": "t1",
//    "outcome": "pass"|"fail"|"error"|"skip",
//    "coverage": {"path/to/file.py": [1, 2, 3], ...}}
// Line numbers are >= 1 and strictly ascending per file. A (test_id, run_id)
// pair may appear once.
//
// Ground truth: a JSON array of
//   {"test_id": "t1", "locations": [{"file": "gen.py", "line": 2}, ...],
//    "root_cause": "network"}            // root_cause optional

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flakiloc/aggregation.hpp"
#include "flakiloc/ranking.hpp"
#include "flakiloc/spectrum.hpp"
#include "flakiloc/suspiciousness.hpp"

namespace flakiloc::io {

// Histories appear in order of each test's first record; executions in file order.
std::vector<TestHistory> parse_runs(const std::filesystem::path& path);
std::vector<TestHistory> parse_runs(std::istream& in);

std::vector<FaultSpec> parse_ground_truth(const std::filesystem::path& path);
std::vector<FaultSpec> parse_ground_truth(std::istream& in);

void write_runs(std::ostream& out, std::span<const TestHistory> histories);
void write_ground_truth(std::ostream& out, std::span<const FaultSpec> faults);

// %.17g, except +inf -> "inf" (quoted by the JSON writer).
std::string format_double(double v);

struct ReportMetadata {
    AggregationMode mode = AggregationMode::sffl;
    FormulaId formula = FormulaId::dstar;
    unsigned dstar_exponent = 2;
    OrderMode order = OrderMode::same;
    RankKind rank_kind = RankKind::average;
    std::uint64_t n = 0;
    bool n_from_sloc = false;  // false: N defaulted to the universe size
    std::size_t tests = 0;
    std::size_t flaky_tests = 0;
    std::size_t stable_tests = 0;
    std::size_t executions = 0;
    std::size_t rows = 0;
    std::size_t total_flaky = 0;
    std::size_t total_stable = 0;
    std::size_t universe_size = 0;
};

struct ReportStatement {
    StatementId statement;
    Score score = 0;
    RankTriple rank;
};

struct ReportFault {
    std::string test_id;
    std::optional<RankTriple> rank;  // nullopt: not found
    std::optional<double> exam;
};

struct ProgressionPoint {
    std::uint64_t cutoff = 0;
    double fraction = 0;
};

struct LocalizationReport {
    ReportMetadata metadata;
    std::vector<ReportStatement> statements;  // score desc, then file, line
    std::vector<ReportFault> faults;
    std::vector<ProgressionPoint> progression;
};

enum class ReportFormat { json, tsv };

// Deterministic: identical reports give identical bytes.
std::string emit_report(const LocalizationReport& report, ReportFormat format);

}  // namespace flakiloc::io
