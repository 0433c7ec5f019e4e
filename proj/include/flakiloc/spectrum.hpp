#pragma once

// Domain model for coverage spectra: statements, executions, per-test
// histories, flakiness verdicts and order-mode selection.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flakiloc/coverage_bits.hpp"

namespace flakiloc {

// Converts backslashes to '/', collapses repeated separators and strips a
// leading "./". No symlink or case resolution.
std::string normalize_path(std::string_view path);

struct StatementId {
    std::string file;
    std::uint32_t line = 0;

    StatementId() = default;
    // Throws DomainError on an empty file or line 0. The path is normalized.
    StatementId(std::string_view file, std::uint32_t line);

    friend bool operator==(const StatementId&, const StatementId&) = default;
    friend std::strong_ordering operator<=>(const StatementId& a, const StatementId& b) {
        if (auto c = a.file <=> b.file; c != 0) return c;
        return a.line <=> b.line;
    }
};

std::string to_string(const StatementId& s);  // "file:line"

enum class Outcome { pass, fail, error, skip };
enum class OrderMode { same, random };
enum class Verdict { flaky, stable };
enum class FlakinessCategory { NOD, OD };

std::string_view to_string(Outcome o);
std::string_view to_string(OrderMode m);
std::string_view to_string(Verdict v);
std::string_view to_string(FlakinessCategory c);
std::optional<Outcome> parse_outcome(std::string_view s);
std::optional<OrderMode> parse_order_mode(std::string_view s);

// Set of covered statements, stored per file as strictly ascending line lists.
// Files are kept sorted and never empty, so equality is set equality.
class CoverageSet {
public:
    struct FileLines {
        std::string file;
        std::vector<std::uint32_t> lines;
        friend bool operator==(const FileLines&, const FileLines&) = default;
    };

    CoverageSet() = default;
    // Sorts and deduplicates; merges entries naming the same (normalized) file.
    explicit CoverageSet(std::vector<FileLines> files);
    explicit CoverageSet(std::span<const StatementId> statements);

    const std::vector<FileLines>& files() const noexcept { return files_; }
    std::size_t size() const noexcept;
    bool empty() const noexcept { return files_.empty(); }
    bool contains(const StatementId& s) const;
    std::vector<StatementId> statements() const;

    friend bool operator==(const CoverageSet&, const CoverageSet&) = default;

private:
    std::vector<FileLines> files_;
};

struct ExecutionRecord {
    std::string test_id;
    std::string run_id;
    OrderMode order_mode = OrderMode::same;
    Outcome outcome = Outcome::pass;
    CoverageSet covered;
};

// All executions of one test, in ingestion order.
class TestHistory {
public:
    TestHistory() = default;
    explicit TestHistory(std::string test_id) : test_id_(std::move(test_id)) {}
    // Throws DomainError if a record names another test or repeats a run_id.
    TestHistory(std::string test_id, std::vector<ExecutionRecord> executions);

    const std::string& test_id() const noexcept { return test_id_; }
    std::span<const ExecutionRecord> executions() const noexcept { return executions_; }
    std::size_t size() const noexcept { return executions_.size(); }
    bool empty() const noexcept { return executions_.empty(); }

    void append(ExecutionRecord rec);

private:
    std::string test_id_;
    std::vector<ExecutionRecord> executions_;
};

// Executions with the given order mode, minus skips, ingestion order kept.
TestHistory select_runs(const TestHistory& history, OrderMode mode);

// flaky iff both pass and fail (error counts as fail) occur among non-skip runs.
Verdict classify(const TestHistory& history);

// NOD if flaky under same order; OD if only flaky under random order.
FlakinessCategory classify_category(const TestHistory& same_order, const TestHistory& random_order);

// Statement universe: sorted, deduplicated union of every covered set.
class Universe {
public:
    Universe() = default;
    // Input must be strictly ascending; throws DomainError otherwise.
    explicit Universe(std::vector<StatementId> sorted);

    std::span<const StatementId> statements() const noexcept { return statements_; }
    std::size_t size() const noexcept { return statements_.size(); }
    const StatementId& operator[](std::size_t i) const { return statements_[i]; }

    std::optional<std::size_t> index_of(const StatementId& s) const;
    // Bitset of the statements of `covered` that belong to the universe.
    CoverageBits project(const CoverageSet& covered) const;

private:
    struct FileBlock {
        std::size_t offset = 0;
        std::size_t count = 0;
        std::uint32_t max_line = 0;
        std::vector<std::int32_t> dense;  // line -> block-relative position, -1 if absent
    };
    std::optional<std::size_t> locate(const FileBlock& block, std::uint32_t line) const;

    std::vector<StatementId> statements_;
    std::unordered_map<std::string, FileBlock> files_;
};

Universe build_universe(std::span<const TestHistory> histories);

}  // namespace flakiloc
