#include "flakiloc/spectrum.hpp"

#include <algorithm>
#include <unordered_set>

#include "flakiloc/error.hpp"

namespace flakiloc {

std::string normalize_path(std::string_view path) {
    std::string out;
    out.reserve(path.size());
    for (char c : path) {
        if (c == '\\') c = '/';
        if (c == '/' && !out.empty() && out.back() == '/') continue;
        out.push_back(c);
    }
    while (out.size() > 2 && out.compare(0, 2, "./") == 0) out.erase(0, 2);
    return out;
}

StatementId::StatementId(std::string_view f, std::uint32_t l) : file(normalize_path(f)), line(l) {
    if (file.empty()) throw DomainError("statement file must be non-empty");
    if (line < 1) throw DomainError("statement line must be >= 1 (" + file + ")");
}

std::string to_string(const StatementId& s) { return s.file + ":" + std::to_string(s.line); }

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::pass: return "pass";
        case Outcome::fail: return "fail";
        case Outcome::error: return "error";
        case Outcome::skip: return "skip";
    }
    return "?";
}

std::string_view to_string(OrderMode m) { return m == OrderMode::same ? "same" : "random"; }
std::string_view to_string(Verdict v) { return v == Verdict::flaky ? "flaky" : "stable"; }
std::string_view to_string(FlakinessCategory c) { return c == FlakinessCategory::NOD ? "NOD" : "OD"; }

std::optional<Outcome> parse_outcome(std::string_view s) {
    if (s == "pass") return Outcome::pass;
    if (s == "fail") return Outcome::fail;
    if (s == "error") return Outcome::error;
    if (s == "skip") return Outcome::skip;
    return std::nullopt;
}

std::optional<OrderMode> parse_order_mode(std::string_view s) {
    if (s == "same") return OrderMode::same;
    if (s == "random") return OrderMode::random;
    return std::nullopt;
}

// ---- CoverageSet ----

CoverageSet::CoverageSet(std::vector<FileLines> files) {
    for (auto& f : files) {
        f.file = normalize_path(f.file);
        if (f.file.empty()) throw DomainError("coverage entry with empty file name");
    }
    std::stable_sort(files.begin(), files.end(),
                     [](const FileLines& a, const FileLines& b) { return a.file < b.file; });
    for (auto& f : files) {
        if (f.lines.empty()) continue;
        if (!files_.empty() && files_.back().file == f.file) {
            auto& lines = files_.back().lines;
            lines.insert(lines.end(), f.lines.begin(), f.lines.end());
        } else {
            files_.push_back(std::move(f));
        }
    }
    for (auto& f : files_) {
        std::sort(f.lines.begin(), f.lines.end());
        f.lines.erase(std::unique(f.lines.begin(), f.lines.end()), f.lines.end());
        if (f.lines.front() == 0) throw DomainError("coverage line 0 in " + f.file);
    }
}

namespace {
std::vector<CoverageSet::FileLines> group_by_file(std::span<const StatementId> statements) {
    std::map<std::string, std::vector<std::uint32_t>> by_file;
    for (const auto& s : statements) by_file[s.file].push_back(s.line);
    std::vector<CoverageSet::FileLines> out;
    for (auto& [file, lines] : by_file) out.push_back({file, std::move(lines)});
    return out;
}
}  // namespace

CoverageSet::CoverageSet(std::span<const StatementId> statements)
    : CoverageSet(group_by_file(statements)) {}

std::size_t CoverageSet::size() const noexcept {
    std::size_t n = 0;
    for (const auto& f : files_) n += f.lines.size();
    return n;
}

bool CoverageSet::contains(const StatementId& s) const {
    auto it = std::lower_bound(files_.begin(), files_.end(), s.file,
                               [](const FileLines& f, const std::string& name) { return f.file < name; });
    if (it == files_.end() || it->file != s.file) return false;
    return std::binary_search(it->lines.begin(), it->lines.end(), s.line);
}

std::vector<StatementId> CoverageSet::statements() const {
    std::vector<StatementId> out;
    out.reserve(size());
    for (const auto& f : files_)
        for (auto line : f.lines) out.emplace_back(f.file, line);
    return out;
}

// ---- TestHistory ----

TestHistory::TestHistory(std::string test_id, std::vector<ExecutionRecord> executions)
    : test_id_(std::move(test_id)) {
    executions_.reserve(executions.size());
    for (auto& e : executions) append(std::move(e));
}

void TestHistory::append(ExecutionRecord rec) {
    if (rec.test_id != test_id_)
        throw DomainError("execution of '" + rec.test_id + "' added to history of '" + test_id_ + "'");
    for (const auto& e : executions_)
        if (e.run_id == rec.run_id)
            throw DomainError("duplicate run '" + rec.run_id + "' for test '" + test_id_ + "'");
    executions_.push_back(std::move(rec));
}

TestHistory select_runs(const TestHistory& history, OrderMode mode) {
    TestHistory out(history.test_id());
    for (const auto& e : history.executions())
        if (e.order_mode == mode && e.outcome != Outcome::skip) out.append(e);
    return out;
}

Verdict classify(const TestHistory& history) {
    bool passed = false;
    bool failed = false;
    for (const auto& e : history.executions()) {
        switch (e.outcome) {
            case Outcome::pass: passed = true; break;
            case Outcome::fail:
            case Outcome::error: failed = true; break;
            case Outcome::skip: break;
        }
    }
    if (!passed && !failed)
        throw EmptyHistoryError("test '" + history.test_id() + "' has no non-skip execution");
    return passed && failed ? Verdict::flaky : Verdict::stable;
}

FlakinessCategory classify_category(const TestHistory& same_order, const TestHistory& random_order) {
    auto flaky_in = [](const TestHistory& h) {
        for (const auto& e : h.executions())
            if (e.outcome != Outcome::skip) return classify(h) == Verdict::flaky;
        return false;
    };
    if (flaky_in(same_order)) return FlakinessCategory::NOD;
    if (flaky_in(random_order)) return FlakinessCategory::OD;
    throw NotFlakyError("test '" + same_order.test_id() + "' is stable in both order modes");
}

// ---- Universe ----

Universe::Universe(std::vector<StatementId> sorted) : statements_(std::move(sorted)) {
    for (std::size_t i = 1; i < statements_.size(); ++i)
        if (!(statements_[i - 1] < statements_[i]))
            throw DomainError("universe must be strictly ascending");

    for (std::size_t i = 0; i < statements_.size();) {
        std::size_t j = i;
        while (j < statements_.size() && statements_[j].file == statements_[i].file) ++j;
        FileBlock block;
        block.offset = i;
        block.count = j - i;
        block.max_line = statements_[j - 1].line;
        // Dense line table when it stays proportional to the block.
        if (block.max_line <= 4 * block.count + 1024) {
            block.dense.assign(block.max_line + 1, -1);
            for (std::size_t k = i; k < j; ++k)
                block.dense[statements_[k].line] = static_cast<std::int32_t>(k - i);
        }
        files_.emplace(statements_[i].file, std::move(block));
        i = j;
    }
}

std::optional<std::size_t> Universe::locate(const FileBlock& block, std::uint32_t line) const {
    if (line > block.max_line) return std::nullopt;
    if (!block.dense.empty()) {
        const auto rel = block.dense[line];
        if (rel < 0) return std::nullopt;
        return block.offset + static_cast<std::size_t>(rel);
    }
    auto first = statements_.begin() + static_cast<std::ptrdiff_t>(block.offset);
    auto last = first + static_cast<std::ptrdiff_t>(block.count);
    auto it = std::lower_bound(first, last, line,
                               [](const StatementId& s, std::uint32_t l) { return s.line < l; });
    if (it == last || it->line != line) return std::nullopt;
    return static_cast<std::size_t>(it - statements_.begin());
}

std::optional<std::size_t> Universe::index_of(const StatementId& s) const {
    auto it = files_.find(s.file);
    if (it == files_.end()) return std::nullopt;
    return locate(it->second, s.line);
}

CoverageBits Universe::project(const CoverageSet& covered) const {
    CoverageBits bits(statements_.size());
    for (const auto& f : covered.files()) {
        auto it = files_.find(f.file);
        if (it == files_.end()) continue;
        for (auto line : f.lines)
            if (auto pos = locate(it->second, line)) bits.set(*pos);
    }
    return bits;
}

Universe build_universe(std::span<const TestHistory> histories) {
    // Per-file line buffers, compacted whenever they double past the distinct count.
    struct Lines {
        std::vector<std::uint32_t> v;
        std::size_t compacted = 0;
        void compact() {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            compacted = v.size();
        }
    };
    std::map<std::string, Lines> by_file;
    for (const auto& h : histories)
        for (const auto& e : h.executions())
            for (const auto& f : e.covered.files()) {
                auto& lines = by_file[f.file];
                lines.v.insert(lines.v.end(), f.lines.begin(), f.lines.end());
                if (lines.v.size() > 2 * lines.compacted + 4096) lines.compact();
            }

    std::vector<StatementId> out;
    for (auto& [file, lines] : by_file) {
        lines.compact();
        for (auto l : lines.v) {
            StatementId s;
            s.file = file;
            s.line = l;
            out.push_back(std::move(s));
        }
    }
    return Universe(std::move(out));
}

}  // namespace flakiloc
