#include "flakiloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "flakiloc/error.hpp"

namespace flakiloc::io {

using nlohmann::json;

namespace {

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

const json& require(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", line);
    return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
    const auto& v = require(obj, key, line);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
    return v.get<std::string>();
}

std::uint32_t line_number(const json& v, std::size_t line) {
    if (!v.is_number_integer()) throw ParseError("line numbers must be integers", line);
    const auto n = v.get<std::int64_t>();
    if (n < 1) throw ParseError("line number " + std::to_string(n) + " is < 1", line);
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw ParseError("line number " + std::to_string(n) + " is out of range", line);
    return static_cast<std::uint32_t>(n);
}

ExecutionRecord parse_record(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError("record must be a JSON object", line);
    ExecutionRecord rec;
    rec.run_id = require_string(j, "run_id", line);
    rec.test_id = require_string(j, "test_id", line);
    if (rec.test_id.empty()) throw ParseError("empty test_id", line);

    const auto mode = require_string(j, "order_mode", line);
    auto m = parse_order_mode(mode);
    if (!m) throw ParseError("unknown order_mode '" + mode + "'", line);
    rec.order_mode = *m;

    const auto outcome = require_string(j, "outcome", line);
    auto o = parse_outcome(outcome);
    if (!o) throw ParseError("unknown outcome '" + outcome + "'", line);
    rec.outcome = *o;

    const auto& cov = require(j, "coverage", line);
    if (!cov.is_object()) throw ParseError("field 'coverage' must be an object", line);
    std::vector<CoverageSet::FileLines> files;
    for (const auto& [file, lines] : cov.items()) {
        if (file.empty()) throw ParseError("empty file name in coverage", line);
        if (!lines.is_array()) throw ParseError("coverage of '" + file + "' must be an array", line);
        CoverageSet::FileLines fl{file, {}};
        for (const auto& v : lines) {
            const auto n = line_number(v, line);
            if (!fl.lines.empty() && n <= fl.lines.back())
                throw ParseError("coverage lines of '" + file + "' are not strictly ascending", line);
            fl.lines.push_back(n);
        }
        files.push_back(std::move(fl));
    }
    rec.covered = CoverageSet(std::move(files));
    return rec;
}

}  // namespace

std::vector<TestHistory> parse_runs(std::istream& in) {
    std::vector<TestHistory> histories;
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_map<std::string, std::unordered_set<std::string>> seen_runs;

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed record: ") + e.what(), line);
        }
        auto rec = parse_record(j, line);
        if (!seen_runs[rec.test_id].insert(rec.run_id).second)
            throw ParseError("duplicate (test_id, run_id) = (" + rec.test_id + ", " + rec.run_id + ")", line);
        auto [it, inserted] = index.emplace(rec.test_id, histories.size());
        if (inserted) histories.emplace_back(rec.test_id);
        histories[it->second].append(std::move(rec));
    }
    return histories;
}

std::vector<TestHistory> parse_runs(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_runs(in);
}

std::vector<FaultSpec> parse_ground_truth(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed ground truth: ") + e.what(), 0);
    }
    if (!doc.is_array()) throw ParseError("ground truth must be a JSON array", 0);

    std::vector<FaultSpec> out;
    std::size_t record = 0;
    for (const auto& r : doc) {
        ++record;
        const auto where = "record " + std::to_string(record) + ": ";
        if (!r.is_object()) throw ParseError(where + "must be an object", 0);
        FaultSpec f;
        auto tid = r.find("test_id");
        if (tid == r.end() || !tid->is_string()) throw ParseError(where + "missing string 'test_id'", 0);
        f.test_id = tid->get<std::string>();

        auto locs = r.find("locations");
        if (locs == r.end() || !locs->is_array()) throw ParseError(where + "missing array 'locations'", 0);
        std::set<StatementId> unique;
        for (const auto& l : *locs) {
            if (!l.is_object() || !l.contains("file") || !l.contains("line") || !l["file"].is_string())
                throw ParseError(where + "location needs 'file' and 'line'", 0);
            const auto& ln = l["line"];
            if (!ln.is_number_integer() || ln.get<std::int64_t>() < 1 ||
                ln.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
                throw ParseError(where + "location line must be an integer >= 1", 0);
            try {
                StatementId s(l["file"].get<std::string>(), static_cast<std::uint32_t>(ln.get<std::int64_t>()));
                if (unique.insert(s).second) f.locations.push_back(std::move(s));
            } catch (const DomainError& e) {
                throw ParseError(where + e.what(), 0);
            }
        }
        if (f.locations.empty()) throw ParseError(where + "'locations' must be non-empty", 0);

        if (auto rc = r.find("root_cause"); rc != r.end() && !rc->is_null()) {
            if (!rc->is_string()) throw ParseError(where + "'root_cause' must be a string", 0);
            f.root_cause = parse_root_cause(rc->get<std::string>());
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<FaultSpec> parse_ground_truth(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_ground_truth(in);
}

void write_runs(std::ostream& out, std::span<const TestHistory> histories) {
    for (const auto& h : histories)
        for (const auto& e : h.executions()) {
            nlohmann::ordered_json j;
            j["run_id"] = e.run_id;
            j["order_mode"] = std::string(to_string(e.order_mode));
            j["test_id"] = e.test_id;
            j["outcome"] = std::string(to_string(e.outcome));
            nlohmann::ordered_json cov = nlohmann::ordered_json::object();
            for (const auto& f : e.covered.files()) cov[f.file] = f.lines;
            j["coverage"] = std::move(cov);
            out << j.dump() << '\n';
        }
}

void write_ground_truth(std::ostream& out, std::span<const FaultSpec> faults) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& f : faults) {
        nlohmann::ordered_json r;
        r["test_id"] = f.test_id;
        auto locs = nlohmann::ordered_json::array();
        for (const auto& l : f.locations) locs.push_back({{"file", l.file}, {"line", l.line}});
        r["locations"] = std::move(locs);
        if (f.root_cause) r["root_cause"] = std::string(to_string(*f.root_cause));
        doc.push_back(std::move(r));
    }
    out << doc.dump(2) << '\n';
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) { return json(s).dump(); }

// JSON number, or the string "inf" for infinities.
std::string json_number(double v) {
    const auto s = format_double(v);
    return std::isinf(v) ? quote(s) : s;
}

void write_rank(std::ostringstream& os, const RankTriple& r) {
    os << "\"best\": " << r.best << ", \"average\": " << format_double(r.average()) << ", \"worst\": " << r.worst;
}

std::string emit_json(const LocalizationReport& rep) {
    const auto& m = rep.metadata;
    std::ostringstream os;
    os << "{\n  \"metadata\": {\n"
       << "    \"mode\": " << quote(std::string(to_string(m.mode))) << ",\n"
       << "    \"formula\": " << quote(std::string(to_string(m.formula))) << ",\n"
       << "    \"dstar_exponent\": " << m.dstar_exponent << ",\n"
       << "    \"order\": " << quote(std::string(to_string(m.order))) << ",\n"
       << "    \"rank_kind\": " << quote(std::string(to_string(m.rank_kind))) << ",\n"
       << "    \"n\": " << m.n << ",\n"
       << "    \"n_source\": " << quote(m.n_from_sloc ? "sloc" : "universe") << ",\n"
       << "    \"tests\": " << m.tests << ",\n"
       << "    \"flaky_tests\": " << m.flaky_tests << ",\n"
       << "    \"stable_tests\": " << m.stable_tests << ",\n"
       << "    \"executions\": " << m.executions << ",\n"
       << "    \"rows\": " << m.rows << ",\n"
       << "    \"total_flaky\": " << m.total_flaky << ",\n"
       << "    \"total_stable\": " << m.total_stable << ",\n"
       << "    \"universe_size\": " << m.universe_size << ",\n"
       << "    \"deterministic\": " << (m.mode == AggregationMode::single ? "false" : "true") << ",\n"
       << "    \"determinism_note\": "
       << quote(m.mode == AggregationMode::single
                    ? "single mode uses the first execution in ingestion order; reordering runs can change the ranking"
                    : "ranking is invariant under reordering of runs and input records")
       << "\n  },\n";

    os << "  \"statements\": [";
    for (std::size_t i = 0; i < rep.statements.size(); ++i) {
        const auto& s = rep.statements[i];
        os << (i ? ",\n    " : "\n    ") << "{\"file\": " << quote(s.statement.file) << ", \"line\": " << s.statement.line
           << ", \"score\": " << json_number(s.score) << ", ";
        write_rank(os, s.rank);
        os << "}";
    }
    os << (rep.statements.empty() ? "],\n" : "\n  ],\n");

    os << "  \"faults\": [";
    for (std::size_t i = 0; i < rep.faults.size(); ++i) {
        const auto& f = rep.faults[i];
        os << (i ? ",\n    " : "\n    ") << "{\"test_id\": " << quote(f.test_id)
           << ", \"found\": " << (f.rank ? "true" : "false");
        if (f.rank) {
            os << ", ";
            write_rank(os, *f.rank);
        }
        if (f.exam) os << ", \"exam\": " << json_number(*f.exam);
        os << "}";
    }
    os << (rep.faults.empty() ? "],\n" : "\n  ],\n");

    os << "  \"progression\": [";
    for (std::size_t i = 0; i < rep.progression.size(); ++i) {
        const auto& p = rep.progression[i];
        os << (i ? ",\n    " : "\n    ") << "{\"cutoff\": " << p.cutoff << ", \"fraction\": " << format_double(p.fraction)
           << "}";
    }
    os << (rep.progression.empty() ? "]\n" : "\n  ]\n");
    os << "}\n";
    return os.str();
}

std::string emit_tsv(const LocalizationReport& rep) {
    std::ostringstream os;
    os << "file\tline\tscore\tbest\taverage\tworst\n";
    for (const auto& s : rep.statements)
        os << s.statement.file << '\t' << s.statement.line << '\t' << format_double(s.score) << '\t' << s.rank.best
           << '\t' << format_double(s.rank.average()) << '\t' << s.rank.worst << '\n';
    return os.str();
}

}  // namespace

std::string emit_report(const LocalizationReport& report, ReportFormat format) {
    return format == ReportFormat::json ? emit_json(report) : emit_tsv(report);
}

}  // namespace flakiloc::io
