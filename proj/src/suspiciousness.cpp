#include "flakiloc/suspiciousness.hpp"

#include <cmath>
#include <limits>

#include "flakiloc/error.hpp"
#include "flakiloc/kernels.hpp"

namespace flakiloc {

std::string_view to_string(FormulaId f) {
    switch (f) {
        case FormulaId::tarantula: return "tarantula";
        case FormulaId::ochiai: return "ochiai";
        case FormulaId::dstar: return "dstar";
        case FormulaId::op2: return "op2";
        case FormulaId::barinel: return "barinel";
    }
    return "?";
}

std::optional<FormulaId> parse_formula(std::string_view s) {
    for (auto f : kAllFormulas)
        if (to_string(f) == s) return f;
    return std::nullopt;
}

double safe_div(double numerator, double denominator) {
    if (numerator < 0 || denominator < 0 || std::isnan(numerator) || std::isnan(denominator))
        throw DomainError("safe_div: operands must be non-negative");
    if (denominator == 0) return numerator == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

namespace detail {

namespace {
// Only called with non-negative operands, so the checks in safe_div never fire.
inline double sdiv(double n, double d) {
    if (d == 0) return n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return n / d;
}

inline double ipow(std::uint64_t base, unsigned e) {
    double r = 1.0;
    const auto b = static_cast<double>(base);
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
}
}  // namespace

// Every quotient is formed from exact integer numerator and denominator and
// rounded once, so statements whose scores are equal as rationals get
// bit-identical doubles. Scaling every count by k therefore never splits or
// merges a tie.
Score score_unchecked(FormulaId formula, std::uint64_t f, std::uint64_t s, std::uint64_t tf,
                      std::uint64_t ts, unsigned dstar_exponent) {
    const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
    switch (formula) {
        case FormulaId::tarantula:
            // (f/tf) / (f/tf + s/ts). Either ratio is 0 when its total is 0.
            if (tf == 0) return 0.0;
            if (ts == 0) return f > 0 ? 1.0 : 0.0;
            return sdiv(d(f * ts), d(f * ts + s * tf));
        case FormulaId::ochiai:
            // f / sqrt(tf * (f + s)) == sqrt(f^2 / (tf * (f + s)))
            return std::sqrt(sdiv(d(f * f), d(tf * (f + s))));
        case FormulaId::dstar:
            return sdiv(ipow(f, dstar_exponent), d(s + (tf - f)));
        case FormulaId::op2:
            return d(f) - d(s) / d(ts + 1);
        case FormulaId::barinel:
            // 1 - s/(s+f) == f/(s+f); the latter is 0 rather than 1 at s = f = 0.
            return sdiv(d(f), d(s + f));
    }
    return 0.0;
}

}  // namespace detail

Score score(FormulaId formula, const StatementCounts& c, const ScoreConfig& cfg) {
    if (c.flaky_s > c.total_flaky || c.stable_s > c.total_stable)
        throw DomainError("statement counts exceed totals");
    if (cfg.dstar_exponent < 1) throw DomainError("dstar exponent must be >= 1");
    return detail::score_unchecked(formula, c.flaky_s, c.stable_s, c.total_flaky, c.total_stable,
                                   cfg.dstar_exponent);
}

std::vector<Score> score_matrix(const FaultLocalizationMatrix& matrix, FormulaId formula,
                                const ScoreConfig& cfg) {
    if (cfg.dstar_exponent < 1) throw DomainError("dstar exponent must be >= 1");
    const auto counts = kernels::parallel::column_counts(matrix);
    return kernels::parallel::score_columns(counts, matrix.total_flaky, matrix.total_stable, formula, cfg);
}

}  // namespace flakiloc
