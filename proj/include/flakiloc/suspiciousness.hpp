#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flakiloc/aggregation.hpp"

namespace flakiloc {

enum class FormulaId { tarantula, ochiai, dstar, op2, barinel };

inline constexpr FormulaId kAllFormulas[] = {FormulaId::tarantula, FormulaId::ochiai, FormulaId::dstar,
                                             FormulaId::op2, FormulaId::barinel};

std::string_view to_string(FormulaId f);
std::optional<FormulaId> parse_formula(std::string_view s);

struct ScoreConfig {
    unsigned dstar_exponent = 2;
};

// Binary64; +inf is a legal DStar score and compares above every finite score.
using Score = double;

struct StatementCounts {
    std::uint64_t flaky_s = 0;
    std::uint64_t stable_s = 0;
    std::uint64_t total_flaky = 0;
    std::uint64_t total_stable = 0;
};

// 0/0 -> 0, x/0 -> +inf for x > 0. Throws DomainError on negative input.
double safe_div(double numerator, double denominator);

// Throws DomainError when a count exceeds its total or the DStar exponent is 0.
Score score(FormulaId formula, const StatementCounts& c, const ScoreConfig& cfg = {});

namespace detail {
// score() without precondition checks; used by the column kernels.
Score score_unchecked(FormulaId formula, std::uint64_t flaky_s, std::uint64_t stable_s,
                      std::uint64_t total_flaky, std::uint64_t total_stable, unsigned dstar_exponent);
}

// One score per universe statement.
std::vector<Score> score_matrix(const FaultLocalizationMatrix& matrix, FormulaId formula,
                                const ScoreConfig& cfg = {});

}  // namespace flakiloc
