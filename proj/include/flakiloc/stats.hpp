#pragma once

#include <cstddef>
#include <span>

namespace flakiloc::stats {

struct WilcoxonResult {
    double w_plus = 0;          // sum of ranks of positive differences
    std::size_t n_nonzero = 0;  // pairs left after dropping zero differences
    double p_value = 1.0;       // two-sided
    bool exact = true;
};

// Wilcoxon signed-rank test on paired differences. Zero differences follow
// Pratt: they take part in ranking |d| and are dropped afterwards. Tied |d|
// share average ranks. Exact null distribution for up to 25 non-zero pairs,
// normal approximation with continuity correction above.
// Throws DomainError on empty input. All-zero input yields p = 1.
WilcoxonResult wilcoxon_signed_rank_test(std::span<const double> deltas);
double wilcoxon_signed_rank(std::span<const double> deltas);

inline constexpr std::size_t kWilcoxonExactLimit = 25;
inline constexpr std::size_t kMannWhitneyExactLimit = 8;

struct MannWhitneyResult {
    double u = 0;  // U of group A: #(a > b) + 0.5 #(a == b)
    double p_value = 1.0;
    bool exact = true;
};

// Two-sided Mann-Whitney U test. Exact when the smaller group has at most 8
// values and there are no ties; tie-corrected normal approximation with
// continuity correction otherwise. Throws DomainError on an empty group.
MannWhitneyResult mann_whitney_u_test(std::span<const double> a, std::span<const double> b);
double mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Vargha-Delaney effect size. a12(A, B) + a12(B, A) == 1 holds exactly in binary64.
double a12(std::span<const double> a, std::span<const double> b);

// Standard normal upper tail, P(Z > z).
double normal_sf(double z);

}  // namespace flakiloc::stats
