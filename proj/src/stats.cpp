#include "flakiloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "flakiloc/error.hpp"

namespace flakiloc::stats {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

double two_sided(double lower_tail, double upper_tail) {
    return std::min(1.0, 2.0 * std::min(lower_tail, upper_tail));
}

double normal_two_sided(double stat, double mean, double variance) {
    if (!(variance > 0)) return 1.0;
    const double z = std::max(0.0, std::abs(stat - mean) - 0.5) / std::sqrt(variance);
    return std::min(1.0, 2.0 * normal_sf(z));
}

// Doubled mid-ranks (1-based) of `values`, so that every rank is an integer.
std::vector<std::uint64_t> doubled_midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::uint64_t> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i+1 .. j share rank (i+1+j)/2
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = i + 1 + j;
        i = j;
    }
    return ranks;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank_test(std::span<const double> deltas) {
    if (deltas.empty()) throw DomainError("wilcoxon_signed_rank: at least one pair required");
    for (double d : deltas)
        if (std::isnan(d)) throw DomainError("wilcoxon_signed_rank: NaN difference");

    std::vector<double> magnitudes(deltas.size());
    std::transform(deltas.begin(), deltas.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
    const auto ranks2 = doubled_midranks(magnitudes);

    // Pratt: zeros were ranked above, now dropped.
    std::vector<std::uint64_t> kept;
    std::uint64_t w2 = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] == 0) continue;
        kept.push_back(ranks2[i]);
        if (deltas[i] > 0) w2 += ranks2[i];
    }

    WilcoxonResult res;
    res.n_nonzero = kept.size();
    res.w_plus = static_cast<double>(w2) / 2.0;
    if (kept.empty()) return res;

    const std::uint64_t total2 = std::accumulate(kept.begin(), kept.end(), std::uint64_t{0});
    if (kept.size() <= kWilcoxonExactLimit) {
        // Number of sign assignments reaching each doubled W+ value.
        std::vector<std::uint64_t> ways(total2 + 1, 0);
        ways[0] = 1;
        std::uint64_t reach = 0;
        for (auto r : kept) {
            reach += r;
            for (std::uint64_t s = reach; s >= r; --s) ways[s] += ways[s - r];
        }
        std::uint64_t le = 0, ge = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (s <= w2) le += ways[s];
            if (s >= w2) ge += ways[s];
        }
        const double all = std::ldexp(1.0, static_cast<int>(kept.size()));
        res.p_value = two_sided(static_cast<double>(le) / all, static_cast<double>(ge) / all);
        res.exact = true;
        return res;
    }

    double sum_r = 0, sum_r2 = 0;
    for (auto r2 : kept) {
        const double r = static_cast<double>(r2) / 2.0;
        sum_r += r;
        sum_r2 += r * r;
    }
    res.p_value = normal_two_sided(res.w_plus, sum_r / 2.0, sum_r2 / 4.0);
    res.exact = false;
    return res;
}

double wilcoxon_signed_rank(std::span<const double> deltas) { return wilcoxon_signed_rank_test(deltas).p_value; }

namespace {

// Frequencies of U = 0..m*n under the null for tie-free samples of sizes m, n:
// coefficients of the Gaussian binomial [m+n choose m]_q, built one factor
// (1 - q^(n+i)) / (1 - q^i) at a time. T is int64 while C(m+n, m) fits, else double.
template <typename T>
std::vector<T> u_frequencies(std::size_t m, std::size_t n) {
    const std::size_t top = m * n;
    std::vector<T> c(top + 1, T{0});
    c[0] = T{1};
    for (std::size_t i = 1; i <= m; ++i) {
        const std::size_t shift = n + i;
        for (std::size_t u = top; u >= shift; --u) c[u] -= c[u - shift];
        for (std::size_t u = i; u <= top; ++u) c[u] += c[u - i];
    }
    return c;
}

bool binomial_fits_int64(std::size_t m, std::size_t n) {
    // C(m+n, k) built incrementally; each step stays integral.
    const std::size_t k = std::min(m, n);
    long double acc = 1;
    for (std::size_t i = 1; i <= k; ++i) acc = acc * static_cast<long double>(m + n - k + i) / i;
    return acc < 4.0e18L;
}

template <typename T>
double exact_u_p(std::size_t m, std::size_t n, std::uint64_t u) {
    const auto c = u_frequencies<T>(m, n);
    long double le = 0, ge = 0, all = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto v = static_cast<long double>(c[k]);
        all += v;
        if (k <= u) le += v;
        if (k >= u) ge += v;
    }
    return two_sided(static_cast<double>(le / all), static_cast<double>(ge / all));
}

}  // namespace

MannWhitneyResult mann_whitney_u_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("mann_whitney_u: both groups must be non-empty");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled)
        if (std::isnan(v)) throw DomainError("mann_whitney_u: NaN value");

    const auto ranks2 = doubled_midranks(pooled);
    const std::size_t m = a.size(), n = b.size(), total = m + n;
    std::uint64_t rank_sum2 = 0;
    for (std::size_t i = 0; i < m; ++i) rank_sum2 += ranks2[i];
    // U_A = R_A - m(m+1)/2, kept doubled until here.
    const std::uint64_t u2 = rank_sum2 - m * (m + 1);

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0;
    bool ties = false;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        if (j - i > 1) ties = true;
        tie_term += t * t * t - t;
        i = j;
    }

    MannWhitneyResult res;
    res.u = static_cast<double>(u2) / 2.0;
    if (!ties && std::min(m, n) <= kMannWhitneyExactLimit) {
        const std::size_t small = std::min(m, n), big = std::max(m, n);
        // U is integral without ties; its null law is the same for either group.
        const std::uint64_t u = u2 / 2;
        res.p_value = binomial_fits_int64(small, big) ? exact_u_p<std::int64_t>(small, big, u)
                                                      : exact_u_p<double>(small, big, u);
        res.exact = true;
        return res;
    }

    const double mn = static_cast<double>(m) * static_cast<double>(n);
    const double nn = static_cast<double>(total);
    const double variance = mn / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    res.p_value = normal_two_sided(res.u, mn / 2.0, variance);
    res.exact = false;
    return res;
}

double mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    return mann_whitney_u_test(a, b).p_value;
}

double a12(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("a12: both groups must be non-empty");
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sb.begin(), sb.end());
    std::uint64_t num2 = 0;  // 2 * #(a > b) + #(a == b)
    for (double x : a) {
        const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
        const auto hi = std::upper_bound(lo, sb.end(), x);
        num2 += 2 * static_cast<std::uint64_t>(lo - sb.begin()) + static_cast<std::uint64_t>(hi - lo);
    }
    const std::uint64_t den2 = 2 * static_cast<std::uint64_t>(a.size()) * b.size();
    // Above one half, compute as the complement of the mirrored value; this makes
    // a12(A,B) + a12(B,A) round to exactly 1.
    if (2 * num2 > den2)
        return 1.0 - static_cast<double>(den2 - num2) / static_cast<double>(den2);
    return static_cast<double>(num2) / static_cast<double>(den2);
}

}  // namespace flakiloc::stats
