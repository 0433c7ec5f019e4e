#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flakiloc/coverage_bits.hpp"
#include "flakiloc/spectrum.hpp"
#include "flakiloc/suspiciousness.hpp"

namespace flakiloc {

// Position of a statement in the descending score list, under the assumption
// that it comes first (best) or last (worst) among statements with equal score.
struct RankTriple {
    std::uint64_t best = 1;
    std::uint64_t worst = 1;

    // Exact: best + worst is an integer, halves are representable.
    double average() const noexcept { return (static_cast<double>(best) + static_cast<double>(worst)) / 2.0; }

    friend bool operator==(const RankTriple&, const RankTriple&) = default;
};

enum class RankKind { best, average, worst };
std::string_view to_string(RankKind k);
std::optional<RankKind> parse_rank_kind(std::string_view s);
double rank_value(const RankTriple& r, RankKind kind);

enum class RootCause { network, random, order_dependent, time, async_wait, resource_leak, other };
std::string_view to_string(RootCause c);
// Accepts the canonical tags plus spacing/slash variants ("async wait / concurrency",
// "resource leak"); anything else maps to other.
RootCause parse_root_cause(std::string_view s);

struct FaultSpec {
    std::string test_id;
    std::vector<StatementId> locations;  // non-empty, deduplicated
    std::optional<RootCause> root_cause;
};

struct EvaluationContext {
    std::uint64_t n = 1;  // project source-line count
};

// Throws NotInUniverseError when target is not a universe statement.
RankTriple rank_of(std::span<const Score> scores, const StatementId& target, const Universe& universe);
RankTriple rank_at(std::span<const Score> scores, std::size_t position);

// Componentwise minimum over the locations that are in the universe (and, when
// given, set in `present`). nullopt when no location qualifies.
std::optional<RankTriple> fault_rank(std::span<const Score> scores, const FaultSpec& fault,
                                     const Universe& universe, const CoverageBits* present = nullptr);

// rank / N. Throws DomainError unless 1 <= rank <= N.
double exam(double rank, const EvaluationContext& ctx);

// Fraction of faults whose rank of the chosen kind is <= each cutoff. Not-found
// faults never count. Cutoffs must be strictly increasing and >= 1.
std::vector<double> progression(std::span<const std::optional<RankTriple>> fault_ranks,
                                std::span<const std::uint64_t> cutoffs, RankKind kind = RankKind::average);

// Ranked listing: indices ordered by score descending, then (file, line) ascending,
// with the tie-aware rank of each.
struct RankedStatement {
    std::size_t index = 0;
    RankTriple rank;
};
std::vector<RankedStatement> rank_all(std::span<const Score> scores, const Universe& universe);

}  // namespace flakiloc
