#include "flakiloc/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "flakiloc/error.hpp"

namespace flakiloc {

std::string_view to_string(RankKind k) {
    switch (k) {
        case RankKind::best: return "best";
        case RankKind::average: return "average";
        case RankKind::worst: return "worst";
    }
    return "?";
}

std::optional<RankKind> parse_rank_kind(std::string_view s) {
    if (s == "best") return RankKind::best;
    if (s == "average") return RankKind::average;
    if (s == "worst") return RankKind::worst;
    return std::nullopt;
}

double rank_value(const RankTriple& r, RankKind kind) {
    switch (kind) {
        case RankKind::best: return static_cast<double>(r.best);
        case RankKind::average: return r.average();
        case RankKind::worst: return static_cast<double>(r.worst);
    }
    return r.average();
}

std::string_view to_string(RootCause c) {
    switch (c) {
        case RootCause::network: return "network";
        case RootCause::random: return "random";
        case RootCause::order_dependent: return "order-dependent";
        case RootCause::time: return "time";
        case RootCause::async_wait: return "async-wait";
        case RootCause::resource_leak: return "resource-leak";
        case RootCause::other: return "other";
    }
    return "other";
}

RootCause parse_root_cause(std::string_view s) {
    std::string key;
    for (char c : s) {
        if (c == ' ' || c == '_') c = '-';
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        key.push_back(c);
    }
    if (key == "network" || key == "networking") return RootCause::network;
    if (key == "random" || key == "randomness") return RootCause::random;
    if (key == "order-dependent" || key == "od") return RootCause::order_dependent;
    if (key == "time") return RootCause::time;
    if (key == "async-wait" || key.starts_with("async-wait-/") || key == "concurrency")
        return RootCause::async_wait;
    if (key == "resource-leak") return RootCause::resource_leak;
    return RootCause::other;
}

RankTriple rank_at(std::span<const Score> scores, std::size_t position) {
    const Score target = scores[position];
    std::uint64_t greater = 0;
    std::uint64_t greater_equal = 0;
    for (Score s : scores) {
        greater += s > target;
        greater_equal += s >= target;
    }
    return RankTriple{greater + 1, greater_equal};
}

RankTriple rank_of(std::span<const Score> scores, const StatementId& target, const Universe& universe) {
    const auto pos = universe.index_of(target);
    if (!pos) throw NotInUniverseError(to_string(target) + " is not in the statement universe");
    if (scores.size() != universe.size()) throw DomainError("score vector does not match universe");
    return rank_at(scores, *pos);
}

std::optional<RankTriple> fault_rank(std::span<const Score> scores, const FaultSpec& fault,
                                     const Universe& universe, const CoverageBits* present) {
    std::optional<RankTriple> out;
    for (const auto& loc : fault.locations) {
        const auto pos = universe.index_of(loc);
        if (!pos) continue;
        if (present && !present->test(*pos)) continue;
        const auto r = rank_at(scores, *pos);
        if (!out) {
            out = r;
        } else {
            out->best = std::min(out->best, r.best);
            out->worst = std::min(out->worst, r.worst);
        }
    }
    return out;
}

double exam(double rank, const EvaluationContext& ctx) {
    if (ctx.n < 1) throw DomainError("EXAM: N must be >= 1");
    if (!(rank >= 1.0)) throw DomainError("EXAM: rank must be >= 1");
    if (rank > static_cast<double>(ctx.n))
        throw DomainError("EXAM: rank " + std::to_string(rank) + " exceeds N = " + std::to_string(ctx.n));
    return rank / static_cast<double>(ctx.n);
}

std::vector<double> progression(std::span<const std::optional<RankTriple>> fault_ranks,
                                std::span<const std::uint64_t> cutoffs, RankKind kind) {
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (cutoffs[i] < 1) throw DomainError("progression cutoffs must be >= 1");
        if (i > 0 && cutoffs[i] <= cutoffs[i - 1])
            throw DomainError("progression cutoffs must be strictly increasing");
    }
    if (fault_ranks.empty()) return {};
    std::vector<double> out;
    out.reserve(cutoffs.size());
    for (auto k : cutoffs) {
        std::size_t located = 0;
        for (const auto& r : fault_ranks)
            if (r && rank_value(*r, kind) <= static_cast<double>(k)) ++located;
        out.push_back(static_cast<double>(located) / static_cast<double>(fault_ranks.size()));
    }
    return out;
}

std::vector<RankedStatement> rank_all(std::span<const Score> scores, const Universe& universe) {
    if (scores.size() != universe.size()) throw DomainError("score vector does not match universe");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Universe positions already follow (file, line) order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RankedStatement> out(order.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) out[k] = RankedStatement{order[k], RankTriple{i + 1, j}};
        i = j;
    }
    return out;
}

}  // namespace flakiloc
