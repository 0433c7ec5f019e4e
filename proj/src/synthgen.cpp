#include "flakiloc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "flakiloc/error.hpp"

namespace flakiloc::synth {

namespace {

constexpr std::size_t kLinesPerFile = 250;
constexpr double kJitterShare = 0.12;

enum Domain : std::uint64_t {
    kFault = 1,
    kRegionLength = 2,
    kRegionStart = 3,
    kDivergent = 4,
    kOutcome = 5,
    kJitterFlag = 6,
    kJitterCover = 7,
    kBranchSide = 8,
};

double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Uniform over [lo, hi]; lo <= hi.
std::size_t uniform_index(std::uint64_t bits, std::size_t lo, std::size_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return lo + std::min(hi - lo, static_cast<std::size_t>(unit(bits) * span));
}

std::string test_name(std::size_t i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "tests/test_synth.py::test_%04zu", i);
    return buf;
}

std::string file_name(std::size_t file_index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pkg/mod%04zu.py", file_index);
    return buf;
}

CoverageSet coverage_of(const std::vector<std::size_t>& sorted_indices) {
    std::vector<CoverageSet::FileLines> files;
    std::size_t current = SIZE_MAX;
    for (auto g : sorted_indices) {
        if (g / kLinesPerFile != current) {
            current = g / kLinesPerFile;
            files.push_back({file_name(current), {}});
        }
        files.back().lines.push_back(static_cast<std::uint32_t>(g % kLinesPerFile + 1));
    }
    return CoverageSet(std::move(files));
}

struct Plan {
    std::size_t n;
    std::size_t prelude;
    std::size_t fault;
};

TestHistory make_test(const SynthConfig& cfg, const Plan& plan, std::size_t t, bool flaky) {
    const std::size_t n = plan.n;
    const std::size_t len =
        std::min(n, uniform_index(draw(cfg.seed, kRegionLength, t, 0, 0), 2 + n / 200, 4 + n / 20));

    std::size_t start;
    if (flaky) {
        const std::size_t lo = plan.fault + 2 > len ? plan.fault + 2 - len : 0;
        start = std::min(uniform_index(draw(cfg.seed, kRegionStart, t, 0, 0), lo, plan.fault), n - len);
    } else {
        start = uniform_index(draw(cfg.seed, kRegionStart, t, 0, 0), 0, n - len);
    }

    // Split the region into always-covered, pass-only and fail-only statements.
    std::vector<std::size_t> always, pass_only, fail_only;
    for (std::size_t g = 0; g < plan.prelude; ++g) always.push_back(g);
    for (std::size_t g = std::max(start, plan.prelude); g < start + len; ++g) {
        const bool divergent =
            flaky && g > plan.fault && unit(draw(cfg.seed, kDivergent, t, 0, g)) < cfg.divergence_ratio;
        if (!divergent) {
            always.push_back(g);
        } else if (draw(cfg.seed, kBranchSide, t, 0, g) & 1u) {
            fail_only.push_back(g);
        } else {
            pass_only.push_back(g);
        }
    }
    if (flaky && pass_only.empty() && fail_only.empty()) {
        const std::size_t g = plan.fault + 1;
        always.erase(std::find(always.begin(), always.end(), g));
        pass_only.push_back(g);
    }

    std::optional<std::size_t> jitter;
    if (!flaky && unit(draw(cfg.seed, kJitterFlag, t, 0, 0)) < kJitterShare) {
        jitter = uniform_index(draw(cfg.seed, kJitterCover, t, 0, 0), start, start + len - 1);
        std::erase(always, *jitter);
    }

    // Outcomes.
    std::vector<bool> fails(cfg.n_runs, false);
    if (flaky) {
        std::vector<double> u(cfg.n_runs);
        for (std::size_t r = 0; r < cfg.n_runs; ++r) {
            u[r] = unit(draw(cfg.seed, kOutcome, t, r, 0));
            fails[r] = u[r] < cfg.failure_rate;
        }
        const auto n_fail = std::count(fails.begin(), fails.end(), true);
        if (n_fail == 0) fails[std::min_element(u.begin(), u.end()) - u.begin()] = true;
        if (n_fail == static_cast<std::ptrdiff_t>(cfg.n_runs))
            fails[std::max_element(u.begin(), u.end()) - u.begin()] = false;
    }

    TestHistory h(test_name(t));
    for (std::size_t r = 0; r < cfg.n_runs; ++r) {
        std::vector<std::size_t> cov = always;
        const auto& extra = fails[r] ? fail_only : pass_only;
        cov.insert(cov.end(), extra.begin(), extra.end());
        if (jitter && (draw(cfg.seed, kJitterCover, t, r, 1) & 1u)) cov.push_back(*jitter);
        std::sort(cov.begin(), cov.end());

        ExecutionRecord rec;
        rec.test_id = h.test_id();
        rec.run_id = "run" + std::to_string(r + 1);
        rec.order_mode = OrderMode::same;
        rec.outcome = fails[r] ? Outcome::fail : Outcome::pass;
        rec.covered = coverage_of(cov);
        h.append(std::move(rec));
    }
    return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t draw(std::uint64_t seed, std::uint64_t domain, std::uint64_t test, std::uint64_t run,
                   std::uint64_t slot) {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ domain);
    k = mix64(k ^ test);
    k = mix64(k ^ run);
    return mix64(k ^ slot);
}

StatementId statement_at(std::size_t index) {
    return StatementId(file_name(index / kLinesPerFile), static_cast<std::uint32_t>(index % kLinesPerFile + 1));
}

std::vector<FaultSpec> SynthOutput::ground_truth() const {
    std::vector<FaultSpec> out;
    for (const auto& t : flaky_tests) {
        FaultSpec f = fault;
        f.test_id = t;
        out.push_back(std::move(f));
    }
    return out;
}

SynthOutput generate(const SynthConfig& cfg) {
    if (cfg.n_statements < 2) throw DomainError("synth: n_statements must be >= 2");
    if (cfg.n_tests < 1) throw DomainError("synth: n_tests must be >= 1");
    if (cfg.n_runs < 2)
        throw DomainError("synth: n_runs must be >= 2 so every flaky test can both pass and fail");
    if (!(cfg.flaky_ratio > 0 && cfg.flaky_ratio < 1)) throw DomainError("synth: flaky_ratio must be in (0,1)");
    if (!(cfg.failure_rate > 0 && cfg.failure_rate < 1)) throw DomainError("synth: failure_rate must be in (0,1)");
    if (!(cfg.divergence_ratio >= 0 && cfg.divergence_ratio <= 1))
        throw DomainError("synth: divergence_ratio must be in [0,1]");

    Plan plan;
    plan.n = cfg.n_statements;
    plan.prelude = plan.n / 100;
    const std::size_t fault_lo = std::min(plan.prelude, plan.n - 2);
    plan.fault = uniform_index(draw(cfg.seed, kFault, 0, 0, 0), fault_lo, plan.n - 2);

    const auto n_flaky = std::min(
        cfg.n_tests, static_cast<std::size_t>(std::ceil(cfg.flaky_ratio * static_cast<double>(cfg.n_tests))));

    SynthOutput out;
    out.histories.resize(cfg.n_tests);
    const auto n = static_cast<std::ptrdiff_t>(cfg.n_tests);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        const auto i = static_cast<std::size_t>(t);
        out.histories[i] = make_test(cfg, plan, i, i < n_flaky);
    }

    for (std::size_t t = 0; t < n_flaky; ++t) out.flaky_tests.push_back(out.histories[t].test_id());
    out.fault.test_id = out.flaky_tests.front();
    out.fault.locations = {statement_at(plan.fault)};
    out.fault.root_cause = RootCause::random;
    return out;
}

}  // namespace flakiloc::synth
