#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flakiloc/engine.hpp"
#include "flakiloc/error.hpp"

namespace flakiloc {
namespace {

using testing::exec;

// t_od: flaky only in random order; t_nod: flaky in same order; t_ok: stable.
std::vector<TestHistory> mixed_order_project() {
    return {
        TestHistory("t_od", {exec("t_od", "s1", Outcome::pass, {1, 2}), exec("t_od", "s2", Outcome::pass, {1, 2}),
                             exec("t_od", "r1", Outcome::pass, {1, 2, 3}, OrderMode::random),
                             exec("t_od", "r2", Outcome::fail, {1, 2, 4}, OrderMode::random)}),
        TestHistory("t_nod", {exec("t_nod", "s1", Outcome::pass, {5, 6, 7}), exec("t_nod", "s2", Outcome::fail, {5, 6}),
                              exec("t_nod", "r1", Outcome::pass, {5, 6}, OrderMode::random)}),
        TestHistory("t_ok", {exec("t_ok", "s1", Outcome::pass, {1, 5, 8}), exec("t_ok", "s2", Outcome::pass, {1, 5, 8}),
                             exec("t_ok", "r1", Outcome::pass, {1, 8}, OrderMode::random)}),
    };
}

TEST(Prepare, DropsTestsWithoutRunsInMode) {
    std::vector<TestHistory> hs = testing::gen_int_example();
    hs.emplace_back("t3", std::vector<ExecutionRecord>{exec("t3", "r", Outcome::pass, {9}, OrderMode::random)});
    const auto p = prepare(hs, OrderMode::same);
    EXPECT_EQ(p.histories.size(), 2u);
    EXPECT_EQ(p.universe.size(), 6u);
    EXPECT_EQ(p.executions, 4u);
    EXPECT_EQ(p.verdicts, (std::vector<Verdict>{Verdict::flaky, Verdict::stable}));
}

TEST(ResolveOrder, Automatic) {
    EXPECT_EQ(resolve_order(mixed_order_project(), OrderSelection::automatic), OrderMode::same);
    EXPECT_EQ(resolve_order(mixed_order_project(), OrderSelection::random), OrderMode::random);
    auto only_od = mixed_order_project();
    only_od.erase(only_od.begin() + 1);
    EXPECT_EQ(resolve_order(only_od, OrderSelection::automatic), OrderMode::random);
    EXPECT_THROW(resolve_order(testing::gen_int_example(), OrderSelection::automatic), DomainError);
}

TEST(Localize, UsesSlocForExam) {
    const std::vector<FaultSpec> f = {FaultSpec{"t1", {StatementId("gen.py", 2)}, std::nullopt}};
    LocalizeOptions opt;
    opt.formula = FormulaId::tarantula;
    opt.sloc = 758;
    const auto r = localize(testing::gen_int_example(), f, opt);
    EXPECT_TRUE(r.metadata.n_from_sloc);
    EXPECT_EQ(r.metadata.n, 758u);
    EXPECT_DOUBLE_EQ(*r.faults[0].exam, 2.0 / 758.0);
    opt.sloc = 1;
    EXPECT_THROW(localize(testing::gen_int_example(), f, opt), DomainError);
}

TEST(Localize, NotFoundFault) {
    const std::vector<FaultSpec> f = {FaultSpec{"t1", {StatementId("gen.py", 6)}, std::nullopt}};
    LocalizeOptions opt;
    opt.mode = AggregationMode::sffl;
    const auto r = localize(testing::gen_int_example(), f, opt);
    // Line 6 is in the universe and covered by the stable row, so it is ranked.
    EXPECT_TRUE(r.faults[0].rank.has_value());
    const std::vector<FaultSpec> g = {FaultSpec{"t1", {StatementId("gen.py", 42)}, std::nullopt}};
    const auto s = localize(testing::gen_int_example(), g, opt);
    EXPECT_FALSE(s.faults[0].rank.has_value());
    EXPECT_FALSE(s.faults[0].exam.has_value());
}

TEST(Localize, ReportsInvariantUnderRunPermutation) {
    std::mt19937_64 rng(61);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        synth::SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_statements = 300;
        cfg.n_tests = 20;
        cfg.flaky_ratio = 0.2;
        cfg.n_runs = 6;
        const auto out = synth::generate(cfg);
        auto permuted = out.histories;
        for (auto& h : permuted) {
            std::vector<ExecutionRecord> ex(h.executions().begin(), h.executions().end());
            std::shuffle(ex.begin(), ex.end(), rng);
            h = TestHistory(h.test_id(), ex);
        }
        std::shuffle(permuted.begin(), permuted.end(), rng);
        const auto gt = out.ground_truth();
        for (auto m : {AggregationMode::sffl, AggregationMode::union_, AggregationMode::individual}) {
            LocalizeOptions opt;
            opt.mode = m;
            EXPECT_EQ(io::emit_report(localize(out.histories, gt, opt), io::ReportFormat::json),
                      io::emit_report(localize(permuted, gt, opt), io::ReportFormat::json));
        }
    }
}

TEST(Evaluate, AutomaticOrderPerFault) {
    Project p;
    p.name = "mixed";
    p.histories = mixed_order_project();
    p.faults = {FaultSpec{"t_od", {StatementId("gen.py", 4)}, RootCause::order_dependent},
                FaultSpec{"t_nod", {StatementId("gen.py", 7)}, RootCause::random}};
    EvaluateOptions opt;
    opt.order = OrderSelection::automatic;
    const std::vector<Project> ps = {p};
    const auto rep = evaluate(ps, opt);
    ASSERT_TRUE(rep.categories.has_value());
    EXPECT_EQ(rep.categories->od, 1u);
    EXPECT_EQ(rep.categories->nod, 1u);
    EXPECT_EQ(rep.faults, 2u);
    EXPECT_EQ(rep.comparisons.size(), 5u * 3u);
    EXPECT_EQ(rep.root_causes.size(), 2u);
    const auto text = format_evaluation_text(rep);
    EXPECT_NE(text.find("wilcoxon_p"), std::string::npos);
}

TEST(Evaluate, SeveralProjectsAndSffl) {
    std::vector<Project> ps;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        synth::SynthConfig cfg;
        cfg.seed = seed;
        const auto out = synth::generate(cfg);
        ps.push_back(Project{"p" + std::to_string(seed), out.histories, out.ground_truth(), std::nullopt});
    }
    EvaluateOptions opt;
    opt.order = OrderSelection::same;
    const auto rep = evaluate(ps, opt);
    EXPECT_EQ(rep.faults, 15u);
    EXPECT_EQ(rep.methods.size(), 20u);
    for (const auto& m : rep.methods) EXPECT_EQ(m.exam.size(), 15u);
    for (const auto& c : rep.candidates) {
        if (c.mode != AggregationMode::sffl) continue;
        for (const auto& d : rep.candidates) {
            if (d.project == c.project && d.mode == AggregationMode::union_) {
                EXPECT_LE(c.candidates, d.candidates);
            }
        }
    }
    EXPECT_FALSE(format_evaluation_json(rep).empty());
    EXPECT_NE(format_evaluation_text(rep).find("# candidate statements"), std::string::npos);
}

TEST(Evaluate, RankKindReported) {
    Project p;
    p.name = "gen_int";
    p.histories = testing::gen_int_example();
    p.faults = {FaultSpec{"t1", {StatementId("gen.py", 2)}, std::nullopt}};
    const std::vector<Project> ps = {p};
    EvaluateOptions opt;
    opt.order = OrderSelection::same;
    opt.formulas = {FormulaId::tarantula};
    opt.rank_kind = RankKind::worst;
    const auto rep = evaluate(ps, opt);
    EXPECT_EQ(rep.rank_kind, RankKind::worst);
    EXPECT_NE(format_evaluation_text(rep).find("worst-case ranks"), std::string::npos);
    const auto& sffl = rep.methods.front();
    EXPECT_EQ(sffl.exam.at("t1"), 3.0 / 6.0);
}

TEST(Evaluate, DuplicateFaultTestRejected) {
    Project p;
    p.name = "x";
    p.histories = testing::gen_int_example();
    const FaultSpec f{"t1", {StatementId("gen.py", 2)}, std::nullopt};
    p.faults = {f, f};
    const std::vector<Project> ps = {p};
    EvaluateOptions opt;
    opt.order = OrderSelection::same;
    EXPECT_THROW(evaluate(ps, opt), DomainError);
}

}  // namespace
}  // namespace flakiloc
