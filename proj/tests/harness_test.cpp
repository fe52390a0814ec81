#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hhkit/harness.hpp"

namespace hhkit {
namespace {

SweepConfig one_instance() {
    SweepConfig cfg;
    cfg.theorems = {Theorem::II1};
    cfg.a_values = {1.0};
    cfg.ratios = {2.0};
    cfg.families = {FunctionSpec{Power{1, 2, 0}}};
    return cfg;
}

SweepConfig small_sweep() {
    SweepConfig cfg;
    cfg.theorems = {Theorem::II1, Theorem::II2, Theorem::II4, Theorem::FS1, Theorem::Lemma};
    cfg.a_values = {0.5, 2.0};
    cfg.ratios = {1.5, 4.0};
    cfg.s_values = {0.5, 1.0};
    cfg.m_values = {0.8, 1.0};
    cfg.q_values = {1.0, 2.0};
    cfg.families = {FunctionSpec{Power{1, 2, 0}}, FunctionSpec{Exp{1}}, FunctionSpec{Reciprocal{}}};
    cfg.grid = 16;
    cfg.seed = 99;
    cfg.random_intervals = 2;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Sweep, SingleInstance) {
    const auto res = run_sweep(one_instance());
    ASSERT_EQ(res.records.size(), 1u);
    EXPECT_NEAR(res.records[0].margin, 0.5, 1e-12);
    EXPECT_TRUE(res.findings.empty());
    EXPECT_TRUE(res.skipped.empty());
}

TEST(Sweep, EmptyTheoremList) {
    SweepConfig cfg = one_instance();
    cfg.theorems.clear();
    const auto res = run_sweep(cfg);
    EXPECT_EQ(res.instances, 0u);
    EXPECT_TRUE(res.records.empty());
    EXPECT_TRUE(res.findings.empty());
}

TEST(Sweep, InapplicableParametersAreNotInstances) {
    SweepConfig cfg = one_instance();
    cfg.theorems = {Theorem::I1, Theorem::II4};
    cfg.s_values = {0.5, 1.0};
    cfg.m_values = {0.5, 1.0};
    cfg.q_values = {1.0, 2.0};
    // I1 only at s = m = 1 (two q values); II4 at q = 2 (four (s, m) pairs).
    EXPECT_EQ(enumerate_instances(cfg).size(), 2u + 4u);
}

TEST(Sweep, UncertifiedAreSkippedNotViolations) {
    SweepConfig cfg = one_instance();
    cfg.families = {FunctionSpec{Power{-1, 2, 0}}};
    const auto res = run_sweep(cfg);
    EXPECT_TRUE(res.records.empty());
    ASSERT_EQ(res.skipped.size(), 1u);
    EXPECT_LT(res.skipped[0].worst_margin, 0.0);
    EXPECT_EQ(res.count(FindingKind::BoundViolation), 0u);
}

TEST(Sweep, DomainErrorsBecomeFindings) {
    SweepConfig cfg = one_instance();
    cfg.families = {FunctionSpec{Power{1, 2, 0}, 0.9, 3.0}};
    cfg.m_values = {0.5};
    const auto res = run_sweep(cfg);
    ASSERT_EQ(res.count(FindingKind::EvaluationError), 1u);
    EXPECT_NE(res.findings[0].message.find("domain"), std::string::npos);
}

TEST(Sweep, NoViolationsOnSmallGrid) {
    const auto res = run_sweep(small_sweep());
    EXPECT_GT(res.records.size(), 50u);
    EXPECT_EQ(res.count(FindingKind::BoundViolation), 0u);
    EXPECT_EQ(res.count(FindingKind::EvaluationError), 0u);
    for (const auto& r : res.records) EXPECT_GE(r.margin, -kAcceptTol) << to_string(r.theorem);
}

TEST(Sweep, SeededIntervalsAreReproducible) {
    const auto cfg = small_sweep();
    const auto a = cfg.intervals(), b = cfg.intervals();
    ASSERT_EQ(a.size(), 6u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].a, b[i].a);
        EXPECT_EQ(a[i].b, b[i].b);
        EXPECT_GE(a[i].a, 0.5);
        EXPECT_LE(a[i].a, 2.0);
        EXPECT_GE(a[i].b / a[i].a, 1.5 - 1e-12);
        EXPECT_LE(a[i].b / a[i].a, 4.0 + 1e-12);
    }
    auto other = cfg;
    other.seed = 100;
    EXPECT_NE(other.intervals()[4].a, a[4].a);
}

TEST(Sweep, ReportsAreIdenticalAcrossRunsAndThreadCounts) {
    const auto cfg = small_sweep();
    setenv("HHKIT_THREADS", "1", 1);
    const auto r1 = run_sweep(cfg);
    setenv("HHKIT_THREADS", "4", 1);
    const auto r2 = run_sweep(cfg);
    const auto r3 = run_sweep(cfg);
    unsetenv("HHKIT_THREADS");
    EXPECT_EQ(sweep_report_json(r1).dump(), sweep_report_json(r2).dump());
    EXPECT_EQ(sweep_report_json(r2).dump(), sweep_report_json(r3).dump());
    EXPECT_EQ(sweep_report_csv(r1), sweep_report_csv(r2));
}

TEST(Sweep, WrittenFilesAreByteIdentical) {
    const auto cfg = small_sweep();
    const std::string p1 = testing::TempDir() + "hhkit_sweep_a";
    const std::string p2 = testing::TempDir() + "hhkit_sweep_b";
    write_sweep_reports(run_sweep(cfg), p1);
    write_sweep_reports(run_sweep(cfg), p2);
    EXPECT_EQ(read_file(p1 + ".json"), read_file(p2 + ".json"));
    EXPECT_EQ(read_file(p1 + ".csv"), read_file(p2 + ".csv"));
    EXPECT_FALSE(read_file(p1 + ".csv").empty());
}

TEST(Report, JsonShape) {
    const auto j = sweep_report_json(run_sweep(one_instance()));
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("summary").at("evaluated"), 1);
    const auto& rec = j.at("records").at(0);
    EXPECT_EQ(rec.at("theorem"), "II1");
    EXPECT_EQ(rec.at("family"), "pow(1,2,0)");
    EXPECT_EQ(rec.at("rhs").get<double>(), 2.5);
}

TEST(Report, CsvQuotesLabels) {
    const auto csv = sweep_report_csv(run_sweep(one_instance()));
    EXPECT_EQ(csv,
              "theorem,a,b,s,m,q,family,lhs,rhs,margin,satisfied\n"
              "II1,1,2,1,1,1,\"pow(1,2,0)\",2,2.5,0.5,true\n");
}

TEST(Report, NumbersCarryFifteenDigits) {
    EXPECT_EQ(detail::num(1.0 / 3.0).dump(), "0.333333333333333");
    EXPECT_EQ(detail::num(2.5).dump(), "2.5");
    EXPECT_TRUE(detail::num(std::nan("")).is_null());
}

TEST(Report, RecordIsSelfContained) {
    const auto res = run_sweep(small_sweep());
    const auto j = sweep_report_json(res);
    for (std::size_t i = 0; i < res.records.size(); i += 17) {
        const auto& rec = j.at("records").at(i);
        const auto f = function_from_json(rec.at("function"));
        const auto th = theorem_from_string(rec.at("theorem").get<std::string>());
        ASSERT_TRUE(th);
        const auto p = SMParams::make(rec.at("s").get<double>(), rec.at("m").get<double>(), rec.at("q").get<double>());
        const Interval iv{rec.at("a").get<double>(), rec.at("b").get<double>()};
        const auto again = verify_instance(*th, f, p, iv, VerifyOptions{});
        EXPECT_NEAR(again.margin, rec.at("margin").get<double>(), 1e-12 * std::max(1.0, std::abs(again.margin)));
    }
}

TEST(Config, ParsesAndValidates) {
    const auto j = json::parse(R"({
        "theorems": ["II1", "II4"], "a_values": [1], "ratios": [2], "s": [0.5], "m": [1], "q": [2],
        "families": [{"family": "pow", "coeff": 1, "exp": 2, "shift": 0, "domain": [0.01, 50]}],
        "grid": 32, "seed": 5, "output": "out"})");
    const auto cfg = SweepConfig::from_json(j);
    EXPECT_EQ(cfg.theorems.size(), 2u);
    EXPECT_EQ(cfg.grid, 32);
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.families[0].domain_hi, 50.0);
    EXPECT_EQ(SweepConfig::from_json(cfg.to_json()).to_json().dump(), cfg.to_json().dump());
}

TEST(Config, Rejections) {
    auto bad = [](const char* text) { return SweepConfig::from_json(json::parse(text)); };
    const char* base = R"("a_values": [1], "ratios": [2], "families": [{"family": "recip"}])";
    EXPECT_THROW(bad((std::string(R"({"theorems": ["II9"], )") + base + "}").c_str()), ParameterError);
    EXPECT_THROW(bad((std::string(R"({"theorems": ["II1"], "s": [1.5], )") + base + "}").c_str()), ParameterError);
    EXPECT_THROW(bad((std::string(R"({"theorems": ["II1"], "m": [0], )") + base + "}").c_str()), ParameterError);
    EXPECT_THROW(bad((std::string(R"({"theorems": ["II1"], "grid": 7, )") + base + "}").c_str()), ParameterError);
    EXPECT_THROW(bad(R"({"theorems": ["II1"], "a_values": [1], "ratios": [0.5], "families": [{"family": "recip"}]})"),
                 ParameterError);
    EXPECT_THROW(bad(R"({"theorems": ["II1"], "a_values": [1], "ratios": [2], "families": [{"family": "sin"}]})"),
                 ParameterError);
    EXPECT_THROW(bad(R"({"theorems": ["II1"], "a_values": [], "ratios": [2], "families": [{"family": "recip"}]})"),
                 ParameterError);
}

TEST(FunctionJson, RoundTrip) {
    for (const auto& f : {FunctionSpec{Power{2, 1.5, 1}}, FunctionSpec{SPiece{1, 2, 0.5, 0.25}},
                          FunctionSpec{Reciprocal{}, 0.1, 10}, FunctionSpec{Affine{-1, 3}}, FunctionSpec{Exp{0.5}}}) {
        const auto back = function_from_json(function_to_json(f));
        EXPECT_EQ(back.label(), f.label());
        EXPECT_EQ(back.domain_lo, f.domain_lo);
        EXPECT_EQ(back.domain_hi, f.domain_hi);
    }
    EXPECT_THROW(function_from_json(json::parse(R"({"family": "pow", "exp": "two"})")), ParameterError);
    EXPECT_THROW(function_from_json(json::parse(R"({"family": "pow", "domain": [2, 1]})")), DomainError);
}

TEST(Search, II1FindsNothing) {
    const auto out = search_counterexample(Theorem::II1, 10000, 7);
    EXPECT_FALSE(out.finding.has_value());
    EXPECT_EQ(out.drawn, 10000u);
    EXPECT_GT(out.evaluated, 1000u);
    EXPECT_GE(out.worst_margin, -kAcceptTol);
}

TEST(Search, DerivativeBoundsFindNothing) {
    for (Theorem t : {Theorem::II2, Theorem::II3, Theorem::II4}) {
        const auto out = search_counterexample(t, 500, 11);
        EXPECT_FALSE(out.finding.has_value()) << to_string(t);
        EXPECT_GT(out.evaluated, 20u) << to_string(t);
    }
}

TEST(Search, InjectedUncertifiedFunctionIsCaught) {
    SearchOptions opts;
    opts.inject_uncertified = true;
    const auto out = search_counterexample(Theorem::II2, 200, 3, opts);
    ASSERT_TRUE(out.finding.has_value());
    const auto& f = *out.finding;
    EXPECT_EQ(f.kind, FindingKind::BoundViolation);
    ASSERT_TRUE(f.record.has_value());
    EXPECT_NEAR(f.severity, -f.record->margin, 1e-15);
    EXPECT_GT(f.severity, kAcceptTol);
    ASSERT_TRUE(f.shrunk.has_value());
    // The shrunk witness still violates and sits closer to the boundary.
    EXPECT_LT(f.shrunk->margin, -kAcceptTol);
    EXPECT_GE(f.shrunk->margin, f.record->margin);
}

TEST(Search, FixedSeedIsDeterministic) {
    SearchOptions opts;
    opts.inject_uncertified = true;
    const auto a = search_counterexample(Theorem::II2, 100, 21, opts);
    const auto b = search_counterexample(Theorem::II2, 100, 21, opts);
    ASSERT_TRUE(a.finding && b.finding);
    EXPECT_EQ(finding_to_json(*a.finding).dump(), finding_to_json(*b.finding).dump());
    const auto c = search_counterexample(Theorem::II1, 200, 21);
    const auto d = search_counterexample(Theorem::II1, 200, 21);
    EXPECT_EQ(c.evaluated, d.evaluated);
    EXPECT_EQ(c.worst_margin, d.worst_margin);
}

TEST(Search, RejectsBadBudget) { EXPECT_THROW(search_counterexample(Theorem::II1, 0, 1), ParameterError); }

TEST(Reductions, UnitSRow) {
    const auto rep = check_reductions(Interval{1, 2}, {1.0}, {1.0, 2.0});
    EXPECT_EQ(rep.oracle_failures(), 0u);
    bool seen = false;
    for (const auto& c : rep.checks) {
        if (c.name == "C2(1) = lambda2") {
            seen = true;
            EXPECT_LE(c.deviation, 1e-9);
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Reductions, ZeroSRow) {
    const auto rep = check_reductions(Interval{0.5, 3}, {0.0}, {1.0, 1.5, 3.0});
    std::size_t n = 0;
    for (const auto& c : rep.checks) {
        if (c.name != "rho1(0) = rho2(0)") continue;
        ++n;
        EXPECT_TRUE(c.passed);
    }
    EXPECT_EQ(n, 3u);
}

TEST(Reductions, FullGridMismatchesArePrintedOnly) {
    for (const Interval& iv : {Interval{1, 2}, Interval{0.5, 5}, Interval{2, 2.2}}) {
        const auto rep = check_reductions(iv, {0.0, 0.25, 0.5, 0.75, 1.0}, {1.0, 1.5, 2.0, 3.0});
        EXPECT_EQ(rep.oracle_failures(), 0u);
        EXPECT_FALSE(rep.findings.empty());
        for (const auto& f : rep.findings) {
            EXPECT_EQ(f.kind, FindingKind::ReductionMismatch);
            EXPECT_EQ(f.level, "printed") << f.label;
            EXPECT_GT(f.severity, kPrintedTol);
        }
    }
}

TEST(Adjudication, Verdicts) {
    const std::vector<Interval> ivs{{1, 2}, {0.5, 5}, {2, 2.2}};
    const auto rep = adjudicate(ivs, {0.25, 0.5, 1.0}, {1.0, 2.0, 3.0});
    for (const char* label : {"lambda1", "lambda2", "C1", "nu1", "nu2", "rho1", "rho2", "mu1", "mu2", "mu1_hyp~mu2",
                              "mu2_hyp~mu1"}) {
        const auto* e = rep.find(label);
        ASSERT_NE(e, nullptr) << label;
        EXPECT_TRUE(e->agrees) << label << " " << e->max_abs_dev;
    }
    for (const char* label : {"lambda3", "C2", "C3", "rho2_derivation", "mu1_hyp", "mu2_hyp"}) {
        const auto* e = rep.find(label);
        ASSERT_NE(e, nullptr) << label;
        EXPECT_FALSE(e->agrees) << label;
    }
    EXPECT_EQ(rep.oracle_failures(), 0u);
}

TEST(Adjudication, JsonIsDeterministic) {
    const std::vector<Interval> ivs{{1, 2}, {0.5, 5}};
    const auto a = adjudication_to_json(adjudicate(ivs, {0.5, 1.0}, {1.0, 2.0}), ivs, {0.5, 1.0}, {1.0, 2.0});
    const auto b = adjudication_to_json(adjudicate(ivs, {0.5, 1.0}, {1.0, 2.0}), ivs, {0.5, 1.0}, {1.0, 2.0});
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(a.at("schema_version"), 1);
    EXPECT_EQ(a.at("oracle_failures"), 0);
    EXPECT_FALSE(a.at("findings").empty());
}

}  // namespace
}  // namespace hhkit
