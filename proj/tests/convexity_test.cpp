#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hhkit/convexity.hpp"

namespace hhkit {
namespace {

std::vector<FunctionSpec> curated() {
    return {
        FunctionSpec{Affine{1, 0}, 0.5, 8.0},         FunctionSpec{Power{1, 2, 0}, 0.5, 8.0},
        FunctionSpec{Power{-1, 2, 0}, 0.5, 8.0},      FunctionSpec{Power{1, 0.5, 0}, 0.5, 8.0},
        FunctionSpec{Power{1, 3, 0}, 0.5, 8.0},       FunctionSpec{Reciprocal{}, 0.5, 8.0},
        FunctionSpec{SPiece{1, 1, 0, 0.5}, 0.5, 8.0}, FunctionSpec{Exp{1}, 0.5, 8.0},
        FunctionSpec{Exp{-1}, 0.5, 8.0},              FunctionSpec{Affine{-2, 20}, 0.5, 8.0},
    };
}

TEST(HarmonicSMConvex, IdentityIsHarmonicallyConvex) {
    const auto r = check_harmonic_sm_convex(FunctionSpec{Affine{1, 0}, 0.5, 8.0}, SMParams::make(1, 1));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.evaluated, 64u * 64u * 65u);
}

TEST(HarmonicSMConvex, SquareIsHarmonicallyConvex) {
    EXPECT_TRUE(check_harmonic_sm_convex(FunctionSpec{Power{1, 2, 0}, 0.5, 8.0}, SMParams::make(1, 1)).passed);
}

TEST(HarmonicSMConvex, SPieceIsHarmonicallySConvex) {
    for (double s : {0.25, 0.5, 0.75}) {
        const FunctionSpec f{SPiece{1, 1, 0, s}, 0.5, 8.0};
        EXPECT_TRUE(check_harmonic_sm_convex(f, SMParams::make(s, 1)).passed) << "s=" << s;
        // With a positive constant part as well.
        const FunctionSpec g{SPiece{1, 2, 0.5, s}, 0.5, 8.0};
        EXPECT_TRUE(check_harmonic_sm_convex(g, SMParams::make(s, 1)).passed) << "s=" << s;
    }
}

TEST(HarmonicSMConvex, ConcaveDecreasingFails) {
    const auto r = check_harmonic_sm_convex(FunctionSpec{Affine{-2, 20}, 0.5, 8.0}, SMParams::make(1, 0.5));
    EXPECT_FALSE(r.passed);
    EXPECT_LT(r.worst_margin, 0.0);
    EXPECT_LT(r.witness.rhs, r.witness.lhs);
}

TEST(HarmonicSMConvex, WindowOutsideDomainThrows) {
    const FunctionSpec f{Power{1, 2, 0}, 1.0, 4.0};
    // x, y in [1, 4] with m = 0.5 puts m y down to 0.5.
    EXPECT_THROW(check_harmonic_sm_convex(f, SMParams::make(1, 0.5), 64, Domain{1.0, 4.0}), DomainError);
    EXPECT_THROW(check_harmonic_sm_convex(f, SMParams::make(1, 1), 64, Domain{0.5, 4.0}), DomainError);
    EXPECT_NO_THROW(check_harmonic_sm_convex(f, SMParams::make(1, 0.5)));
}

TEST(HarmonicSMConvex, GridMustBeEven) {
    const FunctionSpec f{Power{1, 2, 0}, 1.0, 4.0};
    EXPECT_THROW(check_harmonic_sm_convex(f, SMParams::make(1, 1), 7), ParameterError);
}

TEST(SMConvex, LinearAndSquarePass) {
    EXPECT_TRUE(check_sm_convex(FunctionSpec{Affine{1, 0}, 0.5, 8.0}, SMParams::make(1, 1)).passed);
    EXPECT_TRUE(check_sm_convex(FunctionSpec{Power{1, 2, 0}, 0.5, 8.0}, SMParams::make(1, 1)).passed);
}

TEST(SMConvex, ConcaveFailsWithWitness) {
    const auto r = check_sm_convex(FunctionSpec{Power{-1, 2, 0}, 0.5, 8.0}, SMParams::make(1, 1));
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.witness.t, 0.0);
    EXPECT_LT(r.witness.t, 1.0);
    EXPECT_NE(r.witness.x, r.witness.y);
    const double point = r.witness.t * r.witness.x + (1.0 - r.witness.t) * r.witness.y;
    EXPECT_NEAR(r.witness.lhs, -point * point, 1e-12 * point * point);
}

TEST(HarmonicConvex, AgreesWithSMCheckerAtUnitParameters) {
    for (const auto& f : curated()) {
        const bool eq2 = check_harmonic_convex(f).passed;
        const bool sm = check_harmonic_sm_convex(f, SMParams::make(1, 1)).passed;
        EXPECT_EQ(eq2, sm) << f.label();
    }
}

TEST(HarmonicSConvex, AgreesWithSMCheckerAtUnitM) {
    for (const auto& f : curated()) {
        for (double s : {0.25, 0.5}) {
            EXPECT_EQ(check_harmonic_s_convex(f, s).passed,
                      check_harmonic_sm_convex(f, SMParams::make(s, 1)).passed)
                << f.label() << " s=" << s;
        }
    }
}

TEST(HarmonicAlphaMConvex, SquareAtUnitAlpha) {
    const FunctionSpec f{Power{1, 2, 0}, 0.5, 8.0};
    EXPECT_TRUE(check_harmonic_alpha_m_convex(f, 1.0, 0.7).passed);
    EXPECT_FALSE(check_harmonic_alpha_m_convex(FunctionSpec{Power{-1, 2, 0}, 0.5, 8.0}, 1.0, 0.7).passed);
}

TEST(Convex, Classical) {
    EXPECT_TRUE(check_convex(FunctionSpec{Exp{1}, 0.5, 8.0}).passed);
    EXPECT_FALSE(check_convex(FunctionSpec{Power{1, 0.5, 0}, 0.5, 8.0}).passed);
}

TEST(Monotonicity, Sampling) {
    const Domain w{0.5, 8.0};
    EXPECT_EQ(sample_monotonicity(FunctionSpec{Power{1, 2, 0}, 0.5, 8.0}, w), Monotonicity::Nondecreasing);
    EXPECT_EQ(sample_monotonicity(FunctionSpec{Reciprocal{}, 0.5, 8.0}, w), Monotonicity::Nonincreasing);
    EXPECT_EQ(sample_monotonicity(FunctionSpec{Affine{0, 3}, 0.5, 8.0}, w), Monotonicity::Constant);
    // x^2 - 4x + 3 turns at 2.
    EXPECT_EQ(sample_monotonicity(DerivativePower{FunctionSpec{Power{1, 2, 0}, 0.5, 8.0}, 1.0}, w),
              Monotonicity::Nondecreasing);
}

TEST(Prop1, CombinationInequalityEqualityCases) {
    // t = 0 and x = m y make both sides equal.
    for (double m : {0.3, 0.7, 1.0}) {
        const double x = 1.3, y = 2.9;
        EXPECT_NEAR(harmonic_combine(x, y, 0.0, m), m * y, 1e-15);
        for (double t : {0.1, 0.5, 0.9}) {
            EXPECT_NEAR(harmonic_combine(m * y, y, t, m), t * m * y + m * (1.0 - t) * y, 1e-14);
        }
    }
}

TEST(Prop1, SquareWithFractionalM) {
    const auto r = check_prop1_implication(FunctionSpec{Power{1, 2, 0}, 0.5, 8.0}, SMParams::make(1, 0.7));
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_EQ(r.monotonicity, Monotonicity::Nondecreasing);
    EXPECT_TRUE(r.sm_check.passed);
    EXPECT_TRUE(r.harmonic_check.passed);
    EXPECT_TRUE(r.premise_held);
    EXPECT_GE(r.combination_worst_margin, -1e-12);
}

TEST(Prop1, MixedSlopesAreInconclusive) {
    const FunctionSpec f{Power{1, 2, -4}, 0.5, 8.0};
    struct Bump {
        double operator()(double x) const { return (x - 2.0) * (x - 2.0); }
        Domain domain() const { return {0.5, 8.0}; }
    };
    EXPECT_EQ(check_prop1_implication(Bump{}, SMParams::make(1, 1)).verdict, Verdict::Inconclusive);
    EXPECT_EQ(check_prop1_implication(f, SMParams::make(1, 1)).verdict, Verdict::Pass);
}

TEST(Prop1, ImplicationOverCuratedFamilies) {
    for (const auto& f : curated()) {
        for (double s : {0.5, 1.0}) {
            for (double m : {0.6, 1.0}) {
                const auto params = SMParams::make(s, m);
                const auto r = check_prop1_implication(f, params, 32);
                if (r.verdict == Verdict::Inconclusive) continue;
                EXPECT_EQ(r.verdict, Verdict::Pass) << f.label() << " s=" << s << " m=" << m;
                if (r.monotonicity == Monotonicity::Nondecreasing && r.sm_check.passed) {
                    EXPECT_TRUE(r.harmonic_check.passed) << f.label();
                }
            }
        }
    }
}

}  // namespace
}  // namespace hhkit
