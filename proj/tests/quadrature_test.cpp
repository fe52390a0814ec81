#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hhkit/functions.hpp"
#include "hhkit/quadrature.hpp"

namespace hhkit {
namespace {

TEST(Integrate, ElementaryIntegrals) {
    EXPECT_NEAR(integrate([](double) { return 1.0; }, 0.0, 1.0), 1.0, 1e-14);
    QuadSpec kink;
    kink.split_points = {0.5};
    EXPECT_NEAR(integrate([](double t) { return std::abs(1.0 - 2.0 * t); }, 0.0, 1.0, kink), 0.5, 1e-14);
    EXPECT_NEAR(integrate([](double x) { return std::pow(x, -3.0); }, 1.0, 2.0), 3.0 / 8.0, 1e-13);
}

TEST(Integrate, FractionalPowerAtEndpoint) {
    // int_0^1 t^0.25 dt = 0.8; the derivative blows up at 0.
    const auto r = integrate_detailed([](double t) { return std::pow(t, 0.25); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 0.8, 1e-10);
    EXPECT_LE(r.error, 1e-10);
}

TEST(Integrate, IntegrableSingularity) {
    // int_0^1 t^-0.5 dt = 2; nodes never touch the endpoint.
    QuadSpec loose{1e-8, 1e-8, 60, {}};
    EXPECT_NEAR(integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, loose), 2.0, 1e-7);
}

TEST(Integrate, ToleranceNotMetCarriesEstimate) {
    QuadSpec tight{1e-15, 1e-15, 2, {}};
    try {
        integrate([](double t) { return std::pow(t, 0.1); }, 0.0, 1.0, tight);
        FAIL() << "expected ToleranceError";
    } catch (const ToleranceError& e) {
        EXPECT_NEAR(e.estimate(), 1.0 / 1.1, 1e-2);
        EXPECT_GT(e.error_bound(), 1e-15);
    }
}

TEST(Integrate, RejectsBadArguments) {
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(integrate(one, 1.0, 1.0), DomainError);
    QuadSpec bad_split;
    bad_split.split_points = {2.0};
    EXPECT_THROW(integrate(one, 0.0, 1.0, bad_split), DomainError);
    QuadSpec bad_tol{0.0, 1e-10, 60, {}};
    EXPECT_THROW(integrate(one, 0.0, 1.0, bad_tol), DomainError);
    EXPECT_THROW(integrate([](double x) { return std::sqrt(x); }, -1.0, 1.0), DomainError);
}

TEST(HarmonicMeanIntegral, ClosedForms) {
    const FunctionSpec one{Power{0.0, 0.0, 1.0}, 0.5, 4.0};
    const FunctionSpec square{Power{1.0, 2.0, 0.0}, 0.5, 4.0};
    const FunctionSpec recip{Reciprocal{}, 0.5, 4.0};
    EXPECT_NEAR(harmonic_mean_integral(one, 1.0, 2.0), 1.0, 1e-12);
    // ab/(b-a) int_a^b dx = ab
    EXPECT_NEAR(harmonic_mean_integral(square, 1.0, 2.0), 2.0, 1e-12);
    // ab/(b-a) int_a^b x^-3 dx = (a+b)/(2ab)
    EXPECT_NEAR(harmonic_mean_integral(recip, 1.0, 2.0), 0.75, 1e-12);
}

TEST(HarmonicMeanIntegral, NormalisesConstants) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ua(0.1, 5.0), ur(1.01, 20.0), uc(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double a = ua(rng), b = a * ur(rng), c = uc(rng);
        const FunctionSpec f{Affine{0.0, c}, a, b};
        EXPECT_NEAR(harmonic_mean_integral(f, a, b), c, 1e-10 * std::max(1.0, std::abs(c)));
    }
}

TEST(KernelK, LambdaOneAtUnitInterval) {
    // Reference from 30-digit quadrature; closed form 1/(ab) - 2/(b-a)^2 ln((a+b)^2/(4ab)).
    const double closed = 0.5 - 2.0 * std::log(9.0 / 8.0);
    EXPECT_NEAR(kernel_K(KernelWeight::W1, 0.0, 1.0, 1.0, 2.0), 0.264433928687233090922411781059, 1e-11);
    EXPECT_NEAR(kernel_K(KernelWeight::W1, 0.0, 1.0, 1.0, 2.0), closed, 1e-11);
}

TEST(KernelK, NarrowIntervalLimit) {
    // int_0^1 (tb + (1-t)a)^-2 dt = 1/(ab)
    EXPECT_NEAR(kernel_K(KernelWeight::N1, 0.0, 1.0, 1.0, 1.001), 1.0 / 1.001, 1e-12);
}

TEST(KernelK, SplitWeightsAtSZero) {
    const double w1 = kernel_K(KernelWeight::W1, 0.0, 1.5, 1.0, 3.0);
    const double w2 = kernel_K(KernelWeight::W2, 0.0, 1.5, 1.0, 3.0);
    EXPECT_NEAR(w1, w2, 1e-12);
    QuadSpec kink;
    kink.split_points = {0.5};
    const double direct = integrate(
        [](double t) { return std::abs(1.0 - 2.0 * t) * std::pow(3.0 * t + (1.0 - t), -3.0); }, 0.0, 1.0, kink);
    EXPECT_NEAR(w1, direct, 1e-12);
}

TEST(KernelK, ReflectionSymmetry) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> us(0.0, 1.0), ur(1.0, 3.0), ua(0.2, 3.0), ratio(1.1, 10.0);
    for (int i = 0; i < 50; ++i) {
        const double s = us(rng), r = ur(rng), a = ua(rng), b = a * ratio(rng);
        QuadSpec kink;
        kink.split_points = {0.5};
        const double reflected = integrate(
            [&](double t) {
                return std::abs(1.0 - 2.0 * t) * std::pow(1.0 - t, s) * std::pow(t * a + (1.0 - t) * b, -2.0 * r);
            },
            0.0, 1.0, kink);
        const double k = kernel_K(KernelWeight::W1, s, r, a, b);
        EXPECT_NEAR(k, reflected, 1e-9 * std::max(1.0, k));
    }
}

TEST(KernelK, DecreasesInExponent) {
    for (KernelWeight w : {KernelWeight::W1, KernelWeight::W2, KernelWeight::N1, KernelWeight::N2}) {
        for (double s : {0.0, 0.25, 0.5, 1.0}) {
            double prev = kernel_K(w, s, 1.0, 1.0, 2.5);
            for (double r = 1.25; r <= 4.0; r += 0.25) {
                const double cur = kernel_K(w, s, r, 1.0, 2.5);
                EXPECT_LT(cur, prev) << to_string(w) << " s=" << s << " r=" << r;
                prev = cur;
            }
        }
    }
}

TEST(KernelK, ValidatesArguments) {
    EXPECT_THROW(kernel_K(KernelWeight::W1, 1.5, 1.0, 1.0, 2.0), DomainError);
    EXPECT_THROW(kernel_K(KernelWeight::W1, 0.5, 0.5, 1.0, 2.0), DomainError);
    EXPECT_THROW(kernel_K(KernelWeight::W1, 0.5, 1.0, 2.0, 1.0), DomainError);
}

}  // namespace
}  // namespace hhkit
