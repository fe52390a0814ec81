#pragma once

// Gamma, Beta and Gauss hypergeometric 2F1 on the real line.
//
// 2F1 has two independent evaluators: the power series, and the Euler
// integral
//     2F1(a,b;c;z) = 1/B(b,c-b) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt,
// valid for c > b > 0. The Euler form is the one downstream coefficient
// formulas are defined through; the series is its cross-check.

#include <array>
#include <cmath>
#include <numbers>

#include "hhkit/errors.hpp"
#include "hhkit/quadrature.hpp"

namespace hhkit {

/// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients). Reflection
/// is used below x = 1/2.
inline double ln_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("ln_gamma: x must be > 0");
    if (!std::isfinite(x)) throw DomainError("ln_gamma: x must be finite");

    static constexpr std::array<double, 9> kCoefficients = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double kG = 7.0;

    if (x < 0.5) {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x); sin(pi x) > 0 on (0, 1/2).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
    }
    const double xm1 = x - 1.0;
    double series = kCoefficients[0];
    for (std::size_t i = 1; i < kCoefficients.size(); ++i) {
        series += kCoefficients[i] / (xm1 + static_cast<double>(i));
    }
    const double t = xm1 + kG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

/// Euler Beta function Gamma(x)Gamma(y)/Gamma(x+y).
inline double beta(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta: arguments must be > 0");
    return std::exp(ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y));
}

struct Hyp2F1Args {
    double a = 0.0;
    double b = 1.0;
    double c = 2.0;
    double z = 0.0;

    /// Throws DomainError unless c > b > 0 and 0 <= z < 1.
    void validate() const {
        if (!(b > 0.0)) throw DomainError("2F1: b must be > 0");
        if (!(c > b)) throw DomainError("2F1: c must be > b");
        if (!(z >= 0.0 && z < 1.0)) throw DomainError("2F1: z must lie in [0, 1)");
        if (!std::isfinite(a)) throw DomainError("2F1: a must be finite");
    }
};

/// Partial sums of sum_n (a)_n (b)_n / ((c)_n n!) z^n. Stops once a term
/// falls below 1e-15 of the running sum.
inline double hyp2f1_series(const Hyp2F1Args& args) {
    args.validate();
    if (args.z > 1.0 - 1e-6) throw DomainError("2F1 series: z too close to 1 (need z <= 1 - 1e-6)");

    constexpr long kMaxTerms = 1'000'000;
    double term = 1.0;
    double sum = 1.0;
    for (long n = 0; n < kMaxTerms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (args.a + dn) * (args.b + dn) / ((args.c + dn) * (dn + 1.0)) * args.z;
        sum += term;
        if (std::abs(term) < 1e-15 * std::abs(sum)) return sum;
        // Terminating series: a is a non-positive integer.
        if (term == 0.0) return sum;
    }
    throw NonConvergenceError("2F1 series: no convergence within 1e6 terms");
}

/// Euler integral representation. Endpoint singularities of t^(b-1) and
/// (1-t)^(c-b-1) are removed by the substitutions t = u^(1/b) on [0, 1/2]
/// and 1-t = v^(1/(c-b)) on [1/2, 1] whenever the exponent is negative.
inline double hyp2f1_euler(const Hyp2F1Args& args, QuadSpec spec = {1e-14, 1e-12, 60, {}}) {
    args.validate();
    const double left_exp = args.b - 1.0;
    const double right_exp = args.c - args.b - 1.0;
    const double a = args.a;
    const double z = args.z;

    auto tail = [&](double t) { return std::pow(1.0 - z * t, -a); };
    auto integrand = [&](double t) {
        return std::pow(t, left_exp) * std::pow(1.0 - t, right_exp) * tail(t);
    };

    double left = 0.0;
    if (left_exp < 0.0) {
        // t = u^(1/b): t^(b-1) dt = du / b.
        const double inv_b = 1.0 / args.b;
        const double upper = std::pow(0.5, args.b);
        left = integrate(
            [&](double u) {
                const double t = std::pow(u, inv_b);
                return inv_b * std::pow(1.0 - t, right_exp) * tail(t);
            },
            0.0, upper, spec);
    } else {
        left = integrate(integrand, 0.0, 0.5, spec);
    }

    double right = 0.0;
    if (right_exp < 0.0) {
        // 1 - t = v^(1/(c-b)): (1-t)^(c-b-1) dt = -dv / (c-b).
        const double cb = args.c - args.b;
        const double inv_cb = 1.0 / cb;
        const double upper = std::pow(0.5, cb);
        right = integrate(
            [&](double v) {
                const double t = 1.0 - std::pow(v, inv_cb);
                return inv_cb * std::pow(t, left_exp) * tail(t);
            },
            0.0, upper, spec);
    } else {
        right = integrate(integrand, 0.5, 1.0, spec);
    }

    return (left + right) / beta(args.b, args.c - args.b);
}

/// Contractual 2F1: the Euler integral.
inline double hyp2f1(double a, double b, double c, double z) {
    return hyp2f1_euler(Hyp2F1Args{a, b, c, z});
}

}  // namespace hhkit
