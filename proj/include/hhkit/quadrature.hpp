#pragma once

// Adaptive Gauss-Kronrod (7/15) integration. This is the ground-truth oracle
// for every coefficient and every theorem left-hand side in the library, so
// it only relies on the |K15 - G7| error estimate and bisection: no
// derivative bounds, which fractional powers t^s at the endpoints would break.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hhkit/errors.hpp"

namespace hhkit {

struct QuadSpec {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    int max_depth = 60;
    /// Points strictly inside (lo, hi) where the integrand has a kink.
    std::vector<double> split_points;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t segments = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    int depth;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double lo, double hi, int depth) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    auto sample = [&](double x) {
        const double v = static_cast<double>(f(x));
        if (!std::isfinite(v)) {
            throw DomainError("integrand is not finite at x = " + std::to_string(x));
        }
        return v;
    };

    const double fc = sample(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = sample(center - dx) + sample(center + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    return Segment{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half), depth};
}

}  // namespace detail

/// Globally adaptive integration of f over [lo, hi]. The segment with the
/// largest error estimate is bisected until the summed estimate satisfies
/// max(abs_tol, rel_tol * |result|). Throws ToleranceError otherwise.
template <class F>
QuadResult integrate_detailed(F&& f, double lo, double hi, const QuadSpec& spec = {}) {
    if (!(lo < hi)) throw DomainError("integrate: require lo < hi");
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_depth < 1) {
        throw DomainError("integrate: tolerances must be positive and max_depth >= 1");
    }

    std::vector<double> cuts{lo};
    std::vector<double> splits = spec.split_points;
    std::sort(splits.begin(), splits.end());
    for (double p : splits) {
        if (!(p > lo && p < hi)) throw DomainError("integrate: split point outside (lo, hi)");
        if (p > cuts.back()) cuts.push_back(p);
    }
    cuts.push_back(hi);

    std::priority_queue<detail::Segment> open;
    std::vector<detail::Segment> frozen;
    QuadResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        open.push(detail::gauss_kronrod_15(f, cuts[i], cuts[i + 1], 0));
        out.evaluations += 15;
    }

    auto totals = [&]() {
        double value = 0.0;
        double error = 0.0;
        auto copy = open;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        for (const auto& s : frozen) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };

    auto [value, error] = totals();
    constexpr std::size_t kMaxSegments = 100000;
    std::size_t iterations = 0;
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) && !open.empty()) {
        detail::Segment worst = open.top();
        open.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (worst.depth >= spec.max_depth || !(mid > worst.lo && mid < worst.hi) ||
            open.size() + frozen.size() >= kMaxSegments) {
            frozen.push_back(worst);
            continue;
        }
        auto left = detail::gauss_kronrod_15(f, worst.lo, mid, worst.depth + 1);
        auto right = detail::gauss_kronrod_15(f, mid, worst.hi, worst.depth + 1);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        open.push(left);
        open.push(right);
        // Running sums drift; resynchronise now and then.
        if (++iterations % 256 == 0) std::tie(value, error) = totals();
    }

    std::tie(value, error) = totals();
    out.value = value;
    out.error = error;
    out.segments = open.size() + frozen.size();
    if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
        throw ToleranceError("integrate: tolerance not met (estimate " + std::to_string(value) +
                                 ", error bound " + std::to_string(error) + ")",
                             value, error);
    }
    return out;
}

template <class F>
double integrate(F&& f, double lo, double hi, const QuadSpec& spec = {}) {
    return integrate_detailed(std::forward<F>(f), lo, hi, spec).value;
}

/// ab/(b-a) * integral_a^b f(x)/x^2 dx: the mean of f under the harmonic
/// pushforward of the uniform measure on [0,1].
template <class F>
double harmonic_mean_integral(const F& f, double a, double b, const QuadSpec& spec = {}) {
    if (!(a > 0.0 && a < b)) throw DomainError("harmonic_mean_integral: require 0 < a < b");
    const double integral = integrate([&](double x) { return f(x) / (x * x); }, a, b, spec);
    return a * b / (b - a) * integral;
}

/// 1/(b-a) * integral_a^b f(x) dx.
template <class F>
double arithmetic_mean_integral(const F& f, double a, double b, const QuadSpec& spec = {}) {
    if (!(a < b)) throw DomainError("arithmetic_mean_integral: require a < b");
    return integrate([&](double x) { return f(x); }, a, b, spec) / (b - a);
}

/// Weights multiplying (tb + (1-t)a)^(-2r) in the coefficient kernels.
enum class KernelWeight {
    W1,  // |1-2t| t^s
    W2,  // |1-2t| (1-t)^s
    N1,  // t^s
    N2,  // (1-t)^s
};

inline const char* to_string(KernelWeight w) {
    switch (w) {
        case KernelWeight::W1: return "W1";
        case KernelWeight::W2: return "W2";
        case KernelWeight::N1: return "N1";
        case KernelWeight::N2: return "N2";
    }
    return "?";
}

inline double kernel_weight(KernelWeight w, double s, double t) {
    switch (w) {
        case KernelWeight::W1: return std::abs(1.0 - 2.0 * t) * std::pow(t, s);
        case KernelWeight::W2: return std::abs(1.0 - 2.0 * t) * std::pow(1.0 - t, s);
        case KernelWeight::N1: return std::pow(t, s);
        case KernelWeight::N2: return std::pow(1.0 - t, s);
    }
    return 0.0;
}

/// integral_0^1 weight(t) (tb + (1-t)a)^(-2r) dt. Every coefficient family
/// (lambda, mu, C, rho, nu) is an instance of this integral.
inline double kernel_K(KernelWeight weight, double s, double r, double a, double b,
                       QuadSpec spec = {}) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("kernel_K: s must lie in [0, 1]");
    if (!(r >= 1.0)) throw DomainError("kernel_K: r must be >= 1");
    if (!(a > 0.0 && a < b)) throw DomainError("kernel_K: require 0 < a < b");
    if (weight == KernelWeight::W1 || weight == KernelWeight::W2) spec.split_points = {0.5};
    const double exponent = -2.0 * r;
    return integrate(
        [&](double t) { return kernel_weight(weight, s, t) * std::pow(t * b + (1.0 - t) * a, exponent); },
        0.0, 1.0, spec);
}

}  // namespace hhkit
