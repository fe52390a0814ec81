#pragma once

// Grid certification of the convexity notions: classical, harmonic,
// harmonically s-convex, (s,m)-convex in the second sense, harmonically
// (alpha,m)-convex and harmonically (s,m)-convex in the second sense.
//
// x and y run over a log-spaced grid x grid mesh, t over grid+1 uniform
// points (so 0, 1/2 and 1 are always sampled). A check passes iff
// f(combined) <= bound + 1e-12 * max(1, |bound|) at every sample.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <vector>

#include "hhkit/errors.hpp"
#include "hhkit/functions.hpp"

namespace hhkit {

/// Anything with a scalar call operator and a domain().
template <class F>
concept DomainFunction = requires(const F& f, double x) {
    { f(x) } -> std::convertible_to<double>;
    { f.domain() } -> std::convertible_to<Domain>;
};

struct Witness {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct CheckReport {
    bool passed = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    Witness witness;
    std::size_t evaluated = 0;
};

inline constexpr double kCheckSlack = 1e-12;
inline constexpr int kDefaultGrid = 64;

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(llo + step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::vector<double> unit_grid(int n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    return out;
}

inline void validate_grid(int grid) {
    if (grid < 2 || grid % 2 != 0) throw ParameterError("grid must be an even integer >= 2");
}

/// combine(x, y, t) gives the evaluation point; bound(fx, fy, t) the
/// right-hand side.
template <class F, class Combine, class Bound>
CheckReport grid_check(const F& f, Domain window, int grid, Combine combine, Bound bound) {
    validate_grid(grid);
    const Domain dom = f.domain();
    if (!(window.lo > 0.0 && window.lo < window.hi)) throw DomainError("check: empty sampling window");
    if (!dom.contains(window.lo) || !dom.contains(window.hi)) {
        throw DomainError("check: sampling window leaves the function domain");
    }

    const auto xs = log_grid(window.lo, window.hi, grid);
    const auto ts = unit_grid(grid);
    std::vector<double> fx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) fx[i] = f(xs[i]);

    CheckReport report;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            for (double t : ts) {
                const double point = combine(xs[i], xs[j], t);
                if (!dom.contains(point)) {
                    throw DomainError("check: combined point " + format_number(point) +
                                      " leaves the function domain");
                }
                const double lhs = f(std::clamp(point, dom.lo, dom.hi));
                const double rhs = bound(fx[i], fx[j], t);
                const double margin = rhs - lhs;
                ++report.evaluated;
                if (margin < report.worst_margin) {
                    report.worst_margin = margin;
                    report.witness = {xs[i], xs[j], t, lhs, rhs};
                }
                if (margin < -kCheckSlack * std::max(1.0, std::abs(rhs))) report.passed = false;
            }
        }
    }
    return report;
}

inline void validate_unit_param(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError(std::string(name) + " must lie in [0, 1]");
}

inline void validate_m(double m) {
    if (!(m > 0.0 && m <= 1.0)) throw ParameterError("m must lie in (0, 1]");
}

}  // namespace detail

/// Sampling window keeping every (s,m) combination inside the domain:
/// x, y in [lo/m, hi] puts both x and m y in [lo, hi].
inline Domain default_window(Domain dom, double m) {
    const Domain w{dom.lo / m, dom.hi};
    if (!(w.lo < w.hi)) throw DomainError("check: domain too narrow for m = " + format_number(m));
    return w;
}

/// f(m x y / (m t y + (1-t) x)) <= t^s f(x) + m (1-t)^s f(y).
/// s = 0 is accepted for the theorem drivers even though the definition
/// itself asks for s in (0, 1].
template <DomainFunction F>
CheckReport check_harmonic_sm_convex(const F& f, const SMParams& params, int grid, Domain window) {
    detail::validate_unit_param(params.s, "s");
    detail::validate_m(params.m);
    const double s = params.s;
    const double m = params.m;
    return detail::grid_check(
        f, window, grid, [m](double x, double y, double t) { return harmonic_combine(x, y, t, m); },
        [s, m](double fx, double fy, double t) {
            return std::pow(t, s) * fx + m * std::pow(1.0 - t, s) * fy;
        });
}

template <DomainFunction F>
CheckReport check_harmonic_sm_convex(const F& f, const SMParams& params, int grid = kDefaultGrid) {
    return check_harmonic_sm_convex(f, params, grid, default_window(f.domain(), params.m));
}

/// f(t x + m (1-t) y) <= t^s f(x) + m (1-t)^s f(y).
template <DomainFunction F>
CheckReport check_sm_convex(const F& f, const SMParams& params, int grid, Domain window) {
    detail::validate_unit_param(params.s, "s");
    detail::validate_m(params.m);
    const double s = params.s;
    const double m = params.m;
    return detail::grid_check(
        f, window, grid, [m](double x, double y, double t) { return t * x + m * (1.0 - t) * y; },
        [s, m](double fx, double fy, double t) {
            return std::pow(t, s) * fx + m * std::pow(1.0 - t, s) * fy;
        });
}

template <DomainFunction F>
CheckReport check_sm_convex(const F& f, const SMParams& params, int grid = kDefaultGrid) {
    return check_sm_convex(f, params, grid, default_window(f.domain(), params.m));
}

/// f(x y / (t x + (1-t) y)) <= t f(y) + (1-t) f(x).
template <DomainFunction F>
CheckReport check_harmonic_convex(const F& f, int grid = kDefaultGrid) {
    return detail::grid_check(
        f, f.domain(), grid, [](double x, double y, double t) { return x * y / (t * x + (1.0 - t) * y); },
        [](double fx, double fy, double t) { return t * fy + (1.0 - t) * fx; });
}

/// f(x y / (t x + (1-t) y)) <= t^s f(y) + (1-t)^s f(x).
template <DomainFunction F>
CheckReport check_harmonic_s_convex(const F& f, double s, int grid = kDefaultGrid) {
    detail::validate_unit_param(s, "s");
    return detail::grid_check(
        f, f.domain(), grid, [](double x, double y, double t) { return x * y / (t * x + (1.0 - t) * y); },
        [s](double fx, double fy, double t) { return std::pow(t, s) * fy + std::pow(1.0 - t, s) * fx; });
}

/// f((t/x + (1-t)/(m y))^(-1)) <= t^alpha f(x) + m (1 - t^alpha) f(y).
template <DomainFunction F>
CheckReport check_harmonic_alpha_m_convex(const F& f, double alpha, double m, int grid = kDefaultGrid) {
    detail::validate_unit_param(alpha, "alpha");
    detail::validate_m(m);
    return detail::grid_check(
        f, default_window(f.domain(), m), grid,
        [m](double x, double y, double t) { return harmonic_combine(x, y, t, m); },
        [alpha, m](double fx, double fy, double t) {
            const double ta = std::pow(t, alpha);
            return ta * fx + m * (1.0 - ta) * fy;
        });
}

/// Classical convexity: f(t x + (1-t) y) <= t f(x) + (1-t) f(y).
template <DomainFunction F>
CheckReport check_convex(const F& f, int grid = kDefaultGrid) {
    return detail::grid_check(
        f, f.domain(), grid, [](double x, double y, double t) { return t * x + (1.0 - t) * y; },
        [](double fx, double fy, double t) { return t * fx + (1.0 - t) * fy; });
}

enum class Monotonicity { Constant, Nondecreasing, Nonincreasing, Mixed };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Constant: return "constant";
        case Monotonicity::Nondecreasing: return "nondecreasing";
        case Monotonicity::Nonincreasing: return "nonincreasing";
        case Monotonicity::Mixed: return "mixed";
    }
    return "?";
}

/// Sign pattern of consecutive differences on a log grid over the window.
template <DomainFunction F>
Monotonicity sample_monotonicity(const F& f, Domain window, int grid = kDefaultGrid) {
    const auto xs = detail::log_grid(window.lo, window.hi, std::max(grid, 2));
    bool up = false;
    bool down = false;
    double prev = f(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double cur = f(xs[i]);
        const double tol = kCheckSlack * std::max({1.0, std::abs(prev), std::abs(cur)});
        if (cur - prev > tol) up = true;
        if (prev - cur > tol) down = true;
        prev = cur;
    }
    if (up && down) return Monotonicity::Mixed;
    if (up) return Monotonicity::Nondecreasing;
    if (down) return Monotonicity::Nonincreasing;
    return Monotonicity::Constant;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Prop1Report {
    Verdict verdict = Verdict::Inconclusive;
    Monotonicity monotonicity = Monotonicity::Mixed;
    /// min over the grid of (t x + m(1-t) y) - m x y / (m t y + (1-t) x).
    double combination_worst_margin = std::numeric_limits<double>::infinity();
    CheckReport sm_check;
    CheckReport harmonic_check;
    /// The relevant implication was exercised, i.e. its premise held.
    bool premise_held = false;
};

/// Grid form of the monotone transfer between (s,m)-convexity and its
/// harmonic counterpart:
///  (a) nondecreasing and (s,m)-convex  => harmonically (s,m)-convex,
///  (b) nonincreasing and harmonically (s,m)-convex => (s,m)-convex,
/// both resting on m x y / (m t y + (1-t) x) <= t x + m (1-t) y.
template <DomainFunction F>
Prop1Report check_prop1_implication(const F& f, const SMParams& params, int grid = kDefaultGrid) {
    detail::validate_unit_param(params.s, "s");
    detail::validate_m(params.m);
    const Domain window = default_window(f.domain(), params.m);

    Prop1Report out;
    out.monotonicity = sample_monotonicity(f, window, grid);
    if (out.monotonicity == Monotonicity::Mixed) {
        out.verdict = Verdict::Inconclusive;
        return out;
    }

    const auto xs = detail::log_grid(window.lo, window.hi, grid);
    const auto ts = detail::unit_grid(grid);
    bool combination_ok = true;
    for (double x : xs) {
        for (double y : xs) {
            for (double t : ts) {
                const double linear = t * x + params.m * (1.0 - t) * y;
                const double harmonic = harmonic_combine(x, y, t, params.m);
                const double margin = linear - harmonic;
                out.combination_worst_margin = std::min(out.combination_worst_margin, margin);
                if (margin < -kCheckSlack * std::max(1.0, linear)) combination_ok = false;
            }
        }
    }

    out.sm_check = check_sm_convex(f, params, grid, window);
    out.harmonic_check = check_harmonic_sm_convex(f, params, grid, window);

    bool implication_ok = true;
    const bool nondecreasing =
        out.monotonicity == Monotonicity::Nondecreasing || out.monotonicity == Monotonicity::Constant;
    const bool nonincreasing =
        out.monotonicity == Monotonicity::Nonincreasing || out.monotonicity == Monotonicity::Constant;
    if (nondecreasing && out.sm_check.passed) {
        out.premise_held = true;
        implication_ok = implication_ok && out.harmonic_check.passed;
    }
    if (nonincreasing && out.harmonic_check.passed) {
        out.premise_held = true;
        implication_ok = implication_ok && out.sm_check.passed;
    }
    out.verdict = combination_ok && implication_ok ? Verdict::Pass : Verdict::Fail;
    return out;
}

}  // namespace hhkit
