#pragma once

// Curated differentiable function families and the combination maps used by
// the convexity definitions.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "hhkit/errors.hpp"

namespace hhkit {

/// coeff * x^exponent + shift
struct Power {
    double coeff = 1.0;
    double exponent = 1.0;
    double shift = 0.0;
};

/// The piecewise s-power family: a0 at x = 0, b0 x^s + c0 for x > 0, with
/// b0 >= 0 and 0 <= c0 <= a0. Domains never contain 0, so a0 only takes
/// part in the parameter invariant.
struct SPiece {
    double a0 = 1.0;
    double b0 = 1.0;
    double c0 = 0.0;
    double s = 0.5;
};

/// 1/x
struct Reciprocal {};

/// slope * x + intercept
struct Affine {
    double slope = 1.0;
    double intercept = 0.0;
};

/// exp(scale * x)
struct Exp {
    double scale = 1.0;
};

using Family = std::variant<Power, SPiece, Reciprocal, Affine, Exp>;

inline double eval_family(const Family& family, double x) {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Power>) {
                return f.coeff * std::pow(x, f.exponent) + f.shift;
            } else if constexpr (std::is_same_v<T, SPiece>) {
                return x == 0.0 ? f.a0 : f.b0 * std::pow(x, f.s) + f.c0;
            } else if constexpr (std::is_same_v<T, Reciprocal>) {
                return 1.0 / x;
            } else if constexpr (std::is_same_v<T, Affine>) {
                return f.slope * x + f.intercept;
            } else {
                return std::exp(f.scale * x);
            }
        },
        family);
}

inline double deriv_family(const Family& family, double x) {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Power>) {
                if (f.exponent == 0.0) return 0.0;
                return f.coeff * f.exponent * std::pow(x, f.exponent - 1.0);
            } else if constexpr (std::is_same_v<T, SPiece>) {
                return f.b0 * f.s * std::pow(x, f.s - 1.0);
            } else if constexpr (std::is_same_v<T, Reciprocal>) {
                return -1.0 / (x * x);
            } else if constexpr (std::is_same_v<T, Affine>) {
                return f.slope;
            } else {
                return f.scale * std::exp(f.scale * x);
            }
        },
        family);
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string family_name(const Family& family) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Power>) return "pow";
            else if constexpr (std::is_same_v<T, SPiece>) return "spiece";
            else if constexpr (std::is_same_v<T, Reciprocal>) return "recip";
            else if constexpr (std::is_same_v<T, Affine>) return "affine";
            else return "exp";
        },
        family);
}

/// Short self-describing label, e.g. "pow(1,2,0)".
inline std::string family_label(const Family& family) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            auto n = [](double v) { return format_number(v); };
            if constexpr (std::is_same_v<T, Power>) {
                return "pow(" + n(f.coeff) + "," + n(f.exponent) + "," + n(f.shift) + ")";
            } else if constexpr (std::is_same_v<T, SPiece>) {
                return "spiece(" + n(f.a0) + "," + n(f.b0) + "," + n(f.c0) + "," + n(f.s) + ")";
            } else if constexpr (std::is_same_v<T, Reciprocal>) {
                return "recip";
            } else if constexpr (std::is_same_v<T, Affine>) {
                return "affine(" + n(f.slope) + "," + n(f.intercept) + ")";
            } else {
                return "exp(" + n(f.scale) + ")";
            }
        },
        family);
}

struct Domain {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const {
        const double slack = 1e-12 * std::max(1.0, std::abs(hi));
        return x >= lo - slack && x <= hi + slack;
    }
};

/// A family member restricted to a closed sub-interval of (0, inf).
struct FunctionSpec {
    Family family;
    double domain_lo = 1e-3;
    double domain_hi = 1e3;

    void validate() const {
        if (!(domain_lo > 0.0)) throw DomainError("FunctionSpec: domain_lo must be > 0");
        if (!(domain_hi > domain_lo)) throw DomainError("FunctionSpec: domain_hi must exceed domain_lo");
        if (const auto* p = std::get_if<SPiece>(&family)) {
            if (!(p->b0 >= 0.0)) throw DomainError("SPiece: b0 must be >= 0");
            if (!(p->c0 >= 0.0 && p->c0 <= p->a0)) throw DomainError("SPiece: need 0 <= c0 <= a0");
        }
    }

    Domain domain() const { return {domain_lo, domain_hi}; }

    double operator()(double x) const {
        if (!domain().contains(x)) {
            throw DomainError("eval: x = " + format_number(x) + " outside [" + format_number(domain_lo) +
                              ", " + format_number(domain_hi) + "] for " + family_label(family));
        }
        return eval_family(family, x);
    }

    double derivative(double x) const {
        if (!domain().contains(x)) {
            throw DomainError("deriv: x = " + format_number(x) + " outside [" + format_number(domain_lo) +
                              ", " + format_number(domain_hi) + "] for " + family_label(family));
        }
        return deriv_family(family, x);
    }

    std::string label() const { return family_label(family); }
};

inline double eval(const FunctionSpec& f, double x) { return f(x); }
inline double deriv(const FunctionSpec& f, double x) { return f.derivative(x); }

/// x -> |f'(x)|^q, the function whose convexity the derivative bounds assume.
struct DerivativePower {
    FunctionSpec f;
    double q = 1.0;

    double operator()(double x) const { return std::pow(std::abs(f.derivative(x)), q); }
    Domain domain() const { return f.domain(); }
};

/// Convexity and exponent parameters. p is the Hölder conjugate q/(q-1),
/// present only for q > 1.
struct SMParams {
    double s = 1.0;
    double m = 1.0;
    double q = 1.0;
    std::optional<double> p;

    static SMParams make(double s, double m, double q = 1.0) {
        SMParams out{s, m, q, std::nullopt};
        if (q > 1.0) out.p = q / (q - 1.0);
        return out;
    }

    /// Ranges the convexity definitions accept: s, m in (0, 1], q >= 1.
    void validate_definition() const {
        if (!(s > 0.0 && s <= 1.0)) throw ParameterError("s must lie in (0, 1]");
        validate_common();
    }

    /// Ranges the theorem statements accept: s in [0, 1].
    void validate_theorem() const {
        if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("s must lie in [0, 1]");
        validate_common();
    }

private:
    void validate_common() const {
        if (!(m > 0.0 && m <= 1.0)) throw ParameterError("m must lie in (0, 1]");
        if (!(q >= 1.0)) throw ParameterError("q must be >= 1");
        if (p && std::abs(1.0 / *p + 1.0 / q - 1.0) > 1e-12) throw ParameterError("1/p + 1/q must equal 1");
        if (!p && q > 1.0) throw ParameterError("p must be set when q > 1");
    }
};

/// m x y / (m t y + (1-t) x), i.e. (t/x + (1-t)/(m y))^(-1).
inline double harmonic_combine(double x, double y, double t, double m) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("harmonic_combine: x, y must be > 0");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("harmonic_combine: t must lie in [0, 1]");
    if (!(m > 0.0 && m <= 1.0)) throw DomainError("harmonic_combine: m must lie in (0, 1]");
    return m * x * y / (m * t * y + (1.0 - t) * x);
}

/// x -> f(m a b / (a + m b - x)) on [a, m b]. The map g fixes both endpoints
/// and turns linear combinations t a + m(1-t) b into harmonic ones.
inline std::function<double(double)> compose_g(const FunctionSpec& f, double a, double b, double m) {
    if (!(a > 0.0)) throw DomainError("compose_g: a must be > 0");
    if (!(m > 0.0 && m <= 1.0)) throw DomainError("compose_g: m must lie in (0, 1]");
    if (!(a < m * b)) throw DomainError("compose_g: require a < m b");
    return [f, a, b, m](double x) {
        const double mb = m * b;
        const double slack = 1e-12 * mb;
        if (x < a - slack || x > mb + slack) throw DomainError("compose_g: x outside [a, m b]");
        return f(m * a * b / (a + mb - x));
    };
}

}  // namespace hhkit
