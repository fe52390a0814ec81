#pragma once

// Coefficient families of the Hermite-Hadamard type bounds for functions
// whose derivative power |f'|^q is harmonically (s,m)-convex, and the
// evaluators that put both sides of each inequality side by side.
//
// Every coefficient is an integral of the form
//     int_0^1 w(t) (t b + (1-t) a)^(-2r) dt.
// Each set carries two values per entry: the printed closed form (through
// 2F1 and Beta) and a quadrature of the defining integral. The quadrature
// value is the one the bounds are assembled from; the closed forms are
// reported next to it so disagreements show up as findings.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhkit/convexity.hpp"
#include "hhkit/errors.hpp"
#include "hhkit/functions.hpp"
#include "hhkit/quadrature.hpp"
#include "hhkit/specfun.hpp"

namespace hhkit {

struct Interval {
    double a = 1.0;
    double b = 2.0;

    static Interval make(double a, double b) {
        Interval iv{a, b};
        iv.validate();
        return iv;
    }

    void validate() const {
        if (!(a > 0.0 && a < b && std::isfinite(b))) throw DomainError("interval: require 0 < a < b");
    }

    /// 1 - a/b, the hypergeometric argument shared by most coefficients.
    double z() const { return 1.0 - a / b; }
    /// b/m, the right end of the interval the derivative bounds certify on.
    double extended(double m) const { return b / m; }
};

enum class CoefficientFamily { Lambda, Mu, C, Rho, Nu };

inline const char* to_string(CoefficientFamily c) {
    switch (c) {
        case CoefficientFamily::Lambda: return "lambda";
        case CoefficientFamily::Mu: return "mu";
        case CoefficientFamily::C: return "C";
        case CoefficientFamily::Rho: return "rho";
        case CoefficientFamily::Nu: return "nu";
    }
    return "?";
}

/// Printed closed forms paired with quadrature of their defining integrals.
/// labels[i] names entry i; kernels[i] names the integral oracle_values[i]
/// comes from.
struct CoefficientSet {
    CoefficientFamily name = CoefficientFamily::Lambda;
    Interval interval;
    double s = 1.0;
    double q = 1.0;
    std::vector<std::string> labels;
    std::vector<std::string> kernels;
    std::vector<double> values;
    std::vector<double> oracle_values;
    double max_abs_dev = 0.0;

    void add(std::string label, std::string kernel, double printed, double oracle) {
        labels.push_back(std::move(label));
        kernels.push_back(std::move(kernel));
        values.push_back(printed);
        oracle_values.push_back(oracle);
        max_abs_dev = std::max(max_abs_dev, std::abs(printed - oracle));
    }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return i;
        }
        throw std::out_of_range("coefficient set has no entry " + label);
    }
    double printed(const std::string& label) const { return values[index_of(label)]; }
    double oracle(const std::string& label) const { return oracle_values[index_of(label)]; }
    double deviation(const std::string& label) const {
        const auto i = index_of(label);
        return std::abs(values[i] - oracle_values[i]);
    }
};

/// Quadrature accuracy used for every coefficient oracle.
inline QuadSpec oracle_quad_spec() { return QuadSpec{1e-13, 1e-12, 60, {}}; }

namespace detail {

/// int_0^1 weight(t) (t b + (1-t) a)^(-2r) dt with an explicit weight; kept
/// separate from kernel_K so the two paths cross-check each other.
template <class Weight>
double weighted_kernel(Weight weight, double r, const Interval& iv, bool kink) {
    QuadSpec spec = oracle_quad_spec();
    if (kink) spec.split_points = {0.5};
    return integrate(
        [&](double t) {
            const double d = t * iv.b + (1.0 - t) * iv.a;
            return weight(t) / std::pow(d, 2.0 * r);
        },
        0.0, 1.0, spec);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Printed closed forms.

inline double lambda1_printed(const Interval& iv) {
    const double a = iv.a, b = iv.b, d = b - a;
    const double L = std::log((a + b) * (a + b) / (4.0 * a * b));
    return 1.0 / (a * b) - 2.0 / (d * d) * L;
}

inline double lambda2_printed(const Interval& iv) {
    const double a = iv.a, b = iv.b, d = b - a;
    const double L = std::log((a + b) * (a + b) / (4.0 * a * b));
    return -1.0 / (b * d) + (3.0 * a + b) / (d * d * d) * L;
}

inline double lambda3_printed(const Interval& iv) {
    const double a = iv.a, b = iv.b, d = b - a;
    const double L = std::log((a + b) * (a + b) / (4.0 * a * b));
    return 1.0 / (a * d) + (3.0 * a + b) / (d * d * d) * L;
}

/// Elementary forms, q != 1.
inline double mu1_printed(double q, const Interval& iv) {
    const double a = iv.a, b = iv.b, d = b - a;
    const double num = std::pow(a, 2.0 - 2.0 * q) + std::pow(b, 1.0 - 2.0 * q) * (d * (1.0 - 2.0 * q) - a);
    return num / (2.0 * d * d * (1.0 - q) * (1.0 - 2.0 * q));
}

inline double mu2_printed(double q, const Interval& iv) {
    const double a = iv.a, b = iv.b, d = b - a;
    const double num = std::pow(b, 2.0 - 2.0 * q) - std::pow(a, 1.0 - 2.0 * q) * (d * (1.0 - 2.0 * q) + b);
    return num / (2.0 * d * d * (1.0 - q) * (1.0 - 2.0 * q));
}

/// Hypergeometric forms as labelled in the s = 1 reduction of the nu family.
inline double mu1_hyp_printed(double q, const Interval& iv) {
    return hyp2f1(2.0 * q, 2.0, 3.0, iv.z()) / (2.0 * std::pow(iv.b, 2.0 * q));
}

inline double mu2_hyp_printed(double q, const Interval& iv) {
    return hyp2f1(2.0 * q, 1.0, 3.0, iv.z()) / (2.0 * std::pow(iv.b, 2.0 * q));
}

inline double C1_printed(const Interval& iv) {
    const double z = iv.z();
    return (hyp2f1(2, 2, 3, z) - hyp2f1(2, 1, 2, z) + 0.5 * hyp2f1(2, 1, 3, 0.5 * z)) / (iv.b * iv.b);
}

inline double C2_printed(double s, const Interval& iv) {
    const double z = iv.z();
    return (2.0 / (s + 2.0) * hyp2f1(2, s + 2.0, s + 3.0, z) - 1.0 / (s + 1.0) * hyp2f1(2, s + 1.0, s + 2.0, z) +
            1.0 / (std::pow(2.0, s) * (s + 1.0) * (s + 2.0)) * hyp2f1(2, s + 1.0, s + 3.0, 0.5 * z)) /
           (iv.b * iv.b);
}

inline double C3_printed(double s, const Interval& iv) {
    const double z = iv.z();
    return (2.0 / ((s + 1.0) * (s + 2.0)) * hyp2f1(2, 2, s + 3.0, z) - 1.0 / (s + 1.0) * hyp2f1(2, 1, s + 2.0, z) +
            0.5 * hyp2f1(2, 1, 3, 0.5 * z)) /
           (iv.b * iv.b);
}

inline double rho1_printed(double s, double r, const Interval& iv) {
    const double a = iv.a, b = iv.b, z = iv.z();
    const double b2q = std::pow(b, 2.0 * r);
    return beta(1.0, s + 2.0) / b2q * hyp2f1(2.0 * r, 1.0, s + 3.0, z) -
           beta(2.0, s + 1.0) / b2q * hyp2f1(2.0 * r, 2.0, s + 3.0, z) +
           std::pow(2.0, 2.0 * r - s) * beta(2.0, s + 1.0) / std::pow(a + b, 2.0 * r) *
               hyp2f1(2.0 * r, 2.0, s + 3.0, 1.0 - 2.0 * a / (a + b));
}

/// Three-term form given with the theorem statement.
inline double rho2_printed(double s, double r, const Interval& iv) {
    const double z = iv.z();
    const double b2q = std::pow(iv.b, 2.0 * r);
    return beta(s + 1.0, 2.0) / (std::pow(2.0, s) * b2q) * hyp2f1(2.0 * r, s + 1.0, s + 3.0, 0.5 * z) -
           beta(s + 1.0, 2.0) / b2q * hyp2f1(2.0 * r, s + 1.0, s + 3.0, z) +
           beta(s + 2.0, 1.0) / b2q * hyp2f1(2.0 * r, s + 2.0, s + 3.0, z);
}

/// Form reached at the end of the derivation, whose last two terms cancel.
inline double rho2_derivation_printed(double s, double r, const Interval& iv) {
    const double z = iv.z();
    const double b2q = std::pow(iv.b, 2.0 * r);
    const double repeated = beta(s + 2.0, 1.0) / b2q * hyp2f1(2.0 * r, s + 2.0, s + 3.0, z);
    return beta(s + 1.0, 2.0) / (std::pow(2.0, s) * b2q) * hyp2f1(2.0 * r, s + 1.0, s + 3.0, 0.5 * z) -
           repeated + repeated;
}

inline double nu1_printed(double s, double q, const Interval& iv) {
    return beta(1.0, s + 1.0) / std::pow(iv.b, 2.0 * q) * hyp2f1(2.0 * q, 1.0, s + 2.0, iv.z());
}

inline double nu2_printed(double s, double q, const Interval& iv) {
    return beta(s + 1.0, 1.0) / std::pow(iv.b, 2.0 * q) * hyp2f1(2.0 * q, s + 1.0, s + 2.0, iv.z());
}

// ---------------------------------------------------------------------------
// Coefficient sets.

inline CoefficientSet coeff_lambda(const Interval& iv) {
    iv.validate();
    CoefficientSet out;
    out.name = CoefficientFamily::Lambda;
    out.interval = iv;
    auto kink = [](double t) { return std::abs(1.0 - 2.0 * t); };
    out.add("lambda1", "|1-2t| (tb+(1-t)a)^-2", lambda1_printed(iv),
            detail::weighted_kernel(kink, 1.0, iv, true));
    out.add("lambda2", "|1-2t| t (tb+(1-t)a)^-2", lambda2_printed(iv),
            detail::weighted_kernel([&](double t) { return kink(t) * t; }, 1.0, iv, true));
    out.add("lambda3", "|1-2t| (1-t) (tb+(1-t)a)^-2", lambda3_printed(iv),
            detail::weighted_kernel([&](double t) { return kink(t) * (1.0 - t); }, 1.0, iv, true));
    return out;
}

/// Entries mu1, mu2 are the elementary forms; mu1_hyp, mu2_hyp the
/// hypergeometric ones under the labels they are printed with.
inline CoefficientSet coeff_mu(double q, const Interval& iv) {
    iv.validate();
    if (!(q > 1.0)) throw ParameterError("coeff_mu: q must be > 1");
    CoefficientSet out;
    out.name = CoefficientFamily::Mu;
    out.interval = iv;
    out.q = q;
    const double o1 = detail::weighted_kernel([](double t) { return t; }, q, iv, false);
    const double o2 = detail::weighted_kernel([](double t) { return 1.0 - t; }, q, iv, false);
    out.add("mu1", "t (tb+(1-t)a)^-2q", mu1_printed(q, iv), o1);
    out.add("mu2", "(1-t) (tb+(1-t)a)^-2q", mu2_printed(q, iv), o2);
    out.add("mu1_hyp", "t (tb+(1-t)a)^-2q", mu1_hyp_printed(q, iv), o1);
    out.add("mu2_hyp", "(1-t) (tb+(1-t)a)^-2q", mu2_hyp_printed(q, iv), o2);
    return out;
}

inline CoefficientSet coeff_C(double s, const Interval& iv) {
    iv.validate();
    if (!(s > 0.0 && s <= 1.0)) throw ParameterError("coeff_C: s must lie in (0, 1]");
    CoefficientSet out;
    out.name = CoefficientFamily::C;
    out.interval = iv;
    out.s = s;
    auto kink = [](double t) { return std::abs(1.0 - 2.0 * t); };
    out.add("C1", "|1-2t| (tb+(1-t)a)^-2", C1_printed(iv), detail::weighted_kernel(kink, 1.0, iv, true));
    out.add("C2", "|1-2t| t^s (tb+(1-t)a)^-2", C2_printed(s, iv),
            detail::weighted_kernel([&](double t) { return kink(t) * std::pow(t, s); }, 1.0, iv, true));
    out.add("C3", "|1-2t| (1-t)^s (tb+(1-t)a)^-2", C3_printed(s, iv),
            detail::weighted_kernel([&](double t) { return kink(t) * std::pow(1.0 - t, s); }, 1.0, iv, true));
    return out;
}

/// r stands in for q in the exponent -2r.
inline CoefficientSet coeff_rho(double s, double r, const Interval& iv) {
    iv.validate();
    if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("coeff_rho: s must lie in [0, 1]");
    if (!(r >= 1.0)) throw ParameterError("coeff_rho: q must be >= 1");
    CoefficientSet out;
    out.name = CoefficientFamily::Rho;
    out.interval = iv;
    out.s = s;
    out.q = r;
    const double k1 = kernel_K(KernelWeight::W1, s, r, iv.a, iv.b, oracle_quad_spec());
    const double k2 = kernel_K(KernelWeight::W2, s, r, iv.a, iv.b, oracle_quad_spec());
    out.add("rho1", "|1-2t| t^s (tb+(1-t)a)^-2q", rho1_printed(s, r, iv), k1);
    out.add("rho2", "|1-2t| (1-t)^s (tb+(1-t)a)^-2q", rho2_printed(s, r, iv), k2);
    out.add("rho2_derivation", "|1-2t| (1-t)^s (tb+(1-t)a)^-2q", rho2_derivation_printed(s, r, iv), k2);
    return out;
}

inline CoefficientSet coeff_nu(double s, double q, const Interval& iv) {
    iv.validate();
    if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("coeff_nu: s must lie in [0, 1]");
    if (!(q > 1.0)) throw ParameterError("coeff_nu: q must be > 1");
    CoefficientSet out;
    out.name = CoefficientFamily::Nu;
    out.interval = iv;
    out.s = s;
    out.q = q;
    out.add("nu1", "t^s (tb+(1-t)a)^-2q", nu1_printed(s, q, iv),
            kernel_K(KernelWeight::N1, s, q, iv.a, iv.b, oracle_quad_spec()));
    out.add("nu2", "(1-t)^s (tb+(1-t)a)^-2q", nu2_printed(s, q, iv),
            kernel_K(KernelWeight::N2, s, q, iv.a, iv.b, oracle_quad_spec()));
    return out;
}

// ---------------------------------------------------------------------------
// Verification records.

enum class Theorem { HH, HarmHH, I1, I2, FS1, FS2, II1, II2, II3, II4, Lemma };

inline const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::HH: return "HH";
        case Theorem::HarmHH: return "HarmHH";
        case Theorem::I1: return "I1";
        case Theorem::I2: return "I2";
        case Theorem::FS1: return "FS1";
        case Theorem::FS2: return "FS2";
        case Theorem::II1: return "II1";
        case Theorem::II2: return "II2";
        case Theorem::II3: return "II3";
        case Theorem::II4: return "II4";
        case Theorem::Lemma: return "Lemma";
    }
    return "?";
}

inline std::optional<Theorem> theorem_from_string(const std::string& name) {
    for (Theorem t : {Theorem::HH, Theorem::HarmHH, Theorem::I1, Theorem::I2, Theorem::FS1, Theorem::FS2,
                      Theorem::II1, Theorem::II2, Theorem::II3, Theorem::II4, Theorem::Lemma}) {
        if (name == to_string(t)) return t;
    }
    return std::nullopt;
}

inline bool is_derivative_bound(Theorem t) {
    switch (t) {
        case Theorem::I1:
        case Theorem::I2:
        case Theorem::FS1:
        case Theorem::FS2:
        case Theorem::II2:
        case Theorem::II3:
        case Theorem::II4: return true;
        default: return false;
    }
}

/// margin >= -kAcceptTol counts as satisfied.
inline constexpr double kAcceptTol = 1e-9;

struct VerificationRecord {
    Theorem theorem = Theorem::II1;
    Interval interval;
    SMParams params;
    std::optional<FunctionSpec> function;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool satisfied = false;
    /// Right-hand side rebuilt from the printed closed forms, when one exists.
    std::optional<double> rhs_printed;
    std::vector<std::string> diagnostics;

    void finalize() {
        margin = rhs - lhs;
        satisfied = margin >= -kAcceptTol;
    }
};

struct VerifyOptions {
    int grid = kDefaultGrid;
    /// When false the convexity precondition is not checked; the record then
    /// carries an "uncertified" diagnostic. Used to exercise the detectors.
    bool require_certification = true;
    /// Precomputed certification (e.g. from a sweep cache). Must describe the
    /// same function, parameters and window.
    std::optional<CheckReport> certification;
    /// Evaluate the II3 bound with exponent-2q kernels exactly as printed
    /// instead of the exponent-2 kernels its corollaries require.
    bool literal_ii3 = false;
    bool with_printed_rhs = true;
    QuadSpec quad = QuadSpec{1e-13, 1e-12, 60, {}};
};

namespace detail {

inline void require_certified(const std::optional<CheckReport>& report, const VerifyOptions& opts,
                              VerificationRecord& rec, const char* what) {
    if (!opts.require_certification) {
        rec.diagnostics.push_back(std::string("uncertified: ") + what + " not checked");
        return;
    }
    if (!report || !report->passed) {
        std::string msg = std::string("certification missing: ") + what + " failed the grid check";
        if (report) {
            msg += " (worst margin " + format_number(report->worst_margin) + " at x=" +
                   format_number(report->witness.x) + ", y=" + format_number(report->witness.y) +
                   ", t=" + format_number(report->witness.t) + ")";
        }
        throw CertificationError(msg);
    }
    rec.diagnostics.push_back(std::string("certified: ") + what + " on " +
                              std::to_string(report->evaluated) + " grid samples");
}

inline FunctionSpec restricted(const FunctionSpec& f, double lo, double hi) {
    if (!f.domain().contains(lo) || !f.domain().contains(hi)) {
        throw DomainError("[" + format_number(lo) + ", " + format_number(hi) + "] is not inside the domain of " +
                          f.label());
    }
    FunctionSpec out = f;
    out.domain_lo = lo;
    out.domain_hi = hi;
    return out;
}

/// |(f(a) + f(b))/2 - ab/(b-a) int_a^b f(x)/x^2 dx|
inline double trapezoid_gap(const FunctionSpec& f, const Interval& iv, const QuadSpec& spec) {
    return std::abs(0.5 * (f(iv.a) + f(iv.b)) - harmonic_mean_integral(f, iv.a, iv.b, spec));
}

}  // namespace detail

/// Certifies |f'|^q as harmonically (s,m)-convex with x, y sampled over
/// [a, b/m]. The combined points then range over [m a, b/m], which the
/// function's domain has to cover.
inline CheckReport certify_derivative_power(const FunctionSpec& f, const SMParams& params, const Interval& iv,
                                            int grid = kDefaultGrid) {
    const double hi = iv.extended(params.m);
    DerivativePower g{detail::restricted(f, params.m * iv.a, hi), params.q};
    return check_harmonic_sm_convex(g, params, grid, Domain{iv.a, hi});
}

/// Certifies f itself as harmonically (s,m)-convex over [a, b/m].
inline CheckReport certify_function(const FunctionSpec& f, const SMParams& params, const Interval& iv,
                                    int grid = kDefaultGrid) {
    const double hi = iv.extended(params.m);
    return check_harmonic_sm_convex(detail::restricted(f, params.m * iv.a, hi), params, grid, Domain{iv.a, hi});
}

enum class HHKind { Classical, Harmonic };

/// The double inequality
///   classical: f((a+b)/2) <= 1/(b-a) int f <= (f(a)+f(b))/2,
///   harmonic:  f(2ab/(a+b)) <= ab/(b-a) int f/x^2 <= (f(a)+f(b))/2.
/// lhs holds the larger violation of the two links and rhs is 0, so the
/// margin is the smaller of the two link slacks.
inline VerificationRecord verify_hh_double(const FunctionSpec& f, const Interval& iv,
                                           HHKind kind = HHKind::Harmonic, const VerifyOptions& opts = {}) {
    iv.validate();
    VerificationRecord rec;
    rec.theorem = kind == HHKind::Harmonic ? Theorem::HarmHH : Theorem::HH;
    rec.interval = iv;
    rec.function = f;
    const FunctionSpec local = detail::restricted(f, iv.a, iv.b);

    std::optional<CheckReport> cert = opts.certification;
    if (!cert && opts.require_certification) {
        cert = kind == HHKind::Harmonic ? check_harmonic_convex(local, opts.grid) : check_convex(local, opts.grid);
    }
    detail::require_certified(cert, opts, rec, kind == HHKind::Harmonic ? "f harmonically convex" : "f convex");

    const double left = kind == HHKind::Harmonic ? local(2.0 * iv.a * iv.b / (iv.a + iv.b)) : local(0.5 * (iv.a + iv.b));
    const double mid = kind == HHKind::Harmonic ? harmonic_mean_integral(local, iv.a, iv.b, opts.quad)
                                                : arithmetic_mean_integral(local, iv.a, iv.b, opts.quad);
    const double right = 0.5 * (local(iv.a) + local(iv.b));
    rec.lhs = std::max(left - mid, mid - right);
    rec.rhs = 0.0;
    rec.diagnostics.push_back("chain: " + format_number(left) + " <= " + format_number(mid) + " <= " +
                              format_number(right));
    rec.finalize();
    return rec;
}

struct II1Means {
    double mean;           // ab/(b-a) int_a^b f(x)/x^2 dx
    double substitution1;  // int_0^1 f(ab/(t b + (1-t) a)) dt
    double substitution2;  // int_0^1 f(ab/(t a + (1-t) b)) dt
};

/// The harmonic mean written three ways; all three coincide.
inline II1Means ii1_means(const FunctionSpec& f, const Interval& iv, const QuadSpec& spec = {}) {
    const double a = iv.a, b = iv.b;
    return II1Means{
        harmonic_mean_integral(f, a, b, spec),
        integrate([&](double t) { return f(a * b / (t * b + (1.0 - t) * a)); }, 0.0, 1.0, spec),
        integrate([&](double t) { return f(a * b / (t * a + (1.0 - t) * b)); }, 0.0, 1.0, spec),
    };
}

/// ab/(b-a) int f/x^2 <= min[(f(a) + m f(b/m)), (f(b) + m f(a/m))] / (s+1)
inline VerificationRecord verify_II1(const FunctionSpec& f, const SMParams& params, const Interval& iv,
                                     const VerifyOptions& opts = {}) {
    iv.validate();
    params.validate_theorem();
    VerificationRecord rec;
    rec.theorem = Theorem::II1;
    rec.interval = iv;
    rec.params = params;
    rec.function = f;
    if (params.s == 0.0) rec.diagnostics.push_back("s = 0 lies outside the definitional range (0, 1]");

    const double m = params.m;
    const double b_ext = iv.extended(m);
    const double a_ext = iv.a / m;
    for (double x : {m * iv.a, b_ext, a_ext}) {
        if (!f.domain().contains(x)) {
            throw DomainError("verify_II1: " + format_number(x) + " outside the domain of " + f.label());
        }
    }

    std::optional<CheckReport> cert = opts.certification;
    if (!cert && opts.require_certification) cert = certify_function(f, params, iv, opts.grid);
    detail::require_certified(cert, opts, rec, "f harmonically (s,m)-convex on [a, b/m]");

    const auto means = ii1_means(f, iv, opts.quad);
    rec.lhs = means.mean;
    const double first = (f(iv.a) + m * f(b_ext)) / (params.s + 1.0);
    const double second = (f(iv.b) + m * f(a_ext)) / (params.s + 1.0);
    rec.rhs = std::min(first, second);
    rec.diagnostics.push_back("bounds: (f(a)+m f(b/m))/(s+1)=" + format_number(first) +
                              ", (f(b)+m f(a/m))/(s+1)=" + format_number(second));
    rec.diagnostics.push_back("substitutions: " + format_number(means.substitution1) + ", " +
                              format_number(means.substitution2));
    rec.finalize();
    return rec;
}

/// (f(a)+f(b))/2 - ab/(b-a) int f/x^2 equals
/// ab(b-a)/2 int_0^1 (1-2t)/(tb+(1-t)a)^2 f'(ab/(tb+(1-t)a)) dt.
/// Returns both sides; each is computed independently by quadrature.
struct LemmaSides {
    double lhs;
    double rhs;
};

inline LemmaSides lemma_sides(const FunctionSpec& f, const Interval& iv,
                              const QuadSpec& spec = QuadSpec{1e-14, 1e-13, 60, {}}) {
    iv.validate();
    const double a = iv.a, b = iv.b;
    const double lhs = 0.5 * (f(a) + f(b)) - harmonic_mean_integral(f, a, b, spec);
    QuadSpec split = spec;
    split.split_points = {0.5};
    const double integral = integrate(
        [&](double t) {
            const double d = t * b + (1.0 - t) * a;
            return (1.0 - 2.0 * t) / (d * d) * f.derivative(a * b / d);
        },
        0.0, 1.0, split);
    return {lhs, a * b * (b - a) / 2.0 * integral};
}

inline double lemma_residual(const FunctionSpec& f, const Interval& iv) {
    const auto sides = lemma_sides(f, iv);
    return std::abs(sides.lhs - sides.rhs);
}

/// Lemma instance as a record: lhs is the residual, rhs is 0.
inline VerificationRecord verify_lemma(const FunctionSpec& f, const Interval& iv) {
    VerificationRecord rec;
    rec.theorem = Theorem::Lemma;
    rec.interval = iv;
    rec.function = f;
    const auto sides = lemma_sides(f, iv);
    rec.lhs = std::abs(sides.lhs - sides.rhs);
    rec.rhs = 0.0;
    rec.diagnostics.push_back("identity sides: " + format_number(sides.lhs) + " vs " + format_number(sides.rhs));
    rec.finalize();
    return rec;
}

namespace detail {

inline void validate_bound_params(Theorem theorem, const SMParams& params) {
    params.validate_theorem();
    const bool needs_q_gt_1 = theorem == Theorem::I2 || theorem == Theorem::FS2 || theorem == Theorem::II4;
    if (needs_q_gt_1 && !(params.q > 1.0)) {
        throw ParameterError(std::string(to_string(theorem)) + " requires q > 1");
    }
    const bool harmonic_only = theorem == Theorem::I1 || theorem == Theorem::I2;
    const bool s_only = theorem == Theorem::FS1 || theorem == Theorem::FS2;
    if (harmonic_only && (params.s != 1.0 || params.m != 1.0)) {
        throw ParameterError(std::string(to_string(theorem)) + " requires s = 1 and m = 1");
    }
    if (s_only && params.m != 1.0) throw ParameterError(std::string(to_string(theorem)) + " requires m = 1");
    if (s_only && params.s == 0.0) throw ParameterError(std::string(to_string(theorem)) + " requires s in (0, 1]");
}

inline double holder_factor(const SMParams& params) {
    const double p = *params.p;
    return std::pow(1.0 / (p + 1.0), 1.0 / p);
}

}  // namespace detail

/// Evaluates one derivative bound (I1, I2, FS1, FS2, II2, II3, II4). The
/// contractual right-hand side uses quadrature coefficients; rhs_printed
/// rebuilds it from the printed closed forms.
inline VerificationRecord verify_bound(Theorem theorem, const FunctionSpec& f, const SMParams& params,
                                       const Interval& iv, const VerifyOptions& opts = {}) {
    if (!is_derivative_bound(theorem)) {
        throw ParameterError(std::string("verify_bound: ") + to_string(theorem) + " is not a derivative bound");
    }
    iv.validate();
    detail::validate_bound_params(theorem, params);

    VerificationRecord rec;
    rec.theorem = theorem;
    rec.interval = iv;
    rec.params = params;
    rec.function = f;
    if (params.s == 0.0) rec.diagnostics.push_back("s = 0 lies outside the definitional range (0, 1]");

    const double a = iv.a, b = iv.b, s = params.s, m = params.m, q = params.q;
    const double b_ext = iv.extended(m);
    if (!f.domain().contains(m * a) || !f.domain().contains(b_ext)) {
        throw DomainError("verify_bound: [m a, b/m] = [" + format_number(m * a) + ", " + format_number(b_ext) +
                          "] is not inside the domain of " + f.label());
    }

    std::optional<CheckReport> cert = opts.certification;
    if (!cert && opts.require_certification) cert = certify_derivative_power(f, params, iv, opts.grid);
    detail::require_certified(cert, opts, rec, "|f'|^q harmonically (s,m)-convex on [a, b/m]");

    rec.lhs = detail::trapezoid_gap(f, iv, opts.quad);

    const double fa = std::pow(std::abs(f.derivative(a)), q);
    const double fb = std::pow(std::abs(f.derivative(b)), q);
    const double fbm = std::pow(std::abs(f.derivative(b_ext)), q);
    const double prefactor = a * b * (b - a) / 2.0;
    const double inv_q = 1.0 / q;
    const QuadSpec kq = oracle_quad_spec();
    auto K = [&](KernelWeight w, double ss, double r) { return kernel_K(w, ss, r, a, b, kq); };

    switch (theorem) {
        case Theorem::I1:
        case Theorem::FS1: {
            // Power mean with weight |1-2t| (tb+(1-t)a)^-2.
            const double k0 = K(KernelWeight::W1, 0.0, 1.0);
            const double k1 = K(KernelWeight::W1, s, 1.0);
            const double k2 = K(KernelWeight::W2, s, 1.0);
            rec.rhs = prefactor * std::pow(k0, 1.0 - inv_q) * std::pow(k1 * fa + k2 * fb, inv_q);
            if (opts.with_printed_rhs) {
                double c0, c1, c2;
                if (theorem == Theorem::I1) {
                    c0 = lambda1_printed(iv), c1 = lambda2_printed(iv), c2 = lambda3_printed(iv);
                } else {
                    c0 = C1_printed(iv), c1 = C2_printed(s, iv), c2 = C3_printed(s, iv);
                }
                rec.rhs_printed = prefactor * std::pow(c0, 1.0 - inv_q) * std::pow(c1 * fa + c2 * fb, inv_q);
            }
            break;
        }
        case Theorem::I2:
        case Theorem::FS2: {
            const double n1 = K(KernelWeight::N1, s, q);
            const double n2 = K(KernelWeight::N2, s, q);
            const double holder = detail::holder_factor(params);
            rec.rhs = prefactor * holder * std::pow(n1 * fa + n2 * fb, inv_q);
            if (opts.with_printed_rhs) {
                if (theorem == Theorem::I2) {
                    rec.rhs_printed =
                        prefactor * holder * std::pow(mu1_printed(q, iv) * fa + mu2_printed(q, iv) * fb, inv_q);
                } else {
                    const double z = iv.z();
                    const double bracket = (hyp2f1(2.0 * q, s + 1.0, s + 2.0, z) * fb +
                                            hyp2f1(2.0 * q, 1.0, s + 2.0, z) * fa) /
                                           (s + 1.0);
                    rec.rhs_printed = a * (b - a) / (2.0 * b) * holder * std::pow(bracket, inv_q);
                }
            }
            break;
        }
        case Theorem::II2: {
            const double r1 = K(KernelWeight::W1, s, q);
            const double r2 = K(KernelWeight::W2, s, q);
            const double pre = a * b * (b - a) / std::pow(2.0, 2.0 - inv_q);
            rec.rhs = pre * std::pow(r1 * fa + m * r2 * fbm, inv_q);
            if (opts.with_printed_rhs) {
                rec.rhs_printed =
                    pre * std::pow(rho1_printed(s, q, iv) * fa + m * rho2_printed(s, q, iv) * fbm, inv_q);
            }
            break;
        }
        case Theorem::II3: {
            const double r = opts.literal_ii3 ? q : 1.0;
            const double k0 = K(KernelWeight::W1, 0.0, r);
            const double k1 = K(KernelWeight::W1, s, r);
            const double k2 = K(KernelWeight::W2, s, r);
            rec.rhs = prefactor * std::pow(k0, 1.0 - inv_q) * std::pow(k1 * fa + m * k2 * fbm, inv_q);
            if (opts.literal_ii3) rec.diagnostics.push_back("II3 evaluated with exponent-2q kernels as printed");
            if (opts.with_printed_rhs) {
                // As printed: rho(., q) kernels throughout.
                rec.rhs_printed = prefactor * std::pow(rho1_printed(0.0, q, iv), 1.0 - inv_q) *
                                  std::pow(rho1_printed(s, q, iv) * fa + m * rho2_printed(s, q, iv) * fbm, inv_q);
            }
            break;
        }
        case Theorem::II4: {
            const double n1 = K(KernelWeight::N1, s, q);
            const double n2 = K(KernelWeight::N2, s, q);
            const double holder = detail::holder_factor(params);
            rec.rhs = prefactor * holder * std::pow(n1 * fa + m * n2 * fbm, inv_q);
            if (opts.with_printed_rhs) {
                rec.rhs_printed =
                    prefactor * holder * std::pow(nu1_printed(s, q, iv) * fa + m * nu2_printed(s, q, iv) * fbm, inv_q);
            }
            break;
        }
        default: break;
    }
    if (rec.rhs_printed) rec.diagnostics.push_back("rhs from printed closed forms: " + format_number(*rec.rhs_printed));
    rec.finalize();
    return rec;
}

}  // namespace hhkit
