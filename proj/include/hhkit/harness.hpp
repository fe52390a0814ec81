#pragma once

// Batch sweeps, randomized counterexample search, reduction checks and the
// JSON/CSV reports built from them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "hhkit/bounds.hpp"

namespace hhkit {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr double kPrintedTol = 1e-8;
inline constexpr double kReductionTol = 1e-9;

// ---------------------------------------------------------------- utilities

namespace detail {

/// Round to 15 significant digits so reports never depend on the last bits.
inline double round15(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_number(v).c_str(), nullptr);
}

inline json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round15(v);
}

/// Uniform on [0, 1) from the raw 64-bit stream; the standard distributions
/// are implementation-defined, this is not.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HHKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
    }
    return n;
}

/// Runs body(i) for i in [0, n). Results must be written to slot i so the
/// outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// ------------------------------------------------------------ serialization

inline json function_to_json(const FunctionSpec& f) {
    json j = std::visit(
        [](const auto& fam) -> json {
            using T = std::decay_t<decltype(fam)>;
            using detail::num;
            if constexpr (std::is_same_v<T, Power>) {
                return {{"family", "pow"}, {"coeff", num(fam.coeff)}, {"exp", num(fam.exponent)}, {"shift", num(fam.shift)}};
            } else if constexpr (std::is_same_v<T, SPiece>) {
                return {{"family", "spiece"}, {"a0", num(fam.a0)}, {"b0", num(fam.b0)}, {"c0", num(fam.c0)}, {"s", num(fam.s)}};
            } else if constexpr (std::is_same_v<T, Reciprocal>) {
                return {{"family", "recip"}};
            } else if constexpr (std::is_same_v<T, Affine>) {
                return {{"family", "affine"}, {"slope", num(fam.slope)}, {"intercept", num(fam.intercept)}};
            } else {
                return {{"family", "exp"}, {"scale", num(fam.scale)}};
            }
        },
        f.family);
    j["domain"] = {detail::num(f.domain_lo), detail::num(f.domain_hi)};
    return j;
}

namespace detail {

inline double field(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ParameterError(std::string("function field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace detail

inline FunctionSpec function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
        throw ParameterError("function entry needs a string 'family' field");
    }
    const std::string name = j.at("family").get<std::string>();
    FunctionSpec f;
    using detail::field;
    if (name == "pow") {
        f.family = Power{field(j, "coeff", 1.0), field(j, "exp", 1.0), field(j, "shift", 0.0)};
    } else if (name == "spiece") {
        f.family = SPiece{field(j, "a0", 1.0), field(j, "b0", 1.0), field(j, "c0", 0.0), field(j, "s", 0.5)};
    } else if (name == "recip") {
        f.family = Reciprocal{};
    } else if (name == "affine") {
        f.family = Affine{field(j, "slope", 1.0), field(j, "intercept", 0.0)};
    } else if (name == "exp") {
        f.family = Exp{field(j, "scale", 1.0)};
    } else {
        throw ParameterError("unknown function family '" + name + "' (pow, spiece, recip, affine, exp)");
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number()) {
            throw ParameterError("function 'domain' must be [lo, hi]");
        }
        f.domain_lo = d[0].get<double>();
        f.domain_hi = d[1].get<double>();
    }
    f.validate();
    return f;
}

inline json record_to_json(const VerificationRecord& r) {
    using detail::num;
    json j{{"theorem", to_string(r.theorem)},
           {"a", num(r.interval.a)},
           {"b", num(r.interval.b)},
           {"s", num(r.params.s)},
           {"m", num(r.params.m)},
           {"q", num(r.params.q)},
           {"lhs", num(r.lhs)},
           {"rhs", num(r.rhs)},
           {"margin", num(r.margin)},
           {"satisfied", r.satisfied},
           {"diagnostics", r.diagnostics}};
    if (r.function) {
        j["family"] = r.function->label();
        j["function"] = function_to_json(*r.function);
    }
    if (r.rhs_printed) j["rhs_printed"] = num(*r.rhs_printed);
    return j;
}

inline json coefficients_to_json(const CoefficientSet& c) {
    using detail::num;
    json entries = json::array();
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        entries.push_back({{"label", c.labels[i]},
                           {"kernel", c.kernels[i]},
                           {"printed", num(c.values[i])},
                           {"oracle", num(c.oracle_values[i])},
                           {"deviation", num(std::abs(c.values[i] - c.oracle_values[i]))}});
    }
    return {{"set", to_string(c.name)}, {"a", num(c.interval.a)}, {"b", num(c.interval.b)}, {"s", num(c.s)},
            {"q", num(c.q)},           {"entries", entries},        {"max_abs_dev", num(c.max_abs_dev)}};
}

// ---------------------------------------------------------------- findings

enum class FindingKind { BoundViolation, ClosedFormDeviation, ReductionMismatch, EvaluationError };

inline const char* to_string(FindingKind k) {
    switch (k) {
        case FindingKind::BoundViolation: return "BoundViolation";
        case FindingKind::ClosedFormDeviation: return "ClosedFormDeviation";
        case FindingKind::ReductionMismatch: return "ReductionMismatch";
        case FindingKind::EvaluationError: return "EvaluationError";
    }
    return "?";
}

/// One reportable discrepancy. severity is |negative margin| for bound
/// findings and |deviation| for closed-form and reduction findings.
struct Finding {
    FindingKind kind = FindingKind::BoundViolation;
    std::string level = "oracle";  // "oracle" or "printed"
    double severity = 0.0;
    std::string label;
    std::string message;
    std::optional<std::size_t> instance;
    std::optional<VerificationRecord> record;
    std::optional<VerificationRecord> shrunk;
    std::optional<CoefficientSet> coefficients;
};

inline json finding_to_json(const Finding& f) {
    json j{{"kind", to_string(f.kind)},
           {"level", f.level},
           {"severity", detail::num(f.severity)},
           {"label", f.label},
           {"message", f.message}};
    if (f.instance) j["instance"] = *f.instance;
    if (f.record) j["record"] = record_to_json(*f.record);
    if (f.shrunk) j["shrunk"] = record_to_json(*f.shrunk);
    if (f.coefficients) j["coefficients"] = coefficients_to_json(*f.coefficients);
    return j;
}

// ---------------------------------------------------------- single instance

inline bool uses_q(Theorem t) { return is_derivative_bound(t); }
inline bool uses_sm(Theorem t) { return t == Theorem::II1 || is_derivative_bound(t); }

/// Whether (s, m, q) is inside the theorem's hypotheses.
inline bool applicable(Theorem t, const SMParams& p) {
    if (!uses_sm(t)) return true;
    if (!(p.s >= 0.0 && p.s <= 1.0 && p.m > 0.0 && p.m <= 1.0 && p.q >= 1.0)) return false;
    switch (t) {
        case Theorem::I1: return p.s == 1.0 && p.m == 1.0;
        case Theorem::I2: return p.s == 1.0 && p.m == 1.0 && p.q > 1.0;
        case Theorem::FS1: return p.m == 1.0 && p.s > 0.0;
        case Theorem::FS2: return p.m == 1.0 && p.s > 0.0 && p.q > 1.0;
        case Theorem::II4: return p.q > 1.0;
        default: return true;
    }
}

/// Grid certificate for the hypothesis of theorem t. For II1 f itself is
/// checked, for the derivative bounds |f'|^q.
inline CheckReport certify_for(Theorem t, const FunctionSpec& f, const SMParams& p, const Interval& iv, int grid) {
    if (t == Theorem::II1) return certify_function(f, p, iv, grid);
    if (is_derivative_bound(t)) return certify_derivative_power(f, p, iv, grid);
    const FunctionSpec local = detail::restricted(f, iv.a, iv.b);
    if (t == Theorem::HH) return check_convex(local, grid);
    if (t == Theorem::HarmHH) return check_harmonic_convex(local, grid);
    CheckReport trivially;
    trivially.passed = true;
    return trivially;
}

/// Evaluates one instance of any theorem. A certificate, when given, is used
/// in place of a fresh grid check.
inline VerificationRecord verify_instance(Theorem t, const FunctionSpec& f, const SMParams& p, const Interval& iv,
                                          VerifyOptions opts) {
    switch (t) {
        case Theorem::HH: return verify_hh_double(f, iv, HHKind::Classical, opts);
        case Theorem::HarmHH: return verify_hh_double(f, iv, HHKind::Harmonic, opts);
        case Theorem::Lemma: {
            auto rec = verify_lemma(f, iv);
            rec.params = p;
            return rec;
        }
        case Theorem::II1: return verify_II1(f, p, iv, opts);
        default: return verify_bound(t, f, p, iv, opts);
    }
}

// ------------------------------------------------------------------- sweep

struct SweepConfig {
    std::vector<Theorem> theorems;
    std::vector<double> a_values;
    std::vector<double> ratios;
    std::vector<double> s_values{1.0};
    std::vector<double> m_values{1.0};
    std::vector<double> q_values{1.0};
    std::vector<FunctionSpec> families;
    int grid = kDefaultGrid;
    std::uint64_t seed = 0;
    /// Extra intervals drawn from the seed, inside the hull of the grid.
    int random_intervals = 0;
    /// Report prefix: <output>.json and <output>.csv.
    std::string output;

    void validate() const {
        auto nonempty = [](const auto& v, const char* name) {
            if (v.empty()) throw ParameterError(std::string("sweep config: '") + name + "' must be non-empty");
        };
        if (theorems.empty()) return;
        nonempty(a_values, "a_values");
        nonempty(ratios, "ratios");
        nonempty(s_values, "s");
        nonempty(m_values, "m");
        nonempty(q_values, "q");
        nonempty(families, "families");
        for (double a : a_values)
            if (!(a > 0.0 && std::isfinite(a))) throw ParameterError("sweep config: a_values must be > 0");
        for (double r : ratios)
            if (!(r > 1.0 && std::isfinite(r))) throw ParameterError("sweep config: ratios must be > 1");
        for (double s : s_values)
            if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("sweep config: s must lie in [0, 1]");
        for (double m : m_values)
            if (!(m > 0.0 && m <= 1.0)) throw ParameterError("sweep config: m must lie in (0, 1]");
        for (double q : q_values)
            if (!(q >= 1.0 && std::isfinite(q))) throw ParameterError("sweep config: q must be >= 1");
        if (grid < 2 || grid % 2 != 0) throw ParameterError("sweep config: grid must be even and >= 2");
        if (random_intervals < 0) throw ParameterError("sweep config: random_intervals must be >= 0");
        for (const auto& f : families) f.validate();
    }

    static SweepConfig from_json(const json& j) {
        if (!j.is_object()) throw ParameterError("sweep config must be a JSON object");
        SweepConfig cfg;
        auto reals = [&](const char* key, std::vector<double>& out) {
            if (!j.contains(key)) return;
            const auto& v = j.at(key);
            if (!v.is_array()) throw ParameterError(std::string("sweep config: '") + key + "' must be an array");
            out.clear();
            for (const auto& x : v) {
                if (!x.is_number()) throw ParameterError(std::string("sweep config: '") + key + "' holds a non-number");
                out.push_back(x.get<double>());
            }
        };
        if (j.contains("theorems")) {
            if (!j.at("theorems").is_array()) throw ParameterError("sweep config: 'theorems' must be an array");
            for (const auto& t : j.at("theorems")) {
                const auto th = t.is_string() ? theorem_from_string(t.get<std::string>()) : std::nullopt;
                if (!th) throw ParameterError("sweep config: unknown theorem " + t.dump());
                cfg.theorems.push_back(*th);
            }
        }
        reals("a_values", cfg.a_values);
        reals("ratios", cfg.ratios);
        reals("s", cfg.s_values);
        reals("m", cfg.m_values);
        reals("q", cfg.q_values);
        if (j.contains("families")) {
            if (!j.at("families").is_array()) throw ParameterError("sweep config: 'families' must be an array");
            for (const auto& f : j.at("families")) cfg.families.push_back(function_from_json(f));
        }
        auto integer = [&](const char* key, auto& out) {
            if (!j.contains(key)) return;
            if (!j.at(key).is_number_integer()) {
                throw ParameterError(std::string("sweep config: '") + key + "' must be an integer");
            }
            out = j.at(key).get<std::decay_t<decltype(out)>>();
        };
        integer("grid", cfg.grid);
        integer("seed", cfg.seed);
        integer("random_intervals", cfg.random_intervals);
        if (j.contains("output")) {
            if (!j.at("output").is_string()) throw ParameterError("sweep config: 'output' must be a string");
            cfg.output = j.at("output").get<std::string>();
        }
        cfg.validate();
        return cfg;
    }

    json to_json() const {
        json th = json::array();
        for (auto t : theorems) th.push_back(to_string(t));
        json fam = json::array();
        for (const auto& f : families) fam.push_back(function_to_json(f));
        auto reals = [](const std::vector<double>& v) {
            json out = json::array();
            for (double x : v) out.push_back(detail::num(x));
            return out;
        };
        return {{"theorems", th},     {"a_values", reals(a_values)}, {"ratios", reals(ratios)},
                {"s", reals(s_values)}, {"m", reals(m_values)},        {"q", reals(q_values)},
                {"families", fam},    {"grid", grid},                {"seed", seed},
                {"random_intervals", random_intervals}};
    }

    /// Grid intervals first, in (a, ratio) order, then the seeded draws.
    std::vector<Interval> intervals() const {
        std::vector<Interval> out;
        for (double a : a_values)
            for (double r : ratios) out.push_back(Interval{a, a * r});
        if (random_intervals > 0) {
            std::mt19937_64 rng(seed);
            const auto [alo, ahi] = std::minmax_element(a_values.begin(), a_values.end());
            const auto [rlo, rhi] = std::minmax_element(ratios.begin(), ratios.end());
            for (int i = 0; i < random_intervals; ++i) {
                const double a = detail::round15(*alo == *ahi ? *alo : detail::log_uniform(rng, *alo, *ahi));
                const double r = *rlo == *rhi ? *rlo : detail::log_uniform(rng, *rlo, *rhi);
                out.push_back(Interval{a, detail::round15(a * r)});
            }
        }
        return out;
    }
};

struct SweepInstance {
    Theorem theorem;
    std::size_t family;
    Interval interval;
    SMParams params;
};

/// Deterministic enumeration: theorem, family, interval, s, m, q. Parameter
/// tuples outside a theorem's hypotheses are not instances.
inline std::vector<SweepInstance> enumerate_instances(const SweepConfig& cfg) {
    std::vector<SweepInstance> out;
    const auto ivs = cfg.intervals();
    for (Theorem t : cfg.theorems) {
        for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
            for (const auto& iv : ivs) {
                if (!uses_sm(t)) {
                    out.push_back({t, fi, iv, SMParams::make(1.0, 1.0)});
                    continue;
                }
                for (double s : cfg.s_values) {
                    for (double m : cfg.m_values) {
                        if (!uses_q(t)) {
                            out.push_back({t, fi, iv, SMParams::make(s, m)});
                            continue;
                        }
                        for (double q : cfg.q_values) {
                            const auto p = SMParams::make(s, m, q);
                            if (applicable(t, p)) out.push_back({t, fi, iv, p});
                        }
                    }
                }
            }
        }
    }
    return out;
}

struct SkippedInstance {
    std::size_t index;
    SweepInstance instance;
    double worst_margin;
};

struct SweepResult {
    SweepConfig config;
    std::size_t instances = 0;
    std::vector<VerificationRecord> records;
    std::vector<std::size_t> record_index;
    std::vector<SkippedInstance> skipped;
    std::vector<Finding> findings;

    std::size_t count(FindingKind k) const {
        return static_cast<std::size_t>(
            std::count_if(findings.begin(), findings.end(), [k](const Finding& f) { return f.kind == k; }));
    }
};

namespace detail {

/// Cache key: (hypothesis kind, family, s, m, q). q is pinned to 1 when the
/// hypothesis does not involve it.
using CertKey = std::tuple<int, std::size_t, double, double, double>;

inline std::optional<CertKey> cert_key(const SweepInstance& in) {
    if (in.theorem == Theorem::II1) return CertKey{0, in.family, in.params.s, in.params.m, 1.0};
    if (is_derivative_bound(in.theorem)) return CertKey{1, in.family, in.params.s, in.params.m, in.params.q};
    return std::nullopt;
}

struct CertEntry {
    std::optional<CheckReport> report;
    std::string error;
};

}  // namespace detail

/// Evaluates every instance of cfg. II1 and derivative-bound hypotheses are
/// certified once per (family, s, m, q) on the hull window [min a, max b / m];
/// instances whose certificate fails are listed as skipped. Per-instance
/// exceptions become EvaluationError findings.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult res;
    res.config = cfg;
    const auto instances = enumerate_instances(cfg);
    res.instances = instances.size();
    if (instances.empty()) return res;

    const auto ivs = cfg.intervals();
    double a_min = ivs.front().a, b_max = ivs.front().b;
    for (const auto& iv : ivs) a_min = std::min(a_min, iv.a), b_max = std::max(b_max, iv.b);
    const Interval hull{a_min, b_max};

    std::map<detail::CertKey, detail::CertEntry> certs;
    for (const auto& in : instances)
        if (auto k = detail::cert_key(in)) certs.emplace(*k, detail::CertEntry{});
    std::vector<detail::CertKey> keys;
    for (const auto& [k, v] : certs) keys.push_back(k);
    std::vector<detail::CertEntry> computed(keys.size());
    detail::parallel_for(keys.size(), [&](std::size_t i) {
        const auto& [kind, fi, s, m, q] = keys[i];
        const auto p = SMParams::make(s, m, q);
        try {
            computed[i].report = kind == 0 ? certify_function(cfg.families[fi], p, hull, cfg.grid)
                                           : certify_derivative_power(cfg.families[fi], p, hull, cfg.grid);
        } catch (const std::exception& e) {
            computed[i].error = e.what();
        }
    });
    for (std::size_t i = 0; i < keys.size(); ++i) certs[keys[i]] = computed[i];

    enum class Outcome { Record, Skipped, Error };
    struct Slot {
        Outcome outcome = Outcome::Error;
        VerificationRecord record;
        double worst = 0.0;
        std::string error;
    };
    std::vector<Slot> slots(instances.size());
    detail::parallel_for(instances.size(), [&](std::size_t i) {
        const auto& in = instances[i];
        Slot& slot = slots[i];
        VerifyOptions opts;
        opts.grid = cfg.grid;
        try {
            if (auto k = detail::cert_key(in)) {
                const auto& entry = certs.at(*k);
                if (!entry.report) throw std::runtime_error(entry.error);
                if (!entry.report->passed) {
                    slot.outcome = Outcome::Skipped;
                    slot.worst = entry.report->worst_margin;
                    return;
                }
                opts.certification = entry.report;
            }
            slot.record = verify_instance(in.theorem, cfg.families[in.family], in.params, in.interval, opts);
            slot.outcome = Outcome::Record;
        } catch (const CertificationError& e) {
            // HH kinds certify per interval inside the verifier.
            slot.outcome = Outcome::Skipped;
            slot.worst = -1.0;
            slot.error = e.what();
        } catch (const std::exception& e) {
            slot.outcome = Outcome::Error;
            slot.error = e.what();
        }
    });

    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& in = instances[i];
        Slot& slot = slots[i];
        switch (slot.outcome) {
            case Outcome::Skipped: res.skipped.push_back({i, in, slot.worst}); break;
            case Outcome::Error: {
                Finding f;
                f.kind = FindingKind::EvaluationError;
                f.instance = i;
                f.label = to_string(in.theorem);
                f.message = cfg.families[in.family].label() + " on [" + format_number(in.interval.a) + ", " +
                            format_number(in.interval.b) + "] s=" + format_number(in.params.s) +
                            " m=" + format_number(in.params.m) + " q=" + format_number(in.params.q) + ": " +
                            slot.error;
                res.findings.push_back(std::move(f));
                break;
            }
            case Outcome::Record: {
                const auto& rec = slot.record;
                if (!rec.satisfied) {
                    Finding f;
                    f.kind = FindingKind::BoundViolation;
                    f.severity = -rec.margin;
                    f.instance = i;
                    f.label = to_string(rec.theorem);
                    f.message = "certified instance violates the bound";
                    f.record = rec;
                    res.findings.push_back(std::move(f));
                }
                if (rec.rhs_printed && *rec.rhs_printed - rec.lhs < -kAcceptTol) {
                    Finding f;
                    f.kind = FindingKind::ClosedFormDeviation;
                    f.level = "printed";
                    f.severity = rec.lhs - *rec.rhs_printed;
                    f.instance = i;
                    f.label = to_string(rec.theorem);
                    f.message = "right-hand side built from printed closed forms falls below the left-hand side";
                    f.record = rec;
                    res.findings.push_back(std::move(f));
                }
                res.records.push_back(std::move(slot.record));
                res.record_index.push_back(i);
                break;
            }
        }
    }
    return res;
}

inline json sweep_report_json(const SweepResult& res) {
    json per = json::object();
    std::map<std::string, std::tuple<std::size_t, double, double>> stats;
    for (const auto& r : res.records) {
        auto& [n, worst, sum] = stats.try_emplace(to_string(r.theorem), 0, r.margin, 0.0).first->second;
        ++n;
        worst = std::min(worst, r.margin);
        sum += r.margin;
    }
    for (const auto& [name, st] : stats) {
        const auto& [n, worst, sum] = st;
        per[name] = {{"evaluated", n}, {"worst_margin", detail::num(worst)}, {"mean_margin", detail::num(sum / n)}};
    }
    json records = json::array();
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        json r = record_to_json(res.records[i]);
        r["instance"] = res.record_index[i];
        records.push_back(std::move(r));
    }
    json skipped = json::array();
    for (const auto& s : res.skipped) {
        skipped.push_back({{"instance", s.index},
                           {"theorem", to_string(s.instance.theorem)},
                           {"family", res.config.families[s.instance.family].label()},
                           {"a", detail::num(s.instance.interval.a)},
                           {"b", detail::num(s.instance.interval.b)},
                           {"s", detail::num(s.instance.params.s)},
                           {"m", detail::num(s.instance.params.m)},
                           {"q", detail::num(s.instance.params.q)},
                           {"certificate_margin", detail::num(s.worst_margin)}});
    }
    json findings = json::array();
    for (const auto& f : res.findings) findings.push_back(finding_to_json(f));
    return {{"schema_version", kSchemaVersion},
            {"config", res.config.to_json()},
            {"summary",
             {{"instances", res.instances},
              {"evaluated", res.records.size()},
              {"skipped_uncertified", res.skipped.size()},
              {"bound_violations", res.count(FindingKind::BoundViolation)},
              {"printed_deviations", res.count(FindingKind::ClosedFormDeviation)},
              {"errors", res.count(FindingKind::EvaluationError)},
              {"per_theorem", per}}},
            {"records", records},
            {"skipped", skipped},
            {"findings", findings}};
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string sweep_report_csv(const SweepResult& res) {
    std::ostringstream os;
    os << "theorem,a,b,s,m,q,family,lhs,rhs,margin,satisfied\n";
    for (const auto& r : res.records) {
        os << to_string(r.theorem) << ',' << format_number(r.interval.a) << ',' << format_number(r.interval.b) << ','
           << format_number(r.params.s) << ',' << format_number(r.params.m) << ',' << format_number(r.params.q) << ','
           << csv_field(r.function ? r.function->label() : "") << ',' << format_number(r.lhs) << ','
           << format_number(r.rhs) << ',' << format_number(r.margin) << ',' << (r.satisfied ? "true" : "false")
           << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

/// Writes <prefix>.json and <prefix>.csv.
inline void write_sweep_reports(const SweepResult& res, const std::string& prefix) {
    write_text_file(prefix + ".json", sweep_report_json(res).dump(2) + "\n");
    write_text_file(prefix + ".csv", sweep_report_csv(res));
}

// ------------------------------------------------------- counterexample search

struct SearchOptions {
    /// Grid for the per-draw certificate; violations are re-certified at
    /// kDefaultGrid before they are reported.
    int grid = 16;
    /// Test mode: draw only sqrt(x), which is concave and whose |f'|^q fails
    /// the hypothesis, and skip certification.
    bool inject_uncertified = false;
};

struct SearchOutcome {
    std::optional<Finding> finding;
    std::size_t drawn = 0;
    std::size_t evaluated = 0;
    std::size_t errors = 0;
    double worst_margin = 0.0;
};

namespace detail {

struct Draw {
    FunctionSpec f;
    SMParams params;
    Interval iv;
};

inline FunctionSpec draw_function(std::mt19937_64& rng, double s) {
    FunctionSpec f;
    switch (rng() % 6) {
        case 0: f.family = Power{round15(uniform(rng, 0.5, 3.0)), round15(uniform(rng, 1.0, 4.0)), 0.0}; break;
        case 1: f.family = Power{1.0, round15(uniform(rng, 1.0, 3.0)), round15(uniform(rng, -1.0, 1.0))}; break;
        case 2: f.family = SPiece{1.0, round15(uniform(rng, 0.5, 2.0)), round15(uniform(rng, 0.0, 1.0)), s > 0.0 ? s : 1.0}; break;
        case 3: f.family = Reciprocal{}; break;
        case 4: f.family = Affine{round15(uniform(rng, 0.1, 3.0)), round15(uniform(rng, 0.0, 2.0))}; break;
        default: f.family = Exp{round15(uniform(rng, 0.1, 2.0))}; break;
    }
    return f;
}

inline Draw draw_instance(Theorem t, std::mt19937_64& rng, bool inject) {
    double s = round15(uniform(rng, 0.0, 1.0));
    if (s == 0.0) s = 1.0;
    double m = round15(uniform(rng, 0.3, 1.0));
    double q = round15(uniform(rng, 1.0, 4.0));
    switch (t) {
        case Theorem::I1: s = 1.0, m = 1.0; break;
        case Theorem::I2: s = 1.0, m = 1.0, q = std::max(q, 1.05); break;
        case Theorem::FS1: m = 1.0; break;
        case Theorem::FS2: m = 1.0, q = std::max(q, 1.05); break;
        case Theorem::II4: q = std::max(q, 1.05); break;
        default: break;
    }
    const double a = round15(log_uniform(rng, 0.2, 5.0));
    const double b = round15(a * log_uniform(rng, 1.1, 10.0));
    FunctionSpec f = inject ? FunctionSpec{Power{1.0, 0.5, 0.0}} : draw_function(rng, s);
    return Draw{f, SMParams::make(s, m, uses_q(t) ? q : 1.0), Interval{a, b}};
}

/// Margin of an uncertified re-evaluation, +inf when the instance is invalid.
inline double probe_margin(Theorem t, const FunctionSpec& f, const SMParams& p, const Interval& iv) {
    VerifyOptions opts;
    opts.require_certification = false;
    opts.with_printed_rhs = false;
    try {
        return verify_instance(t, f, p, iv, opts).margin;
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

/// Moves one parameter from the violating value toward the end of its range
/// where the bound holds, 20 bisection steps, keeping the violating side.
inline Draw shrink(Theorem t, Draw d) {
    auto violates = [&](const Draw& x) { return probe_margin(t, x.f, x.params, x.iv) < -kAcceptTol; };
    auto with = [&](const Draw& base, int axis, double v) {
        Draw x = base;
        if (axis == 0) x.params = SMParams::make(v, x.params.m, x.params.q);
        if (axis == 1) x.params = SMParams::make(x.params.s, v, x.params.q);
        if (axis == 2) x.params = SMParams::make(x.params.s, x.params.m, v);
        if (axis == 3) x.iv = Interval{x.iv.a, x.iv.a * v};
        return x;
    };
    const double ranges[4][2] = {{0.0, 1.0}, {0.05, 1.0}, {1.0, 4.0}, {1.01, 10.0}};
    for (int axis = 0; axis < 4; ++axis) {
        if (axis == 2 && !uses_q(t)) continue;
        double cur = axis == 0 ? d.params.s : axis == 1 ? d.params.m : axis == 2 ? d.params.q : d.iv.b / d.iv.a;
        std::optional<double> holds;
        for (double end : ranges[axis]) {
            const Draw x = with(d, axis, end);
            if (!applicable(t, x.params)) continue;
            if (probe_margin(t, x.f, x.params, x.iv) >= -kAcceptTol) {
                holds = end;
                break;
            }
        }
        if (!holds) continue;
        double bad = cur, good = *holds;
        for (int step = 0; step < 20; ++step) {
            const double mid = 0.5 * (bad + good);
            const Draw x = with(d, axis, mid);
            if (applicable(t, x.params) && violates(x)) bad = mid;
            else good = mid;
        }
        d = with(d, axis, bad);
    }
    return d;
}

}  // namespace detail

/// Draws budget random certified instances of theorem t and returns the
/// worst-margin one when it violates the bound.
inline SearchOutcome search_counterexample(Theorem t, int budget, std::uint64_t seed, const SearchOptions& opts = {}) {
    if (budget < 1) throw ParameterError("search: budget must be >= 1");
    if (opts.grid < 2 || opts.grid % 2 != 0) throw ParameterError("search: grid must be even and >= 2");
    std::mt19937_64 rng(seed);
    std::vector<detail::Draw> draws;
    draws.reserve(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) draws.push_back(detail::draw_instance(t, rng, opts.inject_uncertified));

    enum class State { Uncertified, Evaluated, Error };
    struct Slot {
        State state = State::Error;
        VerificationRecord rec;
    };
    std::vector<Slot> slots(draws.size());
    detail::parallel_for(draws.size(), [&](std::size_t i) {
        const auto& d = draws[i];
        try {
            VerifyOptions vo;
            vo.with_printed_rhs = false;
            vo.grid = opts.grid;
            if (opts.inject_uncertified) {
                vo.require_certification = false;
            } else {
                const auto cert = certify_for(t, d.f, d.params, d.iv, opts.grid);
                if (!cert.passed) {
                    slots[i].state = State::Uncertified;
                    return;
                }
                vo.certification = cert;
            }
            slots[i].rec = verify_instance(t, d.f, d.params, d.iv, vo);
            slots[i].state = State::Evaluated;
        } catch (const CertificationError&) {
            slots[i].state = State::Uncertified;
        } catch (const std::exception&) {
            slots[i].state = State::Error;
        }
    });

    SearchOutcome out;
    out.drawn = draws.size();
    std::optional<std::size_t> worst;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].state == State::Error) ++out.errors;
        if (slots[i].state != State::Evaluated) continue;
        ++out.evaluated;
        if (!slots[i].rec.satisfied && !opts.inject_uncertified) {
            // Coarse certificates can admit near misses; confirm at full density.
            const auto& d = draws[i];
            if (!certify_for(t, d.f, d.params, d.iv, kDefaultGrid).passed) {
                --out.evaluated;
                continue;
            }
        }
        if (!worst || slots[i].rec.margin < slots[*worst].rec.margin) worst = i;
    }
    if (!worst) return out;
    out.worst_margin = slots[*worst].rec.margin;
    if (slots[*worst].rec.satisfied) return out;

    Finding f;
    f.kind = FindingKind::BoundViolation;
    f.severity = -slots[*worst].rec.margin;
    f.instance = *worst;
    f.label = to_string(t);
    f.message = opts.inject_uncertified ? "violation on an injected uncertified function"
                                        : "certified instance violates the bound";
    f.record = slots[*worst].rec;
    const auto small = detail::shrink(t, draws[*worst]);
    VerifyOptions vo;
    vo.require_certification = false;
    vo.with_printed_rhs = false;
    try {
        f.shrunk = verify_instance(t, small.f, small.params, small.iv, vo);
    } catch (const std::exception&) {
    }
    out.finding = std::move(f);
    return out;
}

// ------------------------------------------------------------- reductions

/// One identity between two independently computed quantities.
struct ReductionCheck {
    std::string name;
    std::string level;  // "oracle" or "printed"
    Interval interval;
    double s = 1.0;
    double q = 1.0;
    double left = 0.0;
    double right = 0.0;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct ReductionReport {
    std::vector<ReductionCheck> checks;
    std::vector<Finding> findings;

    std::size_t oracle_failures() const {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const ReductionCheck& c) {
            return c.level == "oracle" && !c.passed;
        }));
    }
};

namespace detail {

inline void add_check(ReductionReport& rep, std::string name, const std::string& level, const Interval& iv, double s,
                      double q, double left, double right, double tol) {
    ReductionCheck c{std::move(name), level, iv, s, q, left, right, std::abs(left - right), tol, false};
    c.passed = c.deviation <= tol;
    rep.checks.push_back(c);
}

inline void printed_findings(ReductionReport& rep, const CoefficientSet& set) {
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
        const double dev = std::abs(set.values[i] - set.oracle_values[i]);
        if (dev <= kPrintedTol) continue;
        Finding f;
        f.kind = FindingKind::ReductionMismatch;
        f.level = "printed";
        f.severity = dev;
        f.label = set.labels[i];
        f.message = "printed " + set.labels[i] + "=" + format_number(set.values[i]) + " vs integral " +
                    format_number(set.oracle_values[i]) + " (" + set.kernels[i] + ")";
        f.coefficients = set;
        rep.findings.push_back(std::move(f));
    }
}

}  // namespace detail

/// Oracle-level reduction chain plus printed-form deviations on one interval.
/// Oracle identities that fail become oracle-level ReductionMismatch
/// findings; printed deviations above 1e-8 become printed-level ones.
inline ReductionReport check_reductions(const Interval& iv, const std::vector<double>& s_grid,
                                        const std::vector<double>& q_grid) {
    iv.validate();
    for (double s : s_grid)
        if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("reductions: s must lie in [0, 1]");
    for (double q : q_grid)
        if (!(q >= 1.0)) throw ParameterError("reductions: q must be >= 1");

    ReductionReport rep;
    const QuadSpec ks = oracle_quad_spec();
    auto K = [&](KernelWeight w, double s, double r) { return kernel_K(w, s, r, iv.a, iv.b, ks); };
    const double tol = kReductionTol;

    const auto lam = coeff_lambda(iv);
    detail::printed_findings(rep, lam);
    detail::add_check(rep, "K1(1,1) = lambda2", "oracle", iv, 1, 1, K(KernelWeight::W1, 1, 1), lam.oracle("lambda2"), tol);
    detail::add_check(rep, "K2(1,1) = lambda3", "oracle", iv, 1, 1, K(KernelWeight::W2, 1, 1), lam.oracle("lambda3"), tol);
    detail::add_check(rep, "K1(0,1) = lambda1", "oracle", iv, 0, 1, K(KernelWeight::W1, 0, 1), lam.oracle("lambda1"), tol);
    detail::add_check(rep, "lambda2 + lambda3 = lambda1", "oracle", iv, 1, 1,
                      lam.oracle("lambda2") + lam.oracle("lambda3"), lam.oracle("lambda1"), tol);

    for (double s : s_grid) {
        if (s > 0.0) {
            const auto c = coeff_C(s, iv);
            detail::printed_findings(rep, c);
            detail::add_check(rep, "K1(s,1) = C2", "oracle", iv, s, 1, K(KernelWeight::W1, s, 1), c.oracle("C2"), tol);
            detail::add_check(rep, "K2(s,1) = C3", "oracle", iv, s, 1, K(KernelWeight::W2, s, 1), c.oracle("C3"), tol);
            detail::add_check(rep, "C1 = lambda1", "oracle", iv, s, 1, c.oracle("C1"), lam.oracle("lambda1"), tol);
            if (s == 1.0) {
                detail::add_check(rep, "C2(1) = lambda2", "oracle", iv, s, 1, c.oracle("C2"), lam.oracle("lambda2"), tol);
                detail::add_check(rep, "C3(1) = lambda3", "oracle", iv, s, 1, c.oracle("C3"), lam.oracle("lambda3"), tol);
            }
        }
        for (double q : q_grid) {
            const auto rho = coeff_rho(s, q, iv);
            detail::printed_findings(rep, rho);
            detail::add_check(rep, "K1(s,q) = rho1", "oracle", iv, s, q, K(KernelWeight::W1, s, q), rho.oracle("rho1"), tol);
            detail::add_check(rep, "K2(s,q) = rho2", "oracle", iv, s, q, K(KernelWeight::W2, s, q), rho.oracle("rho2"), tol);
            if (s == 0.0) detail::add_check(rep, "rho1(0) = rho2(0)", "oracle", iv, s, q, rho.oracle("rho1"), rho.oracle("rho2"), tol);
            if (q == 1.0 && s > 0.0) {
                const auto c = coeff_C(s, iv);
                detail::add_check(rep, "rho1(s,1) = C2", "oracle", iv, s, q, rho.oracle("rho1"), c.oracle("C2"), tol);
                detail::add_check(rep, "rho2(s,1) = C3", "oracle", iv, s, q, rho.oracle("rho2"), c.oracle("C3"), tol);
            }
            if (q > 1.0) {
                const auto nu = coeff_nu(s, q, iv);
                detail::printed_findings(rep, nu);
                detail::add_check(rep, "N1(s,q) = nu1", "oracle", iv, s, q, K(KernelWeight::N1, s, q), nu.oracle("nu1"), tol);
                detail::add_check(rep, "N2(s,q) = nu2", "oracle", iv, s, q, K(KernelWeight::N2, s, q), nu.oracle("nu2"), tol);
                if (s == 1.0) {
                    const auto mu = coeff_mu(q, iv);
                    detail::add_check(rep, "nu1(1,q) = mu1", "oracle", iv, s, q, nu.oracle("nu1"), mu.oracle("mu1"), tol);
                    detail::add_check(rep, "nu2(1,q) = mu2", "oracle", iv, s, q, nu.oracle("nu2"), mu.oracle("mu2"), tol);
                }
            }
        }
    }
    for (double q : q_grid) {
        if (!(q > 1.0)) continue;
        const auto mu = coeff_mu(q, iv);
        detail::printed_findings(rep, mu);
        detail::add_check(rep, "N1(1,q) = mu1", "oracle", iv, 1, q, K(KernelWeight::N1, 1, q), mu.oracle("mu1"), tol);
        detail::add_check(rep, "N2(1,q) = mu2", "oracle", iv, 1, q, K(KernelWeight::N2, 1, q), mu.oracle("mu2"), tol);
        // The hypergeometric forms carry each other's subscripts.
        detail::add_check(rep, "mu1_hyp = mu2 integral", "printed", iv, 1, q, mu.printed("mu1_hyp"), mu.oracle("mu2"),
                          kPrintedTol);
        detail::add_check(rep, "mu2_hyp = mu1 integral", "printed", iv, 1, q, mu.printed("mu2_hyp"), mu.oracle("mu1"),
                          kPrintedTol);
    }

    for (const auto& c : rep.checks) {
        if (c.passed || c.level != "oracle") continue;
        Finding f;
        f.kind = FindingKind::ReductionMismatch;
        f.severity = c.deviation;
        f.label = c.name;
        f.message = format_number(c.left) + " vs " + format_number(c.right) + " at s=" + format_number(c.s) +
                    " q=" + format_number(c.q);
        rep.findings.push_back(std::move(f));
    }
    return rep;
}

// ------------------------------------------------------------ adjudication

/// Per-label summary of printed-vs-integral agreement over a grid.
struct AdjudicationEntry {
    std::string label;
    std::string kernel;
    std::size_t samples = 0;
    double max_abs_dev = 0.0;
    bool agrees = true;
};

struct AdjudicationReport {
    std::vector<AdjudicationEntry> entries;
    std::vector<ReductionReport> reductions;
    std::vector<Finding> findings;

    const AdjudicationEntry* find(const std::string& label) const {
        for (const auto& e : entries)
            if (e.label == label) return &e;
        return nullptr;
    }
    std::size_t oracle_failures() const {
        std::size_t n = 0;
        for (const auto& r : reductions) n += r.oracle_failures();
        return n;
    }
};

inline AdjudicationReport adjudicate(const std::vector<Interval>& ivs, const std::vector<double>& s_grid,
                                     const std::vector<double>& q_grid) {
    AdjudicationReport out;
    out.reductions.resize(ivs.size());
    detail::parallel_for(ivs.size(), [&](std::size_t i) { out.reductions[i] = check_reductions(ivs[i], s_grid, q_grid); });

    std::map<std::string, std::size_t> index;
    auto note = [&](const std::string& label, const std::string& kernel, double dev) {
        auto [it, fresh] = index.try_emplace(label, out.entries.size());
        if (fresh) out.entries.push_back({label, kernel});
        auto& e = out.entries[it->second];
        ++e.samples;
        e.max_abs_dev = std::max(e.max_abs_dev, dev);
        e.agrees = e.max_abs_dev <= kPrintedTol;
    };
    auto absorb = [&](const CoefficientSet& set) {
        for (std::size_t i = 0; i < set.labels.size(); ++i)
            note(set.labels[i], set.kernels[i], std::abs(set.values[i] - set.oracle_values[i]));
    };
    for (const auto& iv : ivs) {
        absorb(coeff_lambda(iv));
        for (double s : s_grid) {
            if (s > 0.0) absorb(coeff_C(s, iv));
            for (double q : q_grid) {
                absorb(coeff_rho(s, q, iv));
                if (q > 1.0) absorb(coeff_nu(s, q, iv));
            }
        }
        for (double q : q_grid) {
            if (!(q > 1.0)) continue;
            const auto mu = coeff_mu(q, iv);
            absorb(mu);
            note("mu1_hyp~mu2", "(1-t)(tb+(1-t)a)^(-2q)", std::abs(mu.printed("mu1_hyp") - mu.oracle("mu2")));
            note("mu2_hyp~mu1", "t(tb+(1-t)a)^(-2q)", std::abs(mu.printed("mu2_hyp") - mu.oracle("mu1")));
        }
    }
    for (const auto& r : out.reductions)
        for (const auto& f : r.findings) out.findings.push_back(f);
    return out;
}

inline json adjudication_to_json(const AdjudicationReport& rep, const std::vector<Interval>& ivs,
                                 const std::vector<double>& s_grid, const std::vector<double>& q_grid) {
    using detail::num;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back({{"label", e.label},
                           {"kernel", e.kernel},
                           {"samples", e.samples},
                           {"max_abs_dev", num(e.max_abs_dev)},
                           {"verdict", e.agrees ? "agrees" : "deviates"}});
    }
    json checks = json::array();
    std::size_t passed = 0, total = 0;
    for (const auto& r : rep.reductions) {
        for (const auto& c : r.checks) {
            ++total;
            if (c.passed) ++passed;
            if (c.passed) continue;
            checks.push_back({{"name", c.name},
                              {"level", c.level},
                              {"a", num(c.interval.a)},
                              {"b", num(c.interval.b)},
                              {"s", num(c.s)},
                              {"q", num(c.q)},
                              {"left", num(c.left)},
                              {"right", num(c.right)},
                              {"deviation", num(c.deviation)}});
        }
    }
    json findings = json::array();
    for (const auto& f : rep.findings) {
        json j = finding_to_json(f);
        j.erase("coefficients");
        if (f.coefficients) {
            j["a"] = num(f.coefficients->interval.a);
            j["b"] = num(f.coefficients->interval.b);
            j["s"] = num(f.coefficients->s);
            j["q"] = num(f.coefficients->q);
        }
        findings.push_back(std::move(j));
    }
    json grid_ivs = json::array();
    for (const auto& iv : ivs) grid_ivs.push_back({num(iv.a), num(iv.b)});
    json sg = json::array(), qg = json::array();
    for (double s : s_grid) sg.push_back(num(s));
    for (double q : q_grid) qg.push_back(num(q));
    return {{"schema_version", kSchemaVersion},
            {"grid", {{"intervals", grid_ivs}, {"s", sg}, {"q", qg}}},
            {"closed_forms", entries},
            {"reduction_checks", {{"total", total}, {"passed", passed}, {"failed", checks}}},
            {"oracle_failures", rep.oracle_failures()},
            {"findings", findings}};
}

}  // namespace hhkit
