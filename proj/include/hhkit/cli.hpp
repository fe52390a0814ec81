#pragma once

// Command-line front end. parse_invocation turns argv into a validated
// CliInvocation, dispatch runs it and writes the document.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hhkit/harness.hpp"

namespace hhkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailure = 3;

enum class Format { Json, Csv, Text };

struct CliInvocation {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    Format format = Format::Text;

    bool has(const std::string& key) const { return flags.count(key) > 0; }
    double real(const std::string& key, double fallback) const {
        auto it = flags.find(key);
        return it == flags.end() ? fallback : std::stod(it->second);
    }
    long long integer(const std::string& key, long long fallback) const {
        auto it = flags.find(key);
        return it == flags.end() ? fallback : std::stoll(it->second);
    }
    std::string text(const std::string& key, const std::string& fallback = "") const {
        auto it = flags.find(key);
        return it == flags.end() ? fallback : it->second;
    }
};

/// Bad flags or flag combinations; the message names the flag.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Help was requested; carries the rendered text.
struct HelpRequest {
    std::string text;
};

namespace detail {

inline bool parse_real(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

inline CLI::Validator real_in(double lo, bool lo_open, double hi, bool hi_open) {
    const std::string range = std::string(lo_open ? "(" : "[") + format_number(lo) + ", " +
                              (std::isinf(hi) ? "inf" : format_number(hi)) + (hi_open ? ")" : "]");
    return CLI::Validator(
        [=](std::string& s) -> std::string {
            double v;
            if (!parse_real(s, v)) return "expected a number in " + range + ", got '" + s + "'";
            const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
            return ok ? std::string() : "value " + s + " outside " + range;
        },
        "REAL in " + range);
}

inline CLI::Validator real_any() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            double v;
            return parse_real(s, v) ? std::string() : "expected a number, got '" + s + "'";
        },
        "REAL");
}

inline CLI::Validator int_at_least(long long lo, bool even = false) {
    return CLI::Validator(
        [=](std::string& s) -> std::string {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                if (v < lo) return "value " + s + " must be >= " + std::to_string(lo);
                if (even && v % 2 != 0) return "value " + s + " must be even";
                return {};
            } catch (const std::exception&) {
                return "expected an integer >= " + std::to_string(lo) + ", got '" + s + "'";
            }
        },
        even ? "EVEN INT >= " + std::to_string(lo) : "INT >= " + std::to_string(lo));
}

inline CLI::Validator real_list() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            std::stringstream ss(s);
            std::string item;
            bool any = false;
            while (std::getline(ss, item, ',')) {
                double v;
                if (!parse_real(item, v)) return "expected comma-separated numbers, got '" + s + "'";
                any = true;
            }
            return any ? std::string() : "expected at least one number";
        },
        "REAL[,REAL...]");
}

inline std::vector<double> split_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

/// Registers options on one subcommand, binding each to a string slot.
struct Registrar {
    CLI::App* app;
    std::map<std::string, std::string>* slots;
    std::vector<std::pair<std::string, CLI::Option*>>* seen;

    CLI::Option* opt(const std::string& name, const std::string& desc) {
        auto* o = app->add_option("--" + name, (*slots)[name], desc);
        seen->emplace_back(name, o);
        return o;
    }
    CLI::Option* flag(const std::string& name, const std::string& desc) {
        auto* o = app->add_flag("--" + name, desc);
        seen->emplace_back(name, o);
        return o;
    }
};

inline const std::vector<std::string>& theorem_names() {
    static const std::vector<std::string> names{"HH", "HarmHH", "I1", "I2", "FS1", "FS2",
                                                "II1", "II2", "II3", "II4", "Lemma"};
    return names;
}

}  // namespace detail

/// Parses argv (program name excluded). Throws UsageError on bad input and
/// HelpRequest for --help.
inline CliInvocation parse_invocation(const std::vector<std::string>& args) {
    CLI::App app{"Hermite-Hadamard bounds for harmonically (s,m)-convex functions", "hhkit"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> slots;
    std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> seen;
    std::map<std::string, std::string> formats;

    auto sub = [&](const std::string& name, const std::string& desc, const std::string& default_format) {
        CLI::App* s = app.add_subcommand(name, desc);
        formats[name] = default_format;
        s->add_option("--format", formats[name], "json, csv or text")
            ->check(CLI::IsMember({"json", "csv", "text"}))
            ->capture_default_str();
        return detail::Registrar{s, &slots[name], &seen[name]};
    };
    const auto positive = detail::real_in(0.0, true, INFINITY, true);
    const auto unit_closed = detail::real_in(0.0, false, 1.0, false);
    const auto unit_open_closed = detail::real_in(0.0, true, 1.0, false);
    const auto q_range = detail::real_in(1.0, false, INFINITY, true);

    {
        auto r = sub("coeffs", "closed-form coefficients next to their defining integrals", "text");
        r.opt("set", "lambda, mu, C, rho or nu")->required()->check(CLI::IsMember({"lambda", "mu", "C", "rho", "nu"}));
        r.opt("a", "left endpoint, > 0")->required()->check(positive);
        r.opt("b", "right endpoint, > a")->required()->check(positive);
        r.opt("s", "s in [0, 1] (default 1)")->check(unit_closed);
        r.opt("q", "q >= 1 (default 1; mu and nu need q > 1)")->check(q_range);
    }
    auto function_flags = [&](detail::Registrar& r) {
        r.opt("family", "pow, spiece, recip, affine or exp")
            ->required()
            ->check(CLI::IsMember({"pow", "spiece", "recip", "affine", "exp"}));
        r.opt("coeff", "pow: coefficient (default 1)")->check(detail::real_any());
        r.opt("exp", "pow: exponent (default 1)")->check(detail::real_any());
        r.opt("shift", "pow: additive constant (default 0)")->check(detail::real_any());
        r.opt("a0", "spiece: value at 0 (default 1)")->check(detail::real_any());
        r.opt("b0", "spiece: coefficient of x^power (default 1)")->check(detail::real_any());
        r.opt("c0", "spiece: constant for x > 0 (default 0)")->check(detail::real_any());
        r.opt("power", "spiece: exponent in (0, 1] (default 0.5)")->check(unit_open_closed);
        r.opt("slope", "affine: slope (default 1)")->check(detail::real_any());
        r.opt("intercept", "affine: intercept (default 0)")->check(detail::real_any());
        r.opt("scale", "exp: rate in exp(scale x) (default 1)")->check(detail::real_any());
        r.opt("domain-lo", "domain left end, > 0 (default 0.001)")->check(positive);
        r.opt("domain-hi", "domain right end (default 1000)")->check(positive);
    };
    {
        auto r = sub("verify", "evaluate both sides of one inequality", "text");
        r.opt("theorem", "HH, HarmHH, I1, I2, FS1, FS2, II1, II2, II3, II4 or Lemma")
            ->required()
            ->check(CLI::IsMember(detail::theorem_names()));
        function_flags(r);
        r.opt("s", "s in [0, 1] (default 1)")->check(unit_closed);
        r.opt("m", "m in (0, 1] (default 1)")->check(unit_open_closed);
        r.opt("q", "q >= 1 (default 1)")->check(q_range);
        r.opt("a", "left endpoint, > 0")->required()->check(positive);
        r.opt("b", "right endpoint, > a")->required()->check(positive);
        r.opt("grid", "certification grid, even >= 2 (default 64)")->check(detail::int_at_least(2, true));
        r.flag("no-certify", "skip the convexity certificate");
        r.flag("literal-ii3", "II3 with exponent-2q kernels throughout");
    }
    {
        auto r = sub("sweep", "run a configured batch and write JSON/CSV reports", "json");
        r.opt("config", "sweep configuration (JSON)")->required()->check(CLI::ExistingFile);
        r.opt("output", "report prefix, overrides the config");
    }
    {
        auto r = sub("search", "randomized counterexample search", "text");
        r.opt("theorem", "HH, HarmHH, I1, I2, FS1, FS2, II1, II2, II3, II4 or Lemma")
            ->required()
            ->check(CLI::IsMember(detail::theorem_names()));
        r.opt("budget", "number of draws, >= 1 (default 1000)")->check(detail::int_at_least(1));
        r.opt("seed", "RNG seed, >= 0 (default 0)")->check(detail::int_at_least(0));
        r.opt("grid", "per-draw certification grid, even >= 2 (default 16)")->check(detail::int_at_least(2, true));
        r.flag("inject-uncertified", "test mode: draw sqrt(x) and skip certification");
    }
    {
        auto r = sub("specfun", "special functions", "text");
        r.opt("fn", "2f1, 2f1-series, lngamma or beta")
            ->required()
            ->check(CLI::IsMember({"2f1", "2f1-series", "lngamma", "beta"}));
        for (const char* name : {"a", "b", "c", "z", "x", "y"}) r.opt(name, "argument")->check(detail::real_any());
    }
    {
        auto r = sub("reductions", "reduction identities and the closed-form adjudication report", "json");
        r.opt("a", "left endpoint, > 0")->check(positive);
        r.opt("b", "right endpoint, > a")->check(positive);
        r.opt("config", "take the intervals from a sweep configuration")->check(CLI::ExistingFile);
        r.opt("s-grid", "comma-separated s values in [0, 1] (default 0,0.25,0.5,0.75,1)")->check(detail::real_list());
        r.opt("q-grid", "comma-separated q values >= 1 (default 1,1.5,2,3)")->check(detail::real_list());
        r.opt("output", "also write the report to this file");
        r.flag("strict", "exit 1 on printed-form deviations as well");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequest{subs.empty() ? app.help() : subs.front()->help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CliInvocation inv;
    inv.subcommand = app.get_subcommands().front()->get_name();
    for (const auto& [name, o] : seen[inv.subcommand]) {
        if (o->count() == 0) continue;
        inv.flags[name] = o->get_expected_min() == 0 ? "true" : slots[inv.subcommand][name];
    }
    const auto& fmt = formats[inv.subcommand];
    inv.format = fmt == "json" ? Format::Json : fmt == "csv" ? Format::Csv : Format::Text;
    return inv;
}

namespace detail {

inline Interval interval_flags(const CliInvocation& inv) {
    const double a = inv.real("a", 0.0), b = inv.real("b", 0.0);
    if (!(b > a)) throw UsageError("--b: must exceed --a (got a=" + format_number(a) + ", b=" + format_number(b) + ")");
    return Interval{a, b};
}

inline FunctionSpec function_flags(const CliInvocation& inv) {
    const std::string fam = inv.text("family");
    FunctionSpec f;
    if (fam == "pow") {
        f.family = Power{inv.real("coeff", 1.0), inv.real("exp", 1.0), inv.real("shift", 0.0)};
    } else if (fam == "spiece") {
        f.family = SPiece{inv.real("a0", 1.0), inv.real("b0", 1.0), inv.real("c0", 0.0), inv.real("power", 0.5)};
    } else if (fam == "recip") {
        f.family = Reciprocal{};
    } else if (fam == "affine") {
        f.family = Affine{inv.real("slope", 1.0), inv.real("intercept", 0.0)};
    } else {
        f.family = Exp{inv.real("scale", 1.0)};
    }
    f.domain_lo = inv.real("domain-lo", 1e-3);
    f.domain_hi = inv.real("domain-hi", 1e3);
    try {
        f.validate();
    } catch (const std::exception& e) {
        throw UsageError(std::string("--family/--domain-lo/--domain-hi: ") + e.what());
    }
    return f;
}

inline std::string text_record(const VerificationRecord& r) {
    return "lhs=" + format_number(r.lhs) + " rhs=" + format_number(r.rhs) + " margin=" + format_number(r.margin) +
           (r.satisfied ? " satisfied" : " violated");
}

inline void emit_json(std::ostream& out, json j) {
    j["schema_version"] = kSchemaVersion;
    out << j.dump(2) << '\n';
}

inline int run_coeffs(const CliInvocation& inv, std::ostream& out) {
    const auto iv = interval_flags(inv);
    const std::string set = inv.text("set");
    const double s = inv.real("s", 1.0), q = inv.real("q", 1.0);
    if ((set == "mu" || set == "nu") && !(q > 1.0)) throw UsageError("--q: " + set + " needs q in (1, inf)");
    if (set == "C" && !(s > 0.0)) throw UsageError("--s: C needs s in (0, 1]");
    CoefficientSet c;
    if (set == "lambda") c = coeff_lambda(iv);
    else if (set == "mu") c = coeff_mu(q, iv);
    else if (set == "C") c = coeff_C(s, iv);
    else if (set == "rho") c = coeff_rho(s, q, iv);
    else c = coeff_nu(s, q, iv);

    if (inv.format == Format::Json) {
        emit_json(out, coefficients_to_json(c));
    } else if (inv.format == Format::Csv) {
        out << "label,kernel,printed,oracle,deviation\n";
        for (std::size_t i = 0; i < c.labels.size(); ++i) {
            out << c.labels[i] << ',' << csv_field(c.kernels[i]) << ',' << format_number(c.values[i]) << ','
                << format_number(c.oracle_values[i]) << ','
                << format_number(std::abs(c.values[i] - c.oracle_values[i])) << '\n';
        }
    } else {
        for (std::size_t i = 0; i < c.labels.size(); ++i) {
            out << c.labels[i] << " printed=" << format_number(c.values[i])
                << " oracle=" << format_number(c.oracle_values[i])
                << " deviation=" << format_number(std::abs(c.values[i] - c.oracle_values[i])) << '\n';
        }
    }
    return kExitOk;
}

inline int run_verify(const CliInvocation& inv, std::ostream& out) {
    const auto theorem = *theorem_from_string(inv.text("theorem"));
    const auto f = function_flags(inv);
    const auto iv = interval_flags(inv);
    const auto params = SMParams::make(inv.real("s", 1.0), inv.real("m", 1.0), inv.real("q", 1.0));
    if (!applicable(theorem, params)) {
        try {
            if (is_derivative_bound(theorem)) hhkit::detail::validate_bound_params(theorem, params);
        } catch (const std::exception& e) {
            throw UsageError(std::string("--s/--m/--q: ") + e.what());
        }
        throw UsageError("--s/--m/--q: parameters outside the hypotheses of " + inv.text("theorem"));
    }
    if (theorem == Theorem::II1 && params.s == 0.0) throw UsageError("--s: II1 needs s in (0, 1]");
    // Every point a theorem evaluates lies in [m a, max(b/m, a/m)].
    const double lo = uses_sm(theorem) ? params.m * iv.a : iv.a;
    const double hi = uses_sm(theorem) ? iv.b / params.m : iv.b;
    if (!f.domain().contains(lo) || !f.domain().contains(hi)) {
        throw UsageError("--domain-lo/--domain-hi: domain [" + format_number(f.domain_lo) + ", " +
                         format_number(f.domain_hi) + "] must contain [" + format_number(lo) + ", " +
                         format_number(hi) + "]");
    }

    VerifyOptions opts;
    opts.grid = static_cast<int>(inv.integer("grid", kDefaultGrid));
    opts.require_certification = !inv.has("no-certify");
    opts.literal_ii3 = inv.has("literal-ii3");
    const auto rec = verify_instance(theorem, f, params, iv, opts);

    if (inv.format == Format::Json) {
        emit_json(out, record_to_json(rec));
    } else if (inv.format == Format::Csv) {
        SweepResult one;
        one.records.push_back(rec);
        out << sweep_report_csv(one);
    } else {
        out << text_record(rec) << '\n';
    }
    return rec.satisfied ? kExitOk : kExitFindings;
}

inline int run_sweep_cmd(const CliInvocation& inv, std::ostream& out) {
    SweepConfig cfg;
    try {
        std::ifstream in(inv.text("config"));
        cfg = SweepConfig::from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw UsageError("--config: not valid JSON (" + std::string(e.what()) + ")");
    } catch (const ParameterError& e) {
        throw UsageError(std::string("--config: ") + e.what());
    } catch (const DomainError& e) {
        throw UsageError(std::string("--config: ") + e.what());
    }
    if (inv.has("output")) cfg.output = inv.text("output");

    const auto res = run_sweep(cfg);
    const auto report = sweep_report_json(res);
    json summary = report.at("summary");
    if (!cfg.output.empty()) {
        write_sweep_reports(res, cfg.output);
        summary["outputs"] = {cfg.output + ".json", cfg.output + ".csv"};
    }
    if (inv.format == Format::Csv) {
        out << sweep_report_csv(res);
    } else if (inv.format == Format::Text) {
        out << "instances=" << res.instances << " evaluated=" << res.records.size()
            << " skipped=" << res.skipped.size() << " violations=" << res.count(FindingKind::BoundViolation)
            << " errors=" << res.count(FindingKind::EvaluationError) << '\n';
    } else if (cfg.output.empty()) {
        out << report.dump(2) << '\n';
    } else {
        emit_json(out, json{{"summary", summary}});
    }
    if (res.count(FindingKind::BoundViolation) > 0) return kExitFindings;
    return res.count(FindingKind::EvaluationError) > 0 ? kExitFailure : kExitOk;
}

inline int run_search(const CliInvocation& inv, std::ostream& out) {
    const auto theorem = *theorem_from_string(inv.text("theorem"));
    SearchOptions opts;
    opts.grid = static_cast<int>(inv.integer("grid", 16));
    opts.inject_uncertified = inv.has("inject-uncertified");
    const int budget = static_cast<int>(inv.integer("budget", 1000));
    const auto seed = static_cast<std::uint64_t>(inv.integer("seed", 0));
    const auto res = search_counterexample(theorem, budget, seed, opts);

    if (inv.format == Format::Json) {
        emit_json(out, json{{"theorem", inv.text("theorem")},
                            {"budget", budget},
                            {"seed", seed},
                            {"drawn", res.drawn},
                            {"evaluated", res.evaluated},
                            {"errors", res.errors},
                            {"worst_margin", hhkit::detail::num(res.worst_margin)},
                            {"finding", res.finding ? finding_to_json(*res.finding) : json(nullptr)}});
    } else if (inv.format == Format::Csv) {
        SweepResult rows;
        if (res.finding && res.finding->record) rows.records.push_back(*res.finding->record);
        if (res.finding && res.finding->shrunk) rows.records.push_back(*res.finding->shrunk);
        out << sweep_report_csv(rows);
    } else if (res.finding) {
        out << "violation " << text_record(*res.finding->record) << " family=" << res.finding->record->function->label()
            << " a=" << format_number(res.finding->record->interval.a)
            << " b=" << format_number(res.finding->record->interval.b) << '\n';
    } else {
        out << "none drawn=" << res.drawn << " evaluated=" << res.evaluated
            << " worst_margin=" << format_number(res.worst_margin) << '\n';
    }
    return res.finding ? kExitFindings : kExitOk;
}

inline int run_specfun(const CliInvocation& inv, std::ostream& out) {
    const std::string fn = inv.text("fn");
    auto need = [&](const char* key) {
        if (!inv.has(key)) throw UsageError(std::string("--") + key + ": required for --fn " + fn);
        return inv.real(key, 0.0);
    };
    double value = 0.0;
    if (fn == "2f1" || fn == "2f1-series") {
        const Hyp2F1Args args{need("a"), need("b"), need("c"), need("z")};
        if (!(args.b > 0.0)) throw UsageError("--b: must lie in (0, inf)");
        if (!(args.c > args.b)) throw UsageError("--c: must exceed --b");
        if (!(args.z >= 0.0 && args.z < 1.0)) throw UsageError("--z: must lie in [0, 1)");
        if (fn == "2f1-series" && args.z > 1.0 - 1e-6) throw UsageError("--z: the series needs z in [0, 1 - 1e-6]");
        value = fn == "2f1" ? hyp2f1_euler(args) : hyp2f1_series(args);
    } else if (fn == "lngamma") {
        const double x = need("x");
        if (!(x > 0.0)) throw UsageError("--x: must lie in (0, inf)");
        value = ln_gamma(x);
    } else {
        const double x = need("x"), y = need("y");
        if (!(x > 0.0)) throw UsageError("--x: must lie in (0, inf)");
        if (!(y > 0.0)) throw UsageError("--y: must lie in (0, inf)");
        value = beta(x, y);
    }
    if (inv.format == Format::Json) {
        json args = json::object();
        for (const auto& [k, v] : inv.flags)
            if (k != "fn") args[k] = hhkit::detail::num(std::stod(v));
        emit_json(out, json{{"fn", fn}, {"args", args}, {"value", hhkit::detail::num(value)}});
    } else if (inv.format == Format::Csv) {
        out << "fn,value\n" << fn << ',' << format_number(value) << '\n';
    } else {
        out << format_number(value) << '\n';
    }
    return kExitOk;
}

inline int run_reductions(const CliInvocation& inv, std::ostream& out) {
    std::vector<Interval> ivs;
    if (inv.has("config")) {
        if (inv.has("a") || inv.has("b")) throw UsageError("--config: give either --config or --a/--b");
        try {
            std::ifstream in(inv.text("config"));
            ivs = SweepConfig::from_json(json::parse(in)).intervals();
        } catch (const std::exception& e) {
            throw UsageError(std::string("--config: ") + e.what());
        }
    } else {
        if (!inv.has("a") || !inv.has("b")) throw UsageError("--a/--b: required unless --config is given");
        ivs.push_back(interval_flags(inv));
    }
    const auto s_grid = split_reals(inv.text("s-grid", "0,0.25,0.5,0.75,1"));
    const auto q_grid = split_reals(inv.text("q-grid", "1,1.5,2,3"));
    for (double s : s_grid)
        if (!(s >= 0.0 && s <= 1.0)) throw UsageError("--s-grid: values must lie in [0, 1]");
    for (double q : q_grid)
        if (!(q >= 1.0)) throw UsageError("--q-grid: values must lie in [1, inf)");

    const auto rep = adjudicate(ivs, s_grid, q_grid);
    const auto doc = adjudication_to_json(rep, ivs, s_grid, q_grid);
    if (inv.has("output")) write_text_file(inv.text("output"), doc.dump(2) + "\n");
    if (inv.format == Format::Json) {
        out << doc.dump(2) << '\n';
    } else if (inv.format == Format::Csv) {
        out << "label,kernel,samples,max_abs_dev,verdict\n";
        for (const auto& e : rep.entries) {
            out << e.label << ',' << csv_field(e.kernel) << ',' << e.samples << ',' << format_number(e.max_abs_dev)
                << ',' << (e.agrees ? "agrees" : "deviates") << '\n';
        }
    } else {
        for (const auto& e : rep.entries) {
            out << e.label << ' ' << (e.agrees ? "agrees" : "deviates")
                << " max_abs_dev=" << format_number(e.max_abs_dev) << '\n';
        }
        out << "oracle_failures=" << rep.oracle_failures() << '\n';
    }
    if (rep.oracle_failures() > 0) return kExitFindings;
    return inv.has("strict") && !rep.findings.empty() ? kExitFindings : kExitOk;
}

}  // namespace detail

/// Runs a parsed invocation. Usage problems found here (flag combinations)
/// are raised as UsageError before any computation.
inline int dispatch(const CliInvocation& inv, std::ostream& out) {
    if (inv.subcommand == "coeffs") return detail::run_coeffs(inv, out);
    if (inv.subcommand == "verify") return detail::run_verify(inv, out);
    if (inv.subcommand == "sweep") return detail::run_sweep_cmd(inv, out);
    if (inv.subcommand == "search") return detail::run_search(inv, out);
    if (inv.subcommand == "specfun") return detail::run_specfun(inv, out);
    if (inv.subcommand == "reductions") return detail::run_reductions(inv, out);
    throw UsageError("unknown subcommand '" + inv.subcommand + "'");
}

/// Full command line: parse, dispatch, map errors to exit codes.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(parse_invocation(args), out);
    } catch (const HelpRequest& h) {
        out << h.text;
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CertificationError& e) {
        err << "not certified: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace hhkit::cli
