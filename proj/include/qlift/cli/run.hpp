#pragma once

// Subcommand dispatch behind the qlift tool. Everything here is a pure
// function of (command, input text, options), which is what makes reports
// byte-identical across runs.

#include <qlift/cli/report.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>

namespace qlift::cli {

struct Options {
    std::optional<std::size_t> order = {};
    std::optional<int> degree_bound = {};
    std::optional<int> max_degree = {};
    std::optional<std::size_t> p = {};
    std::optional<std::uint64_t> seed = {};
};

struct Outcome {
    int exit_code;
    std::string report;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> all = {"check",   "quantize", "anomaly", "cohomology",
                                                 "compare-form", "generate", "verify"};
    return all;
}

/// Verbosity from QLIFT_LOG: 0 quiet (default), 1 info, 2 debug.
inline int log_level() {
    static const int level = [] {
        const char* v = std::getenv("QLIFT_LOG");
        if (!v) return 0;
        const std::string s(v);
        if (s == "debug" || s == "2") return 2;
        if (s == "info" || s == "1") return 1;
        return 0;
    }();
    return level;
}

inline void log(int level, const std::string& message) {
    if (level <= log_level()) std::cerr << "qlift: " << message << "\n";
}

namespace detail {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void allow_flags(const std::string& command, const Options& o, std::set<std::string> allowed) {
    auto reject = [&](bool present, const std::string& flag) {
        if (present && !allowed.count(flag)) throw UsageError("flag " + flag + " is not valid for '" + command + "'");
    };
    reject(o.order.has_value(), "--order");
    reject(o.degree_bound.has_value(), "--degree-bound");
    reject(o.max_degree.has_value(), "--max-degree");
    reject(o.p.has_value(), "--p");
    reject(o.seed.has_value(), "--seed");
}

inline void require_system(const SystemFile& s, const std::string& command) {
    if (s.fs.empty()) throw UsageError("'" + command + "' needs at least one generator line f1 = ...");
}

inline json system_json(const SystemFile& s) { return {{"n", s.n}, {"system", polys_json(s.fs)}}; }

inline Outcome finish(const std::string& command, const std::string& digest, const std::string& status, int code,
                      json payload) {
    return {code, dump(envelope(command, digest, status, code, std::move(payload)))};
}

inline Outcome not_involutive(const std::string& command, const std::string& digest, const SystemFile& s,
                              const BracketWitness& w) {
    json payload = system_json(s);
    payload["witness"] = to_json(w);
    return finish(command, digest, "non-involutive", 2, std::move(payload));
}

inline Outcome check(const SystemFile& s, const std::string& digest) {
    require_system(s, "check");
    const auto inv = is_involutive(s.fs);
    json payload = system_json(s);
    payload["involutive"] = inv.involutive;
    payload["witness"] = inv.witness ? to_json(*inv.witness) : json(nullptr);
    return finish("check", digest, inv ? "involutive" : "non-involutive", inv ? 0 : 2, std::move(payload));
}

inline Outcome quantize_cmd(const SystemFile& s, const std::string& digest, const Options& o) {
    require_system(s, "quantize");
    const auto order = o.order ? o.order : s.order;
    if (!order) throw UsageError("quantize needs --order or an 'order = L' line");
    DegreePolicy policy = s.policy();
    if (o.degree_bound) policy.uniform = o.degree_bound;
    log(1, "quantize: order " + std::to_string(*order) + ", " + std::to_string(s.fs.size()) + " generators");

    const QuantizeResult r = quantize(s.fs, *order, policy);
    if (auto* w = std::get_if<NotInvolutive>(&r)) return not_involutive("quantize", digest, s, w->witness);
    if (auto* ob = std::get_if<Obstruction>(&r)) {
        json payload = system_json(s);
        payload["obstruction"] = to_json(*ob);
        return finish("quantize", digest, "obstructed", 2, std::move(payload));
    }
    const auto& cert = std::get<Certificate>(r);
    for (const auto& c : cert.corrections) log(2, "level " + std::to_string(c.level) + ": cancelled " + format(c.chi));
    const auto verified = verify_certificate(cert);
    if (!verified) throw std::logic_error("fresh certificate failed verification: " + verified.reason);
    json payload = system_json(s);
    payload["certificate"] = to_json(cert);
    payload["verified"] = true;
    return finish("quantize", digest, "quantised", 0, std::move(payload));
}

inline Outcome anomaly_cmd(const SystemFile& s, const std::string& digest, const Options& o) {
    require_system(s, "anomaly");
    if (auto inv = is_involutive(s.fs); !inv) return not_involutive("anomaly", digest, s, *inv.witness);
    const std::size_t level = s.level.value_or(0);
    std::vector<HSeries> G = s.lifts;
    if (G.empty())
        for (const auto& f : s.fs) G.push_back(HSeries::from_poly(f, level + 1));
    for (std::size_t i = 0; i < G.size(); ++i)
        if (G[i].symbol() != s.fs[i]) throw UsageError("G" + std::to_string(i + 1) + " does not have symbol f" + std::to_string(i + 1));

    json payload = system_json(s);
    payload["level"] = level;
    json lifts = json::array();
    for (const auto& g : G) lifts.push_back(to_json(g));
    payload["lift"] = lifts;

    Cochain chi(s.fs.size(), s.n, 2);
    try {
        chi = anomaly(G, level);
    } catch (const InvalidLiftError& e) {
        payload["failure"] = to_json(e.failure());
        payload["message"] = e.what();
        return finish("anomaly", digest, "invalid-lift", 1, std::move(payload));
    }
    payload["chi"] = to_json(chi);
    payload["cocycle"] = delta(chi, s.fs).is_zero();
    if (chi.is_zero()) return finish("anomaly", digest, "zero-anomaly", 0, std::move(payload));

    const int bound = o.degree_bound.value_or(s.policy().bound_for(level).value_or(std::max(chi.max_degree(), 0) + 2));
    auto solved = classify_anomaly(chi, s.fs, level, bound);
    if (auto* ob = std::get_if<Obstruction>(&solved)) {
        payload["obstruction"] = to_json(*ob);
        return finish("anomaly", digest, "obstructed", 2, std::move(payload));
    }
    const auto& m = std::get<std::vector<Poly>>(solved);
    std::vector<HSeries> corrected;
    json corrected_json = json::array();
    for (std::size_t i = 0; i < G.size(); ++i) {
        corrected.push_back(G[i] - HSeries::from_poly(m[i], level + 1).shifted(static_cast<int>(level + 1)));
        corrected_json.push_back(to_json(corrected.back()));
    }
    if (!check_lifting(corrected, level + 1)) throw std::logic_error("corrected lift does not commute");
    payload["m"] = polys_json(m);
    payload["degree_bound"] = bound;
    payload["corrected"] = corrected_json;
    return finish("anomaly", digest, "coboundary", 0, std::move(payload));
}

inline Outcome cohomology_cmd(const SystemFile& s, const std::string& digest, const Options& o) {
    require_system(s, "cohomology");
    for (std::size_t i = 0; i < s.fs.size(); ++i)
        if (s.fs[i].is_zero() || !s.fs[i].is_homogeneous())
            throw UsageError("cohomology needs homogeneous generators; f" + std::to_string(i + 1) + " is not");
    if (auto inv = is_involutive(s.fs); !inv) return not_involutive("cohomology", digest, s, *inv.witness);
    const int max_degree = o.max_degree.value_or(4);
    if (max_degree < 0) throw UsageError("--max-degree must be nonnegative");
    if (o.p && *o.p > s.fs.size()) throw UsageError("--p exceeds the number of generators");

    json table = json::array();
    const std::size_t p_lo = o.p.value_or(0);
    const std::size_t p_hi = o.p.value_or(s.fs.size());
    for (std::size_t p = p_lo; p <= p_hi; ++p)
        for (int d = 0; d <= max_degree; ++d) {
            const auto dims = graded_cohomology(s.fs, p, d);
            table.push_back({{"p", p},
                             {"d", d},
                             {"slice", dims.slice},
                             {"cocycles", dims.cocycles},
                             {"coboundaries", dims.coboundaries},
                             {"cohomology", dims.cohomology()}});
        }
    json payload = system_json(s);
    payload["max_degree"] = max_degree;
    payload["dimensions"] = table;
    return finish("cohomology", digest, "computed", 0, std::move(payload));
}

inline Outcome compare_form_cmd(const SystemFile& s, const std::string& digest) {
    require_system(s, "compare-form");
    if (auto inv = is_involutive(s.fs); !inv) return not_involutive("compare-form", digest, s, *inv.witness);
    const KForm a = s.form_value();
    const Cochain phi = comparison_phi(a, s.fs);
    json payload = system_json(s);
    payload["form"] = to_json(a);
    payload["cochain"] = to_json(phi);
    payload["cocycle"] = delta(phi, s.fs).is_zero();
    if (a.degree() < s.fs.size() && a.degree() < 2 * s.n)
        payload["chain_map"] = comparison_phi(exterior_derivative(a), s.fs) == delta(phi, s.fs);
    else
        payload["chain_map"] = nullptr;
    return finish("compare-form", digest, "computed", 0, std::move(payload));
}

inline Outcome generate_cmd(const SystemFile& s, const std::string& digest, const Options& o) {
    std::vector<ShearStep> steps = s.shears;
    if (steps.empty()) {
        if (!o.seed) throw UsageError("generate needs shear lines or --seed");
        std::mt19937_64 rng(*o.seed);
        steps = random_shear_steps(s.n, 2, rng);
    } else if (o.seed) {
        throw UsageError("--seed conflicts with explicit shear lines");
    }
    const auto fs = gen_involutive_shear(s.n, steps);
    json js = json::array();
    for (const auto& st : steps)
        js.push_back({{"kind", st.kind == ShearStep::Kind::position ? "q" : "p"}, {"generator", format(st.generator)}});
    SystemFile out;
    out.n = s.n;
    out.fs = fs;
    json payload = {{"n", s.n}, {"steps", js}, {"system", polys_json(fs)}, {"system_file", canonical_text(out)}};
    if (o.seed) payload["seed"] = *o.seed;
    return finish("generate", digest, "generated", 0, std::move(payload));
}

inline Outcome verify_cmd(std::string_view input, const std::string& digest) {
    json doc;
    try {
        doc = json::parse(input);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != kSchema) throw UsageError("not a qlift report");
    if (!doc.contains("payload") || !doc["payload"].contains("certificate"))
        throw UsageError("report carries no certificate");
    const Certificate c = certificate_from_json(doc["payload"]["certificate"]);
    const auto r = verify_certificate(c);
    json payload = {{"order", c.order}, {"system", polys_json(c.system)}, {"verified", r.ok}, {"reason", r.reason}};
    payload["failure"] = r.failure ? to_json(*r.failure) : json(nullptr);
    return finish("verify", digest, r ? "verified" : "rejected", r ? 0 : 2, std::move(payload));
}

}  // namespace detail

/// Runs one subcommand on the text of its input file. Never throws; errors become status "error", exit 1.
inline Outcome run_command(const std::string& command, std::string_view input, const Options& options = {}) {
    std::string digest = sha256_hex(input);
    try {
        if (command == "verify") {
            detail::allow_flags(command, options, {});
            return detail::verify_cmd(input, digest);
        }
        const SystemFile s = parse_system_file(input);
        digest = sha256_hex(canonical_text(s));
        if (command == "check") {
            detail::allow_flags(command, options, {});
            return detail::check(s, digest);
        }
        if (command == "quantize") {
            detail::allow_flags(command, options, {"--order", "--degree-bound"});
            return detail::quantize_cmd(s, digest, options);
        }
        if (command == "anomaly") {
            detail::allow_flags(command, options, {"--degree-bound"});
            return detail::anomaly_cmd(s, digest, options);
        }
        if (command == "cohomology") {
            detail::allow_flags(command, options, {"--p", "--max-degree"});
            return detail::cohomology_cmd(s, digest, options);
        }
        if (command == "compare-form") {
            detail::allow_flags(command, options, {});
            return detail::compare_form_cmd(s, digest);
        }
        if (command == "generate") {
            detail::allow_flags(command, options, {"--seed"});
            return detail::generate_cmd(s, digest, options);
        }
        throw detail::UsageError("unknown command '" + command + "'");
    } catch (const SystemFileError& e) {
        json payload = {{"message", e.what()}, {"line", e.line()}, {"column", e.column()}};
        return detail::finish(command, digest, "error", 1, std::move(payload));
    } catch (const std::exception& e) {
        return detail::finish(command, digest, "error", 1, json{{"message", e.what()}});
    }
}

}  // namespace qlift::cli
