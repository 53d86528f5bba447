#pragma once

// Canonical JSON reports. nlohmann::json objects keep keys sorted, and
// polynomials are written in their canonical text form, so equal inputs give
// byte-identical documents. Tuples are written 1-based.

#include <qlift/cli/system_file.hpp>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <string>
#include <string_view>

namespace qlift::cli {

using nlohmann::json;

inline constexpr const char* kSchema = "qlift-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

inline json to_json(const Poly& a) { return format(a); }

inline json to_json(const HSeries& a) {
    json out = json::array();
    for (const auto& c : a.coeffs()) out.push_back(format(c));
    return out;
}

inline json tuple_json(const IndexTuple& t) {
    json out = json::array();
    for (auto i : t) out.push_back(i + 1);
    return out;
}

inline json to_json(const Cochain& c) {
    json entries = json::array();
    for (const auto& [t, m] : c.entries()) entries.push_back({{"tuple", tuple_json(t)}, {"value", format(m)}});
    return {{"degree", c.degree()}, {"entries", entries}, {"text", format(c)}};
}

inline json to_json(const KForm& a) {
    json entries = json::array();
    for (const auto& [t, f] : a.entries()) {
        json slots = json::array();
        for (auto s : t) slots.push_back("d" + Var::from_slot(s, a.pairs()).name());
        entries.push_back({{"slots", slots}, {"value", format(f)}});
    }
    return {{"degree", a.degree()}, {"entries", entries}, {"text", format(a)}};
}

inline json polys_json(const std::vector<Poly>& v) {
    json out = json::array();
    for (const auto& p : v) out.push_back(format(p));
    return out;
}

inline json to_json(const BracketWitness& w) {
    return {{"i", w.i + 1}, {"j", w.j + 1}, {"bracket", format(w.bracket)}};
}

inline json to_json(const CommutatorFailure& f) {
    return {{"i", f.i + 1}, {"j", f.j + 1}, {"order", f.order}, {"coefficient", format(f.coefficient)}};
}

inline json to_json(const Obstruction& o) {
    json slice = nullptr;
    if (o.slice)
        slice = {{"p", o.slice->p}, {"internal_degree", o.slice->internal_degree},
                 {"cohomology_dim", o.slice->cohomology_dim}};
    return {{"level", o.level},
            {"chi", to_json(o.chi)},
            {"degree_bound", o.degree_bound},
            {"classification", o.classification()},
            {"suggestion", o.suggestion()},
            {"slice", slice}};
}

inline json to_json(const Certificate& c) {
    json F = json::array();
    for (const auto& x : c.F) F.push_back(to_json(x));
    json log = json::array();
    for (const auto& corr : c.corrections)
        log.push_back({{"level", corr.level}, {"chi", to_json(corr.chi)}, {"m", polys_json(corr.m)}});
    return {{"n", c.system.front().pairs()},
            {"system", polys_json(c.system)},
            {"order", c.order},
            {"F", F},
            {"residual_order", c.residual_order},
            {"residuals_vanish", c.residuals_vanish},
            {"corrections", log}};
}

/// Reads back the "certificate" payload of a quantize report.
inline Certificate certificate_from_json(const json& j) {
    const std::size_t n = j.at("n").get<std::size_t>();
    auto read_poly = [n](const json& s) {
        auto r = parse_poly(s.get<std::string>(), n);
        if (!r.ok()) throw std::invalid_argument("bad polynomial '" + s.get<std::string>() + "': " + r.diagnostics.front().message);
        return *r.value;
    };
    auto read_polys = [&](const json& a) {
        std::vector<Poly> v;
        for (const auto& s : a) v.push_back(read_poly(s));
        return v;
    };

    Certificate c;
    c.system = read_polys(j.at("system"));
    c.order = j.at("order").get<std::size_t>();
    for (const auto& s : j.at("F")) {
        auto coeffs = read_polys(s);
        if (coeffs.empty()) throw std::invalid_argument("empty series in certificate");
        c.F.emplace_back(std::move(coeffs));
    }
    c.residual_order = j.at("residual_order").get<std::size_t>();
    c.residuals_vanish = j.at("residuals_vanish").get<bool>();
    const std::size_t k = c.system.size();
    for (const auto& e : j.at("corrections")) {
        const json& chi = e.at("chi");
        Cochain x(k, n, chi.at("degree").get<std::size_t>());
        for (const auto& entry : chi.at("entries")) {
            IndexTuple t;
            for (const auto& i : entry.at("tuple")) {
                const auto v = i.get<std::size_t>();
                if (v == 0) throw std::invalid_argument("cochain tuples are 1-based");
                t.push_back(v - 1);
            }
            x.add(t, read_poly(entry.at("value")));
        }
        c.corrections.push_back({e.at("level").get<std::size_t>(), std::move(x), read_polys(e.at("m"))});
    }
    return c;
}

/// Report envelope. Payload keys are command-specific.
inline json envelope(const std::string& command, const std::string& digest, const std::string& status, int exit_code,
                     json payload) {
    return {{"schema", kSchema},
            {"tool_version", kToolVersion},
            {"command", command},
            {"input_digest", "sha256:" + digest},
            {"status", status},
            {"exit_code", exit_code},
            {"payload", std::move(payload)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qlift::cli
