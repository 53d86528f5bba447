#pragma once

// Line-oriented system files. Grammar, one statement per line:
//
//     line      := blank | '#' comment | statement [ '#' comment ]
//     statement := 'n' '=' int
//                | 'f' int '=' expr                 generators f1..fk, contiguous
//                | 'G' int '=' hexpr                lifts for `anomaly` (may use h)
//                | 'order' '=' int
//                | 'level' '=' int
//                | 'degree-bound' '=' int
//                | 'degree-bound' '[' int ']' '=' int     per-level override
//                | 'homogeneous' '=' ('true' | 'false')
//                | 'form' slot { '^' slot } '=' expr   e.g. form dq1^dp2 = p1
//                | 'form' '1' '=' expr                 a 0-form
//                | 'shear' ('q' | 'p') '=' expr       generator steps for `generate`
//
// Expressions are read with parse_poly / parse_hseries after n is known, so
// statements may appear in any order. Diagnostics carry line:column.

#include <qlift/derham.hpp>
#include <qlift/lift.hpp>
#include <qlift/parse.hpp>
#include <qlift/shear.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qlift::cli {

class SystemFileError : public std::runtime_error {
public:
    SystemFileError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct FormTerm {
    IndexTuple slots;
    Poly coefficient;
};

struct SystemFile {
    std::size_t n = 0;
    std::vector<Poly> fs;
    std::optional<std::size_t> order;
    std::optional<std::size_t> level;
    std::optional<int> degree_bound;
    std::map<std::size_t, int> level_bounds;
    std::optional<bool> homogeneous;
    std::vector<HSeries> lifts;  // G1..Gk, truncated at level + 1
    std::vector<FormTerm> form;
    std::vector<ShearStep> shears;

    DegreePolicy policy() const { return DegreePolicy{degree_bound, level_bounds}; }

    KForm form_value() const {
        if (form.empty()) throw std::invalid_argument("no form lines in system file");
        KForm a(n, form.front().slots.size());
        for (const auto& t : form) {
            if (t.slots.size() != a.degree()) throw std::invalid_argument("form lines have different degrees");
            a.add(t.slots, t.coefficient);
        }
        return a;
    }
};

namespace detail {

struct RawLine {
    std::size_t number;
    std::string key;
    std::string value;
    std::size_t value_column;  // 1-based column of value[0]
};

inline std::string trim(std::string_view s, std::size_t* lead = nullptr) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    if (lead) *lead = a;
    return std::string(s.substr(a, b - a));
}

inline std::size_t parse_count(const RawLine& l, const std::string& what) {
    const std::string& v = l.value;
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        v.size() > 6)
        throw SystemFileError(l.number, l.value_column, what + " must be a nonnegative integer, got '" + v + "'");
    return std::stoul(v);
}

// "f12" -> 12, or nullopt if key is not prefix + digits.
inline std::optional<std::size_t> indexed(const std::string& key, char prefix) {
    if (key.size() < 2 || key[0] != prefix) return std::nullopt;
    for (std::size_t i = 1; i < key.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(key[i]))) return std::nullopt;
    if (key.size() > 6) return std::nullopt;
    return std::stoul(key.substr(1));
}

inline Poly expression(const RawLine& l, std::size_t n) {
    auto r = parse_poly(l.value, n);
    if (!r.ok()) {
        const auto& d = r.diagnostics.front();
        throw SystemFileError(l.number, l.value_column + d.position, d.message);
    }
    return *r.value;
}

inline HSeries series_expression(const RawLine& l, std::size_t n, std::size_t order) {
    auto r = parse_hseries(l.value, n, order);
    if (!r.ok()) {
        const auto& d = r.diagnostics.front();
        throw SystemFileError(l.number, l.value_column + d.position, d.message);
    }
    return *r.value;
}

// "dq1^dp2" -> slot tuple in increasing order plus the permutation sign; "1" -> empty tuple.
inline std::pair<IndexTuple, int> form_slots(const RawLine& l, const std::string& spec, std::size_t n) {
    if (spec == "1") return {{}, 1};
    IndexTuple raw;
    std::stringstream in(spec);
    std::string part;
    while (std::getline(in, part, '^')) {
        part = trim(part);
        if (part.size() < 3 || part[0] != 'd' || (part[1] != 'q' && part[1] != 'p'))
            throw SystemFileError(l.number, 1, "bad form slot '" + part + "', expected dq<i> or dp<i>");
        const auto i = indexed(part.substr(1), part[1]);
        if (!i || *i == 0 || *i > n) throw SystemFileError(l.number, 1, "form slot index out of range in '" + part + "'");
        const Var v = part[1] == 'q' ? Var::q(*i - 1) : Var::p(*i - 1);
        raw.push_back(v.slot(n));
    }
    int sign = 1;
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (raw[i] == raw[j]) throw SystemFileError(l.number, 1, "repeated slot in form '" + spec + "'");
            if (raw[i] > raw[j]) sign = -sign;
        }
    std::sort(raw.begin(), raw.end());
    return {raw, sign};
}

}  // namespace detail

inline SystemFile parse_system_file(std::string_view text) {
    using detail::RawLine;
    std::vector<RawLine> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++number;
        start = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (detail::trim(line).empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw SystemFileError(number, 1, "expected 'key = value'");
        std::size_t lead = 0;
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1), &lead);
        if (key.empty()) throw SystemFileError(number, 1, "missing key before '='");
        if (value.empty()) throw SystemFileError(number, eq + 2, "missing value after '='");
        lines.push_back({number, std::move(key), std::move(value), eq + 2 + lead});
        if (end == text.size()) break;
    }

    SystemFile sys;
    const RawLine* n_line = nullptr;
    for (const auto& l : lines)
        if (l.key == "n") {
            if (n_line) throw SystemFileError(l.number, 1, "duplicate 'n'");
            n_line = &l;
        }
    if (!n_line) throw SystemFileError(1, 1, "missing 'n = <pairs>'");
    sys.n = detail::parse_count(*n_line, "n");
    if (sys.n == 0) throw SystemFileError(n_line->number, n_line->value_column, "n must be at least 1");

    std::map<std::size_t, Poly> fmap;
    std::map<std::size_t, const RawLine*> gmap;
    auto once = [](auto& slot, const RawLine& l, const std::string& key) {
        if (slot) throw SystemFileError(l.number, 1, "duplicate '" + key + "'");
    };
    for (const auto& l : lines) {
        const std::string& k = l.key;
        if (k == "n") continue;
        if (auto i = detail::indexed(k, 'f')) {
            if (*i == 0) throw SystemFileError(l.number, 1, "generators are numbered from f1");
            if (fmap.count(*i)) throw SystemFileError(l.number, 1, "duplicate '" + k + "'");
            fmap.emplace(*i, detail::expression(l, sys.n));
        } else if (auto g = detail::indexed(k, 'G')) {
            if (*g == 0) throw SystemFileError(l.number, 1, "lifts are numbered from G1");
            if (gmap.count(*g)) throw SystemFileError(l.number, 1, "duplicate '" + k + "'");
            gmap.emplace(*g, &l);
        } else if (k == "order") {
            once(sys.order, l, k);
            sys.order = detail::parse_count(l, k);
        } else if (k == "level") {
            once(sys.level, l, k);
            sys.level = detail::parse_count(l, k);
        } else if (k == "degree-bound") {
            once(sys.degree_bound, l, k);
            sys.degree_bound = static_cast<int>(detail::parse_count(l, k));
        } else if (k.rfind("degree-bound[", 0) == 0 && k.back() == ']') {
            RawLine inner = l;
            inner.value = k.substr(13, k.size() - 14);
            const std::size_t level = detail::parse_count(inner, "per-level bound index");
            if (sys.level_bounds.count(level)) throw SystemFileError(l.number, 1, "duplicate '" + k + "'");
            sys.level_bounds[level] = static_cast<int>(detail::parse_count(l, k));
        } else if (k == "homogeneous") {
            once(sys.homogeneous, l, k);
            if (l.value != "true" && l.value != "false")
                throw SystemFileError(l.number, l.value_column, "homogeneous must be true or false");
            sys.homogeneous = l.value == "true";
        } else if (k.rfind("form ", 0) == 0) {
            auto [slots, sign] = detail::form_slots(l, detail::trim(k.substr(5)), sys.n);
            Poly c = detail::expression(l, sys.n);
            sys.form.push_back({std::move(slots), sign > 0 ? c : -c});
        } else if (k == "shear q" || k == "shear p") {
            const auto kind = k.back() == 'q' ? ShearStep::Kind::position : ShearStep::Kind::momentum;
            sys.shears.push_back({kind, detail::expression(l, sys.n)});
        } else {
            throw SystemFileError(l.number, 1, "unknown key '" + k + "'");
        }
    }

    std::size_t expect = 1;
    for (auto& [i, f] : fmap) {
        if (i != expect) throw SystemFileError(1, 1, "generators must be f1..fk without gaps; missing f" + std::to_string(expect));
        sys.fs.push_back(std::move(f));
        ++expect;
    }
    if (sys.homogeneous.value_or(false))
        for (std::size_t i = 0; i < sys.fs.size(); ++i)
            if (sys.fs[i].is_zero() || !sys.fs[i].is_homogeneous())
                throw SystemFileError(1, 1, "homogeneous = true but f" + std::to_string(i + 1) + " is not homogeneous");

    if (!gmap.empty()) {
        if (gmap.size() != sys.fs.size() || gmap.rbegin()->first != sys.fs.size())
            throw SystemFileError(gmap.begin()->second->number, 1, "lift lines must give G1..Gk for every generator");
        const std::size_t level = sys.level.value_or(0);
        for (const auto& [i, l] : gmap) sys.lifts.push_back(detail::series_expression(*l, sys.n, level + 1));
    }
    return sys;
}

/// Canonical text of a parsed system; the input digest is taken over this.
inline std::string canonical_text(const SystemFile& s) {
    std::ostringstream out;
    out << "n = " << s.n << "\n";
    for (std::size_t i = 0; i < s.fs.size(); ++i) out << "f" << i + 1 << " = " << format(s.fs[i]) << "\n";
    if (s.order) out << "order = " << *s.order << "\n";
    if (s.level) out << "level = " << *s.level << "\n";
    if (s.degree_bound) out << "degree-bound = " << *s.degree_bound << "\n";
    for (const auto& [l, d] : s.level_bounds) out << "degree-bound[" << l << "] = " << d << "\n";
    if (s.homogeneous) out << "homogeneous = " << (*s.homogeneous ? "true" : "false") << "\n";
    for (std::size_t i = 0; i < s.lifts.size(); ++i) {
        out << "G" << i + 1 << " = ";
        bool first = true;
        for (std::size_t k = 0; k <= s.lifts[i].order(); ++k) {
            if (s.lifts[i][k].is_zero()) continue;
            out << (first ? "" : " + ") << "h^" << k << "*(" << format(s.lifts[i][k]) << ")";
            first = false;
        }
        out << (first ? "0" : "") << "\n";
    }
    for (const auto& t : s.form) {
        out << "form ";
        if (t.slots.empty()) out << "1";
        for (std::size_t i = 0; i < t.slots.size(); ++i)
            out << (i ? "^d" : "d") << Var::from_slot(t.slots[i], s.n).name();
        out << " = " << format(t.coefficient) << "\n";
    }
    for (const auto& st : s.shears)
        out << "shear " << (st.kind == ShearStep::Kind::position ? "q" : "p") << " = " << format(st.generator) << "\n";
    return out.str();
}

}  // namespace qlift::cli
