#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semifrenet/bertrand.hpp"
#include "semifrenet/curve.hpp"
#include "semifrenet/errors.hpp"
#include "semifrenet/frenet.hpp"
#include "semifrenet/synth.hpp"

namespace semifrenet {

/// Alpha sweep description for the obstruction scan.
struct ScanRange {
    double alpha_min = -2.0, alpha_max = 2.0, alpha_step = 0.25;

    std::vector<double> alphas() const {
        if (!(alpha_step > 0.0) || !(alpha_max >= alpha_min))
            throw argument_error("scan: bad alpha range");
        std::vector<double> out;
        for (double a = alpha_min; a <= alpha_max + 1e-12 * alpha_step;
             a += alpha_step)
            out.push_back(std::fabs(a) < 1e-15 ? 0.0 : a);
        return out;
    }
};

/// Parsed job input: an analytic curve, a curvature prescription, or both.
struct InputFile {
    std::optional<CurveSpec> curve;
    std::optional<CurvaturePrescription> prescription;
    std::optional<ScanRange> scan;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] inline void input_fail(const std::string& where, int line,
                                    const std::string& msg) {
    throw parse_error(where + ":" + std::to_string(line) + ": " + msg,
                      static_cast<std::size_t>(line));
}

inline SemiMetric parse_space_tag(const std::string& tag, const std::string& where,
                                  int line) {
    if (tag == "E1_2") return E1_2;
    if (tag == "E1_3") return E1_3;
    if (tag == "E2_4") return E2_4;
    input_fail(where, line, "unknown space tag '" + tag + "' (want E1_2, E1_3, E2_4)");
}

inline std::pair<double, double> parse_two_reals(const std::string& v,
                                                 const std::string& where, int line) {
    std::istringstream in(v);
    double a, b;
    if (!(in >> a >> b)) input_fail(where, line, "expected two reals, got '" + v + "'");
    std::string rest;
    if (in >> rest) input_fail(where, line, "trailing content '" + rest + "'");
    return {a, b};
}

} // namespace detail

/// Parse the structured key/value job format:
///   [curve]      space, c1..c4 (expressions), domain = lo hi
///   [curvatures] space, k1..k3 (expressions), interval = lo hi
///   [scan]       alpha_min, alpha_max, alpha_step
/// '#' starts a comment. Diagnostics carry file name and line number.
inline InputFile parse_input(std::istream& in, const std::string& name = "<input>") {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                detail::input_fail(name, lineno, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "curve" && section != "curvatures" && section != "scan")
                detail::input_fail(name, lineno, "unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            detail::input_fail(name, lineno, "expected 'key = value'");
        if (section.empty())
            detail::input_fail(name, lineno, "key outside any section");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            detail::input_fail(name, lineno, "empty key or value");
        if (sections[section].count(key))
            detail::input_fail(name, lineno, "duplicate key '" + key + "'");
        sections[section][key] = {val, lineno};
    }

    auto parse_component = [&](const std::map<std::string, Entry>& sec,
                               const std::string& key) {
        const auto& e = sec.at(key);
        try {
            return parse_expr(e.value);
        } catch (const parse_error& pe) {
            detail::input_fail(name, e.line,
                               std::string("in '") + key + "': " + pe.what());
        }
    };

    InputFile out;
    if (sections.count("curve")) {
        const auto& sec = sections.at("curve");
        if (!sec.count("space"))
            throw parse_error(name + ": [curve] missing 'space'", 0);
        SemiMetric m = detail::parse_space_tag(sec.at("space").value, name,
                                               sec.at("space").line);
        if (!sec.count("domain"))
            throw parse_error(name + ": [curve] missing 'domain'", 0);
        auto [lo, hi] = detail::parse_two_reals(sec.at("domain").value, name,
                                                sec.at("domain").line);
        CurveSpec c;
        c.metric = m;
        c.dom_lo = lo;
        c.dom_hi = hi;
        for (int i = 1; i <= m.dimension; ++i) {
            std::string key = "c" + std::to_string(i);
            if (!sec.count(key))
                throw parse_error(name + ": [curve] missing '" + key + "'", 0);
            c.components.push_back(parse_component(sec, key));
        }
        c.validate();
        out.curve = std::move(c);
    }
    if (sections.count("curvatures")) {
        const auto& sec = sections.at("curvatures");
        if (!sec.count("space"))
            throw parse_error(name + ": [curvatures] missing 'space'", 0);
        SemiMetric m = detail::parse_space_tag(sec.at("space").value, name,
                                               sec.at("space").line);
        if (!sec.count("interval"))
            throw parse_error(name + ": [curvatures] missing 'interval'", 0);
        auto [lo, hi] = detail::parse_two_reals(sec.at("interval").value, name,
                                                sec.at("interval").line);
        CurvaturePrescription p;
        p.metric = m;
        p.s_lo = lo;
        p.s_hi = hi;
        for (int i = 1; i < m.dimension; ++i) {
            std::string key = "k" + std::to_string(i);
            if (!sec.count(key))
                throw parse_error(name + ": [curvatures] missing '" + key + "'", 0);
            p.curvatures.push_back(parse_component(sec, key));
        }
        out.prescription = std::move(p);
    }
    if (sections.count("scan")) {
        const auto& sec = sections.at("scan");
        ScanRange r;
        auto get = [&](const char* key, double& target) {
            if (!sec.count(key)) return;
            const auto& e = sec.at(key);
            try {
                target = std::stod(e.value);
            } catch (...) {
                detail::input_fail(name, e.line, std::string("bad number for ") + key);
            }
        };
        get("alpha_min", r.alpha_min);
        get("alpha_max", r.alpha_max);
        get("alpha_step", r.alpha_step);
        out.scan = r;
    }
    if (!out.curve && !out.prescription)
        throw parse_error(name + ": no [curve] or [curvatures] section", 0);
    return out;
}

inline InputFile parse_input_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open input file: " + path);
    return parse_input(in, path);
}

/// 17-significant-digit formatting used by every report (round-trip exact).
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void emit_apparatus_csv(std::ostream& os, const FrenetApparatus& app) {
    const int d = app.metric.dimension;
    static const char* names[4] = {"t", "n1", "n2", "n3"};
    os << "s";
    for (int e = 0; e < d; ++e)
        for (int i = 0; i < d; ++i) os << "," << names[e] << "[" << i << "]";
    os << ",k1";
    if (d >= 3) os << ",k2";
    if (d >= 4) os << ",k3";
    os << "\n";
    for (std::size_t j = 0; j < app.size(); ++j) {
        os << format_real(app.grid[j]);
        for (int e = 0; e < d; ++e)
            for (int i = 0; i < d; ++i) os << "," << format_real(app.frames[j][e][i]);
        os << "," << format_real(app.k1[j]);
        if (d >= 3) os << "," << format_real(app.k2[j]);
        if (d >= 4) os << "," << format_real(app.k3[j]);
        os << "\n";
    }
}

inline void emit_curve_csv(std::ostream& os, const CurveSpec& c) {
    if (c.analytic()) throw argument_error("emit_curve_csv: expects a sampled curve");
    const int d = c.metric.dimension;
    os << "s";
    for (int i = 0; i < d; ++i) os << ",c[" << i << "]";
    os << "\n";
    for (std::size_t j = 0; j < c.params.size(); ++j) {
        os << format_real(c.params[j]);
        for (int i = 0; i < d; ++i) os << "," << format_real(c.points[j][i]);
        os << "\n";
    }
}

inline void emit_scan_csv(std::ostream& os,
                          const std::vector<ObstructionEntry>& table) {
    os << "alpha,obstruction,feasible\n";
    for (const auto& e : table)
        os << format_real(e.alpha) << "," << format_real(e.value) << ","
           << (e.feasible ? 1 : 0) << "\n";
}

inline nlohmann::ordered_json certificate_json(const BertrandCertificate& c) {
    nlohmann::ordered_json j;
    j["accepted"] = c.accepted;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["delta"] = c.delta;
    j["epsilon"] = c.epsilon;
    j["residual_i"] = c.residual_i;
    j["residual_ii"] = c.residual_ii;
    j["residual_iii"] = c.residual_iii;
    j["residual_iv"] = c.residual_iv;
    j["iv_value"] = c.iv_value;
    j["sqrt_margin"] = c.sqrt_margin;
    j["family_flag"] = c.family_flag;
    j["reason"] = c.reason;
    return j;
}

inline nlohmann::ordered_json verification_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["plane_residual"] = r.plane_residual;
    j["kbar1_dev"] = r.kbar1_dev;
    j["kbar2_dev"] = r.kbar2_dev;
    j["kbar3_dev"] = r.kbar3_dev;
    j["tbar_dev"] = r.tbar_dev;
    j["nbar2_dev"] = r.nbar2_dev;
    j["rot_constancy"] = r.rot_constancy;
    j["rot_identity"] = r.rot_identity;
    return j;
}

} // namespace semifrenet
