#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "semifrenet/io.hpp"

namespace semifrenet {

struct JobConfig {
    std::string command;
    std::string input_path;
    std::string output_path; // empty: stdout
    std::size_t grid_size = 512;
    double step = 1e-3;
    double tol_eq = 1e-8;
    double tol_margin = 1e-6;
    std::optional<double> gamma_hint;

    void validate() const {
        static const char* known[] = {"classify",      "frenet",
                                      "synth",         "fit-classical",
                                      "scan-classical", "bertrand-check",
                                      "bertrand-mate", "bertrand-verify"};
        bool ok = false;
        for (const char* k : known) ok = ok || command == k;
        if (!ok) throw argument_error("unknown command: " + command);
        if (grid_size < 16) throw argument_error("grid size must be >= 16");
        if (!(step > 0.0)) throw argument_error("step must be positive");
        if (!(tol_eq > 0.0) || !(tol_margin > 0.0))
            throw argument_error("tolerances must be positive");
        if (input_path.empty()) throw argument_error("missing --input");
    }
};

namespace detail {

inline void write_report(const JobConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output_path);
    if (!out) throw argument_error("cannot write output file: " + cfg.output_path);
    out << text;
    if (!out) throw argument_error("write failed: " + cfg.output_path);
}

/// Apparatus for the configured job: synthesized from a prescription when
/// present (trace frames, exact by construction), otherwise computed from
/// the curve on a uniform grid.
inline FrenetApparatus job_apparatus(const JobConfig& cfg, const InputFile& in) {
    if (in.prescription) {
        auto res = synthesize_traced(*in.prescription, cfg.step);
        return std::move(res.apparatus);
    }
    return frenet_apparatus(*in.curve, cfg.grid_size);
}

inline int run_checked(const JobConfig& cfg) {
    cfg.validate();
    InputFile in = parse_input_file(cfg.input_path);
    CertificateTolerances tols{cfg.tol_eq, cfg.tol_margin};

    if (cfg.command == "classify") {
        if (!in.curve) throw argument_error("classify needs a [curve] section");
        const CurveSpec& c = *in.curve;
        auto grid = uniform_grid(c.param_lo(), c.param_hi(), 129);
        std::string kind;
        double lo_speed = 0.0, hi_speed = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto [speed, ch] = speed_and_character(c, grid[i]);
            if (i == 0) {
                kind = to_string(ch);
                lo_speed = hi_speed = speed;
            } else {
                if (kind != to_string(ch)) kind = "mixed";
                lo_speed = std::min(lo_speed, speed);
                hi_speed = std::max(hi_speed, speed);
            }
        }
        nlohmann::ordered_json j;
        j["character"] = kind;
        j["speed_min"] = lo_speed;
        j["speed_max"] = hi_speed;
        write_report(cfg, j.dump(2) + "\n");
        return 0;
    }

    if (cfg.command == "frenet") {
        if (!in.curve) throw argument_error("frenet needs a [curve] section");
        FrenetApparatus app = frenet_apparatus(*in.curve, cfg.grid_size);
        std::ostringstream os;
        emit_apparatus_csv(os, app);
        write_report(cfg, os.str());
        return 0;
    }

    if (cfg.command == "synth") {
        if (!in.prescription)
            throw argument_error("synth needs a [curvatures] section");
        CurveSpec c = synthesize(*in.prescription, cfg.step);
        std::ostringstream os;
        emit_curve_csv(os, c);
        write_report(cfg, os.str());
        return 0;
    }

    if (cfg.command == "fit-classical") {
        FrenetApparatus app = job_apparatus(cfg, in);
        auto fit = fit_classical_relation(app);
        nlohmann::ordered_json j;
        j["accepted"] = fit.has_value();
        if (fit) {
            j["a"] = fit->a;
            j["b"] = fit->b;
            j["residual"] = fit->residual;
        }
        write_report(cfg, j.dump(2) + "\n");
        return fit ? 0 : 2;
    }

    if (cfg.command == "scan-classical") {
        ScanRange range = in.scan.value_or(ScanRange{});
        FrenetApparatus app;
        if (in.prescription) {
            // the obstruction uses only the curvature values
            const auto& p = *in.prescription;
            p.validate();
            app.metric = p.metric;
            app.grid = uniform_grid(p.s_lo, p.s_hi, cfg.grid_size);
            for (double s : app.grid) {
                app.k1.push_back(p.k(0, s));
                app.k2.push_back(p.k(1, s));
                app.k3.push_back(p.k(2, s));
            }
        } else {
            app = frenet_apparatus(*in.curve, cfg.grid_size);
        }
        auto table = classical_obstruction_scan(app, range.alphas());
        std::ostringstream os;
        emit_scan_csv(os, table);
        write_report(cfg, os.str());
        return 0;
    }

    if (cfg.command == "bertrand-check") {
        FrenetApparatus app = job_apparatus(cfg, in);
        BertrandCertificate cert = estimate_13_constants(app, cfg.gamma_hint, tols);
        write_report(cfg, certificate_json(cert).dump(2) + "\n");
        return cert.accepted ? 0 : 2;
    }

    if (cfg.command == "bertrand-mate") {
        FrenetApparatus app = job_apparatus(cfg, in);
        BertrandCertificate cert = estimate_13_constants(app, cfg.gamma_hint, tols);
        if (!cert.accepted) {
            write_report(cfg, certificate_json(cert).dump(2) + "\n");
            return 2;
        }
        CurveSpec mate = construct_mate(app, cert);
        std::ostringstream os;
        emit_curve_csv(os, mate);
        write_report(cfg, os.str());
        return 0;
    }

    // bertrand-verify
    FrenetApparatus app = job_apparatus(cfg, in);
    BertrandCertificate cert = estimate_13_constants(app, cfg.gamma_hint, tols);
    if (!cert.accepted) {
        write_report(cfg, certificate_json(cert).dump(2) + "\n");
        return 2;
    }
    CurveSpec mate = construct_mate(app, cert);
    VerificationReport rep = verify_mate(app, mate, cert);
    write_report(cfg, verification_json(rep).dump(2) + "\n");
    return 0;
}

} // namespace detail

/// Run a job. Exit codes: 0 success, 1 input/IO problems, 2 mathematical
/// rejection (failed conditions, degeneracies, causal violations, ...).
inline int run(const JobConfig& cfg) {
    try {
        return detail::run_checked(cfg);
    } catch (const parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const argument_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace semifrenet
