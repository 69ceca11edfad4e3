#include <CLI11.hpp>

#include "semifrenet/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semifrenet: Frenet apparatus and Bertrand-curve toolkit for "
                 "timelike curves in semi-Euclidean spaces"};
    app.require_subcommand(0);

    semifrenet::JobConfig cfg;
    double gamma_hint = 0.0;
    bool has_hint = false;

    app.add_option("command", cfg.command,
                   "one of: classify, frenet, synth, fit-classical, "
                   "scan-classical, bertrand-check, bertrand-mate, bertrand-verify")
        ->required();
    app.add_option("--input", cfg.input_path, "job input file")->required();
    app.add_option("--output", cfg.output_path, "report file (default: stdout)");
    app.add_option("--grid", cfg.grid_size, "grid size (>= 16)");
    app.add_option("--step", cfg.step, "synthesis step size");
    app.add_option("--tol-eq", cfg.tol_eq, "equality-condition tolerance");
    app.add_option("--tol-margin", cfg.tol_margin, "strict-inequality margin");
    auto* hint = app.add_option("--gamma-hint", gamma_hint,
                                "pins gamma for constant-curvature families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }
    has_hint = hint->count() > 0;
    if (has_hint) cfg.gamma_hint = gamma_hint;

    return semifrenet::run(cfg);
}
