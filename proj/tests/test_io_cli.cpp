#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "semifrenet/cli.hpp"
#include "semifrenet/io.hpp"

using namespace semifrenet;
namespace fs = std::filesystem;

TEST_CASE("input parsing: happy path") {
    std::istringstream in(
        "# a timelike helix\n"
        "[curve]\n"
        "space = E1_3\n"
        "c1 = 2*sinh(s)\n"
        "c2 = 2*cosh(s)   # component expressions use the symbol s\n"
        "c3 = sqrt(3)*s\n"
        "domain = 0 2\n"
        "\n"
        "[scan]\n"
        "alpha_min = -1\n"
        "alpha_max = 1\n"
        "alpha_step = 0.5\n");
    auto f = parse_input(in);
    REQUIRE(f.curve.has_value());
    CHECK(f.curve->metric == E1_3);
    CHECK(f.curve->dom_lo == 0.0);
    CHECK(f.curve->dom_hi == 2.0);
    CHECK(f.curve->components.size() == 3);
    REQUIRE(f.scan.has_value());
    CHECK(f.scan->alphas() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    CHECK(!f.prescription.has_value());

    std::istringstream in2(
        "[curvatures]\n"
        "space = E2_4\n"
        "k1 = 1\nk2 = 3\nk3 = 1\n"
        "interval = 0 2\n");
    auto g = parse_input(in2);
    REQUIRE(g.prescription.has_value());
    CHECK(g.prescription->metric == E2_4);
    CHECK(g.prescription->curvatures.size() == 3);
    CHECK(g.prescription->s_hi == 2.0);
}

TEST_CASE("input parsing: diagnostics carry the line number") {
    auto expect_fail_at = [](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            parse_input(in, "job.ini");
            FAIL("expected a parse error for: " << text);
        } catch (const parse_error& pe) {
            CHECK(pe.offset() == line);
            CHECK(std::string(pe.what()).find("job.ini") != std::string::npos);
        }
    };
    expect_fail_at("[curve]\nspace = E1_2\nnonsense\n", 3);
    expect_fail_at("[orbit]\n", 1);
    expect_fail_at("key = 1\n", 1);
    expect_fail_at("[curve]\nspace = E9_9\n", 2);
    expect_fail_at("[curve]\nspace = E1_2\nspace = E1_3\n", 3);
    expect_fail_at("[curve]\nspace = E1_2\ndomain = 0 1 2\n", 3);
    expect_fail_at("[curve]\nspace = E1_2\ndomain = 0 1\nc1 = 2s\nc2 = s\n", 4);

    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(parse_input(empty), parse_error);
    std::istringstream missing("[curve]\nspace = E1_2\n");
    CHECK_THROWS_AS(parse_input(missing), parse_error); // no domain
}

TEST_CASE("default scan range") {
    ScanRange r;
    auto a = r.alphas();
    REQUIRE(a.size() == 17);
    CHECK(a.front() == -2.0);
    CHECK(a.back() == 2.0);
    CHECK(a[8] == 0.0); // exactly, for the alpha = 0 row
    r.alpha_step = -1.0;
    CHECK_THROWS_AS(r.alphas(), argument_error);
}

TEST_CASE("real formatting round-trips") {
    for (double x : {0.0, 1.0, -3.75, 1.0 / 3.0, 2.0124611797498106,
                     1e-300, -6.25e17}) {
        CHECK(std::stod(format_real(x)) == x);
    }
}

TEST_CASE("csv emitters") {
    auto helix = make_analytic_curve(
        E1_3, {"2*sinh(s)", "2*cosh(s)", "sqrt(3)*s"}, 0.0, 1.0);
    auto app = frenet_apparatus(helix, uniform_grid(0.1, 0.9, 8));
    std::ostringstream os;
    emit_apparatus_csv(os, app);
    std::istringstream lines(os.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "s,t[0],t[1],t[2],n1[0],n1[1],n1[2],n2[0],n2[1],n2[2],k1,k2");
    std::size_t rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 8);

    CurveSpec tab;
    tab.metric = E1_2;
    tab.params = uniform_grid(0.0, 1.0, 6);
    for (double s : tab.params) tab.points.push_back(Vec{s, 2 * s});
    std::ostringstream cs;
    emit_curve_csv(cs, tab);
    CHECK(cs.str().substr(0, cs.str().find('\n')) == "s,c[0],c[1]");
    CHECK_THROWS_AS(emit_curve_csv(cs, helix), argument_error);

    std::ostringstream ss;
    emit_scan_csv(ss, {{0.5, 0.75, true}, {1.0, 1.34, false}});
    CHECK(ss.str() ==
          "alpha,obstruction,feasible\n0.5,0.75,1\n1,1.3400000000000001,0\n");
}

TEST_CASE("json report schemas") {
    BertrandCertificate c;
    c.accepted = true;
    c.reason = "";
    auto j = certificate_json(c);
    const char* ckeys[] = {"accepted",     "alpha",       "beta",
                           "gamma",        "delta",       "epsilon",
                           "residual_i",   "residual_ii", "residual_iii",
                           "residual_iv",  "iv_value",    "sqrt_margin",
                           "family_flag",  "reason"};
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) CHECK(it.key() == ckeys[i]);
    CHECK(i == 14);

    VerificationReport r;
    auto v = verification_json(r);
    const char* vkeys[] = {"plane_residual", "kbar1_dev", "kbar2_dev",
                           "kbar3_dev",      "tbar_dev",  "nbar2_dev",
                           "rot_constancy",  "rot_identity"};
    i = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++i) CHECK(it.key() == vkeys[i]);
    CHECK(i == 8);
}

// ---------------------------------------------------------------------------
// end-to-end runs of the installed binary

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out; // stdout + stderr
};

std::string bin_path() {
    const char* p = std::getenv("SEMIFRENET_BIN");
    REQUIRE_MESSAGE(p != nullptr, "SEMIFRENET_BIN must point at the binary");
    return p;
}

fs::path temp_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "semifrenet_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    fs::path p = temp_dir() / name;
    std::ofstream(p) << text;
    return p;
}

RunResult run_cli(const std::string& args) {
    fs::path log = temp_dir() / "run.log";
    std::string cmd = bin_path() + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream os;
    os << in.rdbuf();
    r.out = os.str();
    return r;
}

const char* helix_ini =
    "[curve]\n"
    "space = E1_3\n"
    "c1 = 2*sinh(s)\nc2 = 2*cosh(s)\nc3 = sqrt(3)*s\n"
    "domain = 0 2\n";

const char* const131_ini =
    "[curvatures]\n"
    "space = E2_4\n"
    "k1 = 1\nk2 = 3\nk3 = 1\n"
    "interval = 0 2\n";

} // namespace

TEST_CASE("cli: classify") {
    auto in = write_file("planar4.ini",
                         "[curve]\n"
                         "space = E2_4\n"
                         "c1 = sinh(s)\nc2 = 0\nc3 = cosh(s)\nc4 = 0\n"
                         "domain = 0 1\n");
    auto r = run_cli("classify --input " + in.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"character\": \"timelike\"") != std::string::npos);
    CHECK(r.out.find("speed_min") != std::string::npos);
}

TEST_CASE("cli: frenet is deterministic and produces the csv schema") {
    auto in = write_file("helix.ini", helix_ini);
    auto out1 = temp_dir() / "app1.csv";
    auto out2 = temp_dir() / "app2.csv";
    auto r1 = run_cli("frenet --input " + in.string() + " --grid 64 --output " +
                      out1.string());
    auto r2 = run_cli("frenet --input " + in.string() + " --grid 64 --output " +
                      out2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);

    std::ifstream f1(out1), f2(out2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str()); // byte-identical reruns
    std::string header;
    std::getline(s1, header);
    CHECK(header ==
          "s,t[0],t[1],t[2],n1[0],n1[1],n1[2],n2[0],n2[1],n2[2],k1,k2");
    std::size_t rows = 0;
    for (std::string l; std::getline(s1, l);) ++rows;
    CHECK(rows == 64);
}

TEST_CASE("cli: synth emits the sampled curve") {
    auto in = write_file("const131.ini", const131_ini);
    auto r = run_cli("synth --input " + in.string() + " --step 0.01");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "s,c[0],c[1],c[2],c[3]");
    std::size_t rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 201);
}

TEST_CASE("cli: fit-classical on the helix") {
    auto in = write_file("helix.ini", helix_ini);
    auto r = run_cli("fit-classical --input " + in.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"accepted\": true") != std::string::npos);
    CHECK(r.out.find("\"a\": 0.2857142857") != std::string::npos);
}

TEST_CASE("cli: scan-classical sweep") {
    auto in = write_file("scan131.ini",
                         std::string(const131_ini) +
                             "\n[scan]\nalpha_min = -2\nalpha_max = 2\n"
                             "alpha_step = 0.25\n");
    auto r = run_cli("scan-classical --input " + in.string());
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "alpha,obstruction,feasible");
    std::size_t rows = 0;
    bool zero_row = false;
    for (std::string l; std::getline(lines, l);) {
        ++rows;
        if (l.rfind("0,0,", 0) == 0) zero_row = true;
    }
    CHECK(rows == 17);
    CHECK(zero_row);
}

TEST_CASE("cli: bertrand-check accepts (1,3,1) with a hint") {
    auto in = write_file("const131.ini", const131_ini);
    auto r = run_cli("bertrand-check --input " + in.string() +
                     " --gamma-hint 1.5 --step 0.01");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"accepted\": true") != std::string::npos);
    CHECK(r.out.find("\"iv_value\": -3.75") != std::string::npos);

    // without the hint the family is underdetermined: mathematical rejection
    auto r2 = run_cli("bertrand-check --input " + in.string() + " --step 0.01");
    CHECK(r2.exit_code == 2);
    CHECK(r2.out.find("gamma_hint") != std::string::npos);
}

TEST_CASE("cli: bertrand-check rejects a non-bertrand prescription") {
    auto in = write_file("nonbertrand.ini",
                         "[curvatures]\n"
                         "space = E2_4\n"
                         "k1 = 1\nk2 = s\nk3 = 1\n"
                         "interval = 0.5 2.5\n");
    auto r = run_cli("bertrand-check --input " + in.string() +
                     " --gamma-hint 1.5 --step 0.01");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("condition iii") != std::string::npos);
}

TEST_CASE("cli: bertrand-verify produces the report") {
    auto in = write_file("const131.ini", const131_ini);
    auto r = run_cli("bertrand-verify --input " + in.string() +
                     " --gamma-hint 1.5");
    CHECK(r.exit_code == 0);
    for (const char* key :
         {"plane_residual", "kbar1_dev", "kbar2_dev", "kbar3_dev", "tbar_dev",
          "nbar2_dev", "rot_constancy", "rot_identity"})
        CHECK(r.out.find(key) != std::string::npos);
}

TEST_CASE("cli: input problems exit with 1 and a located message") {
    auto bad = write_file("bad.ini",
                          "[curve]\n"
                          "space = E1_3\n"
                          "c1 = 2*sinh(s)\nc2 = 2*cosh(s\nc3 = s\n"
                          "domain = 0 2\n");
    auto r = run_cli("frenet --input " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("bad.ini:4") != std::string::npos);

    CHECK(run_cli("frobnicate --input " + bad.string()).exit_code == 1);
    CHECK(run_cli("frenet").exit_code == 1); // missing --input
    auto ok = write_file("helix.ini", helix_ini);
    CHECK(run_cli("frenet --input " + ok.string() + " --grid 8").exit_code == 1);
    CHECK(run_cli("frenet --input " + temp_dir().string() + "/absent.ini")
              .exit_code == 1);
}

TEST_CASE("cli: causal rejection exits with 2") {
    auto in = write_file("spacelike.ini",
                         "[curve]\n"
                         "space = E1_2\n"
                         "c1 = cosh(s)\nc2 = sinh(s)\n"
                         "domain = 0 1\n");
    CHECK(run_cli("frenet --input " + in.string()).exit_code == 2);
}
