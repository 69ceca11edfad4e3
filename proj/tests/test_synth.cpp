#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "semifrenet/synth.hpp"

using namespace semifrenet;

namespace {

const double SQ3 = std::sqrt(3.0);

CurvaturePrescription helix_prescription(double lo, double hi) {
    // realizes the helix (2 sinh s, 2 cosh s, sqrt(3) s) exactly
    auto p = make_prescription(E1_3, {"2", "-sqrt(3)"}, lo, hi);
    p.initial_point = Vec{0.0, 2.0, 0.0};
    p.initial_frame = {Vec{2.0, 0.0, SQ3}, Vec{0.0, 1.0, 0.0},
                       Vec{SQ3, 0.0, 2.0}};
    return p;
}

Vec helix_point(double s) {
    return Vec{2.0 * std::sinh(s), 2.0 * std::cosh(s), SQ3 * s};
}

} // namespace

TEST_CASE("constant curvatures (1,3,1) synthesize with orthonormal frames") {
    auto p = make_prescription(E2_4, {"1", "3", "1"}, 0.0, 2.0);
    auto res = synthesize_traced(p, 1e-3);
    REQUIRE(res.curve.params.size() == 2001);
    CHECK(res.max_gram_drift < 1e-9);
    auto signs = frenet_frame_signs(E2_4);
    for (const auto& fr : res.apparatus.frames)
        CHECK(gram_residual(fr, signs, E2_4) < 1e-9);

    // unit speed straight from the samples
    const double h = 1e-3;
    for (std::size_t j = 2; j + 2 < res.curve.params.size(); j += 97) {
        Vec v(4);
        for (int k = 0; k < 4; ++k)
            v[k] = (res.curve.points[j - 2][k] - 8.0 * res.curve.points[j - 1][k] +
                    8.0 * res.curve.points[j + 1][k] - res.curve.points[j + 2][k]) /
                   (12.0 * h);
        CHECK(std::fabs(inner(v, v, E2_4) + 1.0) < 1e-9);
    }
}

TEST_CASE("round trip: synthesized (1,3,1) is recognized by the apparatus") {
    auto p = make_prescription(E2_4, {"1", "3", "1"}, 0.0, 2.0);
    auto curve = synthesize(p, 1e-3);
    // evaluation stays clear of the boundary, where one-sided fit windows
    // degrade the estimates
    auto app = frenet_apparatus(curve, uniform_grid(0.15, 1.85, 64));
    for (std::size_t j = 0; j < app.size(); ++j) {
        CHECK(std::fabs(app.k1[j] - 1.0) < 1e-6);
        CHECK(std::fabs(app.k2[j] - 3.0) < 1e-6);
        CHECK(std::fabs(app.k3[j] - 1.0) < 1e-6);
    }
}

TEST_CASE("round trip with non-constant curvatures in three dimensions") {
    auto p = make_prescription(E1_3, {"2 + sin(s)", "1 + s/2"}, 0.0, 2.0);
    auto curve = synthesize(p, 1e-3);
    auto app = frenet_apparatus(curve, uniform_grid(0.15, 1.85, 48));
    for (std::size_t j = 0; j < app.size(); ++j) {
        double s = app.grid[j];
        CHECK(std::fabs(app.k1[j] - (2.0 + std::sin(s))) < 1e-7);
        CHECK(std::fabs(app.k2[j] - (1.0 + 0.5 * s)) < 5e-7);
    }
}

TEST_CASE("prescribed initial data reproduces the helix exactly") {
    auto res = synthesize_traced(helix_prescription(0.0, 2.0), 1e-3);
    for (std::size_t j = 0; j < res.curve.params.size(); j += 53) {
        Vec want = helix_point(res.curve.params[j]);
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(res.curve.points[j][k] - want[k]) < 1e-9);
    }
}

TEST_CASE("recorded frames satisfy the frenet system") {
    auto p = make_prescription(E2_4, {"1", "3", "1"}, 0.0, 1.0);
    auto res = synthesize_traced(p, 1e-3);
    const auto& app = res.apparatus;
    const double h = 1e-3;
    for (std::size_t j = 2; j + 2 < app.size(); j += 41) {
        auto K = frenet_matrix(E2_4, app.k1[j], app.k2[j], app.k3[j]);
        for (int r = 0; r < 4; ++r)
            for (int k = 0; k < 4; ++k) {
                double fd = (app.frames[j - 2][r][k] -
                             8.0 * app.frames[j - 1][r][k] +
                             8.0 * app.frames[j + 1][r][k] -
                             app.frames[j + 2][r][k]) /
                            (12.0 * h);
                double model = 0.0;
                for (int q = 0; q < 4; ++q)
                    model += K[r][q] * app.frames[j][q][k];
                CHECK(std::fabs(fd - model) < 1e-5);
            }
    }
}

TEST_CASE("the integrator converges at fourth order") {
    // against the closed-form helix endpoint; the steps are large enough to
    // keep truncation well above roundoff
    Vec exact = helix_point(2.0);
    auto err = [&](double step) {
        auto res = synthesize_traced(helix_prescription(0.0, 2.0), step);
        double e = 0.0;
        for (int k = 0; k < 3; ++k)
            e = std::max(e, std::fabs(res.curve.points.back()[k] - exact[k]));
        return e;
    };
    double e1 = err(2e-2), e2 = err(1e-2);
    CHECK(e1 > 1e-12); // not yet in the roundoff floor
    CHECK(e1 / e2 > 8.0);
    CHECK(e1 / e2 < 32.0);
}

TEST_CASE("too large a step is rejected, not silently accepted") {
    auto p = make_prescription(E1_2, {"20"}, 0.0, 0.5);
    CHECK_THROWS_AS(synthesize(p, 5e-2), step_size_error);
    CHECK_NOTHROW(synthesize(p, 1e-4));
}

TEST_CASE("prescription validation") {
    CHECK_THROWS_AS(make_prescription(E1_2, {"-1"}, 0.0, 1.0),
                    degenerate_flag_error);
    CHECK_THROWS_AS(make_prescription(E1_2, {"s - 0.5"}, 0.0, 1.0),
                    degenerate_flag_error); // k1 <= 0 near the left end
    CHECK_THROWS_AS(make_prescription(E1_3, {"1", "s - 0.5"}, 0.0, 1.0),
                    degenerate_flag_error); // k2 crosses zero
    CHECK_THROWS_AS(make_prescription(E2_4, {"1", "-3", "1"}, 0.0, 1.0),
                    degenerate_flag_error); // k2 must be positive here
    CHECK_THROWS_AS(make_prescription(E2_4, {"1", "3", "s - 0.5"}, 0.0, 1.0),
                    degenerate_flag_error); // k3 vanishes
    CHECK_THROWS_AS(make_prescription(E1_3, {"1"}, 0.0, 1.0), argument_error);
    CHECK_THROWS_AS(make_prescription(E1_2, {"1"}, 1.0, 1.0), argument_error);

    auto p = make_prescription(E1_2, {"1"}, 0.0, 1.0);
    CHECK_THROWS_AS(synthesize(p, 0.0), argument_error);
    p.initial_frame = {Vec{1.0, 0.5}, Vec{0.0, 1.0}}; // not pseudo-orthonormal
    CHECK_THROWS_AS(synthesize(p, 1e-3), argument_error);
}
