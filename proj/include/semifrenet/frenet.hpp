#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "semifrenet/curve.hpp"
#include "semifrenet/errors.hpp"
#include "semifrenet/expr.hpp"
#include "semifrenet/jet.hpp"
#include "semifrenet/pseudo_linalg.hpp"

namespace semifrenet {

/// Frame signs of the Frenet convention per dimension:
/// E2_4 -> (-1,-1,+1,+1), E1_3 -> (-1,+1,+1), E1_2 -> (-1,+1).
inline std::vector<double> frenet_frame_signs(const SemiMetric& m) {
    if (m == E2_4) return {-1.0, -1.0, 1.0, 1.0};
    if (m == E1_3) return {-1.0, 1.0, 1.0};
    if (m == E1_2) return {-1.0, 1.0};
    throw argument_error("frenet: unsupported metric signature");
}

/// Curvature matrix of the Frenet system at given curvature values, so that
/// frame' = K * frame (rows ordered t, n1, n2, n3).
inline std::vector<Vec> frenet_matrix(const SemiMetric& m, double k1, double k2,
                                      double k3) {
    if (m == E2_4)
        return {{0, -k1, 0, 0}, {k1, 0, k2, 0}, {0, k2, 0, k3}, {0, 0, -k3, 0}};
    if (m == E1_3) return {{0, k1, 0}, {k1, 0, k2}, {0, -k2, 0}};
    return {{0, k1}, {k1, 0}};
}

/// Frenet data along an arc-length grid.
struct FrenetApparatus {
    SemiMetric metric{4, 2};
    std::vector<double> grid;               // arc length values
    std::vector<Vec> points;                // curve points at grid values
    std::vector<std::vector<Vec>> frames;   // frames[j] = {t, n1, (n2, (n3))}
    std::vector<double> k1, k2, k3;         // k2 absent in dim 2, k3 below dim 4

    std::size_t size() const { return grid.size(); }
};

struct ApparatusOptions {
    int fit_halfwidth = 40;       // sampled mode: window half-width in samples
    int fit_degree = 8;           // sampled mode: local fit degree
    int field_halfwidth = 100;    // sampled mode: half-width for the wide
                                  // first-derivative fit of the n2 field
    double degeneracy_tol = 1e-10;
    double unit_speed_tol = 1e-6; // max |g(c',c') + 1| accepted as unit speed
    std::size_t reparam_samples = 2048;
};

namespace detail {

using J3 = Jet<3>;
using JVec = std::vector<J3>;

inline Vec jv_values(const JVec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value();
    return out;
}

inline JVec jv_derivative(const JVec& v) {
    JVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = jet_derivative(v[i]);
    return out;
}

inline JVec jv_scale(const JVec& v, const J3& c) {
    JVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * c;
    return out;
}

inline JVec jv_axpy(const JVec& v, const J3& c, const JVec& w) {
    // v + c*w
    JVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + c * w[i];
    return out;
}

inline std::vector<Vec> jv_frame_values(const std::vector<JVec>& fr) {
    std::vector<Vec> out;
    out.reserve(fr.size());
    for (const auto& e : fr) out.push_back(jv_values(e));
    return out;
}

struct FramePoint {
    std::vector<Vec> frame;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
};

/// Frame and curvatures at one point from the order-3 jet of dc/ds.
/// Conventions: k1 > 0 always; in dimension 4 also k2 > 0 (t' = -k1 n1 and
/// n1' = k1 t + k2 n2 fix n1 and n2); the last frame vector is the metric
/// complement with total determinant +1.
inline FramePoint frenet_point(const JVec& U, const SemiMetric& m,
                               double degeneracy_tol) {
    const int d = m.dimension;

    J3 q = inner(U, U, m);
    if (q.value() >= 0.0)
        throw non_timelike_error("frenet: tangent is not timelike", 0.0);
    JVec t = jv_scale(U, 1.0 / sqrt(-q));
    JVec tp = jv_derivative(t);

    double tp_scale = euclidean_sq(jv_values(tp));
    J3 q1 = inner(tp, tp, m);
    if (tp_scale < degeneracy_tol || std::fabs(q1.value()) < degeneracy_tol * std::max(tp_scale, 1e-300))
        throw degenerate_flag_error("frenet: degenerate flag at derivative order 2 (k1 vanishes)");

    FramePoint out;

    if (d == 2) {
        JVec n = metric_complement(std::vector<JVec>{t}, m);
        J3 qn = inner(n, n, m);
        n = jv_scale(n, 1.0 / sqrt(qn));
        double k1v = inner(jv_values(tp), jv_values(n), m);
        if (k1v < 0.0) {
            n = jv_scale(n, J3::constant(-1.0));
            k1v = -k1v;
        }
        out.frame = {jv_values(t), jv_values(n)};
        out.k1 = k1v;
        return out;
    }

    if (d == 3) {
        if (q1.value() <= 0.0)
            throw degenerate_flag_error("frenet: t' not spacelike in E1_3");
        J3 k1j = sqrt(q1);
        JVec n1 = jv_scale(tp, 1.0 / k1j);
        JVec n2 = metric_complement(std::vector<JVec>{t, n1}, m);
        n2 = jv_scale(n2, 1.0 / sqrt(inner(n2, n2, m)));
        auto vals = jv_frame_values({t, n1, n2});
        if (frame_det(vals) < 0.0) {
            n2 = jv_scale(n2, J3::constant(-1.0));
            vals[2] = jv_values(n2);
        }
        JVec n1p = jv_derivative(n1);
        out.frame = std::move(vals);
        out.k1 = k1j.value();
        out.k2 = inner(jv_values(n1p), out.frame[2], m);
        return out;
    }

    // dimension 4
    if (q1.value() >= 0.0)
        throw convention_error(
            "frenet: principal normal is not timelike (E2_4 convention requires it)");
    J3 k1j = sqrt(-q1);
    JVec n1 = jv_scale(tp, -1.0 / k1j); // t' = -k1 n1
    JVec n1p = jv_derivative(n1);
    // residual of n1' against span{t, n1}; both carry sign -1
    JVec r = jv_axpy(jv_axpy(n1p, inner(n1p, t, m), t), inner(n1p, n1, m), n1);
    double r_scale = euclidean_sq(jv_values(r));
    J3 q2 = inner(r, r, m);
    if (r_scale < degeneracy_tol || std::fabs(q2.value()) < degeneracy_tol * std::max(r_scale, 1e-300))
        throw degenerate_flag_error("frenet: degenerate flag at derivative order 3 (k2 vanishes)");
    if (q2.value() <= 0.0)
        throw degenerate_flag_error("frenet: first binormal direction not spacelike");
    J3 k2j = sqrt(q2);
    JVec n2 = jv_scale(r, 1.0 / k2j);

    JVec n3 = metric_complement(std::vector<JVec>{t, n1, n2}, m);
    n3 = jv_scale(n3, 1.0 / sqrt(inner(n3, n3, m)));
    auto vals = jv_frame_values({t, n1, n2, n3});
    if (frame_det(vals) < 0.0) {
        n3 = jv_scale(n3, J3::constant(-1.0));
        vals[3] = jv_values(n3);
    }
    JVec n2p = jv_derivative(n2);
    out.frame = std::move(vals);
    out.k1 = k1j.value();
    out.k2 = k2j.value();
    out.k3 = inner(jv_values(n2p), out.frame[3], m);
    return out;
}

/// Least-squares (Savitzky-Golay style) weights: given sample offsets
/// `offsets` (in units of the spacing h, relative to the evaluation point),
/// returns weights so that sum_i w_i f(x0 + offsets[i] h) estimates
/// f^(deriv)(x0). Solved by QR on a normalized Vandermonde in long double.
inline std::vector<double> lsq_derivative_weights(const std::vector<double>& offsets,
                                                  double h, int degree, int deriv) {
    const std::size_t n = offsets.size();
    const std::size_t p = static_cast<std::size_t>(degree) + 1;
    if (n < p) throw argument_error("lsq weights: window smaller than fit degree");
    long double omax = 0.0L;
    for (double o : offsets) omax = std::max(omax, (long double)std::fabs(o));
    if (omax == 0.0L) throw argument_error("lsq weights: zero window");

    // V[i][a] = tau_i^a with tau in [-1,1]
    std::vector<std::vector<long double>> V(n, std::vector<long double>(p));
    for (std::size_t i = 0; i < n; ++i) {
        long double tau = (long double)offsets[i] / omax;
        long double pw = 1.0L;
        for (std::size_t a = 0; a < p; ++a) {
            V[i][a] = pw;
            pw *= tau;
        }
    }
    // Modified Gram-Schmidt QR: V = Q R
    std::vector<std::vector<long double>> Q = V;
    std::vector<std::vector<long double>> R(p, std::vector<long double>(p, 0.0L));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            long double dot = 0.0L;
            for (std::size_t i = 0; i < n; ++i) dot += Q[i][b] * Q[i][a];
            R[b][a] = dot;
            for (std::size_t i = 0; i < n; ++i) Q[i][a] -= dot * Q[i][b];
        }
        long double nrm = 0.0L;
        for (std::size_t i = 0; i < n; ++i) nrm += Q[i][a] * Q[i][a];
        nrm = std::sqrt(nrm);
        if (nrm < 1e-14L) throw argument_error("lsq weights: rank-deficient window");
        R[a][a] = nrm;
        for (std::size_t i = 0; i < n; ++i) Q[i][a] /= nrm;
    }
    // y solves R^T y = e_deriv
    std::vector<long double> y(p, 0.0L);
    for (std::size_t a = 0; a < p; ++a) {
        long double rhs = (a == static_cast<std::size_t>(deriv)) ? 1.0L : 0.0L;
        for (std::size_t b = 0; b < a; ++b) rhs -= R[b][a] * y[b];
        y[a] = rhs / R[a][a];
    }
    long double fact = 1.0L;
    for (int i = 2; i <= deriv; ++i) fact *= i;
    long double scale = fact;
    for (int i = 0; i < deriv; ++i) scale /= ((long double)h * omax);

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (std::size_t a = 0; a < p; ++a) acc += y[a] * Q[i][a];
        w[i] = static_cast<double>(acc * scale);
    }
    return w;
}

} // namespace detail

/// Speed sqrt(|g(c',c')|) and causal character of the velocity at t0.
inline std::pair<double, CausalCharacter> speed_and_character(const CurveSpec& c,
                                                              double t0) {
    c.validate();
    const int d = c.metric.dimension;
    Vec vel(d);
    if (c.analytic()) {
        for (int k = 0; k < d; ++k)
            vel[k] = eval_jet_n<1>(*c.components[k], t0).derivative(1);
    } else {
        // derivative of the local interpolant via a small centered difference
        double h = (c.params.back() - c.params.front()) /
                   (4.0 * static_cast<double>(c.params.size()));
        double a = std::max(t0 - h, c.params.front());
        double b = std::min(t0 + h, c.params.back());
        Vec pa = interp_point(c, a, 6), pb = interp_point(c, b, 6);
        for (int k = 0; k < d; ++k) vel[k] = (pb[k] - pa[k]) / (b - a);
    }
    double q = inner(vel, vel, c.metric);
    return {std::sqrt(std::fabs(q)), causal_character(vel, c.metric)};
}

namespace detail {

/// Arc length table of an analytic curve: parameters, cumulative arc length,
/// and a timelike check on every node. Per-interval 3-point Gauss-Legendre.
struct ArcTable {
    std::vector<double> t, s;
};

inline ArcTable analytic_arc_table(const CurveSpec& c, std::size_t n) {
    static const double gl_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const int d = c.metric.dimension;
    auto velocity = [&](double t) {
        Vec v(d);
        for (int k = 0; k < d; ++k)
            v[k] = eval_jet_n<1>(*c.components[k], t).derivative(1);
        return v;
    };
    auto speed_checked = [&](double t) {
        Vec v = velocity(t);
        if (causal_character(v, c.metric) != CausalCharacter::Timelike)
            throw non_timelike_error("curve is not timelike", t);
        return std::sqrt(-inner(v, v, c.metric));
    };
    ArcTable tab;
    tab.t = uniform_grid(c.dom_lo, c.dom_hi, n);
    tab.s.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double a = tab.t[i], b = tab.t[i + 1];
        double hh = 0.5 * (b - a), mid = 0.5 * (a + b);
        double acc = 0.0;
        for (int q = 0; q < 3; ++q) acc += gl_w[q] * speed_checked(mid + hh * gl_x[q]);
        tab.s[i + 1] = tab.s[i] + acc * hh;
    }
    speed_checked(tab.t.front());
    speed_checked(tab.t.back());
    return tab;
}

} // namespace detail

/// Resample a timelike curve by arc length: returns a sampled unit-speed
/// curve with n uniformly spaced arc-length parameters starting at 0.
inline CurveSpec arclength_reparam(const CurveSpec& c, std::size_t n = 512) {
    c.validate();
    CurveSpec out;
    out.metric = c.metric;

    std::vector<double> svals, pvals; // cumulative arc length vs parameter
    if (c.analytic()) {
        auto tab = detail::analytic_arc_table(c, std::max<std::size_t>(2048, 4 * n));
        pvals = std::move(tab.t);
        svals = std::move(tab.s);
    } else {
        const int d = c.metric.dimension;
        std::vector<double> speeds(c.params.size());
        for (std::size_t i = 0; i < c.params.size(); ++i) {
            // velocity from the local quintic interpolant
            double span = c.params.back() - c.params.front();
            double h = span / (8.0 * static_cast<double>(c.params.size()));
            double a = std::max(c.params[i] - h, c.params.front());
            double b = std::min(c.params[i] + h, c.params.back());
            Vec pa = interp_point(c, a, 6), pb = interp_point(c, b, 6);
            Vec v(d);
            for (int k = 0; k < d; ++k) v[k] = (pb[k] - pa[k]) / (b - a);
            if (causal_character(v, c.metric, 1e-9) != CausalCharacter::Timelike)
                throw non_timelike_error("curve is not timelike", c.params[i]);
            speeds[i] = std::sqrt(-inner(v, v, c.metric));
        }
        pvals = c.params;
        svals = cumulative_integral(c.params, speeds);
    }

    out.params = uniform_grid(0.0, svals.back(), n);
    out.points.reserve(n);
    for (double s : out.params) {
        double p = interp_local(svals, pvals, s, 6); // monotone inverse
        p = std::clamp(p, pvals.front(), pvals.back());
        out.points.push_back(curve_point(c, p));
    }
    // interpolation may leave the endpoints a hair off; snap them
    out.points.front() = curve_point(c, pvals.front());
    out.points.back() = curve_point(c, pvals.back());
    return out;
}

namespace detail {

/// True when a sampled curve is uniformly spaced and unit speed.
inline bool is_unit_speed_uniform(const CurveSpec& c, double tol) {
    const std::size_t n = c.params.size();
    double h = (c.params.back() - c.params.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::fabs(c.params[i] - c.params[i - 1] - h) > 1e-9 * std::max(1.0, h * n))
            return false;
    // probe the speed at a few interior samples with a centered difference
    for (std::size_t probe = 0; probe < 5; ++probe) {
        std::size_t j = 2 + probe * (n - 5) / 5;
        Vec v(c.metric.dimension);
        for (int k = 0; k < c.metric.dimension; ++k)
            v[k] = (c.points[j - 2][k] - 8.0 * c.points[j - 1][k] +
                    8.0 * c.points[j + 1][k] - c.points[j + 2][k]) /
                   (12.0 * h);
        if (std::fabs(inner(v, v, c.metric) + 1.0) > tol) return false;
    }
    return true;
}

} // namespace detail

/// Full Frenet apparatus on an increasing arc-length grid. Analytic curves
/// get exact jet derivatives (chain rule through the arc-length map);
/// sampled curves get local least-squares derivative estimates.
inline FrenetApparatus frenet_apparatus(const CurveSpec& c,
                                        const std::vector<double>& grid,
                                        const ApparatusOptions& opt = {}) {
    c.validate();
    frenet_frame_signs(c.metric); // rejects unsupported signatures
    if (grid.size() < 2) throw argument_error("frenet: grid too small");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw argument_error("frenet: grid not strictly increasing");

    const int d = c.metric.dimension;
    FrenetApparatus app;
    app.metric = c.metric;
    app.grid = grid;
    app.points.reserve(grid.size());
    app.frames.reserve(grid.size());

    if (c.analytic()) {
        auto tab = detail::analytic_arc_table(
            c, std::max<std::size_t>(2048, 4 * grid.size()));
        if (grid.back() > tab.s.back() * (1.0 + 1e-9) || grid.front() < -1e-12)
            throw argument_error("frenet: grid exceeds curve arc length");
        for (double s : grid) {
            double t0 = interp_local(tab.s, tab.t, std::min(s, tab.s.back()), 6);
            t0 = std::clamp(t0, tab.t.front(), tab.t.back());
            // order-5 jets in the curve parameter, converted to arc length
            std::vector<Jet<5>> comp(d), cp(d);
            for (int k = 0; k < d; ++k) {
                comp[k] = eval_jet_n<5>(*c.components[k], t0);
                cp[k] = jet_derivative(comp[k]);
            }
            Jet<5> q = inner(cp, cp, c.metric);
            if (q.value() >= 0.0)
                throw non_timelike_error("curve is not timelike", t0);
            Jet<5> v = sqrt(-q);
            // d/ds = (1/v) d/dt applied repeatedly
            std::vector<std::vector<Jet<5>>> u(4, std::vector<Jet<5>>(d));
            for (int k = 0; k < d; ++k) u[0][k] = cp[k] / v;
            for (int ord = 1; ord < 4; ++ord)
                for (int k = 0; k < d; ++k)
                    u[ord][k] = jet_derivative(u[ord - 1][k]) / v;

            detail::JVec U(d);
            Vec pt(d);
            for (int k = 0; k < d; ++k) {
                U[k].a = {u[0][k].value(), u[1][k].value(), u[2][k].value() / 2.0,
                          u[3][k].value() / 6.0};
                pt[k] = comp[k].value();
            }
            auto fp = detail::frenet_point(U, c.metric, opt.degeneracy_tol);
            app.points.push_back(std::move(pt));
            app.frames.push_back(std::move(fp.frame));
            app.k1.push_back(fp.k1);
            if (d >= 3) app.k2.push_back(fp.k2);
            if (d >= 4) app.k3.push_back(fp.k3);
        }
    } else {
        CurveSpec tab =
            detail::is_unit_speed_uniform(c, opt.unit_speed_tol)
                ? c
                : arclength_reparam(
                      c, std::max({opt.reparam_samples, 4 * grid.size(),
                                   c.params.size()}));
        const std::size_t n = tab.params.size();
        const double s0 = tab.params.front();
        const double h = (tab.params.back() - s0) / static_cast<double>(n - 1);
        const int w = std::min<int>(opt.fit_halfwidth, (static_cast<int>(n) - 1) / 2);
        const int W = 2 * w + 1;
        const int degree = std::min(opt.fit_degree, W - 2);
        if (degree < 4)
            throw argument_error("frenet: too few samples for derivative estimation");

        if (grid.front() < s0 - 1e-9 || grid.back() > tab.params.back() + 1e-9)
            throw argument_error("frenet: grid exceeds sampled arc range");

        // Orders 0..3 at a fractional sample index from one local fit window.
        // A direct fourth-derivative estimate is roundoff-limited well above
        // what the top curvature needs, so the jets stop at order 3 and k3
        // (dimension 4) comes from a separate wide first-derivative fit of
        // the computed n2 field: the narrow window sets the truncation error,
        // the wide window sets the noise amplification.
        auto fit_jets = [&](double x, Vec* pt) {
            int center = std::clamp(static_cast<int>(std::lround(x)), w,
                                    static_cast<int>(n) - 1 - w);
            std::vector<double> offsets(W);
            for (int i = 0; i < W; ++i)
                offsets[i] = static_cast<double>(center - w + i) - x;
            std::array<Vec, 4> der;
            for (int ord = 0; ord <= 3; ++ord) {
                auto wts = detail::lsq_derivative_weights(offsets, h, degree, ord);
                der[ord].assign(d, 0.0);
                for (int i = 0; i < W; ++i) {
                    const Vec& p = tab.points[static_cast<std::size_t>(center - w + i)];
                    for (int k = 0; k < d; ++k) der[ord][k] += wts[i] * p[k];
                }
            }
            detail::JVec U(d);
            for (int k = 0; k < d; ++k)
                U[k].a = {der[1][k], der[2][k], der[3][k] / 2.0, 0.0};
            if (pt) *pt = der[0];
            return U;
        };

        std::vector<Vec> n2_field;
        if (d == 4) {
            n2_field.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                auto fp = detail::frenet_point(
                    fit_jets(static_cast<double>(j), nullptr), c.metric,
                    opt.degeneracy_tol);
                n2_field[j] = std::move(fp.frame[2]);
            }
        }
        const int w2 =
            std::min<int>(std::max(opt.field_halfwidth, w),
                          (static_cast<int>(n) - 1) / 2);
        const int W2 = 2 * w2 + 1;
        const int degree2 = std::min(opt.fit_degree, W2 - 2);

        for (double s : grid) {
            double x = (s - s0) / h; // fractional sample index
            Vec pt;
            auto fp =
                detail::frenet_point(fit_jets(x, &pt), c.metric, opt.degeneracy_tol);
            if (d == 4) {
                int c2 = std::clamp(static_cast<int>(std::lround(x)), w2,
                                    static_cast<int>(n) - 1 - w2);
                std::vector<double> off2(W2);
                for (int i = 0; i < W2; ++i)
                    off2[i] = static_cast<double>(c2 - w2 + i) - x;
                auto u = detail::lsq_derivative_weights(off2, h, degree2, 1);
                Vec n2p(d, 0.0);
                for (int i = 0; i < W2; ++i) {
                    const Vec& row = n2_field[static_cast<std::size_t>(c2 - w2 + i)];
                    for (int k = 0; k < d; ++k) n2p[k] += u[i] * row[k];
                }
                fp.k3 = inner(n2p, fp.frame[3], c.metric); // n2' = k2 n1 + k3 n3
            }
            app.points.push_back(std::move(pt));
            app.frames.push_back(std::move(fp.frame));
            app.k1.push_back(fp.k1);
            if (d >= 3) app.k2.push_back(fp.k2);
            if (d >= 4) app.k3.push_back(fp.k3);
        }
    }

    // the convention keeps k1 (and k2 in dim 4) positive; the signed
    // curvatures must not cross zero between adjacent samples
    auto check_no_flip = [&](const std::vector<double>& k, const char* name) {
        for (std::size_t j = 1; j < k.size(); ++j)
            if (k[j] * k[j - 1] < 0.0)
                throw degenerate_flag_error(std::string("frenet: ") + name +
                                            " changes sign between samples");
    };
    if (d == 3) check_no_flip(app.k2, "k2");
    if (d == 4) check_no_flip(app.k3, "k3");
    return app;
}

/// Convenience: apparatus on a default uniform grid spanning the curve's
/// arc length.
inline FrenetApparatus frenet_apparatus(const CurveSpec& c, std::size_t grid_size = 512,
                                        const ApparatusOptions& opt = {}) {
    c.validate();
    double total;
    if (c.analytic()) {
        auto tab = detail::analytic_arc_table(c, 2048);
        total = tab.s.back();
        return frenet_apparatus(c, uniform_grid(0.0, total, grid_size), opt);
    }
    return frenet_apparatus(
        c, uniform_grid(c.params.front(), c.params.back(), grid_size), opt);
}

} // namespace semifrenet
