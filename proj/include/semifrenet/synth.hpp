#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "semifrenet/curve.hpp"
#include "semifrenet/errors.hpp"
#include "semifrenet/expr.hpp"
#include "semifrenet/frenet.hpp"
#include "semifrenet/pseudo_linalg.hpp"

namespace semifrenet {

/// Curvature functions to realize over an arc-length interval [s_lo, s_hi].
/// Dimension 2 uses k1 only; dimension 3 adds k2; dimension 4 adds k3.
struct CurvaturePrescription {
    SemiMetric metric{4, 2};
    std::vector<ExprPtr> curvatures; // k1 [, k2 [, k3]]
    double s_lo = 0.0, s_hi = 1.0;
    Vec initial_point;               // defaults to the origin
    std::vector<Vec> initial_frame;  // defaults to the standard basis

    int curvature_count() const { return metric.dimension - 1; }

    double k(int i, double s) const { return eval_value(*curvatures[i], s); }

    /// k1 > 0 everywhere; the higher curvatures must not vanish (k2 > 0 is
    /// additionally required by the dimension-4 frame convention).
    void validate(std::size_t probe = 257) const {
        if (static_cast<int>(curvatures.size()) != curvature_count())
            throw argument_error("prescription: need dimension-1 curvature functions");
        if (!(s_hi > s_lo)) throw argument_error("prescription: empty interval");
        for (double s : uniform_grid(s_lo, s_hi, probe)) {
            if (!(k(0, s) > 0.0))
                throw degenerate_flag_error(
                    "prescription: k1 must be positive at s = " + std::to_string(s));
            if (curvature_count() >= 2 && k(1, s) == 0.0)
                throw degenerate_flag_error(
                    "prescription: k2 must not vanish at s = " + std::to_string(s));
            if (curvature_count() >= 2 && metric.dimension == 4 && !(k(1, s) > 0.0))
                throw degenerate_flag_error(
                    "prescription: k2 must be positive in E2_4 at s = " +
                    std::to_string(s));
            if (curvature_count() >= 3 && k(2, s) == 0.0)
                throw degenerate_flag_error(
                    "prescription: k3 must not vanish at s = " + std::to_string(s));
        }
    }
};

inline CurvaturePrescription
make_prescription(const SemiMetric& m, const std::vector<std::string>& ks,
                  double s_lo, double s_hi) {
    CurvaturePrescription p;
    p.metric = m;
    for (const auto& s : ks) p.curvatures.push_back(parse_expr(s));
    p.s_lo = s_lo;
    p.s_hi = s_hi;
    p.validate();
    return p;
}

struct SynthesisResult {
    CurveSpec curve;           // sampled, unit-speed, one sample per step
    FrenetApparatus apparatus; // integrator frames and prescribed curvatures
    double max_gram_drift = 0; // worst pre-projection Gram residual
};

namespace detail {

struct SynthState {
    Vec p;                 // curve point
    std::vector<Vec> E;    // frame rows t, n1, ...
};

inline SynthState synth_axpy(const SynthState& x, double c, const SynthState& d) {
    SynthState r = x;
    for (std::size_t i = 0; i < r.p.size(); ++i) r.p[i] += c * d.p[i];
    for (std::size_t e = 0; e < r.E.size(); ++e)
        for (std::size_t i = 0; i < r.E[e].size(); ++i)
            r.E[e][i] += c * d.E[e][i];
    return r;
}

} // namespace detail

/// Integrate c' = t, frame' = K(s) * frame (classical RK4) with indefinite
/// re-orthonormalization every 16 steps. The pre-projection Gram residual is
/// monitored; drift beyond 1e-6 raises step_size_error.
inline SynthesisResult synthesize_traced(const CurvaturePrescription& p,
                                         double step) {
    p.validate();
    if (!(step > 0.0)) throw argument_error("synthesize: step must be positive");
    const int d = p.metric.dimension;
    const std::size_t nsteps = static_cast<std::size_t>(
        std::ceil((p.s_hi - p.s_lo) / step - 1e-9));
    const double h = (p.s_hi - p.s_lo) / static_cast<double>(nsteps);
    const std::vector<double> signs = frenet_frame_signs(p.metric);

    detail::SynthState y;
    y.p = p.initial_point.empty() ? Vec(d, 0.0) : p.initial_point;
    if (static_cast<int>(y.p.size()) != d)
        throw argument_error("synthesize: initial point dimension mismatch");
    if (p.initial_frame.empty()) {
        y.E.assign(d, Vec(d, 0.0));
        for (int i = 0; i < d; ++i) y.E[i][i] = 1.0;
    } else {
        y.E = p.initial_frame;
        if (gram_residual(y.E, signs, p.metric) > 1e-9)
            throw argument_error("synthesize: initial frame is not pseudo-orthonormal");
    }

    auto deriv = [&](double s, const detail::SynthState& st) {
        double k1 = p.k(0, s);
        double k2 = (d >= 3) ? p.k(1, s) : 0.0;
        double k3 = (d >= 4) ? p.k(2, s) : 0.0;
        auto K = frenet_matrix(p.metric, k1, k2, k3);
        detail::SynthState out;
        out.p = st.E[0]; // c' = t
        out.E.assign(d, Vec(d, 0.0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (K[i][j] != 0.0)
                    for (int x = 0; x < d; ++x) out.E[i][x] += K[i][j] * st.E[j][x];
        return out;
    };

    SynthesisResult res;
    res.curve.metric = p.metric;
    res.apparatus.metric = p.metric;
    auto record = [&](double s, const detail::SynthState& st) {
        res.curve.params.push_back(s);
        res.curve.points.push_back(st.p);
        res.apparatus.grid.push_back(s);
        res.apparatus.points.push_back(st.p);
        res.apparatus.frames.push_back(st.E);
        res.apparatus.k1.push_back(p.k(0, s));
        if (d >= 3) res.apparatus.k2.push_back(p.k(1, s));
        if (d >= 4) res.apparatus.k3.push_back(p.k(2, s));
    };

    record(p.s_lo, y);
    for (std::size_t n = 0; n < nsteps; ++n) {
        double s = p.s_lo + h * static_cast<double>(n);
        auto d1 = deriv(s, y);
        auto d2 = deriv(s + 0.5 * h, detail::synth_axpy(y, 0.5 * h, d1));
        auto d3 = deriv(s + 0.5 * h, detail::synth_axpy(y, 0.5 * h, d2));
        auto d4 = deriv(s + h, detail::synth_axpy(y, h, d3));
        detail::SynthState yn = detail::synth_axpy(y, h / 6.0, d1);
        yn = detail::synth_axpy(yn, h / 3.0, d2);
        yn = detail::synth_axpy(yn, h / 3.0, d3);
        yn = detail::synth_axpy(yn, h / 6.0, d4);
        y = std::move(yn);

        if ((n + 1) % 16 == 0 || n + 1 == nsteps) {
            double drift = gram_residual(y.E, signs, p.metric);
            res.max_gram_drift = std::max(res.max_gram_drift, drift);
            if (drift > 1e-6)
                throw step_size_error(
                    "synthesize: frame drift " + std::to_string(drift) +
                    " exceeds 1e-6; reduce the step size");
            PseudoFrame f = indefinite_gram_schmidt(y.E, p.metric);
            for (int i = 0; i < d; ++i)
                if (f.expected_signs[i] != signs[i])
                    throw step_size_error("synthesize: frame signature lost");
            y.E = std::move(f.vectors);
        }
        record(p.s_lo + h * static_cast<double>(n + 1), y);
    }
    res.curve.validate();
    return res;
}

inline CurveSpec synthesize(const CurvaturePrescription& p, double step) {
    return synthesize_traced(p, step).curve;
}

} // namespace semifrenet
