#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "semifrenet/errors.hpp"
#include "semifrenet/expr.hpp"
#include "semifrenet/pseudo_linalg.hpp"

namespace semifrenet {

/// A parametric curve: analytic components (expression per coordinate) over a
/// closed domain, or a strictly increasing sample table.
struct CurveSpec {
    SemiMetric metric{4, 2};

    // analytic mode
    std::vector<ExprPtr> components;
    double dom_lo = 0.0, dom_hi = 0.0;

    // sampled mode
    std::vector<double> params;
    std::vector<Vec> points;

    bool analytic() const { return !components.empty(); }

    double param_lo() const { return analytic() ? dom_lo : params.front(); }
    double param_hi() const { return analytic() ? dom_hi : params.back(); }

    void validate() const {
        if (analytic()) {
            if (static_cast<int>(components.size()) != metric.dimension)
                throw argument_error("curve: component count != metric dimension");
            if (!(dom_hi > dom_lo)) throw argument_error("curve: empty domain");
        } else {
            if (params.size() < 6)
                throw argument_error("curve: need at least 6 samples");
            if (params.size() != points.size())
                throw argument_error("curve: sample table size mismatch");
            for (std::size_t i = 1; i < params.size(); ++i)
                if (!(params[i] > params[i - 1]))
                    throw argument_error("curve: parameters not strictly increasing");
            for (const Vec& p : points)
                if (static_cast<int>(p.size()) != metric.dimension)
                    throw argument_error("curve: point dimension mismatch");
        }
    }
};

inline CurveSpec make_analytic_curve(const SemiMetric& m,
                                     const std::vector<std::string>& comps,
                                     double lo, double hi) {
    CurveSpec c;
    c.metric = m;
    for (const auto& s : comps) c.components.push_back(parse_expr(s));
    c.dom_lo = lo;
    c.dom_hi = hi;
    c.validate();
    return c;
}

namespace detail {

/// Index of the first stencil sample for a width-`m` window centered near x.
inline std::size_t stencil_start(const std::vector<double>& xs, double x, std::size_t m) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t start = (hi > m / 2) ? hi - m / 2 : 0;
    if (start + m > xs.size()) start = xs.size() - m;
    return start;
}

/// Lagrange evaluation on m points (Neville's scheme).
inline double lagrange_eval(const double* xs, const double* ys, std::size_t m, double x) {
    double w[8];
    for (std::size_t i = 0; i < m; ++i) w[i] = ys[i];
    for (std::size_t lvl = 1; lvl < m; ++lvl)
        for (std::size_t i = 0; i + lvl < m; ++i)
            w[i] = ((x - xs[i + lvl]) * w[i] + (xs[i] - x) * w[i + 1]) /
                   (xs[i] - xs[i + lvl]);
    return w[0];
}

} // namespace detail

/// Local cubic (4-point) Lagrange interpolation of a scalar sample table.
inline double interp_local(const std::vector<double>& xs, const std::vector<double>& ys,
                           double x, std::size_t npts = 4) {
    if (xs.size() < npts) throw argument_error("interp_local: too few samples");
    std::size_t s = detail::stencil_start(xs, x, npts);
    return detail::lagrange_eval(&xs[s], &ys[s], npts, x);
}

/// Curve point in sampled mode (per-coordinate local cubic interpolation).
inline Vec interp_point(const CurveSpec& c, double p, std::size_t npts = 4) {
    const int d = c.metric.dimension;
    std::size_t s = detail::stencil_start(c.params, p, npts);
    Vec out(d);
    double ys[8];
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < npts; ++i) ys[i] = c.points[s + i][k];
        out[k] = detail::lagrange_eval(&c.params[s], ys, npts, p);
    }
    return out;
}

/// Curve point at parameter p (either mode).
inline Vec curve_point(const CurveSpec& c, double p) {
    if (c.analytic()) {
        Vec out(c.metric.dimension);
        for (int k = 0; k < c.metric.dimension; ++k)
            out[k] = eval_value(*c.components[k], p);
        return out;
    }
    return interp_point(c, p);
}

/// Adaptive Simpson quadrature.
namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12,
                        int max_depth = 40) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Cumulative integral of sampled values: out[j] = integral of the local cubic
/// interpolant from xs[0] to xs[j], via 3-point Gauss-Legendre per interval.
inline std::vector<double> cumulative_integral(const std::vector<double>& xs,
                                               const std::vector<double>& ys) {
    static const double gl_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        double a = xs[j], b = xs[j + 1], h = 0.5 * (b - a), mid = 0.5 * (a + b);
        double acc = 0.0;
        for (int q = 0; q < 3; ++q)
            acc += gl_w[q] * interp_local(xs, ys, mid + h * gl_x[q]);
        out[j + 1] = out[j] + acc * h;
    }
    return out;
}

/// Uniform grid of n values over [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw argument_error("uniform_grid: bad arguments");
    std::vector<double> g(n);
    double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
    g.back() = hi;
    return g;
}

} // namespace semifrenet
