#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "semifrenet/errors.hpp"

namespace semifrenet {

/// Truncated Taylor jet of order N: coefficients a_k = f^(k)(s0) / k!.
/// Arithmetic is truncated power-series arithmetic, so derivatives obey the
/// Leibniz and chain rules exactly (no rounding beyond double arithmetic).
template <int N>
struct Jet {
    std::array<double, N + 1> a{};

    Jet() = default;

    static Jet constant(double c) {
        Jet j;
        j.a[0] = c;
        return j;
    }

    static Jet variable(double s0) {
        Jet j;
        j.a[0] = s0;
        if constexpr (N >= 1) j.a[1] = 1.0;
        return j;
    }

    double value() const { return a[0]; }

    /// k-th derivative, k <= N.
    double derivative(int k) const {
        double fact = 1.0;
        for (int i = 2; i <= k; ++i) fact *= i;
        return a[k] * fact;
    }

    bool operator==(const Jet& o) const { return a == o.a; }
};

template <int N>
Jet<N> operator+(const Jet<N>& x, const Jet<N>& y) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& x, const Jet<N>& y) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.a[k] = x.a[k] - y.a[k];
    return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& x) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.a[k] = -x.a[k];
    return r;
}

template <int N>
Jet<N> operator*(const Jet<N>& x, const Jet<N>& y) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += x.a[j] * y.a[k - j];
        r.a[k] = acc;
    }
    return r;
}

template <int N>
Jet<N> operator*(const Jet<N>& x, double c) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.a[k] = x.a[k] * c;
    return r;
}

template <int N>
Jet<N> operator*(double c, const Jet<N>& x) {
    return x * c;
}

template <int N>
Jet<N> operator+(const Jet<N>& x, double c) {
    Jet<N> r = x;
    r.a[0] += c;
    return r;
}

template <int N>
Jet<N> operator+(double c, const Jet<N>& x) {
    return x + c;
}

template <int N>
Jet<N> operator-(const Jet<N>& x, double c) {
    return x + (-c);
}

template <int N>
Jet<N> operator-(double c, const Jet<N>& x) {
    return (-x) + c;
}

template <int N>
Jet<N> operator/(const Jet<N>& x, const Jet<N>& y) {
    if (y.a[0] == 0.0) throw error("jet division by zero");
    Jet<N> r;
    for (int k = 0; k <= N; ++k) {
        double acc = x.a[k];
        for (int j = 1; j <= k; ++j) acc -= y.a[j] * r.a[k - j];
        r.a[k] = acc / y.a[0];
    }
    return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& x, double c) {
    if (c == 0.0) throw error("jet division by zero");
    return x * (1.0 / c);
}

template <int N>
Jet<N> operator/(double c, const Jet<N>& x) {
    return Jet<N>::constant(c) / x;
}

/// Formal derivative: a jet of the same order with a zero top coefficient.
/// Orders above N-1 of the result are not meaningful; downstream reads must
/// stay below them (series ops never mix information downward).
template <int N>
Jet<N> jet_derivative(const Jet<N>& x) {
    Jet<N> r;
    for (int k = 0; k < N; ++k) r.a[k] = (k + 1) * x.a[k + 1];
    r.a[N] = 0.0;
    return r;
}

/// Compose outer Taylor coefficients f_k = f^(k)(g0)/k! with an inner jet g
/// (evaluated at g0 = g.a[0]) by Horner on the series delta = g - g0.
template <int N>
Jet<N> jet_compose(const std::array<double, N + 1>& f, const Jet<N>& g) {
    Jet<N> delta = g;
    delta.a[0] = 0.0;
    Jet<N> r = Jet<N>::constant(f[N]);
    for (int k = N - 1; k >= 0; --k) r = r * delta + f[k];
    return r;
}

template <int N>
Jet<N> sin(const Jet<N>& x) {
    std::array<double, N + 1> f;
    double s = std::sin(x.a[0]), c = std::cos(x.a[0]), fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        double d = (k % 4 == 0) ? s : (k % 4 == 1) ? c : (k % 4 == 2) ? -s : -c;
        f[k] = d / fact;
    }
    return jet_compose(f, x);
}

template <int N>
Jet<N> cos(const Jet<N>& x) {
    std::array<double, N + 1> f;
    double s = std::sin(x.a[0]), c = std::cos(x.a[0]), fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        double d = (k % 4 == 0) ? c : (k % 4 == 1) ? -s : (k % 4 == 2) ? -c : s;
        f[k] = d / fact;
    }
    return jet_compose(f, x);
}

template <int N>
Jet<N> sinh(const Jet<N>& x) {
    std::array<double, N + 1> f;
    double s = std::sinh(x.a[0]), c = std::cosh(x.a[0]), fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        f[k] = ((k % 2 == 0) ? s : c) / fact;
    }
    return jet_compose(f, x);
}

template <int N>
Jet<N> cosh(const Jet<N>& x) {
    std::array<double, N + 1> f;
    double s = std::sinh(x.a[0]), c = std::cosh(x.a[0]), fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        f[k] = ((k % 2 == 0) ? c : s) / fact;
    }
    return jet_compose(f, x);
}

template <int N>
Jet<N> exp(const Jet<N>& x) {
    std::array<double, N + 1> f;
    double e = std::exp(x.a[0]), fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        f[k] = e / fact;
    }
    return jet_compose(f, x);
}

template <int N>
Jet<N> sqrt(const Jet<N>& x) {
    if (x.a[0] <= 0.0) throw error("jet sqrt of non-positive value");
    std::array<double, N + 1> f;
    f[0] = std::sqrt(x.a[0]);
    for (int k = 1; k <= N; ++k)
        f[k] = f[k - 1] * (1.5 - k) / (k * x.a[0]);
    return jet_compose(f, x);
}

/// Integer power; negative exponents go through division.
template <int N>
Jet<N> pow(const Jet<N>& x, int e) {
    if (e < 0) return Jet<N>::constant(1.0) / pow(x, -e);
    Jet<N> r = Jet<N>::constant(1.0);
    Jet<N> base = x;
    unsigned n = static_cast<unsigned>(e);
    while (n > 0) {
        if (n & 1u) r = r * base;
        base = base * base;
        n >>= 1u;
    }
    return r;
}

/// Order used by the expression DSL.
using Jet4 = Jet<4>;

/// Value part for generic code that mixes plain scalars with jets.
inline double scalar_value(double x) { return x; }
template <int N>
double scalar_value(const Jet<N>& x) {
    return x.a[0];
}

} // namespace semifrenet
