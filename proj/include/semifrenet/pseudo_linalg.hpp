#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "semifrenet/errors.hpp"

namespace semifrenet {

using Vec = std::vector<double>;

/// Signature descriptor of the flat semi-Euclidean space E^{dimension}_{index}.
/// The first `index` axes carry signature -1, the remaining ones +1.
struct SemiMetric {
    int dimension;
    int index;

    double sign(int axis) const { return axis < index ? -1.0 : 1.0; }

    bool operator==(const SemiMetric& o) const {
        return dimension == o.dimension && index == o.index;
    }
};

inline constexpr SemiMetric E1_2{2, 1}; // Minkowski plane
inline constexpr SemiMetric E1_3{3, 1}; // Minkowski 3-space
inline constexpr SemiMetric E2_4{4, 2}; // signature (-,-,+,+)

enum class CausalCharacter { Timelike, Spacelike, Null };

inline const char* to_string(CausalCharacter c) {
    switch (c) {
    case CausalCharacter::Timelike: return "timelike";
    case CausalCharacter::Spacelike: return "spacelike";
    default: return "null";
    }
}

/// Indefinite inner product g(v, w) = sum_i sigma_i v_i w_i.
/// Templated on the scalar so jet-valued vectors go through the same code.
template <class T>
T inner(const std::vector<T>& v, const std::vector<T>& w, const SemiMetric& m) {
    if (static_cast<int>(v.size()) != m.dimension ||
        static_cast<int>(w.size()) != m.dimension)
        throw argument_error("inner: vector length does not match metric dimension");
    T acc = v[0] * w[0] * m.sign(0);
    for (int i = 1; i < m.dimension; ++i) acc = acc + v[i] * w[i] * m.sign(i);
    return acc;
}

inline double euclidean_sq(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

/// g-norm: sqrt(|g(v,v)|).
inline double pseudo_norm(const Vec& v, const SemiMetric& m) {
    return std::sqrt(std::fabs(inner(v, v, m)));
}

/// Classification tolerance is relative to the squared Euclidean norm, so
/// scaling a vector never changes its class.
inline CausalCharacter causal_character(const Vec& v, const SemiMetric& m,
                                        double tol = 1e-12) {
    double e2 = euclidean_sq(v);
    if (static_cast<int>(v.size()) != m.dimension)
        throw argument_error("causal_character: vector length does not match metric");
    if (e2 == 0.0) return CausalCharacter::Spacelike; // zero vector convention
    double q = inner(v, v, m);
    if (std::fabs(q) <= tol * e2) return CausalCharacter::Null;
    return q < 0.0 ? CausalCharacter::Timelike : CausalCharacter::Spacelike;
}

/// Pseudo-orthonormal ordered frame together with the signs g(e_i, e_i).
struct PseudoFrame {
    std::vector<Vec> vectors;
    SemiMetric metric;
    std::vector<double> expected_signs;
    bool orientation_flipped = false; // set when the last vector was negated
                                      // to repair a determinant of -1
};

namespace detail {

template <class T>
T det2(const T& a, const T& b, const T& c, const T& d) {
    return a * d - b * c;
}

template <class T>
T det3(const std::array<std::array<T, 3>, 3>& m) {
    return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2])
         - m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2])
         + m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

} // namespace detail

/// Determinant of the matrix whose rows are `rows` (dimension <= 4).
template <class T>
T frame_det(const std::vector<std::vector<T>>& rows) {
    const std::size_t n = rows.size();
    if (n == 1) return rows[0][0];
    if (n == 2) return detail::det2(rows[0][0], rows[0][1], rows[1][0], rows[1][1]);
    if (n == 3) {
        std::array<std::array<T, 3>, 3> m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = rows[i][j];
        return detail::det3(m);
    }
    if (n == 4) {
        T acc{};
        double parity = 1.0;
        for (int col = 0; col < 4; ++col) {
            std::array<std::array<T, 3>, 3> minor;
            for (int i = 1; i < 4; ++i) {
                int jj = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == col) continue;
                    minor[i - 1][jj++] = rows[i][j];
                }
            }
            acc = acc + rows[0][col] * detail::det3(minor) * parity;
            parity = -parity;
        }
        return acc;
    }
    throw argument_error("frame_det: dimension > 4 unsupported");
}

/// g-orthogonal complement of dimension-1 many vectors: the unique direction
/// (up to scale) g-orthogonal to all of them. Built from the Euclidean
/// cofactor vector with per-axis signature flips.
template <class T>
std::vector<T> metric_complement(const std::vector<std::vector<T>>& vs,
                                 const SemiMetric& m) {
    const int d = m.dimension;
    if (static_cast<int>(vs.size()) != d - 1)
        throw argument_error("metric_complement: need dimension-1 vectors");
    std::vector<T> u(d);
    if (d == 2) {
        u[0] = vs[0][1] * (-1.0);
        u[1] = vs[0][0];
    } else if (d == 3) {
        u[0] = detail::det2(vs[0][1], vs[0][2], vs[1][1], vs[1][2]);
        u[1] = detail::det2(vs[0][0], vs[0][2], vs[1][0], vs[1][2]) * (-1.0);
        u[2] = detail::det2(vs[0][0], vs[0][1], vs[1][0], vs[1][1]);
    } else if (d == 4) {
        double parity = 1.0;
        for (int col = 0; col < 4; ++col) {
            std::array<std::array<T, 3>, 3> minor;
            for (int i = 0; i < 3; ++i) {
                int jj = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == col) continue;
                    minor[i][jj++] = vs[i][j];
                }
            }
            u[col] = detail::det3(minor) * parity;
            parity = -parity;
        }
    } else {
        throw argument_error("metric_complement: dimension > 4 unsupported");
    }
    // Euclidean cofactor u satisfies dot(u, v_j) = 0; flipping each entry by
    // its signature turns that into g-orthogonality.
    for (int i = 0; i < d; ++i) u[i] = u[i] * m.sign(i);
    return u;
}

/// Orthonormalization under the indefinite metric. Projection is applied
/// twice per vector; signs of g(e_i, e_i) are recorded, each |g(e_i,e_i)| = 1.
/// A full-dimension frame with determinant -1 gets its last vector flipped.
///
/// Throws rank_error for dependent input and degenerate_flag_error when an
/// intermediate residual is null within `degeneracy_tol` (relative to its
/// squared Euclidean norm).
inline PseudoFrame indefinite_gram_schmidt(const std::vector<Vec>& vs,
                                           const SemiMetric& m,
                                           double degeneracy_tol = 1e-10) {
    if (vs.empty()) throw argument_error("indefinite_gram_schmidt: empty input");
    double input_scale = 0.0;
    for (const Vec& v : vs) input_scale = std::max(input_scale, euclidean_sq(v));

    PseudoFrame f{{}, m, {}, false};
    for (const Vec& v0 : vs) {
        Vec v = v0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < f.vectors.size(); ++j) {
                double coef = f.expected_signs[j] * inner(v, f.vectors[j], m);
                for (int i = 0; i < m.dimension; ++i) v[i] -= coef * f.vectors[j][i];
            }
        }
        double e2 = euclidean_sq(v);
        if (e2 <= 1e-24 * input_scale)
            throw rank_error("indefinite_gram_schmidt: linearly dependent input");
        double q = inner(v, v, m);
        if (std::fabs(q) < degeneracy_tol * e2)
            throw degenerate_flag_error(
                "indefinite_gram_schmidt: null residual at vector " +
                std::to_string(f.vectors.size()));
        double nrm = std::sqrt(std::fabs(q));
        for (double& x : v) x /= nrm;
        f.vectors.push_back(std::move(v));
        f.expected_signs.push_back(q > 0.0 ? 1.0 : -1.0);
    }

    if (static_cast<int>(f.vectors.size()) == m.dimension) {
        if (frame_det(f.vectors) < 0.0) {
            for (double& x : f.vectors.back()) x = -x;
            f.orientation_flipped = true;
        }
    }
    return f;
}

/// Max absolute deviation of the frame's Gram matrix from diag(expected_signs).
inline double gram_residual(const std::vector<Vec>& frame,
                            const std::vector<double>& signs,
                            const SemiMetric& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double target = (i == j) ? signs[i] : 0.0;
            worst = std::max(worst, std::fabs(inner(frame[i], frame[j], m) - target));
        }
    return worst;
}

} // namespace semifrenet
