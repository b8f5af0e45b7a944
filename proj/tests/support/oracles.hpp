#pragma once

// Test-only dense linear algebra, written independently of the library so it
// can serve as an oracle for the sparse paths. Nothing here is included from
// library headers.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gdsw/sparse.hpp"

namespace oracle {

using gdsw::index_t;

/// Row-major dense matrix for oracle computations.
struct DMat {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<double> a;

    DMat() = default;
    DMat(index_t r, index_t c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c), 0.0) {}

    double& operator()(index_t i, index_t j) { return a[i * cols + j]; }
    double operator()(index_t i, index_t j) const { return a[i * cols + j]; }
};

inline DMat to_dense(const gdsw::SparseMatrix& s) {
    DMat d(s.nrows, s.ncols);
    for (index_t i = 0; i < s.nrows; ++i)
        for (index_t p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p)
            d(i, s.col_indices[p]) += s.values[p];
    return d;
}

inline DMat matmul(const DMat& x, const DMat& y) {
    if (x.cols != y.rows) throw std::runtime_error("oracle matmul shape");
    DMat z(x.rows, y.cols);
    for (index_t i = 0; i < x.rows; ++i)
        for (index_t k = 0; k < x.cols; ++k) {
            double v = x(i, k);
            if (v == 0.0) continue;
            for (index_t j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

inline DMat transpose(const DMat& x) {
    DMat t(x.cols, x.rows);
    for (index_t i = 0; i < x.rows; ++i)
        for (index_t j = 0; j < x.cols; ++j) t(j, i) = x(i, j);
    return t;
}

inline std::vector<double> matvec(const DMat& x, const std::vector<double>& v) {
    if (x.cols != static_cast<index_t>(v.size()))
        throw std::runtime_error("oracle matvec shape");
    std::vector<double> y(static_cast<std::size_t>(x.rows), 0.0);
    for (index_t i = 0; i < x.rows; ++i)
        for (index_t j = 0; j < x.cols; ++j) y[i] += x(i, j) * v[j];
    return y;
}

inline DMat slice(const DMat& x, const std::vector<index_t>& rows,
                  const std::vector<index_t>& cols) {
    DMat s(static_cast<index_t>(rows.size()), static_cast<index_t>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            s(static_cast<index_t>(i), static_cast<index_t>(j)) = x(rows[i], cols[j]);
    return s;
}

/// Gauss-Jordan solve with full row scan pivoting; modifies copies only.
inline std::vector<double> lu_solve(DMat m, std::vector<double> b) {
    const index_t n = m.rows;
    if (m.cols != n || static_cast<index_t>(b.size()) != n)
        throw std::runtime_error("oracle lu_solve shape");
    std::vector<index_t> piv(static_cast<std::size_t>(n));
    for (index_t k = 0; k < n; ++k) {
        index_t best = k;
        for (index_t i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(best, k))) best = i;
        if (m(best, k) == 0.0) throw std::runtime_error("oracle lu_solve singular");
        if (best != k) {
            for (index_t j = 0; j < n; ++j) std::swap(m(k, j), m(best, j));
            std::swap(b[k], b[best]);
        }
        piv[k] = best;
        const double d = m(k, k);
        for (index_t j = k; j < n; ++j) m(k, j) /= d;
        b[k] /= d;
        for (index_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = m(i, k);
            if (f == 0.0) continue;
            for (index_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    return b;
}

inline DMat inverse(const DMat& m) {
    const index_t n = m.rows;
    DMat inv(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (index_t j = 0; j < n; ++j) {
        e.assign(static_cast<std::size_t>(n), 0.0);
        e[j] = 1.0;
        std::vector<double> col = lu_solve(m, e);
        for (index_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

/// Cholesky factor (lower); throws if the matrix is not numerically SPD.
inline DMat cholesky(const DMat& m) {
    const index_t n = m.rows;
    DMat l(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (index_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("oracle cholesky: not SPD");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

inline std::vector<double> cholesky_solve(const DMat& m, const std::vector<double>& b) {
    DMat l = cholesky(m);
    const index_t n = m.rows;
    std::vector<double> y(b);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
    }
    for (index_t i = n - 1; i >= 0; --i) {
        for (index_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
        y[i] /= l(i, i);
    }
    return y;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(DMat m, int max_sweeps = 100) {
    const index_t n = m.rows;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (index_t p = 0; p < n; ++p) {
            for (index_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (index_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (index_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Symmetric square root via Jacobi eigendecomposition (eigenvectors kept).
inline DMat sqrt_spd(const DMat& m_in, int max_sweeps = 100) {
    const index_t n = m_in.rows;
    DMat m = m_in;
    DMat v(n, n);
    for (index_t i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-28) break;
        for (index_t p = 0; p < n; ++p) {
            for (index_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (index_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                for (index_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    DMat r(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (index_t k = 0; k < n; ++k) {
                const double lam = m(k, k);
                if (lam < 0.0 && lam > -1e-12) continue;
                s += v(i, k) * std::sqrt(lam) * v(j, k);
            }
            r(i, j) = s;
        }
    return r;
}

inline double max_abs_diff(const DMat& x, const DMat& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        d = std::max(d, std::fabs(x.a[i] - y.a[i]));
    return d;
}

} // namespace oracle
