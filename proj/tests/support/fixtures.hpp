#pragma once

// Shared matrix generators for the unit and acceptance suites.

#include <random>
#include <vector>

#include "gdsw/sparse.hpp"

namespace fixtures {

using gdsw::index_t;
using gdsw::SparseMatrix;
using gdsw::Triplet;

/// tridiag(-1, 2, -1) of order n, scaled by `scale`.
inline SparseMatrix laplacian_1d_dirichlet(index_t n, double scale = 1.0) {
    std::vector<Triplet> t;
    for (index_t i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, -scale});
        t.push_back({i, i, 2.0 * scale});
        if (i + 1 < n) t.push_back({i, i + 1, -scale});
    }
    return SparseMatrix::from_triplets(n, n, t);
}

/// 5-point Laplacian on an nx x ny interior grid (Dirichlet boundary).
inline SparseMatrix laplacian_2d_dirichlet(index_t nx, index_t ny) {
    const index_t n = nx * ny;
    std::vector<Triplet> t;
    auto id = [nx](index_t i, index_t j) { return i + nx * j; };
    for (index_t j = 0; j < ny; ++j)
        for (index_t i = 0; i < nx; ++i) {
            t.push_back({id(i, j), id(i, j), 4.0});
            if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
            if (i + 1 < nx) t.push_back({id(i, j), id(i + 1, j), -1.0});
            if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
            if (j + 1 < ny) t.push_back({id(i, j), id(i, j + 1), -1.0});
        }
    return SparseMatrix::from_triplets(n, n, t);
}

/// Random sparse matrix with a dominant diagonal (guaranteed nonsingular).
inline SparseMatrix random_diag_dominant(index_t n, double density,
                                         std::mt19937_64& rng,
                                         bool symmetric = false) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Triplet> t;
    std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = symmetric ? i + 1 : 0; j < n; ++j) {
            if (i == j) continue;
            if (coin(rng) < density) {
                double v = val(rng);
                t.push_back({i, j, v});
                rowsum[i] += std::abs(v);
                if (symmetric) {
                    t.push_back({j, i, v});
                    rowsum[j] += std::abs(v);
                }
            }
        }
    for (index_t i = 0; i < n; ++i)
        t.push_back({i, i, rowsum[i] + 1.0 + coin(rng)});
    return SparseMatrix::from_triplets(n, n, t);
}

inline std::vector<double> random_vector(index_t n, std::mt19937_64& rng,
                                         double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = d(rng);
    return v;
}

inline std::vector<double> ones(index_t n) {
    return std::vector<double>(static_cast<std::size_t>(n), 1.0);
}

} // namespace fixtures
