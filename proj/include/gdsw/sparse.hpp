#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gdsw/error.hpp"

namespace gdsw {

/// One (row, col, value) entry used to build matrices.
struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Compressed sparse-row matrix in canonical form: within each row the
/// column indices are strictly increasing, row_offsets is monotone with
/// row_offsets[nrows] == nnz. Construction enforces this; every operation
/// may assume it.
struct SparseMatrix {
    index_t nrows = 0;
    index_t ncols = 0;
    std::vector<index_t> row_offsets; // length nrows + 1
    std::vector<index_t> col_indices;
    std::vector<double> values;

    SparseMatrix() : row_offsets(1, 0) {}

    SparseMatrix(index_t rows, index_t cols, std::vector<index_t> offsets,
                 std::vector<index_t> indices, std::vector<double> vals)
        : nrows(rows), ncols(cols), row_offsets(std::move(offsets)),
          col_indices(std::move(indices)), values(std::move(vals)) {
        validate();
    }

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    bool square() const { return nrows == ncols; }

    /// Value at (i, j); zero if the entry is not stored.
    double at(index_t i, index_t j) const {
        if (i < 0 || i >= nrows || j < 0 || j >= ncols)
            throw std::out_of_range("SparseMatrix::at: index out of range");
        auto first = col_indices.begin() + row_offsets[i];
        auto last = col_indices.begin() + row_offsets[i + 1];
        auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return values[static_cast<std::size_t>(it - col_indices.begin())];
    }

    static SparseMatrix identity(index_t n) {
        SparseMatrix a;
        a.nrows = a.ncols = n;
        a.row_offsets.resize(n + 1);
        a.col_indices.resize(n);
        a.values.assign(n, 1.0);
        std::iota(a.row_offsets.begin(), a.row_offsets.end(), index_t{0});
        std::iota(a.col_indices.begin(), a.col_indices.end(), index_t{0});
        return a;
    }

    /// Builds a canonical matrix from triplets; duplicates are summed.
    static SparseMatrix from_triplets(index_t nrows, index_t ncols,
                                      std::vector<Triplet> entries) {
        for (const Triplet& t : entries) {
            if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
                throw std::out_of_range("from_triplets: entry out of range");
        }
        // stable: duplicates are summed in insertion order, so transposed
        // insertion patterns accumulate bit-identically
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Triplet& a, const Triplet& b) {
                             return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                         });
        SparseMatrix a;
        a.nrows = nrows;
        a.ncols = ncols;
        a.row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            double sum = 0.0;
            while (j < entries.size() && entries[j].row == entries[i].row &&
                   entries[j].col == entries[i].col) {
                sum += entries[j].value;
                ++j;
            }
            a.col_indices.push_back(entries[i].col);
            a.values.push_back(sum);
            ++a.row_offsets[static_cast<std::size_t>(entries[i].row) + 1];
            i = j;
        }
        std::partial_sum(a.row_offsets.begin(), a.row_offsets.end(),
                         a.row_offsets.begin());
        return a;
    }

    void validate() const {
        if (nrows < 0 || ncols < 0)
            throw std::invalid_argument("SparseMatrix: negative dimension");
        if (row_offsets.size() != static_cast<std::size_t>(nrows) + 1)
            throw std::invalid_argument("SparseMatrix: bad row_offsets length");
        if (row_offsets.front() != 0 ||
            row_offsets.back() != static_cast<index_t>(col_indices.size()) ||
            col_indices.size() != values.size())
            throw std::invalid_argument("SparseMatrix: offsets/nnz mismatch");
        for (index_t i = 0; i < nrows; ++i) {
            if (row_offsets[i] > row_offsets[i + 1])
                throw std::invalid_argument("SparseMatrix: offsets not monotone");
            for (index_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
                if (col_indices[p] < 0 || col_indices[p] >= ncols)
                    throw std::out_of_range("SparseMatrix: column out of range");
                if (p > row_offsets[i] && col_indices[p] <= col_indices[p - 1])
                    throw std::invalid_argument(
                        "SparseMatrix: columns not strictly increasing");
            }
        }
    }
};

/// y = A x
inline std::vector<double> spmv(const SparseMatrix& a,
                                const std::vector<double>& x) {
    if (static_cast<index_t>(x.size()) != a.ncols)
        throw std::invalid_argument("spmv: dimension mismatch");
    std::vector<double> y(static_cast<std::size_t>(a.nrows), 0.0);
    for (index_t i = 0; i < a.nrows; ++i) {
        double sum = 0.0;
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            sum += a.values[p] * x[a.col_indices[p]];
        y[i] = sum;
    }
    return y;
}

inline SparseMatrix transpose(const SparseMatrix& a) {
    SparseMatrix t;
    t.nrows = a.ncols;
    t.ncols = a.nrows;
    t.row_offsets.assign(static_cast<std::size_t>(a.ncols) + 1, 0);
    t.col_indices.resize(a.values.size());
    t.values.resize(a.values.size());
    for (index_t p = 0; p < a.nnz(); ++p)
        ++t.row_offsets[a.col_indices[p] + 1];
    std::partial_sum(t.row_offsets.begin(), t.row_offsets.end(),
                     t.row_offsets.begin());
    std::vector<index_t> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            index_t q = next[a.col_indices[p]]++;
            t.col_indices[q] = i; // rows visited in order, so columns stay sorted
            t.values[q] = a.values[p];
        }
    }
    return t;
}

/// C = A B, keeping all structurally touched entries (no numeric dropping).
inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.ncols != b.nrows)
        throw std::invalid_argument("multiply: dimension mismatch");
    SparseMatrix c;
    c.nrows = a.nrows;
    c.ncols = b.ncols;
    c.row_offsets.assign(static_cast<std::size_t>(a.nrows) + 1, 0);
    std::vector<double> accum(static_cast<std::size_t>(b.ncols), 0.0);
    std::vector<index_t> marker(static_cast<std::size_t>(b.ncols), -1);
    std::vector<index_t> row_cols;
    for (index_t i = 0; i < a.nrows; ++i) {
        row_cols.clear();
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            index_t k = a.col_indices[p];
            double av = a.values[p];
            for (index_t q = b.row_offsets[k]; q < b.row_offsets[k + 1]; ++q) {
                index_t j = b.col_indices[q];
                if (marker[j] != i) {
                    marker[j] = i;
                    accum[j] = 0.0;
                    row_cols.push_back(j);
                }
                accum[j] += av * b.values[q];
            }
        }
        std::sort(row_cols.begin(), row_cols.end());
        for (index_t j : row_cols) {
            c.col_indices.push_back(j);
            c.values.push_back(accum[j]);
        }
        c.row_offsets[i + 1] = static_cast<index_t>(c.col_indices.size());
    }
    return c;
}

namespace detail {

inline void check_index_set(const std::vector<index_t>& set, index_t bound,
                            const char* what) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] < 0 || set[i] >= bound)
            throw std::out_of_range(std::string(what) + ": index out of range");
        if (i > 0 && set[i] <= set[i - 1])
            throw std::invalid_argument(std::string(what) +
                                        ": index set not sorted/unique");
    }
}

} // namespace detail

/// result[p, q] = A[rows[p], cols[q]]; both sets sorted and duplicate-free.
inline SparseMatrix extract_submatrix(const SparseMatrix& a,
                                      const std::vector<index_t>& rows,
                                      const std::vector<index_t>& cols) {
    detail::check_index_set(rows, a.nrows, "extract_submatrix rows");
    detail::check_index_set(cols, a.ncols, "extract_submatrix cols");
    std::vector<index_t> col_pos(static_cast<std::size_t>(a.ncols), -1);
    for (std::size_t q = 0; q < cols.size(); ++q)
        col_pos[cols[q]] = static_cast<index_t>(q);
    SparseMatrix s;
    s.nrows = static_cast<index_t>(rows.size());
    s.ncols = static_cast<index_t>(cols.size());
    s.row_offsets.assign(rows.size() + 1, 0);
    for (std::size_t p = 0; p < rows.size(); ++p) {
        index_t i = rows[p];
        for (index_t q = a.row_offsets[i]; q < a.row_offsets[i + 1]; ++q) {
            index_t j = col_pos[a.col_indices[q]];
            if (j >= 0) { // monotone remap keeps the row sorted
                s.col_indices.push_back(j);
                s.values.push_back(a.values[q]);
            }
        }
        s.row_offsets[p + 1] = static_cast<index_t>(s.col_indices.size());
    }
    return s;
}

/// Pt A P for P of shape nrows(A) x k.
inline SparseMatrix galerkin_product(const SparseMatrix& p,
                                     const SparseMatrix& a) {
    if (p.nrows != a.nrows || a.nrows != a.ncols)
        throw std::invalid_argument("galerkin_product: dimension mismatch");
    return multiply(transpose(p), multiply(a, p));
}

inline double frobenius_norm(const SparseMatrix& a) {
    double s = 0.0;
    for (double v : a.values) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

// small dense-vector helpers shared by the solver layers

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

/// y += alpha x
inline void axpy(double alpha, const std::vector<double>& x,
                 std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::vector<double>& x) {
    for (double& v : x) v *= alpha;
}

} // namespace gdsw
