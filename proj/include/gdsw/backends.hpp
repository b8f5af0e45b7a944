#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsw/error.hpp"
#include "gdsw/sparse.hpp"
#include "gdsw/timing.hpp"

namespace gdsw {

enum class Backend { dense_lu, sparse_lu_natural, sparse_lu_ordered };

enum class Ordering { natural, minimum_degree };

inline std::string to_string(Backend b) {
    switch (b) {
        case Backend::dense_lu: return "dense-lu";
        case Backend::sparse_lu_natural: return "sparse-lu-natural";
        case Backend::sparse_lu_ordered: return "sparse-lu-ordered";
    }
    return "unknown";
}

inline Backend backend_from_string(const std::string& s) {
    if (s == "dense-lu") return Backend::dense_lu;
    if (s == "sparse-lu-natural") return Backend::sparse_lu_natural;
    if (s == "sparse-lu-ordered") return Backend::sparse_lu_ordered;
    throw std::invalid_argument("unknown backend: " + s);
}

/// Sparse direct solver selection. The ordering field matters only for the
/// sparse backends; the factory keeps it consistent with the backend id.
struct BackendConfig {
    Backend backend_id = Backend::sparse_lu_ordered;
    double pivot_threshold = 1.0; // 1.0 = full partial pivoting
    Ordering ordering = Ordering::minimum_degree;
};

inline BackendConfig make_backend_config(Backend b, double pivot_threshold = 1.0) {
    BackendConfig cfg;
    cfg.backend_id = b;
    cfg.pivot_threshold = pivot_threshold;
    cfg.ordering = (b == Backend::sparse_lu_ordered) ? Ordering::minimum_degree
                                                     : Ordering::natural;
    return cfg;
}

inline const std::vector<Backend>& all_backends() {
    static const std::vector<Backend> v = {
        Backend::dense_lu, Backend::sparse_lu_natural, Backend::sparse_lu_ordered};
    return v;
}

namespace detail {

/// Greedy minimum-degree elimination order on the symmetrized pattern of A
/// (diagonal ignored). Ties break to the lowest index, so the order is
/// deterministic.
inline std::vector<index_t> minimum_degree_order(const SparseMatrix& a) {
    const index_t n = a.nrows;
    std::vector<std::vector<index_t>> adj(static_cast<std::size_t>(n));
    {
        SparseMatrix at = transpose(a);
        for (index_t i = 0; i < n; ++i) {
            std::vector<index_t>& nbrs = adj[i];
            for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
                if (a.col_indices[p] != i) nbrs.push_back(a.col_indices[p]);
            for (index_t p = at.row_offsets[i]; p < at.row_offsets[i + 1]; ++p)
                if (at.col_indices[p] != i) nbrs.push_back(at.col_indices[p]);
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
    }
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    std::vector<index_t> degree(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i)
        degree[i] = static_cast<index_t>(adj[i].size());

    std::vector<index_t> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<index_t> clique, merged;
    for (index_t step = 0; step < n; ++step) {
        index_t v = -1;
        for (index_t i = 0; i < n; ++i)
            if (alive[i] && (v < 0 || degree[i] < degree[v])) v = i;
        order.push_back(v);
        alive[v] = 0;

        clique.clear();
        for (index_t u : adj[v])
            if (alive[u]) clique.push_back(u);
        // neighbors of the eliminated node become a clique
        for (index_t u : clique) {
            std::vector<index_t>& au = adj[u];
            au.erase(std::remove_if(au.begin(), au.end(),
                                    [&](index_t w) { return !alive[w]; }),
                     au.end());
            merged.clear();
            std::set_union(au.begin(), au.end(), clique.begin(), clique.end(),
                           std::back_inserter(merged));
            merged.erase(std::remove(merged.begin(), merged.end(), u),
                         merged.end());
            au.swap(merged);
            degree[u] = static_cast<index_t>(au.size());
        }
        adj[v].clear();
        adj[v].shrink_to_fit();
    }
    return order;
}

struct DenseLUFactors {
    index_t n = 0;
    std::vector<double> lu;      // row-major, L below diagonal (unit), U on/above
    std::vector<index_t> perm;   // row k of the factor came from input row perm[k]
};

inline DenseLUFactors dense_lu_factor(const SparseMatrix& a, double threshold) {
    const index_t n = a.nrows;
    DenseLUFactors f;
    f.n = n;
    f.lu.assign(static_cast<std::size_t>(n) * n, 0.0);
    f.perm.resize(static_cast<std::size_t>(n));
    std::iota(f.perm.begin(), f.perm.end(), index_t{0});
    for (index_t i = 0; i < n; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            f.lu[i * n + a.col_indices[p]] = a.values[p];

    for (index_t k = 0; k < n; ++k) {
        index_t imax = k;
        double amax = std::abs(f.lu[k * n + k]);
        for (index_t i = k + 1; i < n; ++i) {
            double t = std::abs(f.lu[i * n + k]);
            if (t > amax) {
                amax = t;
                imax = i;
            }
        }
        if (amax == 0.0)
            throw SingularMatrixError(
                "dense-lu: singular pivot at elimination step " + std::to_string(k),
                k);
        // keep the diagonal row when it is within the pivot threshold
        if (std::abs(f.lu[k * n + k]) < threshold * amax && imax != k) {
            for (index_t j = 0; j < n; ++j)
                std::swap(f.lu[k * n + j], f.lu[imax * n + j]);
            std::swap(f.perm[k], f.perm[imax]);
        }
        const double piv = f.lu[k * n + k];
        if (piv == 0.0)
            throw SingularMatrixError(
                "dense-lu: singular pivot at elimination step " + std::to_string(k),
                k);
        for (index_t i = k + 1; i < n; ++i) {
            double lik = f.lu[i * n + k] / piv;
            f.lu[i * n + k] = lik;
            if (lik != 0.0)
                for (index_t j = k + 1; j < n; ++j)
                    f.lu[i * n + j] -= lik * f.lu[k * n + j];
        }
    }
    return f;
}

inline void dense_lu_solve(const DenseLUFactors& f, const double* b, double* x) {
    const index_t n = f.n;
    for (index_t i = 0; i < n; ++i) {
        double s = b[f.perm[i]];
        for (index_t j = 0; j < i; ++j) s -= f.lu[i * n + j] * x[j];
        x[i] = s;
    }
    for (index_t i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (index_t j = i + 1; j < n; ++j) s -= f.lu[i * n + j] * x[j];
        x[i] = s / f.lu[i * n + i];
    }
}

struct SparseLUFactors {
    index_t n = 0;
    // CSC storage; L has a unit diagonal stored first in each column,
    // U has its diagonal stored last.
    std::vector<index_t> lp, li;
    std::vector<double> lx;
    std::vector<index_t> up, ui;
    std::vector<double> ux;
    std::vector<index_t> pinv; // input row i ended up as factor row pinv[i]
    std::vector<index_t> q;    // k-th eliminated column is input column q[k]
};

/// Depth-first search from `root` through the partially built L, recording
/// the reach in topological order at xi[top-1], xi[top-2], ...
inline index_t lu_reach_dfs(index_t root, const std::vector<index_t>& lp,
                            const std::vector<index_t>& li,
                            const std::vector<index_t>& pinv, index_t top,
                            std::vector<index_t>& xi, std::vector<index_t>& pstack,
                            std::vector<index_t>& mark, index_t stamp,
                            std::vector<index_t>& node_stack) {
    index_t head = 0;
    node_stack[0] = root;
    while (head >= 0) {
        index_t i = node_stack[head];
        index_t col = pinv[i]; // -1 when row i is not yet pivotal (no L column)
        if (mark[i] != stamp) {
            mark[i] = stamp;
            pstack[head] = (col < 0) ? 0 : lp[col];
        }
        bool done = true;
        if (col >= 0) {
            for (index_t p = pstack[head]; p < lp[col + 1]; ++p) {
                index_t j = li[p];
                if (mark[j] != stamp) {
                    pstack[head] = p + 1;
                    node_stack[++head] = j;
                    done = false;
                    break;
                }
            }
        }
        if (done) {
            --head;
            xi[--top] = i;
        }
    }
    return top;
}

inline SparseLUFactors sparse_lu_factor(const SparseMatrix& a, double threshold,
                                        Ordering ordering) {
    const index_t n = a.nrows;
    SparseLUFactors f;
    f.n = n;
    f.q = (ordering == Ordering::minimum_degree)
              ? minimum_degree_order(a)
              : [&] {
                    std::vector<index_t> id(static_cast<std::size_t>(n));
                    std::iota(id.begin(), id.end(), index_t{0});
                    return id;
                }();
    // CSC view of A = CSR arrays of its transpose
    SparseMatrix at = transpose(a);
    const std::vector<index_t>& ap = at.row_offsets;
    const std::vector<index_t>& ai = at.col_indices;
    const std::vector<double>& ax = at.values;

    f.pinv.assign(static_cast<std::size_t>(n), -1);
    f.lp.assign(static_cast<std::size_t>(n) + 1, 0);
    f.up.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<index_t> xi(static_cast<std::size_t>(n), 0);
    std::vector<index_t> pstack(static_cast<std::size_t>(n) + 1, 0);
    std::vector<index_t> node_stack(static_cast<std::size_t>(n) + 1, 0);
    std::vector<index_t> mark(static_cast<std::size_t>(n), -1);

    for (index_t k = 0; k < n; ++k) {
        const index_t col = f.q[k];
        // x = L \ A(:, col), pattern in xi[top..n-1] (topological)
        index_t top = n;
        for (index_t p = ap[col]; p < ap[col + 1]; ++p)
            if (mark[ai[p]] != k)
                top = lu_reach_dfs(ai[p], f.lp, f.li, f.pinv, top, xi, pstack,
                                   mark, k, node_stack);
        for (index_t p = ap[col]; p < ap[col + 1]; ++p) x[ai[p]] = ax[p];
        for (index_t p = top; p < n; ++p) {
            index_t i = xi[p];
            index_t j = f.pinv[i];
            if (j < 0) continue;
            double xi_val = x[i]; // L diagonal is 1, no division needed
            for (index_t r = f.lp[j] + 1; r < f.lp[j + 1]; ++r)
                x[f.li[r]] -= f.lx[r] * xi_val;
        }

        // pick the pivot among rows that are not yet pivotal
        index_t ipiv = -1;
        double amax = -1.0;
        for (index_t p = top; p < n; ++p) {
            index_t i = xi[p];
            if (f.pinv[i] < 0) {
                double t = std::abs(x[i]);
                if (t > amax) {
                    amax = t;
                    ipiv = i;
                }
            } else {
                f.ui.push_back(f.pinv[i]);
                f.ux.push_back(x[i]);
            }
        }
        if (ipiv < 0 || amax <= 0.0)
            throw SingularMatrixError(
                "sparse-lu: singular pivot at elimination step " + std::to_string(k),
                k);
        if (f.pinv[col] < 0 && std::abs(x[col]) >= threshold * amax)
            ipiv = col;
        const double pivot = x[ipiv];
        f.ui.push_back(k); // U diagonal, stored last in the column
        f.ux.push_back(pivot);
        f.up[k + 1] = static_cast<index_t>(f.ui.size());

        f.pinv[ipiv] = k;
        f.li.push_back(ipiv); // L diagonal, stored first
        f.lx.push_back(1.0);
        for (index_t p = top; p < n; ++p) {
            index_t i = xi[p];
            if (f.pinv[i] < 0) {
                f.li.push_back(i);
                f.lx.push_back(x[i] / pivot);
            }
            x[i] = 0.0;
        }
        f.lp[k + 1] = static_cast<index_t>(f.li.size());
    }
    // map L's row indices from input rows to factor rows
    for (index_t& i : f.li) i = f.pinv[i];
    return f;
}

inline void sparse_lu_solve(const SparseLUFactors& f, const double* b, double* out,
                            std::vector<double>& work) {
    const index_t n = f.n;
    for (index_t i = 0; i < n; ++i) work[f.pinv[i]] = b[i];
    for (index_t j = 0; j < n; ++j) { // unit lower triangular, diagonal first
        double xj = work[j];
        if (xj != 0.0)
            for (index_t p = f.lp[j] + 1; p < f.lp[j + 1]; ++p)
                work[f.li[p]] -= f.lx[p] * xj;
    }
    for (index_t j = n - 1; j >= 0; --j) { // U diagonal is the last entry
        double xj = work[j] / f.ux[f.up[j + 1] - 1];
        work[j] = xj;
        if (xj != 0.0)
            for (index_t p = f.up[j]; p < f.up[j + 1] - 1; ++p)
                work[f.ui[p]] -= f.ux[p] * xj;
    }
    for (index_t k = 0; k < n; ++k) out[f.q[k]] = work[k];
}

inline bool is_numerically_symmetric(const SparseMatrix& a) {
    if (!a.square()) return false;
    SparseMatrix at = transpose(a);
    return at.row_offsets == a.row_offsets && at.col_indices == a.col_indices &&
           at.values == a.values;
}

} // namespace detail

/// Held direct factorization. Immutable after construction; solve() is safe
/// to call concurrently (the cumulative solve timer is atomic).
class Factorization {
public:
    index_t dim() const { return n_; }
    Backend backend() const { return backend_; }
    bool symmetric() const { return symmetric_; }
    double factor_seconds() const { return factor_seconds_; }
    double solve_seconds() const { return solve_time_.seconds(); }

    /// Input row i of the matrix became row row_permutation()[i] of the factors.
    const std::vector<index_t>& row_permutation() const { return row_perm_; }
    /// Elimination step k handled input column col_permutation()[k].
    const std::vector<index_t>& col_permutation() const { return col_perm_; }

    std::vector<double> solve(const std::vector<double>& b) const {
        if (static_cast<index_t>(b.size()) != n_)
            throw std::invalid_argument("Factorization::solve: dimension mismatch");
        WallTimer timer;
        std::vector<double> x(b.size());
        if (n_ > 0) {
            if (backend_ == Backend::dense_lu) {
                detail::dense_lu_solve(dense_, b.data(), x.data());
            } else {
                std::vector<double> work(static_cast<std::size_t>(n_));
                detail::sparse_lu_solve(sparse_, b.data(), x.data(), work);
            }
        }
        solve_time_.add_seconds(timer.seconds());
        return x;
    }

    /// Multi right-hand-side solve; one call, shared workspace.
    std::vector<std::vector<double>> solve(
        const std::vector<std::vector<double>>& rhs) const {
        WallTimer timer;
        std::vector<std::vector<double>> out(rhs.size());
        std::vector<double> work(static_cast<std::size_t>(n_));
        for (std::size_t k = 0; k < rhs.size(); ++k) {
            if (static_cast<index_t>(rhs[k].size()) != n_)
                throw std::invalid_argument(
                    "Factorization::solve: dimension mismatch");
            out[k].resize(rhs[k].size());
            if (n_ == 0) continue;
            if (backend_ == Backend::dense_lu)
                detail::dense_lu_solve(dense_, rhs[k].data(), out[k].data());
            else
                detail::sparse_lu_solve(sparse_, rhs[k].data(), out[k].data(), work);
        }
        solve_time_.add_seconds(timer.seconds());
        return out;
    }

    friend Factorization factorize(const SparseMatrix& a, const BackendConfig& cfg);

private:
    index_t n_ = 0;
    Backend backend_ = Backend::dense_lu;
    bool symmetric_ = false;
    double factor_seconds_ = 0.0;
    std::vector<index_t> row_perm_;
    std::vector<index_t> col_perm_;
    detail::DenseLUFactors dense_;
    detail::SparseLUFactors sparse_;
    mutable TimeAccumulator solve_time_;
};

/// Factorizes a square matrix with the configured backend. A 0 x 0 matrix
/// yields a trivial factorization.
inline Factorization factorize(const SparseMatrix& a, const BackendConfig& cfg) {
    if (!a.square())
        throw std::invalid_argument("factorize: matrix must be square");
    if (!(cfg.pivot_threshold > 0.0) || cfg.pivot_threshold > 1.0)
        throw std::invalid_argument("factorize: pivot_threshold must be in (0,1]");
    WallTimer timer;
    Factorization f;
    f.n_ = a.nrows;
    f.backend_ = cfg.backend_id;
    f.symmetric_ = detail::is_numerically_symmetric(a);
    if (a.nrows > 0) {
        if (cfg.backend_id == Backend::dense_lu) {
            f.dense_ = detail::dense_lu_factor(a, cfg.pivot_threshold);
            f.row_perm_.resize(static_cast<std::size_t>(a.nrows));
            for (index_t k = 0; k < a.nrows; ++k)
                f.row_perm_[f.dense_.perm[k]] = k;
            f.col_perm_.resize(static_cast<std::size_t>(a.nrows));
            std::iota(f.col_perm_.begin(), f.col_perm_.end(), index_t{0});
        } else {
            f.sparse_ = detail::sparse_lu_factor(a, cfg.pivot_threshold,
                                                 cfg.ordering);
            f.row_perm_ = f.sparse_.pinv;
            f.col_perm_ = f.sparse_.q;
        }
    }
    f.factor_seconds_ = timer.seconds();
    return f;
}

} // namespace gdsw
