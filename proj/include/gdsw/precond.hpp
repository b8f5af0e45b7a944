#pragma once

#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gdsw/backends.hpp"
#include "gdsw/coarse.hpp"
#include "gdsw/partition.hpp"
#include "gdsw/sparse.hpp"
#include "gdsw/timing.hpp"

namespace gdsw {

struct PrecondFlags {
    bool first_level_on = true;
    bool coarse_on = true;
};

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers, contiguous chunks.
template <typename Fn>
void parallel_for(index_t n, index_t threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (index_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const index_t workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (index_t w = 0; w < workers; ++w) {
        const index_t lo = n * w / workers;
        const index_t hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (index_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace detail

/// Wall-clock breakdown of the preconditioner, following the solver-time
/// taxonomy: the subdomain and coarse solve times below include the
/// numerical factorization and the forward/backward substitutions.
struct GdswTimerSnapshot {
    double setup_local = 0.0;  // extraction + factorization of all K_i
    double setup_coarse = 0.0; // Galerkin product + factorization of K_0
    double apply_local = 0.0;  // cumulative first-level apply wall time
    double apply_coarse = 0.0; // cumulative coarse apply wall time
    double subdomain_solve = 0.0; // sum_i factor(K_i) + substitutions with K_i
    double coarse_solve = 0.0;    // factor(K_0) + substitutions with K_0
};

/// Two-level additive overlapping Schwarz preconditioner with the GDSW
/// coarse space:
///   z = Phi K_0^{-1} Phi^T r + sum_i R_i^T K_i^{-1} R_i r.
/// Immutable after setup; apply() is safe to call concurrently.
class GdswPreconditioner {
public:
    index_t dim() const { return n_; }
    const PrecondFlags& flags() const { return flags_; }
    Backend backend() const { return cfg_.backend_id; }

    index_t n_subdomains() const { return static_cast<index_t>(locals_.size()); }
    index_t max_local_dim() const { return max_local_dim_; }
    index_t coarse_dim() const { return coarse_dim_; }

    /// z = M^{-1} r; local contributions accumulate in subdomain-id order,
    /// so the floating-point result does not depend on the thread count.
    std::vector<double> apply(const std::vector<double>& r) const {
        if (static_cast<index_t>(r.size()) != n_)
            throw std::invalid_argument("GdswPreconditioner::apply: dimension mismatch");
        std::vector<double> z(r.size(), 0.0);
        if (flags_.coarse_on && coarse_dim_ > 0) {
            WallTimer t;
            auto rc = spmv(phi_t_, r);
            auto yc = coarse_->solve(rc);
            auto zc = spmv(phi_, yc);
            axpy(1.0, zc, z);
            apply_coarse_.add_seconds(t.seconds());
        }
        if (flags_.first_level_on) {
            WallTimer t;
            const index_t n_sub = n_subdomains();
            std::vector<std::vector<double>> local(static_cast<std::size_t>(n_sub));
            detail::parallel_for(n_sub, threads_, [&](index_t i) {
                local[i] = locals_[i].solve(restrictions_[i].gather(r));
            });
            for (index_t i = 0; i < n_sub; ++i)
                restrictions_[i].scatter_add(local[i], z);
            apply_local_.add_seconds(t.seconds());
        }
        return z;
    }

    GdswTimerSnapshot timers() const {
        GdswTimerSnapshot s;
        s.setup_local = setup_local_;
        s.setup_coarse = setup_coarse_;
        s.apply_local = apply_local_.seconds();
        s.apply_coarse = apply_coarse_.seconds();
        for (const auto& f : locals_)
            s.subdomain_solve += f.factor_seconds() + f.solve_seconds();
        if (coarse_)
            s.coarse_solve = coarse_->factor_seconds() + coarse_->solve_seconds();
        return s;
    }

    friend GdswPreconditioner setup_gdsw(const SparseMatrix&, const Decomposition&,
                                         const CoarseBasis&, const BackendConfig&,
                                         PrecondFlags, index_t);

private:
    index_t n_ = 0;
    index_t threads_ = 1;
    PrecondFlags flags_;
    BackendConfig cfg_;
    std::vector<RestrictionOp> restrictions_;
    std::vector<Factorization> locals_;
    std::unique_ptr<Factorization> coarse_;
    SparseMatrix phi_, phi_t_;
    index_t max_local_dim_ = 0;
    index_t coarse_dim_ = 0;
    double setup_local_ = 0.0;
    double setup_coarse_ = 0.0;
    mutable TimeAccumulator apply_local_, apply_coarse_;
};

/// Factorizes every K_i = R_i K R_i^T and the coarse operator K_0 with the
/// same backend. The coarse problem is held by a single factorization
/// instance. Requires at least one level switched on.
inline GdswPreconditioner setup_gdsw(const SparseMatrix& k, const Decomposition& d,
                                     const CoarseBasis& basis,
                                     const BackendConfig& cfg, PrecondFlags flags,
                                     index_t threads = 1) {
    if (!flags.first_level_on && !flags.coarse_on)
        throw std::invalid_argument("setup_gdsw: both levels disabled");
    if (!k.square())
        throw std::invalid_argument("setup_gdsw: K must be square");
    GdswPreconditioner m;
    m.n_ = k.nrows;
    m.threads_ = std::max<index_t>(threads, 1);
    m.flags_ = flags;
    m.cfg_ = cfg;

    if (flags.first_level_on) {
        if (d.n_dofs() != k.nrows)
            throw std::invalid_argument("setup_gdsw: decomposition/matrix mismatch");
        WallTimer t;
        const index_t n_sub = d.n_subdomains;
        m.restrictions_.resize(static_cast<std::size_t>(n_sub));
        m.locals_.resize(static_cast<std::size_t>(n_sub));
        std::vector<std::string> errors(static_cast<std::size_t>(n_sub));
        detail::parallel_for(n_sub, m.threads_, [&](index_t i) {
            m.restrictions_[i] = d.restriction(i);
            try {
                m.locals_[i] = factorize(local_matrix(k, m.restrictions_[i]), cfg);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        for (index_t i = 0; i < n_sub; ++i)
            if (!errors[i].empty())
                throw SingularMatrixError("setup_gdsw: factorization of subdomain " +
                                              std::to_string(i) + " failed: " +
                                              errors[i],
                                          i);
        for (const auto& f : m.locals_)
            m.max_local_dim_ = std::max(m.max_local_dim_, f.dim());
        m.setup_local_ = t.seconds();
    }

    if (flags.coarse_on) {
        if (basis.phi.nrows != k.nrows)
            throw std::invalid_argument("setup_gdsw: coarse basis/matrix mismatch");
        WallTimer t;
        m.phi_ = basis.phi;
        m.phi_t_ = transpose(basis.phi);
        SparseMatrix k0 = galerkin_product(basis.phi, k);
        m.coarse_dim_ = k0.nrows;
        try {
            m.coarse_ = std::make_unique<Factorization>(factorize(k0, cfg));
        } catch (const SingularMatrixError& e) {
            throw SingularMatrixError(
                std::string("setup_gdsw: coarse factorization failed: ") + e.what(),
                e.index());
        }
        m.setup_coarse_ = t.seconds();
    }
    return m;
}

} // namespace gdsw
