#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gdsw/eig.hpp"
#include "gdsw/error.hpp"
#include "gdsw/sparse.hpp"
#include "gdsw/timing.hpp"

namespace gdsw {

enum class KrylovMethod { gmres, cg };
enum class PrecondSide { left, right };

inline std::string to_string(KrylovMethod m) {
    return m == KrylovMethod::gmres ? "gmres" : "cg";
}

inline KrylovMethod krylov_method_from_string(const std::string& s) {
    if (s == "gmres") return KrylovMethod::gmres;
    if (s == "cg") return KrylovMethod::cg;
    throw std::invalid_argument("unknown Krylov method: " + s);
}

/// y = Op(x); preconditioner operators apply M^{-1}.
using LinearOperator = std::function<std::vector<double>(const std::vector<double>&)>;

struct KrylovConfig {
    KrylovMethod method = KrylovMethod::gmres;
    double rel_tol = 1e-8;
    index_t max_iter = 1000;
    index_t restart = 200; // effectively unrestarted at desk scale
    PrecondSide side = PrecondSide::left;
    /// Optional per-iteration observer (CG only): called with (k, x_k).
    std::function<void(index_t, const std::vector<double>&)> iterate_hook;
};

struct KrylovResult {
    std::vector<double> solution;
    index_t iterations = 0;
    /// residual_history[k] is the recurrence residual norm after k
    /// iterations, in the stopping norm (preconditioned for left-GMRES).
    std::vector<double> residual_history;
    bool converged = false;
    std::optional<double> cond_estimate;                     // cg
    std::optional<std::pair<double, double>> ritz_extremes;  // cg
    double final_recurrence_residual = 0.0;
    double final_true_residual = 0.0; // recomputed, same norm as recurrence
    double true_residual_2norm = 0.0; // ||b - A x||, unpreconditioned
    double seconds = 0.0;
    // Arnoldi data of the final cycle, for Ritz diagnostics
    std::vector<double> hessenberg; // row-major (cols+1) x cols
    index_t hessenberg_cols = 0;
};

namespace detail {

inline std::vector<double> apply_or_copy(const LinearOperator& op,
                                         const std::vector<double>& x) {
    return op ? op(x) : x;
}

} // namespace detail

/// Restarted GMRES with modified Gram-Schmidt (one reorthogonalization pass
/// on severe cancellation) and Givens-rotation least squares. Left
/// preconditioning stops on the preconditioned residual ratio, right
/// preconditioning on the true residual ratio.
inline KrylovResult gmres(const LinearOperator& apply_a,
                          const LinearOperator& apply_m,
                          const std::vector<double>& b, const KrylovConfig& cfg) {
    if (!(cfg.rel_tol > 0.0))
        throw std::invalid_argument("gmres: rel_tol must be positive");
    if (cfg.restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
    WallTimer timer;
    const index_t n = static_cast<index_t>(b.size());
    const bool left = cfg.side == PrecondSide::left;
    KrylovResult res;
    res.solution.assign(b.size(), 0.0);

    auto stopping_residual = [&](const std::vector<double>& x) {
        auto r = b;
        if (x != std::vector<double>(b.size(), 0.0)) {
            auto ax = apply_a(x);
            for (index_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
        }
        if (left) r = detail::apply_or_copy(apply_m, r);
        return r;
    };

    std::vector<double> r = stopping_residual(res.solution);
    double r0_norm = norm2(r);
    res.residual_history.push_back(r0_norm);
    if (r0_norm == 0.0) { // lucky zero right-hand side
        res.converged = true;
        res.seconds = timer.seconds();
        return res;
    }

    const index_t m = cfg.restart;
    bool done = false;
    double beta = r0_norm;
    while (!done) {
        std::vector<std::vector<double>> basis;
        basis.push_back(r);
        scale(1.0 / beta, basis[0]);
        std::vector<std::vector<double>> h_raw;    // h_raw[j]: column j, j+2 entries
        std::vector<std::vector<double>> h_trans;  // after Givens
        std::vector<double> cs, sn;
        std::vector<double> g = {beta};
        index_t k = 0;
        bool breakdown = false;

        while (k < m && res.iterations < cfg.max_iter) {
            std::vector<double> w;
            if (left)
                w = detail::apply_or_copy(apply_m, apply_a(basis[k]));
            else
                w = apply_a(detail::apply_or_copy(apply_m, basis[k]));
            const double norm_before = norm2(w);
            std::vector<double> hcol(static_cast<std::size_t>(k) + 2, 0.0);
            for (index_t i = 0; i <= k; ++i) {
                double hij = dot(w, basis[i]);
                hcol[i] = hij;
                axpy(-hij, basis[i], w);
            }
            double wnorm = norm2(w);
            if (wnorm < 1e-8 * norm_before) { // lost orthogonality, one more pass
                for (index_t i = 0; i <= k; ++i) {
                    double corr = dot(w, basis[i]);
                    hcol[i] += corr;
                    axpy(-corr, basis[i], w);
                }
                wnorm = norm2(w);
            }
            hcol[k + 1] = wnorm;
            h_raw.push_back(hcol);

            // least squares update by Givens rotations
            std::vector<double> ht = hcol;
            for (index_t i = 0; i < k; ++i) {
                double t0 = cs[i] * ht[i] + sn[i] * ht[i + 1];
                double t1 = -sn[i] * ht[i] + cs[i] * ht[i + 1];
                ht[i] = t0;
                ht[i + 1] = t1;
            }
            double denom = std::hypot(ht[k], ht[k + 1]);
            double c = denom == 0.0 ? 1.0 : ht[k] / denom;
            double s = denom == 0.0 ? 0.0 : ht[k + 1] / denom;
            cs.push_back(c);
            sn.push_back(s);
            ht[k] = denom;
            ht[k + 1] = 0.0;
            h_trans.push_back(ht);
            g.push_back(-s * g[k]);
            g[k] = c * g[k];

            ++res.iterations;
            ++k;
            const double rec = std::abs(g[k]);
            res.residual_history.push_back(rec);

            if (wnorm <= 1e-300) { // happy breakdown: exact solution in span
                breakdown = true;
                break;
            }
            basis.push_back(w);
            scale(1.0 / wnorm, basis.back());
            if (rec <= cfg.rel_tol * r0_norm) break;
        }

        // y from the triangular system, then the iterate update
        std::vector<double> y(static_cast<std::size_t>(k), 0.0);
        for (index_t i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (index_t j = i + 1; j < k; ++j) s -= h_trans[j][i] * y[j];
            y[i] = h_trans[i].size() > static_cast<std::size_t>(i) && h_trans[i][i] != 0.0
                       ? s / h_trans[i][i]
                       : 0.0;
        }
        std::vector<double> update(b.size(), 0.0);
        for (index_t j = 0; j < k; ++j) axpy(y[j], basis[j], update);
        if (!left) update = detail::apply_or_copy(apply_m, update);
        axpy(1.0, update, res.solution);

        res.hessenberg_cols = k;
        res.hessenberg.assign(static_cast<std::size_t>((k + 1) * k), 0.0);
        for (index_t j = 0; j < k; ++j)
            for (index_t i = 0; i <= j + 1; ++i)
                res.hessenberg[i * k + j] = h_raw[j][i];

        const double rec = res.residual_history.back();
        if (rec <= cfg.rel_tol * r0_norm || breakdown ||
            res.iterations >= cfg.max_iter) {
            done = true;
        } else { // restart
            r = stopping_residual(res.solution);
            beta = norm2(r);
        }
    }

    res.final_recurrence_residual = res.residual_history.back();
    {
        auto ax = apply_a(res.solution);
        std::vector<double> true_r(b.size());
        for (index_t i = 0; i < n; ++i) true_r[i] = b[i] - ax[i];
        res.true_residual_2norm = norm2(true_r);
        if (left) true_r = detail::apply_or_copy(apply_m, true_r);
        res.final_true_residual = norm2(true_r);
    }
    res.converged = res.final_recurrence_residual <= cfg.rel_tol * r0_norm;
    res.seconds = timer.seconds();
    return res;
}

/// Preconditioned conjugate gradients with the Lanczos tridiagonal
/// assembled from the CG coefficients; cond_estimate is the ratio of its
/// extreme eigenvalues (estimating kappa(M^{-1} A)).
inline KrylovResult cg(const LinearOperator& apply_a, const LinearOperator& apply_m,
                       const std::vector<double>& b, const KrylovConfig& cfg) {
    if (!(cfg.rel_tol > 0.0))
        throw std::invalid_argument("cg: rel_tol must be positive");
    WallTimer timer;
    const index_t n = static_cast<index_t>(b.size());
    KrylovResult res;
    res.solution.assign(b.size(), 0.0);

    std::vector<double> r = b;
    double r0_norm = norm2(r);
    res.residual_history.push_back(r0_norm);
    if (r0_norm == 0.0) {
        res.converged = true;
        res.seconds = timer.seconds();
        return res;
    }
    std::vector<double> z = detail::apply_or_copy(apply_m, r);
    std::vector<double> p = z;
    double rz = dot(r, z);
    if (rz <= 0.0)
        throw IndefiniteOperatorError(
            "cg: inner product <r, M^{-1} r> = " + std::to_string(rz) +
            " is not positive");

    std::vector<double> alphas, betas;
    while (res.iterations < cfg.max_iter) {
        auto ap = apply_a(p);
        double pap = dot(p, ap);
        if (pap <= 0.0)
            throw IndefiniteOperatorError("cg: inner product <p, A p> = " +
                                          std::to_string(pap) + " is not positive");
        double alpha = rz / pap;
        alphas.push_back(alpha);
        axpy(alpha, p, res.solution);
        axpy(-alpha, ap, r);
        ++res.iterations;
        double rnorm = norm2(r);
        res.residual_history.push_back(rnorm);
        if (cfg.iterate_hook) cfg.iterate_hook(res.iterations, res.solution);
        if (rnorm <= cfg.rel_tol * r0_norm) {
            res.converged = true;
            break;
        }
        z = detail::apply_or_copy(apply_m, r);
        double rz_new = dot(r, z);
        if (rz_new <= 0.0)
            throw IndefiniteOperatorError(
                "cg: inner product <r, M^{-1} r> = " + std::to_string(rz_new) +
                " is not positive");
        double beta = rz_new / rz;
        betas.push_back(beta);
        for (index_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz_new;
    }

    // Lanczos tridiagonal from the CG coefficients
    const index_t steps = static_cast<index_t>(alphas.size());
    if (steps > 0) {
        std::vector<double> diag(static_cast<std::size_t>(steps));
        std::vector<double> off(static_cast<std::size_t>(steps > 0 ? steps - 1 : 0));
        for (index_t j = 0; j < steps; ++j) {
            diag[j] = 1.0 / alphas[j];
            if (j > 0) diag[j] += betas[j - 1] / alphas[j - 1];
            if (j + 1 < steps) off[j] = std::sqrt(betas[j]) / alphas[j];
        }
        auto ev = tridiagonal_eigenvalues(diag, off);
        res.ritz_extremes = std::make_pair(ev.front(), ev.back());
        res.cond_estimate = ev.back() / ev.front();
    }

    auto ax = apply_a(res.solution);
    std::vector<double> true_r(b.size());
    for (index_t i = 0; i < n; ++i) true_r[i] = b[i] - ax[i];
    res.true_residual_2norm = norm2(true_r);
    res.final_true_residual = res.true_residual_2norm;
    res.final_recurrence_residual = res.residual_history.back();
    res.seconds = timer.seconds();
    return res;
}

/// Ritz values of the preconditioned operator from the retained Arnoldi
/// Hessenberg (leading square block). Diagnostics only.
inline std::vector<std::complex<double>> gmres_ritz_values(const KrylovResult& res) {
    const index_t k = res.hessenberg_cols;
    if (k == 0) return {};
    std::vector<double> h(static_cast<std::size_t>(k * k));
    for (index_t i = 0; i < k; ++i)
        for (index_t j = 0; j < k; ++j) h[i * k + j] = res.hessenberg[i * k + j];
    return hessenberg_eigenvalues(std::move(h), static_cast<int>(k));
}

/// Convenience adapters for the common matrix / preconditioner case.
inline LinearOperator make_operator(const SparseMatrix& a) {
    return [&a](const std::vector<double>& x) { return spmv(a, x); };
}

} // namespace gdsw
