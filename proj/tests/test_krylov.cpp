#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gdsw/backends.hpp"
#include "gdsw/krylov.hpp"
#include "gdsw/precond.hpp"
#include "gdsw/problems.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using gdsw::index_t;
using gdsw::KrylovConfig;
using gdsw::LinearOperator;
using gdsw::SparseMatrix;

namespace {

LinearOperator diag_op(std::vector<double> d) {
    return [d = std::move(d)](const std::vector<double>& x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = d[i] * x[i];
        return y;
    };
}

KrylovConfig gmres_cfg(double tol = 1e-8) {
    KrylovConfig c;
    c.rel_tol = tol;
    return c;
}

} // namespace

TEST_CASE("gmres basics") {
    SECTION("identity converges in one iteration") {
        std::vector<double> b = {1.0, -2.0, 0.5};
        auto res = gdsw::gmres(diag_op({1, 1, 1}), nullptr, b, gmres_cfg());
        CHECK(res.converged);
        CHECK(res.iterations == 1);
        for (int i = 0; i < 3; ++i)
            CHECK(res.solution[i] == Catch::Approx(b[i]).margin(1e-14));
    }
    SECTION("three distinct eigenvalues terminate within three iterations") {
        std::vector<double> b = {1.0, 1.0, 1.0};
        auto res = gdsw::gmres(diag_op({1, 2, 3}), nullptr, b, gmres_cfg());
        CHECK(res.converged);
        CHECK(res.iterations <= 3);
        CHECK(res.solution[0] == Catch::Approx(1.0));
        CHECK(res.solution[1] == Catch::Approx(0.5));
        CHECK(res.solution[2] == Catch::Approx(1.0 / 3.0));
    }
    SECTION("zero right-hand side is handled without iterating") {
        auto res = gdsw::gmres(diag_op({1, 2}), nullptr, {0.0, 0.0}, gmres_cfg());
        CHECK(res.converged);
        CHECK(res.iterations == 0);
        CHECK(res.residual_history == std::vector<double>{0.0});
    }
    SECTION("max_iter exceeded reports non-convergence with the best iterate") {
        auto k = fixtures::laplacian_2d_dirichlet(12, 12);
        KrylovConfig c = gmres_cfg(1e-12);
        c.max_iter = 3;
        auto res = gdsw::gmres(gdsw::make_operator(k), nullptr,
                               fixtures::ones(k.nrows), c);
        CHECK(!res.converged);
        CHECK(res.iterations == 3);
        CHECK(res.residual_history.back() < res.residual_history.front());
    }
    SECTION("invalid settings") {
        KrylovConfig c;
        c.rel_tol = 0.0;
        CHECK_THROWS_AS(gdsw::gmres(diag_op({1}), nullptr, {1.0}, c),
                        std::invalid_argument);
        c = KrylovConfig{};
        c.restart = 0;
        CHECK_THROWS_AS(gdsw::gmres(diag_op({1}), nullptr, {1.0}, c),
                        std::invalid_argument);
    }
}

TEST_CASE("gmres stopping rule") {
    SECTION("stops at the first index reaching the threshold") {
        // two-step system: ratio history ~ [1, 1e-3, ~0]
        std::vector<double> b = {1.0, 1e-6};
        auto res = gdsw::gmres(diag_op({1.0, 1000.0}), nullptr, b, gmres_cfg());
        REQUIRE(res.iterations == 2);
        REQUIRE(res.residual_history.size() == 3);
        double r0 = res.residual_history[0];
        CHECK(res.residual_history[1] / r0 > 1e-8); // not converged at k=1
        CHECK(res.residual_history[1] / r0 == Catch::Approx(1e-3).epsilon(0.1));
        CHECK(res.residual_history[2] / r0 <= 1e-8); // first hit at k=2
        CHECK(res.converged);
    }
    SECTION("property: stop index is the first sub-threshold ratio") {
        std::mt19937_64 rng(314);
        for (int trial = 0; trial < 6; ++trial) {
            SparseMatrix a = trial % 2 == 0
                                 ? fixtures::random_diag_dominant(30, 0.2, rng, true)
                                 : fixtures::random_diag_dominant(30, 0.2, rng);
            auto b = fixtures::random_vector(30, rng);
            auto res = gdsw::gmres(gdsw::make_operator(a), nullptr, b, gmres_cfg());
            REQUIRE(res.converged);
            double r0 = res.residual_history[0];
            for (index_t k = 0; k + 1 < res.iterations; ++k)
                CHECK(res.residual_history[k] / r0 > 1e-8);
            CHECK(res.residual_history[res.iterations] / r0 <= 1e-8);
            // recurrence and true residual agree within a factor of 10
            CHECK(res.final_true_residual <=
                  10.0 * std::max(res.final_recurrence_residual, 1e-30));
        }
    }
    SECTION("residual history is monotone nonincreasing") {
        std::mt19937_64 rng(2718);
        auto a = fixtures::random_diag_dominant(40, 0.15, rng);
        auto res = gdsw::gmres(gdsw::make_operator(a), nullptr,
                               fixtures::random_vector(40, rng), gmres_cfg());
        for (std::size_t k = 1; k < res.residual_history.size(); ++k)
            CHECK(res.residual_history[k] <=
                  res.residual_history[k - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("gmres with restarts and preconditioning sides") {
    auto k = fixtures::laplacian_2d_dirichlet(10, 10);
    std::mt19937_64 rng(777);
    auto b = fixtures::random_vector(k.nrows, rng);
    auto direct = gdsw::factorize(k, gdsw::make_backend_config(gdsw::Backend::sparse_lu_ordered));
    auto expected = direct.solve(b);

    SECTION("short restart still converges") {
        KrylovConfig c = gmres_cfg();
        c.restart = 5;
        c.max_iter = 5000;
        auto res = gdsw::gmres(gdsw::make_operator(k), nullptr, b, c);
        CHECK(res.converged);
        CHECK(res.iterations > 5); // actually restarted
        double err = 0.0;
        for (index_t i = 0; i < k.nrows; ++i)
            err += (res.solution[i] - expected[i]) * (res.solution[i] - expected[i]);
        CHECK(std::sqrt(err) <= 1e-6 * gdsw::norm2(expected));
    }
    SECTION("left and right preconditioning give the same solution") {
        auto m = gdsw::factorize(fixtures::laplacian_2d_dirichlet(10, 10),
                                 gdsw::make_backend_config(gdsw::Backend::sparse_lu_natural));
        LinearOperator pre = [&m](const std::vector<double>& x) { return m.solve(x); };
        KrylovConfig cl = gmres_cfg();
        KrylovConfig cr = gmres_cfg();
        cr.side = gdsw::PrecondSide::right;
        auto rl = gdsw::gmres(gdsw::make_operator(k), pre, b, cl);
        auto rr = gdsw::gmres(gdsw::make_operator(k), pre, b, cr);
        CHECK(rl.converged);
        CHECK(rr.converged);
        CHECK(rl.iterations == 1); // exact preconditioner
        for (index_t i = 0; i < k.nrows; ++i)
            CHECK(rl.solution[i] == Catch::Approx(rr.solution[i]).margin(1e-8));
    }
}

TEST_CASE("gmres with the GDSW preconditioner matches the direct solve") {
    auto grid = gdsw::StructuredGrid::quad(10, 10, 0.1);
    auto sys = gdsw::assemble_laplace(grid, gdsw::BoundaryCondition::dirichlet_all);
    auto cfg = gdsw::make_backend_config(gdsw::Backend::sparse_lu_ordered);
    auto d_full = gdsw::partition_structured(grid, {2, 2, 1}, 1);
    auto d0 = gdsw::restrict_decomposition(d_full, sys.free_dofs);
    auto d = gdsw::extend_overlap(sys.K, d0, 2);
    auto basis = gdsw::build_coarse_basis(
        sys.K, d, {std::vector<double>(sys.n_free(), 1.0)}, cfg, 2);
    auto m = gdsw::setup_gdsw(sys.K, d, basis, cfg, {true, true});
    LinearOperator pre = [&m](const std::vector<double>& x) { return m.apply(x); };

    auto res = gdsw::gmres(gdsw::make_operator(sys.K), pre, sys.f, gmres_cfg());
    REQUIRE(res.converged);
    auto direct = gdsw::factorize(sys.K, cfg).solve(sys.f);
    double err = 0.0;
    for (index_t i = 0; i < sys.n_free(); ++i)
        err += (res.solution[i] - direct[i]) * (res.solution[i] - direct[i]);
    CHECK(std::sqrt(err) <= 1e-6 * gdsw::norm2(direct));
}

TEST_CASE("cg basics and condition estimation") {
    SECTION("diag(1,4): condition estimate reaches 4 after two steps") {
        KrylovConfig c;
        c.method = gdsw::KrylovMethod::cg;
        c.rel_tol = 1e-12;
        auto res = gdsw::cg(diag_op({1.0, 4.0}), nullptr, {1.0, 1.0}, c);
        CHECK(res.converged);
        CHECK(res.iterations == 2);
        REQUIRE(res.cond_estimate.has_value());
        CHECK(*res.cond_estimate == Catch::Approx(4.0).margin(1e-8));
    }
    SECTION("perfect preconditioner: one iteration, condition near one") {
        auto a = fixtures::laplacian_1d_dirichlet(20);
        auto f = gdsw::factorize(a, gdsw::make_backend_config(gdsw::Backend::sparse_lu_natural));
        LinearOperator pre = [&f](const std::vector<double>& x) { return f.solve(x); };
        KrylovConfig c;
        c.rel_tol = 1e-10;
        std::mt19937_64 rng(12);
        auto res = gdsw::cg(gdsw::make_operator(a), pre,
                            fixtures::random_vector(20, rng), c);
        CHECK(res.converged);
        CHECK(res.iterations == 1);
        REQUIRE(res.cond_estimate.has_value());
        CHECK(*res.cond_estimate == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("1D Laplacian n=50: estimate within 5% of the dense eigen oracle") {
        auto a = fixtures::laplacian_1d_dirichlet(50);
        KrylovConfig c;
        c.rel_tol = 1e-12;
        c.max_iter = 500;
        auto res = gdsw::cg(gdsw::make_operator(a), nullptr, fixtures::ones(50), c);
        REQUIRE(res.converged);
        auto ev = oracle::jacobi_eigenvalues(oracle::to_dense(a));
        double kappa = ev.back() / ev.front();
        REQUIRE(res.cond_estimate.has_value());
        CHECK(*res.cond_estimate == Catch::Approx(kappa).epsilon(0.05));
    }
    SECTION("energy-norm error decreases monotonically") {
        auto a = fixtures::laplacian_2d_dirichlet(7, 7);
        std::mt19937_64 rng(5);
        auto x_star = fixtures::random_vector(a.nrows, rng);
        auto b = gdsw::spmv(a, x_star);
        std::vector<double> energies;
        KrylovConfig c;
        c.rel_tol = 1e-10;
        c.iterate_hook = [&](index_t, const std::vector<double>& x) {
            std::vector<double> e(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] - x_star[i];
            energies.push_back(gdsw::dot(e, gdsw::spmv(a, e)));
        };
        auto res = gdsw::cg(gdsw::make_operator(a), nullptr, b, c);
        REQUIRE(res.converged);
        for (std::size_t k = 1; k < energies.size(); ++k)
            CHECK(energies[k] <= energies[k - 1] * (1.0 + 1e-10));
    }
    SECTION("indefinite operator is reported with the offending inner product") {
        try {
            auto res = gdsw::cg(diag_op({1.0, -1.0}), nullptr, {1.0, 1.0},
                                KrylovConfig{});
            FAIL("expected IndefiniteOperatorError");
        } catch (const gdsw::IndefiniteOperatorError& e) {
            CHECK(std::string(e.what()).find("A p") != std::string::npos);
        }
    }
}

TEST_CASE("gmres Ritz values") {
    SECTION("identity: all Ritz values are one") {
        auto res = gdsw::gmres(diag_op({1, 1, 1, 1}), nullptr,
                               {1.0, 2.0, 3.0, 4.0}, gmres_cfg());
        auto ritz = gdsw::gmres_ritz_values(res);
        REQUIRE(!ritz.empty());
        for (auto z : ritz) {
            CHECK(z.real() == Catch::Approx(1.0).margin(1e-12));
            CHECK(z.imag() == Catch::Approx(0.0).margin(1e-12));
        }
    }
    SECTION("diag(1,2,3): exact spectrum after a full run") {
        std::vector<double> b = {1.0, 1.0, 1.0};
        auto res = gdsw::gmres(diag_op({1, 2, 3}), nullptr, b, gmres_cfg(1e-14));
        auto ritz = gdsw::gmres_ritz_values(res);
        REQUIRE(ritz.size() == 3);
        CHECK(ritz[0].real() == Catch::Approx(1.0).margin(1e-10));
        CHECK(ritz[1].real() == Catch::Approx(2.0).margin(1e-10));
        CHECK(ritz[2].real() == Catch::Approx(3.0).margin(1e-10));
    }
    SECTION("random SPD: extremes within 10% of the dense oracle") {
        std::mt19937_64 rng(41);
        auto a = fixtures::random_diag_dominant(25, 0.3, rng, /*symmetric=*/true);
        auto res = gdsw::gmres(gdsw::make_operator(a), nullptr,
                               fixtures::random_vector(25, rng), gmres_cfg(1e-13));
        auto ritz = gdsw::gmres_ritz_values(res);
        REQUIRE(!ritz.empty());
        auto ev = oracle::jacobi_eigenvalues(oracle::to_dense(a));
        double lo = 1e300, hi = 0.0;
        for (auto z : ritz) {
            lo = std::min(lo, std::abs(z));
            hi = std::max(hi, std::abs(z));
        }
        CHECK(lo == Catch::Approx(ev.front()).epsilon(0.10));
        CHECK(hi == Catch::Approx(ev.back()).epsilon(0.10));
    }
    SECTION("no iterations, no Ritz values") {
        auto res = gdsw::gmres(diag_op({1}), nullptr, {0.0}, gmres_cfg());
        CHECK(gdsw::gmres_ritz_values(res).empty());
    }
}
