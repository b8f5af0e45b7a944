#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsw/grid.hpp"
#include "gdsw/sparse.hpp"

namespace gdsw {

enum class BoundaryCondition { dirichlet_all, neumann_all };

/// Selection of grid faces carrying homogeneous Dirichlet constraints,
/// ordered (xmin, xmax, ymin, ymax, zmin, zmax).
struct FaceSet {
    std::array<bool, 6> faces{};

    static FaceSet none() { return {}; }
    static FaceSet xmin() {
        FaceSet s;
        s.faces[0] = true;
        return s;
    }
    static FaceSet all(int dim) {
        FaceSet s;
        for (int a = 0; a < dim; ++a) s.faces[2 * a] = s.faces[2 * a + 1] = true;
        return s;
    }

    bool empty() const {
        for (bool b : faces)
            if (b) return false;
        return true;
    }
};

enum class NullspaceMode { one_dimensional, translations, translations_rotations };

inline std::string to_string(NullspaceMode m) {
    switch (m) {
        case NullspaceMode::one_dimensional: return "one-dimensional";
        case NullspaceMode::translations: return "translations";
        case NullspaceMode::translations_rotations: return "translations-rotations";
    }
    return "unknown";
}

inline NullspaceMode nullspace_mode_from_string(const std::string& s) {
    if (s == "one-dimensional") return NullspaceMode::one_dimensional;
    if (s == "translations") return NullspaceMode::translations;
    if (s == "translations-rotations") return NullspaceMode::translations_rotations;
    throw std::invalid_argument("unknown nullspace mode: " + s);
}

/// Assembled model problem after symmetric Dirichlet elimination. K, f,
/// nullspace, and the dof maps all live on the free dofs; free_dofs and
/// dirichlet_dofs record the original grid dof ids.
struct AssembledSystem {
    StructuredGrid grid;
    std::string kind;
    index_t dofs_per_node = 1;
    SparseMatrix K;
    std::vector<double> f;
    std::vector<index_t> dirichlet_dofs;
    std::vector<index_t> free_dofs;
    std::vector<index_t> node_of_dof;      // free dof -> grid node
    std::vector<index_t> component_of_dof; // free dof -> 0..dofs_per_node-1
    std::vector<std::vector<double>> nullspace; // Neumann kernel on free dofs

    index_t n_free() const { return static_cast<index_t>(free_dofs.size()); }

    std::array<double, 3> dof_coordinates(index_t free_dof) const {
        return grid.node_coordinates(node_of_dof[free_dof]);
    }
};

namespace detail {

constexpr double kGaussPoint = 0.5773502691896257; // 1/sqrt(3)

/// Q1 shape gradients on the reference element [-1,1]^dim at point xi.
inline void q1_gradients(int dim, const std::array<double, 3>& xi,
                         std::array<std::array<double, 3>, 8>& grad) {
    const index_t n_local = index_t{1} << dim;
    for (index_t a = 0; a < n_local; ++a) {
        std::array<double, 3> sign = {a & 1 ? 1.0 : -1.0, a & 2 ? 1.0 : -1.0,
                                      a & 4 ? 1.0 : -1.0};
        for (int i = 0; i < dim; ++i) {
            double g = sign[i] * 0.5;
            for (int j = 0; j < dim; ++j)
                if (j != i) g *= 0.5 * (1.0 + sign[j] * xi[j]);
            grad[a][i] = g;
        }
    }
}

/// Scalar Q1 stiffness of one cube cell, 2-point Gauss per axis.
inline std::vector<double> laplace_element_matrix(int dim, double h) {
    const index_t n_local = index_t{1} << dim;
    std::vector<double> ke(static_cast<std::size_t>(n_local * n_local), 0.0);
    const double jac = 0.5 * h;
    double det = 1.0;
    for (int a = 0; a < dim; ++a) det *= jac;
    std::array<std::array<double, 3>, 8> grad;
    const index_t n_gauss = n_local;
    for (index_t g = 0; g < n_gauss; ++g) {
        std::array<double, 3> xi = {g & 1 ? kGaussPoint : -kGaussPoint,
                                    g & 2 ? kGaussPoint : -kGaussPoint,
                                    g & 4 ? kGaussPoint : -kGaussPoint};
        q1_gradients(dim, xi, grad);
        for (index_t a = 0; a < n_local; ++a)
            for (index_t b = 0; b < n_local; ++b) {
                double s = 0.0;
                for (int i = 0; i < dim; ++i)
                    s += (grad[a][i] / jac) * (grad[b][i] / jac);
                ke[a * n_local + b] += s * det;
            }
    }
    return ke;
}

/// Vector Q1 stiffness (24x24) of one cube cell for isotropic elasticity:
/// integrand lambda (dNa/dxi)(dNb/dxj) + mu (dNa/dxj)(dNb/dxi)
/// + mu delta_ij grad Na . grad Nb.
inline std::vector<double> elasticity_element_matrix(double h, double lambda,
                                                     double mu) {
    const index_t n_local = 8;
    const index_t n = 24;
    std::vector<double> ke(static_cast<std::size_t>(n * n), 0.0);
    const double jac = 0.5 * h;
    const double det = jac * jac * jac;
    std::array<std::array<double, 3>, 8> grad;
    for (index_t g = 0; g < 8; ++g) {
        std::array<double, 3> xi = {g & 1 ? kGaussPoint : -kGaussPoint,
                                    g & 2 ? kGaussPoint : -kGaussPoint,
                                    g & 4 ? kGaussPoint : -kGaussPoint};
        q1_gradients(3, xi, grad);
        std::array<std::array<double, 3>, 8> gx;
        for (index_t a = 0; a < n_local; ++a)
            for (int i = 0; i < 3; ++i) gx[a][i] = grad[a][i] / jac;
        for (index_t a = 0; a < n_local; ++a)
            for (index_t b = 0; b < n_local; ++b) {
                double gdot = gx[a][0] * gx[b][0] + gx[a][1] * gx[b][1] +
                              gx[a][2] * gx[b][2];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double v = lambda * gx[a][i] * gx[b][j] +
                                   mu * gx[a][j] * gx[b][i];
                        if (i == j) v += mu * gdot;
                        ke[(3 * a + i) * n + (3 * b + j)] += v * det;
                    }
            }
    }
    return ke;
}

/// Symmetric elimination of homogeneous Dirichlet dofs: keep the free
/// block of K and the free entries of f (zero boundary values contribute
/// nothing to the right-hand side).
inline void reduce_system(AssembledSystem& sys, const SparseMatrix& k_full,
                          index_t n_dofs_total) {
    std::vector<char> constrained(static_cast<std::size_t>(n_dofs_total), 0);
    for (index_t d : sys.dirichlet_dofs) constrained[d] = 1;
    sys.free_dofs.clear();
    for (index_t d = 0; d < n_dofs_total; ++d)
        if (!constrained[d]) sys.free_dofs.push_back(d);
    sys.K = extract_submatrix(k_full, sys.free_dofs, sys.free_dofs);
    sys.f.assign(sys.free_dofs.size(), 1.0);
    sys.node_of_dof.resize(sys.free_dofs.size());
    sys.component_of_dof.resize(sys.free_dofs.size());
    for (std::size_t r = 0; r < sys.free_dofs.size(); ++r) {
        sys.node_of_dof[r] = sys.free_dofs[r] / sys.dofs_per_node;
        sys.component_of_dof[r] = sys.free_dofs[r] % sys.dofs_per_node;
    }
}

} // namespace detail

/// Q1 stiffness for -div(grad u) with the unit right-hand side.
inline AssembledSystem assemble_laplace(const StructuredGrid& grid,
                                        BoundaryCondition bc) {
    AssembledSystem sys;
    sys.grid = grid;
    sys.kind = "laplace";
    sys.dofs_per_node = 1;

    const int dim = grid.dim;
    const index_t n_local = index_t{1} << dim;
    auto ke = detail::laplace_element_matrix(dim, grid.h);
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.n_cells() * n_local * n_local));
    for (index_t ez = 0; ez < (dim > 2 ? grid.cells[2] : 1); ++ez)
        for (index_t ey = 0; ey < (dim > 1 ? grid.cells[1] : 1); ++ey)
            for (index_t ex = 0; ex < grid.cells[0]; ++ex) {
                std::array<index_t, 8> nodes;
                for (index_t a = 0; a < n_local; ++a)
                    nodes[a] = grid.node_id(ex + (a & 1 ? 1 : 0),
                                            ey + (a & 2 ? 1 : 0),
                                            ez + (a & 4 ? 1 : 0));
                for (index_t a = 0; a < n_local; ++a)
                    for (index_t b = 0; b < n_local; ++b)
                        triplets.push_back({nodes[a], nodes[b], ke[a * n_local + b]});
            }
    const index_t n_nodes = grid.n_nodes();
    auto k_full = SparseMatrix::from_triplets(n_nodes, n_nodes, triplets);

    if (bc == BoundaryCondition::dirichlet_all) {
        for (index_t node = 0; node < n_nodes; ++node)
            if (grid.on_boundary(node)) sys.dirichlet_dofs.push_back(node);
    }
    detail::reduce_system(sys, k_full, n_nodes);
    if (bc == BoundaryCondition::neumann_all)
        sys.nullspace.push_back(std::vector<double>(sys.free_dofs.size(), 1.0));
    return sys;
}

/// Q1 vector stiffness for isotropic linear elasticity in 3D, right-hand
/// side of ones. Homogeneous Dirichlet on `dirichlet_faces` (all three
/// components of every node on a selected face); an empty face set is the
/// Neumann assembly and fills the rigid-body nullspace.
inline AssembledSystem assemble_elasticity3d(const StructuredGrid& grid,
                                             double youngs_modulus,
                                             double poisson_ratio,
                                             const FaceSet& dirichlet_faces) {
    if (grid.dim != 3)
        throw std::invalid_argument("assemble_elasticity3d: grid must be 3D");
    if (!(youngs_modulus > 0.0))
        throw std::invalid_argument("assemble_elasticity3d: E must be positive");
    if (!(poisson_ratio > 0.0) || !(poisson_ratio < 0.5))
        throw std::invalid_argument("assemble_elasticity3d: nu must be in (0, 0.5)");

    AssembledSystem sys;
    sys.grid = grid;
    sys.kind = "elasticity3d";
    sys.dofs_per_node = 3;

    const double lambda = youngs_modulus * poisson_ratio /
                          ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    const double mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
    auto ke = detail::elasticity_element_matrix(grid.h, lambda, mu);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.n_cells()) * 24 * 24);
    for (index_t ez = 0; ez < grid.cells[2]; ++ez)
        for (index_t ey = 0; ey < grid.cells[1]; ++ey)
            for (index_t ex = 0; ex < grid.cells[0]; ++ex) {
                std::array<index_t, 8> nodes;
                for (index_t a = 0; a < 8; ++a)
                    nodes[a] = grid.node_id(ex + (a & 1 ? 1 : 0),
                                            ey + (a & 2 ? 1 : 0),
                                            ez + (a & 4 ? 1 : 0));
                for (index_t a = 0; a < 8; ++a)
                    for (index_t b = 0; b < 8; ++b)
                        for (index_t i = 0; i < 3; ++i)
                            for (index_t j = 0; j < 3; ++j)
                                triplets.push_back({3 * nodes[a] + i,
                                                    3 * nodes[b] + j,
                                                    ke[(3 * a + i) * 24 + (3 * b + j)]});
            }
    const index_t n_dofs = 3 * grid.n_nodes();
    auto k_full = SparseMatrix::from_triplets(n_dofs, n_dofs, triplets);

    for (index_t node = 0; node < grid.n_nodes(); ++node) {
        bool constrained = false;
        for (int face = 0; face < 6 && !constrained; ++face)
            if (dirichlet_faces.faces[face] &&
                grid.on_face(node, face / 2, face % 2))
                constrained = true;
        if (constrained)
            for (index_t c = 0; c < 3; ++c)
                sys.dirichlet_dofs.push_back(3 * node + c);
    }
    detail::reduce_system(sys, k_full, n_dofs);

    if (dirichlet_faces.empty()) {
        const index_t nf = sys.n_free();
        for (index_t c = 0; c < 3; ++c) {
            std::vector<double> v(static_cast<std::size_t>(nf), 0.0);
            for (index_t r = 0; r < nf; ++r)
                if (sys.component_of_dof[r] == c) v[r] = 1.0;
            sys.nullspace.push_back(std::move(v));
        }
        // linearized rotations about the coordinate axes
        for (int axis = 0; axis < 3; ++axis) {
            const int u = (axis + 1) % 3, w = (axis + 2) % 3;
            std::vector<double> v(static_cast<std::size_t>(nf), 0.0);
            for (index_t r = 0; r < nf; ++r) {
                auto x = sys.dof_coordinates(r);
                if (sys.component_of_dof[r] == u) v[r] = -x[w];
                if (sys.component_of_dof[r] == w) v[r] = x[u];
            }
            sys.nullspace.push_back(std::move(v));
        }
    }
    return sys;
}

/// Null-space basis used for coarse-space interface values. The
/// one-dimensional mode is the fully algebraic choice (all ones,
/// regardless of the underlying PDE).
inline std::vector<std::vector<double>> nullspace_basis(const AssembledSystem& sys,
                                                        NullspaceMode mode) {
    const index_t nf = sys.n_free();
    std::vector<std::vector<double>> basis;
    switch (mode) {
        case NullspaceMode::one_dimensional:
            basis.push_back(std::vector<double>(static_cast<std::size_t>(nf), 1.0));
            break;
        case NullspaceMode::translations:
            for (index_t c = 0; c < sys.dofs_per_node; ++c) {
                std::vector<double> v(static_cast<std::size_t>(nf), 0.0);
                for (index_t r = 0; r < nf; ++r)
                    if (sys.component_of_dof[r] == c) v[r] = 1.0;
                basis.push_back(std::move(v));
            }
            break;
        case NullspaceMode::translations_rotations: {
            if (sys.dofs_per_node != 3)
                throw std::invalid_argument(
                    "nullspace_basis: rotations require a 3-component problem");
            basis = nullspace_basis(sys, NullspaceMode::translations);
            for (int axis = 0; axis < 3; ++axis) {
                const int u = (axis + 1) % 3, w = (axis + 2) % 3;
                std::vector<double> v(static_cast<std::size_t>(nf), 0.0);
                for (index_t r = 0; r < nf; ++r) {
                    auto x = sys.dof_coordinates(r);
                    if (sys.component_of_dof[r] == u) v[r] = -x[w];
                    if (sys.component_of_dof[r] == w) v[r] = x[u];
                }
                basis.push_back(std::move(v));
            }
            break;
        }
    }
    return basis;
}

} // namespace gdsw
