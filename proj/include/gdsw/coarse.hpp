#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsw/backends.hpp"
#include "gdsw/partition.hpp"
#include "gdsw/sparse.hpp"

namespace gdsw {

enum class ComponentKind { vertex, edge, face };

inline std::string to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::vertex: return "vertex";
        case ComponentKind::edge: return "edge";
        case ComponentKind::face: return "face";
    }
    return "unknown";
}

/// Connected piece of the interface: all dofs whose nodes see the same set
/// of adjacent subdomains.
struct InterfaceComponent {
    ComponentKind kind = ComponentKind::vertex;
    std::vector<index_t> dofs;                // sorted
    std::vector<index_t> adjacent_subdomains; // sorted, size >= 2
};

struct InterfaceInfo {
    std::vector<index_t> interface_dofs; // sorted
    std::vector<index_t> interior_dofs;  // sorted
    std::vector<InterfaceComponent> components;
};

/// Identifies the interface algebraically from the matrix graph and the
/// ownership map, at node granularity: a node is interface iff the owners
/// seen by its dof adjacency (plus its own) number at least two. Components
/// are classes of equal adjacent-owner sets, ordered by that set. The
/// spatial dimension only affects the vertex/edge/face labels.
inline InterfaceInfo identify_interface(const SparseMatrix& k, Decomposition& d,
                                        int spatial_dim = 3) {
    if (!k.square() || k.nrows != d.n_dofs())
        throw std::invalid_argument("identify_interface: matrix/decomposition mismatch");
    const index_t n = k.nrows;

    // compact node ids
    std::vector<index_t> node_labels = d.node_of_dof;
    std::sort(node_labels.begin(), node_labels.end());
    node_labels.erase(std::unique(node_labels.begin(), node_labels.end()),
                      node_labels.end());
    auto node_index = [&](index_t label) {
        return static_cast<index_t>(
            std::lower_bound(node_labels.begin(), node_labels.end(), label) -
            node_labels.begin());
    };
    const index_t n_nodes = static_cast<index_t>(node_labels.size());
    std::vector<std::vector<index_t>> dofs_of_node(static_cast<std::size_t>(n_nodes));
    std::vector<index_t> node_of(static_cast<std::size_t>(n));
    for (index_t g = 0; g < n; ++g) {
        node_of[g] = node_index(d.node_of_dof[g]);
        dofs_of_node[node_of[g]].push_back(g);
    }
    std::vector<index_t> node_owner(static_cast<std::size_t>(n_nodes), -1);
    for (index_t g = 0; g < n; ++g) {
        if (node_owner[node_of[g]] >= 0 && node_owner[node_of[g]] != d.owner[g])
            throw std::invalid_argument(
                "identify_interface: dofs of one node have different owners");
        node_owner[node_of[g]] = d.owner[g];
    }

    // adjacent-subdomain set per node through the symmetrized dof graph
    std::vector<std::vector<index_t>> adj_subs(static_cast<std::size_t>(n_nodes));
    for (index_t u = 0; u < n_nodes; ++u) adj_subs[u].push_back(node_owner[u]);
    SparseMatrix kt = transpose(k);
    auto touch = [&](index_t g, index_t j) {
        adj_subs[node_of[g]].push_back(node_owner[node_of[j]]);
    };
    for (index_t g = 0; g < n; ++g) {
        for (index_t p = k.row_offsets[g]; p < k.row_offsets[g + 1]; ++p)
            touch(g, k.col_indices[p]);
        for (index_t p = kt.row_offsets[g]; p < kt.row_offsets[g + 1]; ++p)
            touch(g, kt.col_indices[p]);
    }
    for (auto& s : adj_subs) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    InterfaceInfo info;
    std::map<std::vector<index_t>, std::vector<index_t>> classes; // adj set -> nodes
    for (index_t u = 0; u < n_nodes; ++u) {
        if (adj_subs[u].size() >= 2)
            classes[adj_subs[u]].push_back(u);
    }
    for (auto& [adj, nodes] : classes) {
        InterfaceComponent comp;
        comp.adjacent_subdomains = adj;
        for (index_t u : nodes)
            comp.dofs.insert(comp.dofs.end(), dofs_of_node[u].begin(),
                             dofs_of_node[u].end());
        std::sort(comp.dofs.begin(), comp.dofs.end());
        if (nodes.size() == 1)
            comp.kind = ComponentKind::vertex;
        else if (adj.size() == 2)
            comp.kind = spatial_dim == 3 ? ComponentKind::face : ComponentKind::edge;
        else
            comp.kind = ComponentKind::edge;
        info.interface_dofs.insert(info.interface_dofs.end(), comp.dofs.begin(),
                                   comp.dofs.end());
        info.components.push_back(std::move(comp));
    }
    std::sort(info.interface_dofs.begin(), info.interface_dofs.end());
    std::vector<char> on_interface(static_cast<std::size_t>(n), 0);
    for (index_t g : info.interface_dofs) on_interface[g] = 1;
    for (index_t g = 0; g < n; ++g)
        if (!on_interface[g]) info.interior_dofs.push_back(g);

    d.interface_dofs = info.interface_dofs;
    d.interior_dofs = info.interior_dofs;
    return info;
}

/// Provenance of one coarse basis column.
struct CoarseColumn {
    index_t component = 0;        // index into the component list
    index_t nullspace_vector = 0; // index into the null-space basis
};

/// Interface values Phi_Gamma: per (component, null-space vector) the
/// restriction of the vector to the component's dofs, zero elsewhere.
struct InterfaceValues {
    SparseMatrix phi_gamma; // n_dofs x n_columns
    std::vector<CoarseColumn> columns;
};

namespace detail {

/// Pivoted Cholesky rank filter on a small Gram matrix. Returns the
/// accepted column indices in ascending order; columns whose updated
/// diagonal falls below tol * max(initial diagonal) are dropped.
inline std::vector<index_t> gram_rank_filter(std::vector<double> g, index_t m,
                                             double tol) {
    std::vector<char> remaining(static_cast<std::size_t>(m), 1);
    std::vector<index_t> accepted;
    double max_diag = 0.0;
    for (index_t i = 0; i < m; ++i) max_diag = std::max(max_diag, g[i * m + i]);
    if (max_diag <= 0.0) return accepted;
    for (index_t step = 0; step < m; ++step) {
        index_t pivot = -1;
        for (index_t i = 0; i < m; ++i)
            if (remaining[i] && (pivot < 0 || g[i * m + i] > g[pivot * m + pivot]))
                pivot = i;
        if (pivot < 0 || g[pivot * m + pivot] <= tol * max_diag) break;
        accepted.push_back(pivot);
        remaining[pivot] = 0;
        const double d = g[pivot * m + pivot];
        for (index_t i = 0; i < m; ++i) {
            if (!remaining[i]) continue;
            for (index_t j = 0; j < m; ++j) {
                if (!remaining[j]) continue;
                g[i * m + j] -= g[i * m + pivot] * g[pivot * m + j] / d;
            }
        }
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

} // namespace detail

/// Builds Phi_Gamma from the null-space basis. Identically-zero columns are
/// dropped, and within each component linearly dependent restrictions are
/// removed with a deterministic Gram rank guard (tolerance 1e-12 times the
/// largest diagonal).
inline InterfaceValues interface_values(const std::vector<InterfaceComponent>& components,
                                        const std::vector<std::vector<double>>& nullspace,
                                        index_t n_dofs) {
    if (nullspace.empty())
        throw std::invalid_argument("interface_values: empty null space");
    const index_t nsv = static_cast<index_t>(nullspace.size());
    for (const auto& v : nullspace)
        if (static_cast<index_t>(v.size()) != n_dofs)
            throw std::invalid_argument("interface_values: null-space length mismatch");

    InterfaceValues out;
    std::vector<Triplet> triplets;
    index_t col = 0;
    for (index_t c = 0; c < static_cast<index_t>(components.size()); ++c) {
        const auto& dofs = components[c].dofs;
        const index_t m = nsv;
        std::vector<double> gram(static_cast<std::size_t>(m * m), 0.0);
        for (index_t a = 0; a < m; ++a)
            for (index_t b = a; b < m; ++b) {
                double s = 0.0;
                for (index_t g : dofs) s += nullspace[a][g] * nullspace[b][g];
                gram[a * m + b] = gram[b * m + a] = s;
            }
        auto kept = detail::gram_rank_filter(std::move(gram), m, 1e-12);
        for (index_t v : kept) {
            for (index_t g : dofs) {
                double val = nullspace[v][g];
                if (val != 0.0) triplets.push_back({g, col, val});
            }
            out.columns.push_back({c, v});
            ++col;
        }
    }
    out.phi_gamma = SparseMatrix::from_triplets(n_dofs, col, triplets);
    return out;
}

/// Coarse basis: interface rows carry Phi_Gamma exactly, interior rows the
/// energy-minimizing extension -K_II^{-1} K_IGamma Phi_Gamma.
struct CoarseBasis {
    SparseMatrix phi; // n_dofs x n_coarse
    std::vector<CoarseColumn> columns;
    std::vector<index_t> interior_dofs;
    std::vector<index_t> interface_dofs;

    index_t n_coarse() const { return phi.ncols; }
};

namespace detail {

/// Extension solve on one interior block: rows `block` of phi get
/// -K(block,block)^{-1} K(block, Gamma) Phi_Gamma.
inline void extend_block(const SparseMatrix& k, const std::vector<index_t>& block,
                         const std::vector<index_t>& interface,
                         const SparseMatrix& phi_gamma_rows,
                         const BackendConfig& cfg, index_t subdomain_id,
                         std::vector<Triplet>& triplets) {
    if (block.empty()) return;
    SparseMatrix k_bb = extract_submatrix(k, block, block);
    SparseMatrix k_bg = extract_submatrix(k, block, interface);
    SparseMatrix rhs = multiply(k_bg, phi_gamma_rows); // |block| x n_cols
    Factorization f = [&] {
        try {
            return factorize(k_bb, cfg);
        } catch (const SingularMatrixError& e) {
            throw SingularMatrixError(
                "energy_minimizing_extension: singular interior block of subdomain " +
                    std::to_string(subdomain_id) + " (" + e.what() + ")",
                subdomain_id);
        }
    }();
    const index_t n_cols = rhs.ncols;
    std::vector<std::vector<double>> cols(
        static_cast<std::size_t>(n_cols),
        std::vector<double>(block.size(), 0.0));
    for (index_t i = 0; i < rhs.nrows; ++i)
        for (index_t p = rhs.row_offsets[i]; p < rhs.row_offsets[i + 1]; ++p)
            cols[rhs.col_indices[p]][i] = rhs.values[p];
    auto sols = f.solve(cols);
    for (index_t c = 0; c < n_cols; ++c)
        for (std::size_t r = 0; r < block.size(); ++r) {
            double v = -sols[c][r];
            if (v != 0.0) triplets.push_back({block[r], c, v});
        }
}

} // namespace detail

/// Energy-minimizing extension of the interface values into the interior.
/// When a decomposition is supplied the interior solves run per subdomain
/// block (the interior never couples across subdomains, so the result is
/// identical to the global solve).
inline CoarseBasis energy_minimizing_extension(
    const SparseMatrix& k, const std::vector<index_t>& interior,
    const std::vector<index_t>& interface, const InterfaceValues& values,
    const BackendConfig& cfg, const Decomposition* blocks = nullptr) {
    if (static_cast<index_t>(interior.size() + interface.size()) != k.nrows)
        throw std::invalid_argument(
            "energy_minimizing_extension: interior/interface must partition the dofs");

    CoarseBasis basis;
    basis.columns = values.columns;
    basis.interior_dofs = interior;
    basis.interface_dofs = interface;

    SparseMatrix phi_gamma_rows =
        extract_submatrix(values.phi_gamma, interface, [&] {
            std::vector<index_t> all(static_cast<std::size_t>(values.phi_gamma.ncols));
            std::iota(all.begin(), all.end(), index_t{0});
            return all;
        }());

    std::vector<Triplet> triplets;
    // interface rows pass through exactly
    for (index_t i = 0; i < values.phi_gamma.nrows; ++i)
        for (index_t p = values.phi_gamma.row_offsets[i];
             p < values.phi_gamma.row_offsets[i + 1]; ++p)
            triplets.push_back({i, values.phi_gamma.col_indices[p],
                                values.phi_gamma.values[p]});

    if (blocks) {
        std::vector<std::vector<index_t>> interior_of(
            static_cast<std::size_t>(blocks->n_subdomains));
        for (index_t g : interior) interior_of[blocks->owner[g]].push_back(g);
        for (index_t i = 0; i < blocks->n_subdomains; ++i)
            detail::extend_block(k, interior_of[i], interface, phi_gamma_rows, cfg,
                                 i, triplets);
    } else {
        detail::extend_block(k, interior, interface, phi_gamma_rows, cfg, -1,
                             triplets);
    }
    basis.phi = SparseMatrix::from_triplets(k.nrows, values.phi_gamma.ncols,
                                            triplets);
    return basis;
}

/// K_0 = Phi^T K Phi.
inline SparseMatrix coarse_operator(const CoarseBasis& basis, const SparseMatrix& k) {
    return galerkin_product(basis.phi, k);
}

/// Full GDSW coarse-space pipeline: interface identification, interface
/// values from the null space, and the energy-minimizing extension.
inline CoarseBasis build_coarse_basis(const SparseMatrix& k, Decomposition& d,
                                      const std::vector<std::vector<double>>& nullspace,
                                      const BackendConfig& cfg, int spatial_dim = 3,
                                      std::vector<InterfaceComponent>* components_out = nullptr) {
    InterfaceInfo info = identify_interface(k, d, spatial_dim);
    InterfaceValues values = interface_values(info.components, nullspace, k.nrows);
    if (components_out) *components_out = info.components;
    return energy_minimizing_extension(k, info.interior_dofs, info.interface_dofs,
                                       values, cfg, &d);
}

} // namespace gdsw
