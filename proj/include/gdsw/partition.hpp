#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#include "gdsw/grid.hpp"
#include "gdsw/sparse.hpp"

namespace gdsw {

/// Restriction onto one overlapping subdomain: the sorted global dof list
/// defines R_i (gather) and its transpose (scatter-add).
struct RestrictionOp {
    index_t subdomain = 0;
    std::vector<index_t> global_indices;

    std::vector<double> gather(const std::vector<double>& x) const {
        std::vector<double> local(global_indices.size());
        for (std::size_t p = 0; p < global_indices.size(); ++p)
            local[p] = x[global_indices[p]];
        return local;
    }

    void scatter_add(const std::vector<double>& local, std::vector<double>& x) const {
        for (std::size_t p = 0; p < global_indices.size(); ++p)
            x[global_indices[p]] += local[p];
    }
};

/// Nonoverlapping dof ownership plus per-subdomain overlapping index sets.
struct Decomposition {
    index_t n_subdomains = 0;
    index_t overlap_layers = 0;
    index_t dofs_per_node = 1;
    std::vector<index_t> owner;                    // dof -> subdomain id
    std::vector<index_t> node_of_dof;              // dof -> node label
    std::vector<std::vector<index_t>> overlapping; // per subdomain, sorted

    // interface split, filled by identify_interface
    std::vector<index_t> interface_dofs;
    std::vector<index_t> interior_dofs;

    index_t n_dofs() const { return static_cast<index_t>(owner.size()); }

    std::vector<index_t> owned(index_t subdomain) const {
        std::vector<index_t> d;
        for (index_t g = 0; g < n_dofs(); ++g)
            if (owner[g] == subdomain) d.push_back(g);
        return d;
    }

    RestrictionOp restriction(index_t subdomain) const {
        return {subdomain, overlapping[subdomain]};
    }
};

/// Ownership from an explicit owner array; overlapping sets start as the
/// owned sets (zero overlap layers).
inline Decomposition decomposition_from_owner(std::vector<index_t> owner,
                                              index_t n_subdomains,
                                              index_t dofs_per_node = 1) {
    Decomposition d;
    d.n_subdomains = n_subdomains;
    d.dofs_per_node = dofs_per_node;
    d.owner = std::move(owner);
    d.node_of_dof.resize(d.owner.size());
    for (std::size_t g = 0; g < d.owner.size(); ++g) {
        if (d.owner[g] < 0 || d.owner[g] >= n_subdomains)
            throw std::out_of_range("decomposition_from_owner: owner id out of range");
        d.node_of_dof[g] = static_cast<index_t>(g) / dofs_per_node;
    }
    d.overlapping.assign(static_cast<std::size_t>(n_subdomains), {});
    for (index_t g = 0; g < d.n_dofs(); ++g)
        d.overlapping[d.owner[g]].push_back(g);
    return d;
}

/// Splits a structured grid into boxes of equal cell count. Nodes on box
/// boundaries go to the lowest-id adjacent box; all dofs of a node share
/// the owner.
inline Decomposition partition_structured(const StructuredGrid& grid,
                                          std::array<index_t, 3> parts_per_axis,
                                          index_t dofs_per_node) {
    for (int a = grid.dim; a < 3; ++a) parts_per_axis[a] = 1;
    index_t n_parts = 1;
    std::array<index_t, 3> cells_per_part = {1, 1, 1};
    for (int a = 0; a < grid.dim; ++a) {
        if (parts_per_axis[a] < 1 || grid.cells[a] % parts_per_axis[a] != 0)
            throw std::invalid_argument(
                "partition_structured: parts per axis must divide cells per axis");
        cells_per_part[a] = grid.cells[a] / parts_per_axis[a];
        n_parts *= parts_per_axis[a];
    }

    const index_t n_nodes = grid.n_nodes();
    std::vector<index_t> owner(static_cast<std::size_t>(n_nodes * dofs_per_node));
    for (index_t node = 0; node < n_nodes; ++node) {
        auto m = grid.node_multi_index(node);
        std::array<index_t, 3> box = {0, 0, 0};
        for (int a = 0; a < grid.dim; ++a) {
            // lowest adjacent cell decides: the cell below the grid line
            index_t cell = std::max<index_t>(m[a] - 1, 0);
            box[a] = cell / cells_per_part[a];
        }
        index_t part =
            box[0] + parts_per_axis[0] * (box[1] + parts_per_axis[1] * box[2]);
        for (index_t c = 0; c < dofs_per_node; ++c)
            owner[node * dofs_per_node + c] = part;
    }
    return decomposition_from_owner(std::move(owner), n_parts, dofs_per_node);
}

/// Reindexes a decomposition onto a kept subset of its dofs (used to pass
/// from grid dofs to the free dofs of a constrained assembly). Subdomain
/// count and ids are preserved even if a subdomain ends up empty.
inline Decomposition restrict_decomposition(const Decomposition& d,
                                            const std::vector<index_t>& keep) {
    detail::check_index_set(keep, d.n_dofs(), "restrict_decomposition keep");
    Decomposition r;
    r.n_subdomains = d.n_subdomains;
    r.overlap_layers = d.overlap_layers;
    r.dofs_per_node = d.dofs_per_node;
    r.owner.resize(keep.size());
    r.node_of_dof.resize(keep.size());
    std::vector<index_t> new_id(static_cast<std::size_t>(d.n_dofs()), -1);
    for (std::size_t p = 0; p < keep.size(); ++p) {
        new_id[keep[p]] = static_cast<index_t>(p);
        r.owner[p] = d.owner[keep[p]];
        r.node_of_dof[p] = d.node_of_dof[keep[p]];
    }
    r.overlapping.assign(static_cast<std::size_t>(d.n_subdomains), {});
    for (index_t i = 0; i < d.n_subdomains; ++i)
        for (index_t g : d.overlapping[i])
            if (new_id[g] >= 0) r.overlapping[i].push_back(new_id[g]);
    return r;
}

/// Grows every overlapping set by `layers` rounds of matrix-graph
/// neighbors, using the symmetrized adjacency of K.
inline Decomposition extend_overlap(const SparseMatrix& k, const Decomposition& d,
                                    index_t layers) {
    if (!k.square() || k.nrows != d.n_dofs())
        throw std::invalid_argument("extend_overlap: matrix/decomposition mismatch");
    Decomposition out = d;
    out.overlap_layers = d.overlap_layers + layers;
    if (layers == 0) return out;
    SparseMatrix kt = transpose(k);
    const index_t n = k.nrows;

    std::vector<char> in_set(static_cast<std::size_t>(n));
    for (index_t i = 0; i < d.n_subdomains; ++i) {
        std::fill(in_set.begin(), in_set.end(), 0);
        std::vector<index_t> frontier = out.overlapping[i];
        for (index_t g : frontier) in_set[g] = 1;
        for (index_t round = 0; round < layers; ++round) {
            std::vector<index_t> next;
            for (index_t g : frontier) {
                for (index_t p = k.row_offsets[g]; p < k.row_offsets[g + 1]; ++p) {
                    index_t j = k.col_indices[p];
                    if (!in_set[j]) {
                        in_set[j] = 1;
                        next.push_back(j);
                    }
                }
                for (index_t p = kt.row_offsets[g]; p < kt.row_offsets[g + 1]; ++p) {
                    index_t j = kt.col_indices[p];
                    if (!in_set[j]) {
                        in_set[j] = 1;
                        next.push_back(j);
                    }
                }
            }
            frontier = std::move(next);
        }
        std::vector<index_t> grown;
        for (index_t g = 0; g < n; ++g)
            if (in_set[g]) grown.push_back(g);
        out.overlapping[i] = std::move(grown);
    }
    return out;
}

/// Principal submatrix of K on the restriction's index set (K_i = R_i K R_i^T).
inline SparseMatrix local_matrix(const SparseMatrix& k, const RestrictionOp& r) {
    return extract_submatrix(k, r.global_indices, r.global_indices);
}

} // namespace gdsw
