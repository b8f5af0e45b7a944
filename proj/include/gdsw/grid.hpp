#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "gdsw/error.hpp"

namespace gdsw {

/// Structured grid of uniform cube cells on [0, cells[a] * h] per axis.
struct StructuredGrid {
    int dim = 1;
    std::array<index_t, 3> cells = {1, 1, 1}; // axes >= dim are ignored
    double h = 1.0;

    StructuredGrid() = default;

    StructuredGrid(int dimension, std::array<index_t, 3> cells_per_axis,
                   double element_size)
        : dim(dimension), cells(cells_per_axis), h(element_size) {
        if (dim < 1 || dim > 3)
            throw std::invalid_argument("StructuredGrid: dim must be 1, 2, or 3");
        if (!(h > 0.0))
            throw std::invalid_argument("StructuredGrid: element size must be positive");
        for (int a = dim; a < 3; ++a) cells[a] = 1;
        for (int a = 0; a < dim; ++a)
            if (cells[a] < 1)
                throw std::invalid_argument("StructuredGrid: need >= 1 cell per axis");
    }

    static StructuredGrid line(index_t nx, double h) { return {1, {nx, 1, 1}, h}; }
    static StructuredGrid quad(index_t nx, index_t ny, double h) {
        return {2, {nx, ny, 1}, h};
    }
    static StructuredGrid hex(index_t nx, index_t ny, index_t nz, double h) {
        return {3, {nx, ny, nz}, h};
    }

    index_t nodes_along(int axis) const {
        return axis < dim ? cells[axis] + 1 : 1;
    }

    index_t n_nodes() const {
        index_t n = 1;
        for (int a = 0; a < dim; ++a) n *= cells[a] + 1;
        return n;
    }

    index_t n_cells() const {
        index_t n = 1;
        for (int a = 0; a < dim; ++a) n *= cells[a];
        return n;
    }

    index_t node_id(index_t i, index_t j = 0, index_t k = 0) const {
        return i + nodes_along(0) * (j + nodes_along(1) * k);
    }

    std::array<index_t, 3> node_multi_index(index_t node) const {
        const index_t nx = nodes_along(0), ny = nodes_along(1);
        return {node % nx, (node / nx) % ny, node / (nx * ny)};
    }

    std::array<double, 3> node_coordinates(index_t node) const {
        auto m = node_multi_index(node);
        return {m[0] * h, m[1] * h, m[2] * h};
    }

    /// True if the node lies on the face {x_axis = 0} (side 0) or
    /// {x_axis = extent} (side 1).
    bool on_face(index_t node, int axis, int side) const {
        auto m = node_multi_index(node);
        return side == 0 ? m[axis] == 0 : m[axis] == cells[axis];
    }

    bool on_boundary(index_t node) const {
        auto m = node_multi_index(node);
        for (int a = 0; a < dim; ++a)
            if (m[a] == 0 || m[a] == cells[a]) return true;
        return false;
    }
};

} // namespace gdsw
