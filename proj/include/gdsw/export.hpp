#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "gdsw/coarse.hpp"
#include "gdsw/mmio.hpp"
#include "gdsw/partition.hpp"
#include "gdsw/problems.hpp"

namespace gdsw {

inline nlohmann::json decomposition_to_json(const Decomposition& d) {
    nlohmann::json j;
    j["n_subdomains"] = d.n_subdomains;
    j["overlap_layers"] = d.overlap_layers;
    j["dofs_per_node"] = d.dofs_per_node;
    j["owner"] = d.owner;
    j["node_of_dof"] = d.node_of_dof;
    j["overlapping"] = d.overlapping;
    if (!d.interface_dofs.empty()) j["interface_dofs"] = d.interface_dofs;
    return j;
}

inline nlohmann::json component_report_json(
    const std::vector<InterfaceComponent>& components) {
    nlohmann::json j;
    std::size_t n_vertex = 0, n_edge = 0, n_face = 0;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : components) {
        switch (c.kind) {
            case ComponentKind::vertex: ++n_vertex; break;
            case ComponentKind::edge: ++n_edge; break;
            case ComponentKind::face: ++n_face; break;
        }
        list.push_back({{"kind", to_string(c.kind)},
                        {"size", c.dofs.size()},
                        {"adjacent_subdomains", c.adjacent_subdomains}});
    }
    j["n_components"] = components.size();
    j["counts"] = {{"vertex", n_vertex}, {"edge", n_edge}, {"face", n_face}};
    j["components"] = list;
    return j;
}

/// Writes <prefix>.mtx (stiffness) and <prefix>.json (dof maps, grid
/// metadata, node coordinates).
inline void export_system(const AssembledSystem& sys, const std::string& prefix) {
    write_matrix_market_file(prefix + ".mtx", sys.K, sys.kind + " stiffness");
    nlohmann::json j;
    j["kind"] = sys.kind;
    j["dim"] = sys.grid.dim;
    j["cells"] = {sys.grid.cells[0], sys.grid.cells[1], sys.grid.cells[2]};
    j["h"] = sys.grid.h;
    j["dofs_per_node"] = sys.dofs_per_node;
    j["n_free_dofs"] = sys.n_free();
    j["free_dofs"] = sys.free_dofs;
    j["dirichlet_dofs"] = sys.dirichlet_dofs;
    j["node_of_dof"] = sys.node_of_dof;
    j["component_of_dof"] = sys.component_of_dof;
    nlohmann::json coords = nlohmann::json::array();
    for (index_t node = 0; node < sys.grid.n_nodes(); ++node) {
        auto c = sys.grid.node_coordinates(node);
        coords.push_back({c[0], c[1], c[2]});
    }
    j["node_coordinates"] = coords;
    std::ofstream out(prefix + ".json");
    if (!out) throw std::runtime_error("cannot open " + prefix + ".json");
    out << j.dump(2) << "\n";
}

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace gdsw
