#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsw/sparse.hpp"

namespace gdsw {

/// Reads a Matrix Market coordinate file (real, general or symmetric,
/// 1-based indices). Symmetric storage is expanded to both triangles.
inline SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("matrix market: empty stream");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix")
        throw std::runtime_error("matrix market: bad banner");
    if (format != "coordinate")
        throw std::runtime_error("matrix market: only coordinate format supported");
    if (field != "real" && field != "integer")
        throw std::runtime_error("matrix market: only real data supported");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw std::runtime_error("matrix market: unsupported symmetry " + symmetry);

    while (std::getline(in, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '%') continue;
        break;
    }
    std::istringstream sizes(line);
    index_t nrows = -1, ncols = -1, nnz = -1;
    sizes >> nrows >> ncols >> nnz;
    if (nrows < 0 || ncols < 0 || nnz < 0)
        throw std::runtime_error("matrix market: bad size line");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(nnz));
    for (index_t k = 0; k < nnz; ++k) {
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v))
            throw std::runtime_error("matrix market: truncated entry list");
        if (i < 1 || i > nrows || j < 1 || j > ncols)
            throw std::runtime_error("matrix market: entry out of range");
        entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    return SparseMatrix::from_triplets(nrows, ncols, entries);
}

inline SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix_market(in);
}

/// Writes coordinate real general format with 1-based indices and
/// round-trip-exact values.
inline void write_matrix_market(std::ostream& out, const SparseMatrix& a,
                                const std::string& comment = "") {
    out << "%%MatrixMarket matrix coordinate real general\n";
    if (!comment.empty()) out << "% " << comment << "\n";
    out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
    char buf[64];
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            auto res = std::to_chars(buf, buf + sizeof(buf), a.values[p]);
            out << (i + 1) << " " << (a.col_indices[p] + 1) << " ";
            out.write(buf, res.ptr - buf);
            out << "\n";
        }
    }
}

inline void write_matrix_market_file(const std::string& path, const SparseMatrix& a,
                                     const std::string& comment = "") {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_market(out, a, comment);
}

} // namespace gdsw
