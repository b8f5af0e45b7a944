#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gdsw {

using index_t = std::int64_t;

/// Zero or near-zero pivot during a direct factorization. `index` is the
/// elimination step (row/column in the permuted system) that failed.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, index_t index)
        : std::runtime_error(what), index_(index) {}

    index_t index() const noexcept { return index_; }

private:
    index_t index_;
};

/// CG detected a nonpositive inner product; the operator pair is not SPD.
class IndefiniteOperatorError : public std::runtime_error {
public:
    explicit IndefiniteOperatorError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace gdsw
