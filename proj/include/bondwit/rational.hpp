#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace bondwit {

/// Dense matrix of arbitrary-precision rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    mpq_class& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const mpq_class& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix from_integers(std::size_t rows, std::size_t cols, const std::vector<long>& entries);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpq_class> data_;
};

/// Exact rank over Q. Rows are scaled to integers and reduced with
/// fraction-free (Bareiss) elimination, so every intermediate is an exact
/// integer minor.
std::size_t rational_rank(const RationalMatrix& m);

}  // namespace bondwit
