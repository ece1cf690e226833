#include "bondwit/rational.hpp"

#include <utility>

#include "bondwit/errors.hpp"

namespace bondwit {

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::from_integers(std::size_t rows, std::size_t cols, const std::vector<long>& entries) {
    if (entries.size() != rows * cols) throw ShapeError("RationalMatrix: entry count does not match shape");
    RationalMatrix m(rows, cols);
    for (std::size_t k = 0; k < entries.size(); ++k) m.data_[k] = entries[k];
    return m;
}

std::size_t rational_rank(const RationalMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<mpz_class> a(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        mpz_class l = 1;
        for (std::size_t c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) {
            mpq_class v = m(r, c) * l;
            a[r * cols + c] = v.get_num();
        }
    }
    auto at = [&](std::size_t r, std::size_t c) -> mpz_class& { return a[r * cols + c]; };

    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && at(piv, c) == 0) ++piv;
        if (piv == rows) continue;
        if (piv != rank)
            for (std::size_t k = 0; k < cols; ++k) std::swap(at(piv, k), at(rank, k));
        const mpz_class pv = at(rank, c);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const mpz_class f = at(r, c);
            for (std::size_t k = c + 1; k < cols; ++k) {
                mpz_class t = pv * at(r, k) - f * at(rank, k);
                mpz_divexact(at(r, k).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            at(r, c) = 0;
        }
        prev = pv;
        ++rank;
    }
    return rank;
}

}  // namespace bondwit
