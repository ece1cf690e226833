#include "bondwit/modular.hpp"

#include <cmath>

#include "bondwit/errors.hpp"

namespace bondwit {

namespace {

// Inner dimension of one exact product block: 64 * (p-1)^2 < 2^53.
constexpr Eigen::Index kChunk = 64;

}  // namespace

std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
    std::int64_t r = v % p;
    return r < 0 ? r + p : r;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    std::int64_t t = 0, nt = 1, r = p, nr = mod_reduce(a, p);
    while (nr != 0) {
        const std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw ContractViolation("mod_inverse: element is not invertible");
    return t < 0 ? t + p : t;
}

ModularEchelon::ModularEchelon(std::size_t cols, std::int64_t prime)
    : cols_(cols), p_(prime), pd_(static_cast<double>(prime)), inv_pd_(1.0 / static_cast<double>(prime)),
      basis_(0, static_cast<Eigen::Index>(cols)), is_pivot_(cols, 0) {
    if (prime < 2 || prime > kDefaultPrime) throw ContractViolation("ModularEchelon: modulus out of range");
}

void ModularEchelon::reduce_mod(ResidueRows& m) const {
    auto a = m.array();
    a -= pd_ * (a * inv_pd_).floor();
    a = (a < 0.0).select(a + pd_, a);
    a = (a >= pd_).select(a - pd_, a);
}

void ModularEchelon::subtract_product(ResidueRows& out, const ResidueRows& coeff, const ResidueRows& rows) const {
    const Eigen::Index inner = coeff.cols();
    for (Eigen::Index k = 0; k < inner; k += kChunk) {
        const Eigen::Index w = std::min(kChunk, inner - k);
        out.noalias() -= coeff.middleCols(k, w) * rows.middleRows(k, w);
        reduce_mod(out);
    }
}

std::vector<bool> ModularEchelon::add_rows(ResidueRows batch) {
    if (static_cast<std::size_t>(batch.cols()) != cols_) throw ShapeError("ModularEchelon: column count mismatch");
    const Eigen::Index nb = batch.rows();
    std::vector<bool> accepted(nb, false);
    if (nb == 0 || full()) return accepted;

    const auto r0 = static_cast<Eigen::Index>(rank());
    if (r0 > 0) {
        ResidueRows f(nb, r0);
        for (Eigen::Index j = 0; j < r0; ++j) f.col(j) = batch.col(static_cast<Eigen::Index>(pivots_[j]));
        subtract_product(batch, f, basis_);
    }

    // Eliminate within the batch, keeping the new rows reduced among themselves.
    std::vector<Eigen::Index> new_rows;
    std::vector<std::size_t> new_pivots;
    for (Eigen::Index i = 0; i < nb; ++i) {
        auto row = batch.row(i);
        for (std::size_t k = 0; k < new_rows.size(); ++k) {
            const double c = row(static_cast<Eigen::Index>(new_pivots[k]));
            if (c == 0.0) continue;
            row -= c * batch.row(new_rows[k]);
            auto a = row.array();
            a -= pd_ * (a * inv_pd_).floor();
            a = (a < 0.0).select(a + pd_, a);
            a = (a >= pd_).select(a - pd_, a);
        }
        Eigen::Index piv = -1;
        for (Eigen::Index c = 0; c < row.size(); ++c)
            if (row(c) != 0.0) {
                piv = c;
                break;
            }
        if (piv < 0) continue;
        const double inv = static_cast<double>(mod_inverse(static_cast<std::int64_t>(row(piv)), p_));
        row *= inv;
        {
            auto a = row.array();
            a -= pd_ * (a * inv_pd_).floor();
            a = (a < 0.0).select(a + pd_, a);
        }
        for (Eigen::Index prev : new_rows) {
            auto other = batch.row(prev);
            const double c = other(piv);
            if (c == 0.0) continue;
            other -= c * row;
            auto a = other.array();
            a -= pd_ * (a * inv_pd_).floor();
            a = (a < 0.0).select(a + pd_, a);
            a = (a >= pd_).select(a - pd_, a);
        }
        new_rows.push_back(i);
        new_pivots.push_back(static_cast<std::size_t>(piv));
        accepted[i] = true;
        if (rank() + new_rows.size() == cols_) break;
    }
    if (new_rows.empty()) return accepted;

    const auto nn = static_cast<Eigen::Index>(new_rows.size());
    ResidueRows fresh(nn, batch.cols());
    for (Eigen::Index k = 0; k < nn; ++k) fresh.row(k) = batch.row(new_rows[k]);

    if (r0 > 0) {
        ResidueRows g(r0, nn);
        for (Eigen::Index k = 0; k < nn; ++k) g.col(k) = basis_.col(static_cast<Eigen::Index>(new_pivots[k]));
        subtract_product(basis_, g, fresh);
    }
    ResidueRows grown(r0 + nn, batch.cols());
    grown.topRows(r0) = basis_;
    grown.bottomRows(nn) = fresh;
    basis_.swap(grown);
    for (std::size_t k : new_pivots) {
        pivots_.push_back(k);
        is_pivot_[k] = 1;
    }
    return accepted;
}

}  // namespace bondwit
