#pragma once

#include "bondwit/numerics.hpp"
#include "bondwit/rng.hpp"

namespace bondwit::test {

inline CMat random_complex(Eigen::Index r, Eigen::Index c, SeededRng& rng) {
    CMat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.complex_normal();
    return m;
}

inline RMat random_real(Eigen::Index r, Eigen::Index c, SeededRng& rng) {
    RMat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

inline CMat random_hermitian(Eigen::Index n, SeededRng& rng) {
    const CMat g = random_complex(n, n, rng);
    return (g + g.adjoint()) * 0.5;
}

inline RMat random_symmetric(Eigen::Index n, SeededRng& rng) {
    const RMat g = random_real(n, n, rng);
    return (g + g.transpose()) * 0.5;
}

inline CMat random_density(Eigen::Index n, SeededRng& rng) {
    const CMat g = random_complex(n, n, rng);
    CMat r = g * g.adjoint();
    return r / r.trace().real();
}

/// Trace out the first (`first` = true) or last site of an operator on d^m.
inline CMat trace_out_site(const CMat& rho, int d, bool first) {
    const Eigen::Index side = rho.rows() / d;
    CMat out = CMat::Zero(side, side);
    for (Eigen::Index i = 0; i < side; ++i)
        for (Eigen::Index j = 0; j < side; ++j)
            for (int k = 0; k < d; ++k) out(i, j) += first ? rho(k * side + i, k * side + j) : rho(i * d + k, j * d + k);
    return out;
}

}  // namespace bondwit::test
