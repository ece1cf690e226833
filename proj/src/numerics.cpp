#include "bondwit/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "bondwit/errors.hpp"
#include "bondwit/rng.hpp"

namespace bondwit {

namespace {
std::atomic<std::size_t> g_budget{std::size_t(1) << 26};
}

std::size_t memory_budget() { return g_budget.load(); }
void set_memory_budget(std::size_t entries) { g_budget.store(entries); }

std::size_t checked_pow(std::size_t base, int exp, std::size_t limit) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > limit / base)
            throw ResourceError("dimension " + std::to_string(base) + "^" + std::to_string(exp) + " exceeds budget");
        out *= base;
    }
    if (out > limit) throw ResourceError("dimension exceeds budget");
    return out;
}

template <class M>
static bool hermitian_impl(const M& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = m.norm();
    return (m - m.adjoint()).norm() <= rel_tol * std::max(scale, std::numeric_limits<double>::min());
}

bool is_hermitian(const CMat& m, double rel_tol) { return hermitian_impl(m, rel_tol); }
bool is_hermitian(const RMat& m, double rel_tol) { return hermitian_impl(m, rel_tol); }

template <class M>
static RVec eigenvalues_impl(const M& m) {
    if (m.rows() != m.cols())
        throw ContractViolation("eigensolver: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!is_hermitian(m)) throw ContractViolation("eigensolver: matrix is not Hermitian");
    if (m.rows() == 0) return RVec();
    const M sym = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<M> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("Hermitian eigensolver failed to converge");
    return es.eigenvalues();
}

RVec hermitian_eigenvalues(const CMat& m) { return eigenvalues_impl(m); }
RVec hermitian_eigenvalues(const RMat& m) { return eigenvalues_impl(m); }

double hermitian_min_eig(const CMat& m) {
    if (m.rows() == 0) throw ContractViolation("eigensolver: empty matrix");
    return eigenvalues_impl(m)(0);
}

double hermitian_min_eig(const RMat& m) {
    if (m.rows() == 0) throw ContractViolation("eigensolver: empty matrix");
    return eigenvalues_impl(m)(0);
}

template <class M>
static M partial_transpose_impl(const M& m, std::span<const int> dims, std::span<const int> subset) {
    std::size_t total = 1;
    for (int d : dims) {
        if (d <= 0) throw ShapeError("partial_transpose: factor dimensions must be positive");
        total *= static_cast<std::size_t>(d);
    }
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total)
        throw ShapeError("partial_transpose: factor dimensions do not match matrix side");
    const int nf = static_cast<int>(dims.size());
    std::vector<char> flip(nf, 0);
    for (int s : subset) {
        if (s < 0 || s >= nf) throw ShapeError("partial_transpose: factor index out of range");
        flip[s] = 1;
    }
    // stride of each factor in the big-endian composite index
    std::vector<std::size_t> stride(nf, 1);
    for (int k = nf - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

    M out(m.rows(), m.cols());
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            std::size_t r2 = 0, c2 = 0;
            for (int k = 0; k < nf; ++k) {
                const std::size_t dr = (r / stride[k]) % dims[k];
                const std::size_t dc = (c / stride[k]) % dims[k];
                r2 += (flip[k] ? dc : dr) * stride[k];
                c2 += (flip[k] ? dr : dc) * stride[k];
            }
            out(r2, c2) = m(r, c);
        }
    }
    return out;
}

CMat partial_transpose(const CMat& m, std::span<const int> dims, std::span<const int> subset) {
    return partial_transpose_impl(m, dims, subset);
}

RMat partial_transpose(const RMat& m, std::span<const int> dims, std::span<const int> subset) {
    return partial_transpose_impl(m, dims, subset);
}

RMat partial_transpose_first(const RMat& m, int q, int r) {
    if (m.rows() != q * r || m.cols() != q * r) throw ShapeError("partial_transpose_first: shape mismatch");
    RMat out(m.rows(), m.cols());
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) out.block(a * r, b * r, r, r) = m.block(b * r, a * r, r, r);
    return out;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

RMat kron(const RMat& a, const RMat& b) {
    RMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

int numerical_rank(const RMat& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<RMat> svd(m);
    const RVec& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

int numerical_rank(const CMat& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(m);
    const RVec& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

RMat orthonormal_range(const RMat& m, double rel_tol) {
    if (m.size() == 0) return RMat(m.rows(), 0);
    Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeThinU);
    const RVec& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

RMat orthonormal_complement(const RMat& m, double rel_tol) {
    const Eigen::Index n = m.rows();
    if (m.cols() == 0) return RMat::Identity(n, n);
    Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeFullU);
    const RVec& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++r;
    return svd.matrixU().rightCols(n - r);
}

CMat hermitian_sqrt(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) * 0.5);
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

CMat hermitian_inv_sqrt(const CMat& m, double rel_floor) {
    Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) * 0.5);
    const RVec& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() <= rel_floor * top) throw DegeneracyError("inverse square root of a singular matrix");
    RVec inv = ev.cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

RVec svec(const RMat& m) {
    const int n = static_cast<int>(m.rows());
    RVec v(svec_size(n));
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) v(k++) = (i == j) ? m(i, i) : M_SQRT2 * 0.5 * (m(i, j) + m(j, i));
    return v;
}

RMat smat(const Eigen::Ref<const RVec>& v, int n) {
    RMat m(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double x = v(k++);
            if (i == j)
                m(i, i) = x;
            else
                m(i, j) = m(j, i) = x * M_SQRT1_2;
        }
    return m;
}

double lanczos_min_eig(const std::function<RVec(const RVec&)>& apply, Eigen::Index dim, std::uint64_t seed, double tol,
                       int max_iter) {
    if (dim <= 0) throw ContractViolation("lanczos_min_eig: empty operator");
    const int kmax = static_cast<int>(std::min<Eigen::Index>(max_iter, dim));
    SeededRng rng(seed);
    RMat q(dim, kmax + 1);
    RVec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal();
    q.col(0) = v / v.norm();
    std::vector<double> alpha, beta;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kmax; ++k) {
        RVec w = apply(q.col(k));
        const double a = q.col(k).dot(w);
        alpha.push_back(a);
        // two passes of full reorthogonalization
        for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
        const double b = w.norm();

        RMat t = RMat::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) {
            t(i, i) = alpha[i];
            if (i < k) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(t);
        const double cur = es.eigenvalues()(0);
        const double resid = b * std::abs(es.eigenvectors()(k, 0));
        if (resid < tol * std::max(1.0, std::abs(cur)) || b < 1e-13 || k + 1 == kmax) return cur;
        last = cur;
        beta.push_back(b);
        q.col(k + 1) = w / b;
    }
    return last;
}

GramSchmidt::GramSchmidt(Eigen::Index dim, double tol, bool pivot) : dim_(dim), tol_(tol), pivot_(pivot), q_(dim, 0) {}

std::vector<bool> GramSchmidt::add(RMat block, Eigen::Index max_rank) {
    if (block.rows() != dim_) throw ShapeError("GramSchmidt: candidate length mismatch");
    const Eigen::Index nb = block.cols();
    std::vector<bool> accepted(nb, false);
    if (nb == 0) return accepted;
    const Eigen::Index cap = max_rank < 0 ? dim_ : std::min(max_rank, dim_);
    if (rank_ >= cap) return accepted;

    std::vector<bool> live(nb, true);
    for (Eigen::Index j = 0; j < nb; ++j) {
        const double n0 = block.col(j).norm();
        if (n0 == 0.0 || !std::isfinite(n0))
            live[j] = false;
        else
            block.col(j) /= n0;
    }
    if (rank_ > 0)
        for (int pass = 0; pass < 2; ++pass) {
            const auto q = q_.leftCols(rank_);
            block.noalias() -= q * (q.transpose() * block);
        }

    const Eigen::Index need = std::min(cap, rank_ + nb);
    if (need > q_.cols()) {
        const Eigen::Index grown = std::min(dim_, std::max(need, 2 * q_.cols()));
        q_.conservativeResize(dim_, grown);
    }
    const Eigen::Index start = rank_;
    if (pivot_) {
        RVec norms(nb);
        for (Eigen::Index j = 0; j < nb; ++j) norms(j) = live[j] ? block.col(j).norm() : -1.0;
        while (rank_ < cap) {
            Eigen::Index j;
            if (norms.maxCoeff(&j) <= tol_) break;
            live[j] = false;
            norms(j) = -1.0;
            RVec v = block.col(j);
            if (rank_ > start) {
                const auto q = q_.middleCols(start, rank_ - start);
                v -= q * (q.transpose() * v);
            }
            const double nv = v.norm();
            if (nv <= tol_) continue;
            v /= nv;
            q_.col(rank_++) = v;
            accepted[j] = true;
            const RVec c = block.transpose() * v;
            for (Eigen::Index k = 0; k < nb; ++k)
                if (live[k]) {
                    block.col(k) -= c(k) * v;
                    norms(k) = block.col(k).norm();
                }
        }
        return accepted;
    }
    for (Eigen::Index j = 0; j < nb && rank_ < cap; ++j) {
        if (!live[j]) continue;
        RVec v = block.col(j);
        if (rank_ > start)
            for (int pass = 0; pass < 2; ++pass) {
                const auto q = q_.middleCols(start, rank_ - start);
                v -= q * (q.transpose() * v);
            }
        const double nv = v.norm();
        if (nv > tol_) {
            q_.col(rank_++) = v / nv;
            accepted[j] = true;
        }
    }
    return accepted;
}

}  // namespace bondwit
