#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bondwit {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kRankTolerance = 1e-9;
/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

/// Maximum number of entries of any dense vector or matrix side product the
/// library will allocate. Default 2^26.
std::size_t memory_budget();
void set_memory_budget(std::size_t entries);

/// base^exp, throwing ResourceError when the result exceeds `limit`.
std::size_t checked_pow(std::size_t base, int exp, std::size_t limit = std::size_t(1) << 40);

bool is_hermitian(const CMat& m, double rel_tol = kHermitianTolerance);
bool is_hermitian(const RMat& m, double rel_tol = kHermitianTolerance);

/// Smallest eigenvalue of a Hermitian matrix (tridiagonalization + implicit QL/QR).
/// Throws ContractViolation for non-square or non-Hermitian input.
double hermitian_min_eig(const CMat& m);
double hermitian_min_eig(const RMat& m);
RVec hermitian_eigenvalues(const CMat& m);
RVec hermitian_eigenvalues(const RMat& m);

/// Transposes the tensor factors listed in `subset` (0-based) of an operator on
/// C^{dims[0]} ⊗ C^{dims[1]} ⊗ ... .
CMat partial_transpose(const CMat& m, std::span<const int> dims, std::span<const int> subset);
RMat partial_transpose(const RMat& m, std::span<const int> dims, std::span<const int> subset);

/// Partial transpose of the first factor of a (q·r)×(q·r) operator on C^q ⊗ C^r.
RMat partial_transpose_first(const RMat& m, int q, int r);

CMat kron(const CMat& a, const CMat& b);
RMat kron(const RMat& a, const RMat& b);

/// Orthonormal basis (as columns) of the column space of `m`, cut at kRankTolerance.
RMat orthonormal_range(const RMat& m, double rel_tol = kRankTolerance);
/// Orthonormal basis of the orthogonal complement of the column space of `m` in R^rows.
RMat orthonormal_complement(const RMat& m, double rel_tol = kRankTolerance);
int numerical_rank(const RMat& m, double rel_tol = kRankTolerance);
int numerical_rank(const CMat& m, double rel_tol = kRankTolerance);

/// Hermitian positive semidefinite square root and inverse square root.
CMat hermitian_sqrt(const CMat& m);
CMat hermitian_inv_sqrt(const CMat& m, double rel_floor = 1e-14);

/// Packed symmetric vector with sqrt(2)-weighted off-diagonals, so that
/// svec(A)·svec(B) = tr(AB). Ordering: lower triangle, row-major.
RVec svec(const RMat& m);
RMat smat(const Eigen::Ref<const RVec>& v, int n);
inline int svec_size(int n) { return n * (n + 1) / 2; }

/// Lowest eigenvalue of a real symmetric operator given only by its action on
/// blocks of vectors (Lanczos with full reorthogonalization).
double lanczos_min_eig(const std::function<RVec(const RVec&)>& apply, Eigen::Index dim, std::uint64_t seed = 1,
                       double tol = 1e-12, int max_iter = 400);

/// Streaming orthonormalization with two classical Gram-Schmidt passes per
/// block. A candidate is accepted when its residual exceeds `tol` times its
/// original norm. With `pivot`, candidates within a block are taken in order
/// of decreasing residual; otherwise in input order.
class GramSchmidt {
public:
    GramSchmidt(Eigen::Index dim, double tol, bool pivot = true);

    Eigen::Index dim() const { return dim_; }
    Eigen::Index rank() const { return rank_; }
    double tolerance() const { return tol_; }
    auto basis() const { return q_.leftCols(rank_); }
    RMat take() { return q_.leftCols(rank_); }

    std::vector<bool> add(RMat block, Eigen::Index max_rank = -1);

private:
    Eigen::Index dim_;
    double tol_;
    bool pivot_;
    RMat q_;
    Eigen::Index rank_ = 0;
};

}  // namespace bondwit
