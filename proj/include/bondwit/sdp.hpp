#pragma once

#include <string>
#include <vector>

#include "bondwit/numerics.hpp"

namespace bondwit {

/// One symmetric matrix per block; a block of size 0 is allowed only as an
/// empty placeholder in constraint lists (treated as zero).
using BlockMatrix = std::vector<RMat>;

/// min ⟨C, X⟩  s.t.  ⟨A_k, X⟩ = b_k,  X = blkdiag(X_1, ..., X_p) ⪰ 0.
/// Constraints are stored column-wise as concatenated svec vectors.
class SdpProblem {
public:
    SdpProblem() = default;
    explicit SdpProblem(std::vector<int> blocks);

    const std::vector<int>& blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int total_dim() const;
    Eigen::Index svec_dim() const { return svec_dim_; }
    Eigen::Index offset(int block) const { return offsets_[block]; }
    int num_constraints() const { return m_; }

    BlockMatrix& objective() { return objective_; }
    const BlockMatrix& objective() const { return objective_; }
    RVec objective_svec() const;
    void set_objective(BlockMatrix c);
    void set_objective_block(int block, const RMat& c);

    void reserve(int m);
    /// Missing or empty blocks are zero.
    int add_constraint(const BlockMatrix& a, double b);
    int add_constraint_svec(const Eigen::Ref<const RVec>& a, double b);
    /// Constraint touching a single block.
    int add_block_constraint(int block, const RMat& a, double b);

    auto constraints() const { return cols_.leftCols(m_); }
    auto constraint(int k) const { return cols_.col(k); }
    auto rhs() const { return rhs_.head(m_); }
    double rhs(int k) const { return rhs_(k); }

    /// Scales constraint k (matrix and right-hand side) by s.
    void scale_constraint(int k, double s);

    void validate() const;

    RVec to_svec(const BlockMatrix& x) const;
    BlockMatrix to_blocks(const Eigen::Ref<const RVec>& v) const;
    /// Σ_k y_k A_k as a block matrix.
    BlockMatrix adjoint(const Eigen::Ref<const RVec>& y) const;
    /// (⟨A_k, X⟩)_k.
    RVec apply(const BlockMatrix& x) const;

private:
    std::vector<int> blocks_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index svec_dim_ = 0;
    BlockMatrix objective_;
    RMat cols_;
    RVec rhs_;
    int m_ = 0;
};

enum class SdpStatus { Optimal, InfeasibleCertificate, Indeterminate };
std::string to_string(SdpStatus s);

struct SdpIterate {
    int iteration = 0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double mu = 0.0;
    double tau = 0.0;
    double kappa = 0.0;
    /// primal − dual − ⟨R_d, X⟩ + yᵀR_p = ⟨X, Z⟩ ≥ 0 for the normalized iterate.
    double corrected_gap = 0.0;
    double step = 0.0;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::Indeterminate;
    BlockMatrix X;
    RVec y;
    BlockMatrix Z;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    int removed_constraints = 0;
    /// Set when status = InfeasibleCertificate: either a Farkas ray y with
    /// Σ y_k A_k ⪯ 0 and bᵀy > 0 (primal infeasible) or a primal ray X ⪰ 0
    /// with A(X) = 0 and ⟨C, X⟩ < 0 (dual infeasible). `violation` is bᵀy
    /// or −⟨C, X⟩ after normalizing the ray.
    bool primal_infeasible = false;
    RVec ray_y;
    BlockMatrix ray_X;
    double violation = 0.0;
    std::string message;
    std::vector<SdpIterate> history;
};

struct SdpOptions {
    double gap_tol = 1e-7;
    double feas_tol = 1e-8;
    double infeas_tol = 1e-8;
    int max_iter = 500;
    double step_fraction = 0.99;
    /// After the optimality tests pass, keep iterating (at most polish_iter
    /// steps) until the relative gap drops below polish_gap; the last
    /// iterate that still passes is returned.
    double polish_gap = 1e-11;
    int polish_iter = 10;
    bool presolve = true;
    bool record_history = false;
};

struct PresolveResult {
    SdpProblem problem;
    /// Indices of surviving constraints in the original numbering.
    std::vector<int> kept;
    /// Dependent constraint whose right-hand side disagrees with the rest;
    /// ray is then a Farkas certificate with Σ y_k A_k = 0 and bᵀy > 0.
    bool inconsistent = false;
    RVec ray;
};

PresolveResult presolve_detailed(const SdpProblem& p, double rel_tol = 1e-10);
/// Removes linearly dependent constraints, keeping the first of every dependent set.
SdpProblem presolve(const SdpProblem& p);

/// Homogeneous self-dual embedding, Nesterov–Todd scaling, Mehrotra
/// predictor–corrector, dense Cholesky on the Schur complement.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

/// Worst of: min eigenvalues of X and Z (negated), primal and dual residuals.
double solution_violation(const SdpProblem& p, const SdpSolution& s);

}  // namespace bondwit
