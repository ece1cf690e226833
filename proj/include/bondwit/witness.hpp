#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bondwit/mps.hpp"
#include "bondwit/ncpoly.hpp"
#include "bondwit/numerics.hpp"
#include "bondwit/rng.hpp"
#include "bondwit/sdp.hpp"
#include "bondwit/span.hpp"

namespace bondwit {

/// C = Σ_i |i⟩⟨P_i(X)| acting on j consecutive sites: the rows of `matrix`
/// (q × d^j) are an orthonormal quotient basis, and |i⟩ is the i-th state of
/// an abstract q-dimensional register.
struct CutGlueOperator {
    int d = 2;
    int D = 1;
    int j = 1;
    RMat matrix;
    std::vector<NCPolynomial> polynomials;

    int q() const { return static_cast<int>(matrix.rows()); }
};

CutGlueOperator cut_and_glue(int d, int D, int j, const QuotientResult& quotient);
CutGlueOperator cut_and_glue(int d, int D, int j, const SubspaceBasis& quotient);
/// Computes the quotient basis itself.
CutGlueOperator cut_and_glue(int d, int D, int j, SeededRng& rng, const SpanOptions& opt = {});

/// Applies C to sites start .. start+j-1 (0-based) of an n-site state. The
/// output lives on register ⊗ (remaining sites in their original order).
CVec apply_cut(const CutGlueOperator& C, const CVec& psi, int n, int start);
/// (C ⊗ I) M for M with rows indexed by the n-site space, C on the first j sites.
RMat apply_cut_rows(const CutGlueOperator& C, const RMat& m, int n);

/// The Heisenberg term σ⃗·σ⃗/4 on two sites, and Σ over an open chain.
RMat heisenberg_term();
LocalHamiltonian heisenberg(int N);
/// 3-site density term (2σ⃗_1·σ⃗_2 + σ⃗_1·σ⃗_3)/8 and the open chain
/// Σ_i (2σ⃗_iσ⃗_{i+1} + σ⃗_iσ⃗_{i+2})/8.
RMat majumdar_ghosh_term();
LocalHamiltonian majumdar_ghosh(int N);

struct WitnessOptions {
    SdpOptions sdp;
    SpanOptions span;
    /// Seed for all bases; the same seed reproduces identical numbers.
    std::uint64_t seed = 1;
};

struct WitnessBound {
    double value = 0.0;
    int d = 2;
    int D = 1;
    int n = 0;
    std::vector<int> cuts;
    bool ppt = false;
    bool span = false;
    SdpStatus status = SdpStatus::Indeterminate;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    int basis_size = 0;
    int span_size = 0;
    std::vector<int> cut_ranks;  // q_j for each cut
    double seconds = 0.0;
    std::string message;
};

/// B^T (H − μ) B = f + Σ_j L_jᵀ g_j L_j + r, with L_j = (C_j ⊗ I) B. The
/// remainder r is zero for finite chains; for the iMPS hierarchy it is
/// orthogonal to every traceless element of the RDM span.
struct DualCertificate {
    int d = 2;
    int n = 0;
    double mu = 0.0;
    RMat frame;  // B, d^n × t
    RMat f;
    std::vector<int> cuts;
    std::vector<RMat> cut_matrices;  // C_j
    std::vector<RMat> g;
    RMat remainder;
    /// Orthonormal basis (svec coordinates) the remainder must be orthogonal to.
    RMat span_directions;
    double residual = 0.0;
    double f_min_eig = 0.0;
    std::vector<double> g_pt_min_eig;
};

struct BoundResult {
    WitnessBound bound;
    DualCertificate certificate;
};

/// Cuts with q_j ≥ 1 and j ≤ n−1.
std::vector<int> default_cuts(int d, int D, int n, SeededRng& rng);

BoundResult mps_lower_bound(const LocalHamiltonian& H, int D, const std::vector<int>& cuts, bool ppt,
                            const WitnessOptions& opt = {});

/// `term` acts on the first w sites (w = log_d of its size). The objective is
/// the average over the N − w + 1 placements.
BoundResult imps_lower_bound(const RMat& term, int d, int D, int N, const std::vector<int>& cuts, bool ppt, bool use_span,
                             const WitnessOptions& opt = {});

/// Minimum eigenvalue of H projected onto H^MPS_{D,n}; D < 0 means the full space.
double simplified_bound(const LocalHamiltonian& H, int D, const WitnessOptions& opt = {});

/// Recomputes the residual of the certificate identity from scratch.
double certificate_residual(const LocalHamiltonian& H, const DualCertificate& c);
double certificate_residual(const RMat& h_projected, const DualCertificate& c);

struct ExpectationConstraint {
    RMat observable;  // d^n × d^n, real symmetric
    double target = 0.0;
    double tolerance = 0.0;
};

enum class Verdict { Feasible, Infeasible, Indeterminate };
std::string to_string(Verdict v);

struct FeasibilityResult {
    Verdict verdict = Verdict::Indeterminate;
    /// For infeasible: weights (one per constraint row: trace, lower, upper,
    /// PPT entries) of a separating functional; `separation` is bᵀy > 0.
    RVec certificate;
    double separation = 0.0;
    SdpSolution solution;
};

FeasibilityResult feasibility_test(const std::vector<ExpectationConstraint>& constraints, int d, int D, int n,
                                   const std::vector<int>& cuts, bool ppt, const WitnessOptions& opt = {});

struct VariationalOptions {
    int restarts = 32;
    int iterations = 2000;
    double diameter = 0.5;
    bool complex = false;
};

struct VariationalResult {
    double value = 0.0;
    ImpsSpec spec;
    std::vector<double> restart_values;
};

/// Nelder–Mead over the entries of A; the channel is normalized and the fixed
/// point recomputed for every evaluation.
VariationalResult variational_upper_bound(const RMat& term, int d, int D, SeededRng& rng, const VariationalOptions& opt = {});

/// Derivative-free simplex minimization (also used for finite-chain checks).
struct NelderMeadResult {
    RVec x;
    double value = 0.0;
    int evaluations = 0;
};
NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f, RVec x0, double diameter, int iterations);

struct Prop1Family {
    MpsSpec generator;        // injective TI MPS (ω = I) of bond D'
    int injectivity_k = 0;
    LocalHamiltonian H;       // parent Hamiltonian, periodic windows of 2k sites
    int window = 0;           // m
    RMat h;                   // d^m × d^m
    double lambda = 0.0;
    LocalHamiltonian H_lambda;
};

/// Smallest window m ≤ max_m with H^MPS_{D+1,m} ⊋ H^MPS_{D,m}; h projects onto
/// the difference, so it is supported on MPIs for D but not for D+1.
RMat separating_projector(int d, int D, int& m, int max_m, SeededRng& rng, const SpanOptions& opt = {});

/// λ ≤ 0 selects the default 10‖H‖. λ-terms are placed on the n−m+1 open windows.
Prop1Family prop1_hamiltonian(int D_prime, int D, int n, double lambda, SeededRng& rng, const SpanOptions& opt = {});

}  // namespace bondwit
