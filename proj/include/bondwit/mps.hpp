#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bondwit/numerics.hpp"
#include "bondwit/rng.hpp"

namespace bondwit {

/// psi_{i1..in} = tr(omega A_{i1} ... A_{in}).
struct MpsSpec {
    int d = 2;
    int D = 1;
    std::vector<CMat> A;
    CMat omega;
    std::uint64_t seed = 0;  // provenance only

    void validate() const;
    static MpsSpec random(int d, int D, SeededRng& rng, bool complex_entries = false);
};

/// Translation-invariant infinite MPS: sum_i A_i A_i^dag = I, sigma the fixed
/// point of X -> sum_i A_i^dag X A_i.
struct ImpsSpec {
    int d = 2;
    int D = 1;
    std::vector<CMat> A;
    CMat sigma;
    std::uint64_t seed = 0;

    void validate(double tol = 1e-10) const;
    /// Normalizes arbitrary matrices and attaches the fixed point.
    static ImpsSpec from_matrices(std::vector<CMat> A);
    static ImpsSpec random(int d, int D, SeededRng& rng, bool complex_entries = true);
};

struct HamiltonianTerm {
    int start = 0;  // 0-based first site
    int width = 1;
    CMat h;
};

/// Sum of k-local terms on a chain of n sites of dimension d. With `periodic`
/// set, windows may wrap around the end of the chain.
struct LocalHamiltonian {
    int n = 0;
    int d = 2;
    bool periodic = false;
    std::vector<HamiltonianTerm> terms;

    void validate() const;
    bool is_real(double tol = 1e-13) const;
    std::size_t dim() const;

    RMat apply(const RMat& x) const;  // real terms only
    CMat apply(const CMat& x) const;
    CMat dense() const;
    RMat dense_real() const;
    /// Lowest eigenvalue (dense for small chains, Lanczos otherwise).
    double ground_energy() const;

    LocalHamiltonian scaled(double s) const;
};

/// Row w (word index, first letter most significant), column a*D+b holds
/// (left * A_{w1} ... A_{wn})_{ab}; left defaults to the identity.
CMat word_products(const std::vector<CMat>& A, int n, const CMat* left = nullptr);
RMat word_products(const std::vector<RMat>& A, int n, const RMat* left = nullptr);

CVec build_state(const MpsSpec& spec, int n);
/// <psi(spec2)|psi(spec1)> via the transfer matrix sum_i conj(A2_i) (x) A1_i.
cplx overlap(const MpsSpec& spec1, const MpsSpec& spec2, int n);

std::vector<CMat> normalize_channel(const std::vector<CMat>& A);
CMat fixed_point(const std::vector<CMat>& A);
CMat imps_rdm(const ImpsSpec& spec, int m);

std::optional<int> injectivity_order(const std::vector<CMat>& A, int k_max);
std::pair<CMat, CMat> injective_pair(int D);

/// Periodic 2k-local parent Hamiltonian; each term projects onto the
/// complement of {tr(X A_{w1}..A_{w2k})} in the window.
LocalHamiltonian parent_hamiltonian(const MpsSpec& spec, int n, int k);
/// Dimension of the eigenspace at the bottom of the spectrum (dense).
int ground_space_dimension(const LocalHamiltonian& H, double tol = 1e-8);

}  // namespace bondwit
