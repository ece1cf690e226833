#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bondwit/mps.hpp"
#include "bondwit/ncpoly.hpp"
#include "bondwit/numerics.hpp"
#include "bondwit/rng.hpp"

namespace bondwit {

enum class SubspaceKind { MpsSpan, CommutatorSpan, Quotient, ImpsRdmSpan, ConstrainedSpan };
enum class SpanMode { Float, Exact };
enum class ExactBackend { Modular, Rational };

std::string to_string(SubspaceKind k);
SubspaceKind subspace_kind_from_string(const std::string& s);

/// Orthonormal basis stored as the columns of `vectors`.
///
/// For site-space kinds the columns live in R^{d^m}; real samples span the
/// same complex subspace, so the real basis is also a complex orthonormal
/// basis. For ImpsRdmSpan the columns are svec coordinates of real symmetric
/// t x t matrices in the frame `frame` (an MPS-span basis, d^m x t); the
/// operator represented by coordinates X is frame * X * frame^T. When
/// requested, `antisymmetric` holds the imaginary parts (strictly lower
/// triangle, sqrt(2)-weighted).
struct SubspaceBasis {
    SubspaceKind kind = SubspaceKind::MpsSpan;
    int d = 2;
    int D = 1;
    int m = 1;
    RMat vectors;
    RMat frame;
    RMat antisymmetric;

    std::uint64_t seed = 0;
    std::size_t samples = 0;
    double tolerance = 0;
    bool exact = false;  // dimension certified by exact rank

    int size() const { return static_cast<int>(vectors.cols()); }
    std::size_t ambient() const { return static_cast<std::size_t>(vectors.rows()); }
};

inline constexpr double kSpanTolerance = 1e-9;
inline constexpr int kStopAfter = 25;

struct SpanOptions {
    SpanMode mode = SpanMode::Float;
    ExactBackend backend = ExactBackend::Modular;
    double tolerance = kSpanTolerance;
    int stop_after = kStopAfter;
    int workers = 1;
    std::size_t max_samples = 1000000;
};

SubspaceBasis mps_span_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});
std::size_t mps_span_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});
mpz_class dim_upper_bound(int d, int D, int m);

SubspaceBasis commutator_span_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});
std::size_t commutator_span_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});

struct QuotientResult {
    SubspaceBasis basis;
    std::vector<NCPolynomial> representatives;  // conjugated coefficients of the basis vectors
    std::size_t mps_dim = 0;
    std::size_t commutator_dim = 0;
};

QuotientResult quotient_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});
/// dim Q_{D,m} = dim H^MPS - dim of the commutator span (exact ranks).
std::size_t quotient_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt = {});

/// Span of the N-site iMPS reduced density matrices, in the coordinates of
/// `frame` (an mps_span_basis for (d, D, N)).
SubspaceBasis imps_rdm_span(int d, int D, int N, SeededRng& rng, const SpanOptions& opt = {},
                            const RMat* frame = nullptr, bool with_antisymmetric = false);

/// Span of sum_w tr(sigma X_w)|w> with X_d = I.
SubspaceBasis constrained_span_basis(int d, int D, int n, SeededRng& rng, const SpanOptions& opt = {});

/// t x t matrix <b_i|H|b_j>.
RMat project_operator(const LocalHamiltonian& H, const SubspaceBasis& B);
RMat project_operator(const RMat& H, const SubspaceBasis& B);

struct PepsCount {
    bool exists = false;
    mpz_class states;    // d^{L^N}
    mpz_class monomials; // D^{2N L^{N-1}} C(L^N + d D^{2N} - 1, d D^{2N} - 1)
};

PepsCount peps_annihilator_exists(int d, int D, int N, int L);

/// Coordinates of a real symmetric matrix in and out of svec/asvec form.
RVec asvec(const RMat& antisym);
RMat asmat(const Eigen::Ref<const RVec>& v, int n);

}  // namespace bondwit
