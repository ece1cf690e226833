#include <doctest.h>

#include <cmath>

#include "bondwit/errors.hpp"
#include "bondwit/span.hpp"
#include "helpers.hpp"

using namespace bondwit;

namespace {

double orthonormality_error(const RMat& v) {
    return (v.transpose() * v - RMat::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

double residual(const RMat& basis, const CVec& x) {
    const CMat b = basis.cast<cplx>();
    return (x - b * (b.transpose() * x)).norm() / x.norm();
}

double residual(const RMat& basis, const RVec& x) { return (x - basis * (basis.transpose() * x)).norm() / x.norm(); }

// Rank of a sampled set of vectors, independent of the span engine.
int sampled_rank(const RMat& samples) {
    Eigen::JacobiSVD<RMat> svd(samples);
    const RVec s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9 * s(0)) ++r;
    return r;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("mps span sizes") {
    SeededRng rng(21);
    const SubspaceBasis b = mps_span_basis(2, 2, 5, rng);
    CHECK(b.size() == 30);
    CHECK(b.kind == SubspaceKind::MpsSpan);
    CHECK(orthonormality_error(b.vectors) < 1e-10);
    CHECK(mps_span_basis(2, 1, 5, rng).size() == 6);
    CHECK(mps_span_basis(2, 4, 9, rng).size() == 512);
}

TEST_CASE("mps span contains fresh random bond-D states") {
    SeededRng rng(22);
    for (int D = 1; D <= 3; ++D) {
        const SubspaceBasis b = mps_span_basis(2, D, 7, rng);
        for (int t = 0; t < 10; ++t) {
            const MpsSpec s = MpsSpec::random(2, D, rng, true);
            CHECK(residual(b.vectors, build_state(s, 7)) < 1e-8);
        }
    }
}

TEST_CASE("D=1 span is the symmetric subspace") {
    SeededRng rng(23);
    for (int m = 2; m <= 8; ++m) {
        const SubspaceBasis b = mps_span_basis(2, 1, m, rng);
        CHECK(b.size() == m + 1);
        // every basis vector is invariant under a cyclic shift and a swap of the first two sites
        const Eigen::Index n = b.vectors.rows();
        RMat shifted(n, b.size()), swapped(n, b.size());
        for (Eigen::Index w = 0; w < n; ++w) {
            const Eigen::Index rot = ((w << 1) | (w >> (m - 1))) & (n - 1);
            const Eigen::Index top = (w >> (m - 1)) & 1, next = (w >> (m - 2)) & 1;
            const Eigen::Index sw = (w & ~((Eigen::Index(3)) << (m - 2))) | (next << (m - 1)) | (top << (m - 2));
            shifted.row(rot) = b.vectors.row(w);
            swapped.row(sw) = b.vectors.row(w);
        }
        CHECK((shifted - b.vectors * (b.vectors.transpose() * shifted)).norm() < 1e-9);
        CHECK((swapped - b.vectors * (b.vectors.transpose() * swapped)).norm() < 1e-9);
    }
}

TEST_CASE("exact dimensions") {
    SeededRng rng(24);
    CHECK(mps_span_dim_exact(2, 2, 10, rng) == 306);
    CHECK(mps_span_dim_exact(2, 1, 9, rng) == 10);
    CHECK(mps_span_dim_exact(2, 3, 8, rng) == 256);
    CHECK(mps_span_dim_exact(2, 3, 9, rng) == 506);
}

TEST_CASE("float and exact dimensions agree for D <= 3, m <= 10") {
    SeededRng rng(25);
    for (int D = 1; D <= 3; ++D)
        for (int m = 2; m <= 10; ++m) {
            if (D == 3 && m < 7) continue;  // full space, covered by the D = 2 rows
            CAPTURE(D);
            CAPTURE(m);
            const std::size_t exact = mps_span_dim_exact(2, D, m, rng);
            CHECK(static_cast<std::size_t>(mps_span_basis(2, D, m, rng).size()) == exact);
        }
}

TEST_CASE("modular and rational backends agree") {
    SeededRng rng(26);
    SpanOptions rat;
    rat.mode = SpanMode::Exact;
    rat.backend = ExactBackend::Rational;
    for (int m = 3; m <= 6; ++m) {
        CAPTURE(m);
        CHECK(mps_span_dim_exact(2, 2, m, rng, rat) == mps_span_dim_exact(2, 2, m, rng));
        CHECK(commutator_span_dim_exact(2, 2, m, rng, rat) == commutator_span_dim_exact(2, 2, m, rng));
    }
    CHECK(mps_span_dim_exact(3, 2, 4, rng, rat) == mps_span_dim_exact(3, 2, 4, rng));
}

TEST_CASE("exact mode basis has the exact dimension") {
    SeededRng rng(27);
    SpanOptions ex;
    ex.mode = SpanMode::Exact;
    const SubspaceBasis b = mps_span_basis(2, 2, 8, rng, ex);
    CHECK(b.size() == 139);
    CHECK(b.exact);
    CHECK(orthonormality_error(b.vectors) < 1e-10);
}

TEST_CASE("dimension upper bound") {
    CHECK(dim_upper_bound(2, 1, 5) == 6);
    CHECK(dim_upper_bound(2, 2, 5) == 3168);
    CHECK(dim_upper_bound(2, 2, 10) == 77792);
    SeededRng rng(28);
    for (int m = 2; m <= 8; ++m) CHECK(mpz_class(static_cast<unsigned long>(mps_span_dim_exact(2, 2, m, rng))) <= dim_upper_bound(2, 2, m));
}

TEST_CASE("commutator span") {
    SeededRng rng(29);
    CHECK(commutator_span_basis(2, 1, 5, rng).size() == 0);
    CHECK(commutator_span_dim_exact(2, 1, 5, rng) == 0);
    const SubspaceBasis mps = mps_span_basis(2, 2, 6, rng);
    const SubspaceBasis comm = commutator_span_basis(2, 2, 6, rng);
    CHECK(comm.kind == SubspaceKind::CommutatorSpan);
    CHECK(orthonormality_error(comm.vectors) < 1e-10);
    // subspace of the MPS span
    CHECK((comm.vectors - mps.vectors * (mps.vectors.transpose() * comm.vectors)).norm() < 1e-8);
    for (int t = 0; t < 10; ++t) {
        MpsSpec s = MpsSpec::random(2, 2, rng, true);
        s.omega -= (s.omega.trace() / 2.0) * CMat::Identity(2, 2);
        CHECK(residual(comm.vectors, build_state(s, 6)) < 1e-8);
    }
    // float and exact agree
    CHECK(static_cast<std::size_t>(comm.size()) == commutator_span_dim_exact(2, 2, 6, rng));
}

TEST_CASE("quotient dimensions") {
    SeededRng rng(30);
    const int expected[] = {0, 1, 2, 6, 10, 20, 30, 50};
    for (int m = 3; m <= 10; ++m) CHECK(quotient_dim_exact(2, 2, m, rng) == static_cast<std::size_t>(expected[m - 3]));
    CHECK(quotient_dim_exact(2, 3, 8, rng) == 0);
    CHECK(quotient_dim_exact(2, 3, 9, rng) == 4);
}

TEST_CASE("quotient vanishes below degree 2D") {
    SeededRng rng(31);
    for (int D = 2; D <= 3; ++D)
        for (int m = 1; m < 2 * D; ++m) {
            CAPTURE(D);
            CAPTURE(m);
            CHECK(quotient_dim_exact(2, D, m, rng) == 0);
        }
    // scalars commute: every symmetric polynomial is central at D = 1
    for (int m = 1; m <= 6; ++m) CHECK(quotient_dim_exact(2, 1, m, rng) == static_cast<std::size_t>(m + 1));
}

TEST_CASE("quotient representatives are central but not MPIs") {
    SeededRng rng(32);
    for (int m : {4, 5, 6}) {
        const QuotientResult q = quotient_basis(2, 2, m, rng);
        CHECK(q.basis.kind == SubspaceKind::Quotient);
        CHECK(static_cast<std::size_t>(q.basis.size()) == q.mps_dim - q.commutator_dim);
        CHECK(orthonormality_error(q.basis.vectors) < 1e-10);
        for (const NCPolynomial& p : q.representatives) {
            const CentralityResult c = is_central(p, 2, rng);
            CHECK(c.central);
            double biggest = 0.0;
            for (cplx s : c.scalars) biggest = std::max(biggest, std::abs(s));
            CHECK(biggest > 1e-6);
            CHECK(!is_mpi(p, 2, rng));
        }
    }
    const QuotientResult q39 = quotient_basis(2, 3, 9, rng);
    CHECK(q39.basis.size() == 4);
    for (const NCPolynomial& p : q39.representatives) CHECK(is_central(p, 3, rng).central);
}

TEST_CASE("orthogonal complement of the MPS span consists of MPIs") {
    SeededRng rng(33);
    const SubspaceBasis b = mps_span_basis(2, 2, 5, rng);
    const RMat comp = orthonormal_complement(b.vectors);
    REQUIRE(comp.cols() == 2);
    for (Eigen::Index k = 0; k < comp.cols(); ++k) {
        const NCPolynomial p = from_vector(RVec(comp.col(k)), 2, 5);
        CHECK(is_mpi(p, 2, rng));
        CHECK(!is_mpi(p, 3, rng));
    }
    // random mixtures too
    for (int t = 0; t < 5; ++t) {
        const RVec v = comp * test::random_real(comp.cols(), 1, rng);
        CHECK(is_mpi(from_vector(v, 2, 5), 2, rng));
    }
}

TEST_CASE("dimensions are monotone in D and m") {
    SeededRng rng(34);
    for (int m = 2; m <= 9; ++m)
        for (int D = 1; D <= 3; ++D) {
            const std::size_t here = mps_span_dim_exact(2, D, m, rng);
            CHECK(here <= mps_span_dim_exact(2, D + 1, m, rng));
            CHECK(here <= mps_span_dim_exact(2, D, m + 1, rng));
        }
}

TEST_CASE("iMPS reduced density matrix span") {
    SeededRng rng(35);
    SUBCASE("fresh reduced density matrices lie in the span") {
        const SubspaceBasis s = imps_rdm_span(2, 2, 4, rng, {}, nullptr, true);
        CHECK(s.kind == SubspaceKind::ImpsRdmSpan);
        CHECK(orthonormality_error(s.vectors) < 1e-10);
        CHECK(orthonormality_error(s.antisymmetric) < 1e-10);
        const RMat& B = s.frame;
        const int t = static_cast<int>(B.cols());
        for (int k = 0; k < 10; ++k) {
            const ImpsSpec spec = ImpsSpec::random(2, 2, rng, true);
            const CMat rho = imps_rdm(spec, 4);
            const CMat x = B.transpose().cast<cplx>() * rho * B.cast<cplx>();
            CHECK((B.cast<cplx>() * x * B.transpose().cast<cplx>() - rho).norm() < 1e-10);
            CHECK(residual(s.vectors, RVec(svec(RMat(x.real())))) < 1e-8);
            CHECK(residual(s.antisymmetric, RVec(asvec(RMat(x.imag())))) < 1e-8);
            (void)t;
        }
    }
    SUBCASE("dimension matches the sampled-rank oracle") {
        for (int D : {1, 2}) {
            const SubspaceBasis s = imps_rdm_span(2, D, 3, rng, {}, nullptr, true);
            const int dim = 64;
            RMat samples(2 * dim, 400);
            for (int k = 0; k < samples.cols(); ++k) {
                const CMat rho = imps_rdm(ImpsSpec::random(2, D, rng, true), 3);
                samples.col(k) << Eigen::Map<const RVec>(RMat(rho.real()).data(), dim), Eigen::Map<const RVec>(RMat(rho.imag()).data(), dim);
            }
            CAPTURE(D);
            CHECK(s.size() + s.antisymmetric.cols() == sampled_rank(samples));
            CHECK(s.size() + s.antisymmetric.cols() <= 64);
        }
        // product states: Hermitian operators on the symmetric subspace of three qubits
        const SubspaceBasis p = imps_rdm_span(2, 1, 3, rng, {}, nullptr, true);
        CHECK(p.size() + p.antisymmetric.cols() == 16);
    }
    SUBCASE("basis elements are Hermitian") {
        const SubspaceBasis s = imps_rdm_span(2, 2, 3, rng);
        const int t = static_cast<int>(s.frame.cols());
        for (int k = 0; k < s.size(); ++k) {
            const RMat x = smat(s.vectors.col(k), t);
            CHECK((x - x.transpose()).norm() == 0.0);
        }
    }
}

TEST_CASE("constrained span") {
    SeededRng rng(36);
    const SubspaceBasis c = constrained_span_basis(2, 2, 4, rng);
    CHECK(c.kind == SubspaceKind::ConstrainedSpan);
    CHECK(orthonormality_error(c.vectors) < 1e-10);
    const SubspaceBasis mps = mps_span_basis(2, 2, 4, rng);
    CHECK(c.size() <= mps.size());
    CHECK((c.vectors - mps.vectors * (mps.vectors.transpose() * c.vectors)).norm() < 1e-8);

    // rank oracle: vectors Σ_w tr(σ X_w)|w⟩ with X_2 = I drawn directly
    RMat samples(16, 200);
    for (int k = 0; k < samples.cols(); ++k) {
        const RMat x1 = test::random_symmetric(2, rng);
        const RMat g = test::random_real(2, 2, rng);
        const RMat sigma = g * g.transpose();
        std::vector<RMat> X = {x1, RMat::Identity(2, 2)};
        for (int w = 0; w < 16; ++w) {
            RMat prod = RMat::Identity(2, 2);
            for (int s = 3; s >= 0; --s) prod = prod * X[(w >> s) & 1];
            samples(w, k) = (sigma * prod).trace();
        }
    }
    CHECK(c.size() == sampled_rank(samples));

    const SubspaceBasis c1 = constrained_span_basis(2, 1, 5, rng);
    const SubspaceBasis sym = mps_span_basis(2, 1, 5, rng);
    CHECK((c1.vectors - sym.vectors * (sym.vectors.transpose() * c1.vectors)).norm() < 1e-8);
}

TEST_CASE("project operator") {
    SeededRng rng(37);
    const SubspaceBasis b = mps_span_basis(2, 2, 5, rng);
    const RMat id = project_operator(RMat(RMat::Identity(32, 32)), b);
    CHECK((id - RMat::Identity(30, 30)).norm() < 1e-12);

    const SubspaceBasis full = mps_span_basis(2, 4, 5, rng);
    REQUIRE(full.size() == 32);
    const RMat h = test::random_symmetric(32, rng);
    const RVec e1 = hermitian_eigenvalues(h), e2 = hermitian_eigenvalues(project_operator(h, full));
    CHECK((e1 - e2).cwiseAbs().maxCoeff() < 1e-9);

    // min eigenvalue in the span is attained by a vector in the span
    const RMat hp = project_operator(h, b);
    Eigen::SelfAdjointEigenSolver<RMat> es(hp);
    const RVec v = b.vectors * es.eigenvectors().col(0);
    CHECK(std::abs(v.dot(h * v) - es.eigenvalues()(0)) < 1e-10);
    CHECK(es.eigenvalues()(0) >= e1(0) - 1e-12);

    CHECK_THROWS_AS(project_operator(RMat(RMat::Identity(16, 16)), b), ShapeError);
}

TEST_CASE("PEPS annihilator counting") {
    const PepsCount a = peps_annihilator_exists(2, 1, 1, 2);
    CHECK(a.exists);
    CHECK(a.states == 4);
    CHECK(a.monomials == 3);
    const PepsCount b = peps_annihilator_exists(2, 2, 1, 5);
    CHECK(!b.exists);
    CHECK(b.states == 32);
    CHECK(b.monomials == 3168);
    const PepsCount c = peps_annihilator_exists(2, 2, 1, 25);
    CHECK(c.exists);
    CHECK(c.monomials == mpz_class(static_cast<unsigned long>(4 * binomial(32, 7))));
    CHECK_THROWS_AS(peps_annihilator_exists(2, 0, 1, 1), ContractViolation);
}

TEST_CASE("subspace kind names round-trip") {
    for (SubspaceKind k : {SubspaceKind::MpsSpan, SubspaceKind::CommutatorSpan, SubspaceKind::Quotient, SubspaceKind::ImpsRdmSpan,
                           SubspaceKind::ConstrainedSpan})
        CHECK(subspace_kind_from_string(to_string(k)) == k);
}
