#include <doctest.h>

#include <cmath>

#include "bondwit/errors.hpp"
#include "bondwit/witness.hpp"
#include "helpers.hpp"

using namespace bondwit;
using bondwit::test::random_real;
using bondwit::test::random_symmetric;

namespace {

CMat pauli(int k) {
    CMat s(2, 2);
    if (k == 0) s << 0, 1, 1, 0;
    if (k == 1) s << 0, cplx(0, -1), cplx(0, 1), 0;
    if (k == 2) s << 1, 0, 0, -1;
    return s;
}

// Σ_a σ^a_i σ^a_j on n sites
RMat pauli_pair(int n, int i, int j) {
    CMat out = CMat::Zero(1 << n, 1 << n);
    for (int a = 0; a < 3; ++a) {
        CMat m = CMat::Identity(1, 1);
        for (int s = 0; s < n; ++s) m = kron(m, (s == i || s == j) ? pauli(a) : CMat(CMat::Identity(2, 2)));
        out += m;
    }
    return out.real();
}

std::vector<int> cut_list(int from, int n) {
    std::vector<int> c;
    for (int j = from; j < n; ++j) c.push_back(j);
    return c;
}

double expectation(const LocalHamiltonian& H, const CVec& psi) {
    const CMat v = psi;
    return (v.adjoint() * H.apply(v))(0, 0).real() / psi.squaredNorm();
}

RMat random_real_mps_state(int D, int n, SeededRng& rng) {
    const MpsSpec s = MpsSpec::random(2, D, rng, false);
    return build_state(s, n).real();
}

void check_certificate(const BoundResult& r, const LocalHamiltonian* H) {
    CHECK(r.certificate.residual < 1e-6);
    CHECK(r.certificate.f_min_eig > -1e-8);
    for (double g : r.certificate.g_pt_min_eig) CHECK(g > -1e-8);
    if (H) CHECK(certificate_residual(*H, r.certificate) < 1e-6);
    CHECK(r.bound.gap < 1e-6);
}

}  // namespace

TEST_CASE("hamiltonian builders") {
    CHECK(hermitian_min_eig(heisenberg(2).dense_real()) == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(heisenberg(7).ground_energy() / 6 == doctest::Approx(-0.4727).epsilon(1e-4 / 0.4727));
    CHECK((heisenberg_term() - pauli_pair(2, 0, 1) / 4).norm() < 1e-14);
    const RMat mg = (2 * pauli_pair(3, 0, 1) + pauli_pair(3, 0, 2)) / 8;
    CHECK((majumdar_ghosh_term() - mg).norm() < 1e-14);

    RMat dense = RMat::Zero(64, 64);
    for (int i = 0; i + 1 < 6; ++i) dense += 2 * pauli_pair(6, i, i + 1) / 8;
    for (int i = 0; i + 2 < 6; ++i) dense += pauli_pair(6, i, i + 2) / 8;
    CHECK((majumdar_ghosh(6).dense_real() - dense).norm() < 1e-12);
    CHECK_THROWS_AS(heisenberg(1), ContractViolation);
    CHECK_THROWS_AS(majumdar_ghosh(2), ContractViolation);
}

TEST_CASE("cut and glue operators") {
    SeededRng rng(31);
    const CutGlueOperator c4 = cut_and_glue(2, 2, 4, rng);
    CHECK(c4.q() == 1);
    CHECK(c4.matrix.cols() == 16);
    CHECK((c4.matrix * c4.matrix.transpose() - RMat::Identity(1, 1)).norm() < 1e-10);
    CHECK(c4.polynomials.size() == 1);
    CHECK_THROWS_AS(cut_and_glue(2, 2, 3, rng), NoOperatorError);

    SUBCASE("glued bond-2 states are product across the register") {
        const int n = 6;
        for (int t = 0; t < 10; ++t) {
            const MpsSpec s = MpsSpec::random(2, 2, rng, true);
            const CVec out = apply_cut(c4, build_state(s, n), n, 0);
            // q = 1: the output is the glued 2-site state up to scale
            const CVec glued = build_state(s, 2);
            const double fid = std::norm(glued.dot(out)) / (glued.squaredNorm() * out.squaredNorm());
            CHECK(fid > 1 - 1e-8);
        }
        const CutGlueOperator c5 = cut_and_glue(2, 2, 5, rng);
        for (int t = 0; t < 10; ++t) {
            const MpsSpec s = MpsSpec::random(2, 2, rng, true);
            const CVec out = apply_cut(c5, build_state(s, 7), 7, 1);
            Eigen::Map<const CMat> m(out.data(), 2 * 2, c5.q());  // rest × register
            CHECK(numerical_rank(CMat(m), 1e-8) == 1);
        }
    }
    SUBCASE("bond-3 states stay entangled under a bond-2 cut") {
        const CutGlueOperator c5 = cut_and_glue(2, 2, 5, rng);
        REQUIRE(c5.q() == 2);
        const MpsSpec s = MpsSpec::random(2, 3, rng, true);
        const CVec out = apply_cut(c5, build_state(s, 8), 8, 0);
        Eigen::Map<const CMat> m(out.data(), 8, 2);
        CHECK(numerical_rank(CMat(m), 1e-8) > 1);
    }
    SUBCASE("row application agrees with state application") {
        const CutGlueOperator c6 = cut_and_glue(2, 2, 6, rng);
        const RMat m = random_real(256, 3, rng);
        const RMat rows = apply_cut_rows(c6, m, 8);
        for (int k = 0; k < 3; ++k) {
            const CVec v = apply_cut(c6, CVec(m.col(k).cast<cplx>()), 8, 0);
            CHECK((v.real() - rows.col(k)).norm() < 1e-12);
        }
    }
}

TEST_CASE("cut states have positive partial transpose") {
    SeededRng rng(32);
    const int n = 7;
    for (int j : {4, 5, 6}) {
        const CutGlueOperator c = cut_and_glue(2, 2, j, rng);
        const int r = 1 << (n - j);
        for (int t = 0; t < 8; ++t) {
            const RMat psi = random_real_mps_state(2, n, rng);
            const RMat v = apply_cut_rows(c, psi, n);
            const RMat rho = v * v.transpose() / psi.squaredNorm();
            CHECK(hermitian_min_eig(partial_transpose_first(rho, c.q(), r)) > -1e-9);
        }
    }
}

TEST_CASE("finite chain witness bound") {
    const LocalHamiltonian H = heisenberg(7);
    const BoundResult with = mps_lower_bound(H, 2, {5, 6}, true);
    CHECK(with.bound.status == SdpStatus::Optimal);
    CHECK(std::abs(with.bound.value / 6 + 0.4065) < 2e-3);
    CHECK(with.bound.cut_ranks == std::vector<int>{2, 6});
    check_certificate(with, &H);

    const BoundResult without = mps_lower_bound(H, 2, {5, 6}, false);
    WitnessOptions opt;
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(2, 2, 7, rng);
    CHECK(without.bound.value == doctest::Approx(hermitian_min_eig(project_operator(H, B))).epsilon(1e-12));
    CHECK(without.certificate.residual < 1e-9);

    // sandwich: ppt ≥ span-only ≥ full space, and explicit bond-2 states sit above
    const double exact = H.ground_energy();
    CHECK(with.bound.value >= without.bound.value - 1e-8);
    CHECK(without.bound.value >= exact - 1e-8);
    SeededRng srng(33);
    for (int t = 0; t < 20; ++t) {
        const MpsSpec s = MpsSpec::random(2, 2, srng, t % 2 == 1);
        CHECK(expectation(H, build_state(s, 7)) >= with.bound.value - 1e-6);
    }

    // full space at D = 4: the bound is tight
    const BoundResult full = mps_lower_bound(H, 4, {}, false);
    CHECK(full.bound.basis_size == 128);
    CHECK(full.bound.value / 6 == doctest::Approx(-0.4727).epsilon(1e-4 / 0.4727));
    CHECK(full.bound.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("D = 1 bound with cuts is the symmetric-subspace value") {
    // every symmetric state has σ⃗_i·σ⃗_j = 1, so both the bound and
    // every product state give (N-1)/4
    const LocalHamiltonian H = heisenberg(5);
    const BoundResult r = mps_lower_bound(H, 1, {2, 3, 4}, true);
    CHECK(r.bound.status == SdpStatus::Optimal);
    CHECK(r.bound.value == doctest::Approx(1.0).epsilon(1e-7));
    check_certificate(r, &H);
}

TEST_CASE("bounds on a random hamiltonian sit below bond-D states") {
    SeededRng rng(34);
    LocalHamiltonian H;
    H.n = 6;
    H.d = 2;
    for (int s = 0; s + 1 < 6; ++s) {
        HamiltonianTerm t;
        t.start = s;
        t.width = 2;
        t.h = random_symmetric(4, rng).cast<cplx>();
        H.terms.push_back(t);
    }
    const BoundResult r = mps_lower_bound(H, 2, {4, 5}, true);
    REQUIRE(r.bound.status == SdpStatus::Optimal);
    check_certificate(r, &H);
    CHECK(r.bound.value >= mps_lower_bound(H, 2, {}, false).bound.value - 1e-8);
    for (int t = 0; t < 20; ++t) {
        const MpsSpec s = MpsSpec::random(2, 2, rng, false);
        CHECK(expectation(H, build_state(s, 6)) >= r.bound.value - 1e-6);
    }
}

TEST_CASE("iMPS hierarchy") {
    WitnessOptions opt;
    const RMat h = heisenberg_term();
    const BoundResult b5 = imps_lower_bound(h, 2, 2, 5, cut_list(4, 5), true, true, opt);
    const BoundResult b6 = imps_lower_bound(h, 2, 2, 6, cut_list(4, 6), true, true, opt);
    CHECK(b5.bound.status == SdpStatus::Optimal);
    CHECK(b6.bound.status == SdpStatus::Optimal);
    check_certificate(b5, nullptr);
    check_certificate(b6, nullptr);
    CHECK(b5.bound.value <= b6.bound.value + 1e-7);
    CHECK(b6.bound.value > 0.25 - std::log(2.0));
    // relaxations only remove constraints
    const BoundResult loose = imps_lower_bound(h, 2, 2, 6, cut_list(4, 6), false, true, opt);
    const BoundResult looser = imps_lower_bound(h, 2, 2, 6, cut_list(4, 6), true, false, opt);
    CHECK(loose.bound.value <= b6.bound.value + 1e-7);
    CHECK(looser.bound.value <= b6.bound.value + 1e-7);
    check_certificate(looser, nullptr);

    // recomputation from the stored data reproduces the residual
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(2, 2, 6, rng);
    RMat avg = RMat::Zero(64, 64);
    for (int s = 0; s < 5; ++s) avg += pauli_pair(6, s, s + 1) / 4;
    const RMat Ht = B.vectors.transpose() * (avg / 5) * B.vectors;
    CHECK(certificate_residual(Ht, b6.certificate) < 1e-6);
    // any bond-2 iMPS density obeys the bound
    SeededRng srng(35);
    for (int t = 0; t < 10; ++t) {
        const ImpsSpec s = ImpsSpec::random(2, 2, srng);
        const double e = (h.cast<cplx>() * imps_rdm(s, 2)).trace().real();
        CHECK(e >= b6.bound.value - 1e-6);
    }
}

TEST_CASE("simplified bound") {
    const LocalHamiltonian H = heisenberg(6);
    CHECK(simplified_bound(H, -1) == doctest::Approx(H.ground_energy()).epsilon(1e-12));
    CHECK(simplified_bound(H, 4) == doctest::Approx(H.ground_energy()).epsilon(1e-12));

    // D = 1: diagonalize directly on normalized Dicke states
    SeededRng rng(36);
    LocalHamiltonian R;
    R.n = 5;
    R.d = 2;
    for (int s = 0; s + 1 < 5; ++s) {
        HamiltonianTerm t;
        t.start = s;
        t.width = 2;
        t.h = random_symmetric(4, rng).cast<cplx>();
        R.terms.push_back(t);
    }
    RMat dicke = RMat::Zero(32, 6);
    for (int w = 0; w < 32; ++w) dicke(w, __builtin_popcount(static_cast<unsigned>(w))) = 1.0;
    for (int k = 0; k < 6; ++k) dicke.col(k).normalize();
    const double oracle = hermitian_min_eig(RMat(dicke.transpose() * R.dense_real() * dicke));
    CHECK(simplified_bound(R, 1) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(simplified_bound(R, 2) <= simplified_bound(R, 1) + 1e-10);
}

TEST_CASE("feasibility tests") {
    const LocalHamiltonian H = heisenberg(7);
    const RMat O = H.dense_real() / 6.0;
    const FeasibilityResult low = feasibility_test({{O, -0.45, 1e-4}}, 2, 2, 7, {5, 6}, true);
    CHECK(low.verdict == Verdict::Infeasible);
    CHECK(low.separation > 1e-8);
    CHECK(low.certificate.size() == low.solution.ray_y.size());
    const FeasibilityResult high = feasibility_test({{O, -0.30, 1e-4}}, 2, 2, 7, {5, 6}, true);
    CHECK(high.verdict == Verdict::Feasible);
    // between the span minimum −0.4256 and the cut bound
    CHECK(feasibility_test({{O, -0.42, 1e-4}}, 2, 2, 7, {}, false).verdict == Verdict::Feasible);
    CHECK(feasibility_test({{O, -0.42, 1e-4}}, 2, 2, 7, {5, 6}, true).verdict == Verdict::Infeasible);

    SUBCASE("expectations of an actual bond-2 state") {
        SeededRng rng(37);
        const RMat psi = random_real_mps_state(2, 7, rng);
        std::vector<ExpectationConstraint> cs;
        for (int k = 0; k < 3; ++k) {
            LocalHamiltonian A;
            A.n = 7;
            A.d = 2;
            for (int s = 0; s + 1 < 7; ++s) {
                HamiltonianTerm t;
                t.start = s;
                t.width = 2;
                t.h = random_symmetric(4, rng).cast<cplx>();
                A.terms.push_back(t);
            }
            const RMat a = A.dense_real();
            cs.push_back({a, (psi.transpose() * a * psi)(0, 0) / psi.squaredNorm(), 1e-6});
        }
        cs.push_back({O, (psi.transpose() * O * psi)(0, 0) / psi.squaredNorm(), 0.0});
        CHECK(feasibility_test(cs, 2, 2, 7, {5, 6}, true).verdict == Verdict::Feasible);
    }
    CHECK(to_string(Verdict::Infeasible) == "infeasible");
}

TEST_CASE("nelder mead") {
    auto rosen = [](const RVec& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
    const NelderMeadResult r = nelder_mead(rosen, RVec::Constant(2, -1.0), 0.5, 2000);
    CHECK(std::abs(r.x(0) - 1) < 1e-5);
    CHECK(std::abs(r.x(1) - 1) < 1e-5);
    CHECK(r.value < 1e-10);
    CHECK_THROWS_AS(nelder_mead(rosen, RVec(), 0.5, 10), ContractViolation);
}

TEST_CASE("variational upper bounds") {
    SeededRng rng(38);
    // a translation-invariant product state has parallel spins: +1/4
    VariationalOptions few;
    few.restarts = 4;
    const VariationalResult d1 = variational_upper_bound(heisenberg_term(), 2, 1, rng, few);
    CHECK(d1.value == doctest::Approx(0.25).epsilon(1e-8));
    const VariationalResult mg2 = variational_upper_bound(majumdar_ghosh_term(), 2, 2, rng);
    CHECK(mg2.value <= -0.12);
    CHECK(mg2.restart_values.size() == 32);
    const VariationalResult mg3 = variational_upper_bound(majumdar_ghosh_term(), 2, 3, rng);
    CHECK(std::abs(mg3.value + 0.375) < 1e-3);
    // the returned spec reproduces the value
    CHECK((majumdar_ghosh_term().cast<cplx>() * imps_rdm(mg3.spec, 3)).trace().real() ==
          doctest::Approx(mg3.value).epsilon(1e-10));

    const BoundResult lb = imps_lower_bound(majumdar_ghosh_term(), 2, 2, 6, cut_list(4, 6), true, true);
    CHECK(mg2.value >= lb.bound.value - 1e-6);
}

TEST_CASE("separating projector") {
    SeededRng rng(39);
    int m = 0;
    const RMat h = separating_projector(2, 2, m, 8, rng);
    CHECK(m == 5);
    CHECK(h.trace() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK((h * h - h).norm() < 1e-10);
    SeededRng r2(40);
    const SubspaceBasis low = mps_span_basis(2, 2, 5, r2);
    CHECK((h * low.vectors).norm() < 1e-9);
    const MpsSpec s3 = MpsSpec::random(2, 3, r2, false);
    const CVec v = build_state(s3, 5);
    CHECK((h.cast<cplx>() * v).norm() > 1e-3 * v.norm());
    int m2 = 0;
    CHECK_THROWS_AS(separating_projector(2, 2, m2, 4, rng), NoOperatorError);
}

TEST_CASE("prop1 hamiltonian family") {
    SeededRng rng(41);
    const int n = 8;
    const Prop1Family f = prop1_hamiltonian(2, 2, n, -1.0, rng);
    CHECK(f.injectivity_k >= 1);
    CHECK(f.window == 5);
    CHECK(f.lambda > 0);
    CHECK(static_cast<int>(f.H_lambda.terms.size()) == static_cast<int>(f.H.terms.size()) + n - f.window + 1);

    const CVec gen = build_state(f.generator, n);
    CHECK(std::abs(expectation(f.H, gen)) < 1e-10);
    CHECK(std::abs(expectation(f.H_lambda, gen)) < 1e-10);
    CHECK(std::abs(f.H.ground_energy()) < 1e-10);
    CHECK(f.H_lambda.ground_energy() < -1.0);

    // translation-invariant product states have strictly positive energy
    auto product_energy = [&](const RVec& x) {
        CVec a(2);
        a << cplx(x(0), x(1)), cplx(x(2), x(3));
        if (a.norm() < 1e-12) return 1e6;
        a.normalize();
        CVec psi = a;
        for (int s = 1; s < n; ++s) psi = kron(CMat(psi), CMat(a));
        return expectation(f.H, psi);
    };
    const NelderMeadResult nm = nelder_mead(product_energy, RVec::Constant(4, 0.5), 0.5, 1000);
    CHECK(nm.value > 1e-6);

    // the λ-terms are invisible on bond-2 states
    SeededRng r2(42);
    const SubspaceBasis B = mps_span_basis(2, 2, n, r2);
    const RVec e0 = hermitian_eigenvalues(project_operator(f.H, B));
    const RVec e1 = hermitian_eigenvalues(project_operator(f.H_lambda, B));
    CHECK((e0 - e1).cwiseAbs().maxCoeff() < 1e-9);

    CHECK_THROWS_AS(prop1_hamiltonian(3, 2, n, -1.0, rng), PreconditionError);
    CHECK_THROWS_AS(prop1_hamiltonian(1, 2, n, -1.0, rng), PreconditionError);
}
