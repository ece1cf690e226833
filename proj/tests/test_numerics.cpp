#include <cmath>
#include <vector>

#include "bondwit/errors.hpp"
#include "bondwit/modular.hpp"
#include "bondwit/numerics.hpp"
#include "bondwit/rational.hpp"
#include "bondwit/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bondwit;

namespace {

// Smallest eigenvalue by bisection on the inertia of M - lambda I.
double inertia_bisection_min(const CMat& m) {
    const double r = m.norm() + 1.0;
    double lo = -r, hi = r;
    auto negatives = [&](double lam) {
        CMat s = m - lam * CMat::Identity(m.rows(), m.cols());
        Eigen::LDLT<CMat> ldlt(s);
        int neg = 0;
        for (Eigen::Index i = 0; i < s.rows(); ++i)
            if (ldlt.vectorD()(i).real() < 0) ++neg;
        return neg;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (negatives(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("rng streams are reproducible") {
    SeededRng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
        CHECK(a.normal() == b.normal());
    }
    SeededRng c = a.derive(3), e = b.derive(3), f = b.derive(4);
    CHECK(c.next_u64() == e.next_u64());
    CHECK(c.next_u64() != f.next_u64());
    SeededRng g(7);
    for (int i = 0; i < 1000; ++i) {
        const auto v = g.uniform_int(-9, 9);
        CHECK(v >= -9);
        CHECK(v <= 9);
        const double u = g.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal deviates have unit variance") {
    SeededRng rng(11);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.01);
}

TEST_CASE("hermitian_min_eig") {
    CHECK(hermitian_min_eig(CMat(CMat::Identity(4, 4))) == doctest::Approx(1.0));
    RVec dv(3);
    dv << 3, -2, 0;
    CHECK(hermitian_min_eig(RMat(dv.asDiagonal())) == doctest::Approx(-2.0));

    SeededRng rng(5);
    const CMat h = test::random_hermitian(50, rng);
    CHECK(std::abs(hermitian_min_eig(h) - inertia_bisection_min(h)) < 1e-8);

    for (double c : {-3.5, 0.0, 2.25}) {
        const CMat s = h + c * CMat::Identity(50, 50);
        CHECK(std::abs(hermitian_min_eig(s) - hermitian_min_eig(h) - c) < 1e-9);
    }
    CHECK_THROWS_AS(hermitian_min_eig(CMat(CMat::Zero(2, 3))), ContractViolation);
    CMat nh = CMat::Zero(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_min_eig(nh), ContractViolation);
}

TEST_CASE("partial_transpose") {
    const std::vector<int> dims{2, 2};
    const std::vector<int> second{1};
    const CMat id = CMat::Identity(4, 4);
    CHECK((partial_transpose(id, dims, second) - id).norm() == 0.0);

    CVec phi = CVec::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const CMat bell = phi * phi.adjoint();
    CHECK(hermitian_min_eig(partial_transpose(bell, dims, second)) == doctest::Approx(-0.5));

    SeededRng rng(9);
    const CMat ra = test::random_density(2, rng), rb = test::random_density(3, rng);
    const std::vector<int> dims23{2, 3};
    const CMat pt = partial_transpose(kron(ra, rb), dims23, second);
    CHECK((pt - kron(ra, CMat(rb.transpose()))).norm() < 1e-14);
    CHECK(hermitian_min_eig(pt) > -1e-12);

    const std::vector<int> dims3{2, 3, 2};
    const std::vector<int> sub{0, 2};
    const CMat m = test::random_complex(12, 12, rng);
    CHECK((partial_transpose(partial_transpose(m, dims3, sub), dims3, sub) - m).norm() == 0.0);
    CHECK(std::abs(partial_transpose(m, dims3, sub).trace() - m.trace()) < 1e-12);
    CHECK_THROWS_AS(partial_transpose(m, dims, sub), ShapeError);

    const RMat rm = m.real();
    const std::vector<int> ab{3, 4};
    const std::vector<int> first{0};
    const RMat big = test::random_complex(12, 12, rng).real();
    CHECK((partial_transpose_first(big, 3, 4) - partial_transpose(big, ab, first)).norm() == 0.0);
    (void)rm;
}

TEST_CASE("rational_rank") {
    CHECK(rational_rank(RationalMatrix::from_integers(2, 2, {1, 2, 2, 4})) == 1);
    CHECK(rational_rank(RationalMatrix::identity(7)) == 7);
    CHECK(rational_rank(RationalMatrix(3, 5)) == 0);

    SeededRng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12, r = 1 + trial % 9;
        std::vector<long> left(n * r), right(r * n);
        for (auto& v : left) v = rng.uniform_int(-5, 5);
        for (auto& v : right) v = rng.uniform_int(-5, 5);
        RationalMatrix a(n, r), b(r, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < r; ++k) {
                a(i, k) = left[i * r + k];
                b(k, i) = right[k * n + i];
            }
        RationalMatrix p(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < r; ++k) p(i, j) += a(i, k) * b(k, j);
        const auto rank = rational_rank(p);
        // planted rank, unless the random factors happen to be deficient
        CHECK(rank == std::min<std::size_t>(rational_rank(a), rational_rank(b)));
        CHECK(rank <= static_cast<std::size_t>(r));

        RationalMatrix q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q(i, j) = p(n - 1 - i, j) * mpq_class(2 * i + 1, 3);
        CHECK(rational_rank(q) == rank);
    }
}

TEST_CASE("modular echelon agrees with exact rank") {
    SeededRng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 40, cols = 30, r = 3 + trial;
        RMat a(rows, r), b(r, cols);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = static_cast<double>(rng.uniform_int(-3, 3));
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = static_cast<double>(rng.uniform_int(-3, 3));
        const RMat p = a * b;
        RationalMatrix q(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) q(i, j) = static_cast<long>(p(i, j));

        ModularEchelon ech(cols);
        std::size_t accepted = 0;
        for (int start = 0; start < rows; start += 7) {
            const int h = std::min(7, rows - start);
            ResidueRows batch(h, cols);
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < cols; ++j) batch(i, j) = static_cast<double>(mod_reduce(static_cast<std::int64_t>(p(start + i, j)), ech.prime()));
            for (bool ok : ech.add_rows(batch)) accepted += ok;
        }
        CHECK(ech.rank() == rational_rank(q));
        CHECK(accepted == ech.rank());
    }
    CHECK(mod_inverse(3, 7) == 5);
    CHECK((mod_inverse(123456, kDefaultPrime) * 123456) % kDefaultPrime == 1);
}

TEST_CASE("svec and smat") {
    SeededRng rng(2);
    const RMat a = test::random_symmetric(6, rng), b = test::random_symmetric(6, rng);
    CHECK(svec(a).dot(svec(b)) == doctest::Approx((a * b).trace()));
    CHECK((smat(svec(a), 6) - a).norm() < 1e-14);
}

TEST_CASE("lanczos matches dense eigensolver") {
    SeededRng rng(4);
    const RMat h = test::random_symmetric(300, rng);
    const double ref = hermitian_min_eig(h);
    const double got = lanczos_min_eig([&](const RVec& v) { return RVec(h * v); }, 300);
    CHECK(std::abs(got - ref) < 1e-9);
}

TEST_CASE("checked_pow and ranges") {
    CHECK(checked_pow(2, 10) == 1024);
    CHECK_THROWS_AS(checked_pow(2, 50, 1 << 20), ResourceError);
    SeededRng rng(8);
    const RMat m = test::random_complex(10, 4, rng).real();
    const RMat q = orthonormal_range(m);
    CHECK(q.cols() == 4);
    const RMat c = orthonormal_complement(m);
    CHECK(c.cols() == 6);
    CHECK((c.transpose() * m).norm() < 1e-12);
    CHECK(numerical_rank(RMat(m * m.transpose())) == 4);
}
