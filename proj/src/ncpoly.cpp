#include "bondwit/ncpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bondwit/errors.hpp"

namespace bondwit {

NCPolynomial::NCPolynomial(int d, int degree) : d_(d), degree_(degree) {
    if (d < 1) throw ShapeError("NCPolynomial: alphabet must be nonempty");
    if (degree < 0) throw ShapeError("NCPolynomial: negative degree");
}

void NCPolynomial::add(const Word& w, cplx c) {
    if (static_cast<int>(w.size()) != degree_) throw ShapeError("NCPolynomial: word length differs from degree");
    for (int l : w)
        if (l < 0 || l >= d_) throw ShapeError("NCPolynomial: letter outside the alphabet");
    if (c == 0.0) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, c);
        return;
    }
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
}

cplx NCPolynomial::coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

double NCPolynomial::coefficient_norm() const {
    double s = 0;
    for (const auto& [w, c] : terms_) s += std::norm(c);
    return std::sqrt(s);
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& o) const {
    if (o.d_ != d_ || o.degree_ != degree_) throw ShapeError("NCPolynomial: sum of incompatible polynomials");
    NCPolynomial out = *this;
    for (const auto& [w, c] : o.terms_) out.add(w, c);
    return out;
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& o) const { return *this + o.scaled(-1.0); }

NCPolynomial NCPolynomial::operator*(const NCPolynomial& o) const {
    if (o.d_ != d_) throw ShapeError("NCPolynomial: product of polynomials over different alphabets");
    NCPolynomial out(d_, degree_ + o.degree_);
    for (const auto& [w1, c1] : terms_)
        for (const auto& [w2, c2] : o.terms_) {
            Word w = w1;
            w.insert(w.end(), w2.begin(), w2.end());
            out.add(w, c1 * c2);
        }
    return out;
}

NCPolynomial NCPolynomial::scaled(cplx s) const {
    NCPolynomial out(d_, degree_);
    if (s == 0.0) return out;
    for (const auto& [w, c] : terms_) out.terms_.emplace(w, c * s);
    return out;
}

NCPolynomial NCPolynomial::monomial(int d, const Word& w, cplx c) {
    NCPolynomial p(d, static_cast<int>(w.size()));
    p.add(w, c);
    return p;
}

NCPolynomial commutator(const NCPolynomial& a, const NCPolynomial& b) { return a * b - b * a; }

namespace {

// Walks the terms in lexicographic order so consecutive words share their
// prefix products.
template <class Mat, class CoeffFn>
Mat evaluate_sorted(const std::map<Word, cplx>& terms, int degree, const std::vector<Mat>& X, CoeffFn coeff) {
    const Eigen::Index D = X.front().rows();
    Mat out = Mat::Zero(D, D);
    std::vector<Mat> prefix(static_cast<std::size_t>(degree) + 1);
    prefix[0] = Mat::Identity(D, D);
    const Word* prev = nullptr;
    for (const auto& [w, c] : terms) {
        std::size_t common = 0;
        if (prev)
            while (common < w.size() && (*prev)[common] == w[common]) ++common;
        for (std::size_t k = common; k < w.size(); ++k) prefix[k + 1] = prefix[k] * X[w[k]];
        out += coeff(c) * prefix[w.size()];
        prev = &w;
    }
    return out;
}

void check_operands(int d, const auto& X) {
    if (static_cast<int>(X.size()) != d) throw ShapeError("evaluate: expected one matrix per variable");
    if (X.empty()) throw ShapeError("evaluate: empty matrix tuple");
    const auto D = X.front().rows();
    for (const auto& x : X)
        if (x.rows() != D || x.cols() != D) throw ShapeError("evaluate: matrices must be square of equal size");
}

using LCplx = std::complex<long double>;
using LMat = Eigen::Matrix<LCplx, Eigen::Dynamic, Eigen::Dynamic>;

LMat evaluate_long(const NCPolynomial& p, const std::vector<LMat>& X) {
    return evaluate_sorted(p.terms(), p.degree(), X, [](cplx c) { return LCplx(c.real(), c.imag()); });
}

std::vector<CMat> gaussian_tuple(int d, int D, SeededRng& rng) {
    std::vector<CMat> X;
    for (int i = 0; i < d; ++i) {
        CMat m(D, D);
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.complex_normal();
        X.push_back(m);
    }
    return X;
}

std::vector<RMat> absolute(const std::vector<CMat>& X) {
    std::vector<RMat> out;
    for (const auto& x : X) out.push_back(x.cwiseAbs());
    return out;
}

// Plain polynomials: the value must be below kIdentityTolerance times the
// entrywise term bound, which tolerates coefficients known only to roundoff.
bool vanishes(const NCPolynomial& p, const std::vector<CMat>& X, bool central, cplx* scalar) {
    const int D = static_cast<int>(X.front().rows());
    const double scale = abs_evaluate(p, absolute(X)).norm();
    CMat v = evaluate(p, X);
    const cplx s = v.trace() / static_cast<double>(D);
    if (scalar) *scalar = s;
    if (central) v -= s * CMat::Identity(D, D);
    return v.norm() <= kIdentityTolerance * scale;
}

// Composites: the inner values are typically tiny against their term bounds,
// so the outer sum is instead compared with its own double-precision roundoff,
// estimated against an extended-precision evaluation.
bool vanishes(const CompositePolynomial& p, const std::vector<CMat>& X, bool central, cplx* scalar) {
    const int D = static_cast<int>(X.front().rows());
    std::vector<LMat> lx;
    for (const auto& x : X) lx.push_back(x.cast<LCplx>());
    std::vector<LMat> inner;
    for (const auto& q : p.inner) inner.push_back(evaluate_long(q, lx));
    LMat vl = evaluate_long(p.outer, inner);
    CMat vd = evaluate(p, X);
    const LCplx sl = vl.trace() / static_cast<long double>(D);
    const cplx sd = vd.trace() / static_cast<double>(D);
    if (scalar) *scalar = cplx(static_cast<double>(sl.real()), static_cast<double>(sl.imag()));
    if (central) {
        vl -= sl * LMat::Identity(D, D);
        vd -= sd * CMat::Identity(D, D);
    }
    const long double noise = (vd.cast<LCplx>() - vl).norm();
    return vl.norm() <= 10.0L * noise;
}

template <class P>
bool mpi_impl(const P& p, int D, SeededRng& rng, int trials) {
    if (trials < 1) throw ContractViolation("is_mpi: trials must be positive");
    if (D < 1) throw ContractViolation("is_mpi: D must be positive");
    for (int t = 0; t < trials; ++t)
        if (!vanishes(p, gaussian_tuple(p.d(), D, rng), false, nullptr)) return false;
    return true;
}

template <class P>
CentralityResult central_impl(const P& p, int D, SeededRng& rng, int trials) {
    if (trials < 1) throw ContractViolation("is_central: trials must be positive");
    if (D < 1) throw ContractViolation("is_central: D must be positive");
    CentralityResult res;
    res.central = true;
    for (int t = 0; t < trials; ++t) {
        cplx s;
        if (!vanishes(p, gaussian_tuple(p.d(), D, rng), true, &s)) res.central = false;
        res.scalars.push_back(s);
    }
    return res;
}

}  // namespace

CMat evaluate(const NCPolynomial& p, const std::vector<CMat>& X) {
    check_operands(p.d(), X);
    return evaluate_sorted(p.terms(), p.degree(), X, [](cplx c) { return c; });
}

RMat abs_evaluate(const NCPolynomial& p, const std::vector<RMat>& absX) {
    check_operands(p.d(), absX);
    return evaluate_sorted(p.terms(), p.degree(), absX, [](cplx c) { return std::abs(c); });
}

int CompositePolynomial::degree() const {
    if (inner.empty()) return 0;
    return outer.degree() * inner.front().degree();
}

NCPolynomial CompositePolynomial::expand(std::size_t max_terms) const {
    if (static_cast<int>(inner.size()) != outer.d()) throw ShapeError("CompositePolynomial: inner count differs from outer alphabet");
    double estimate = 0;
    for (const auto& [w, c] : outer.terms()) {
        double prod = 1;
        for (int l : w) prod *= static_cast<double>(inner[l].size());
        estimate += prod;
    }
    if (estimate > static_cast<double>(max_terms))
        throw ResourceError("CompositePolynomial: expansion would have about " + std::to_string(estimate) + " terms");
    NCPolynomial out(d(), degree());
    for (const auto& [w, c] : outer.terms()) {
        NCPolynomial prod = NCPolynomial::monomial(d(), Word{}, c);
        for (int l : w) prod = prod * inner[l];
        out = out + prod;
    }
    return out;
}

CMat evaluate(const CompositePolynomial& p, const std::vector<CMat>& X) {
    if (static_cast<int>(p.inner.size()) != p.outer.d()) throw ShapeError("CompositePolynomial: inner count differs from outer alphabet");
    std::vector<CMat> vals;
    for (const auto& q : p.inner) vals.push_back(evaluate(q, X));
    return evaluate(p.outer, vals);
}

NCPolynomial standard_identity(int N) {
    if (N < 1) throw ContractViolation("standard_identity: N must be positive");
    if (N > 10) throw ResourceError("standard_identity: N! terms exceed the enumeration limit (N <= 10)");
    NCPolynomial p(N, N);
    Word w(N);
    std::iota(w.begin(), w.end(), 0);
    do {
        int inversions = 0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                if (w[i] > w[j]) ++inversions;
        p.add(w, inversions % 2 ? -1.0 : 1.0);
    } while (std::next_permutation(w.begin(), w.end()));
    return p;
}

CVec to_vector(const NCPolynomial& p) {
    const std::size_t n = checked_pow(p.d(), p.degree(), memory_budget());
    CVec v = CVec::Zero(static_cast<Eigen::Index>(n));
    for (const auto& [w, c] : p.terms()) {
        std::size_t idx = 0;
        for (int l : w) idx = idx * p.d() + l;
        v(static_cast<Eigen::Index>(idx)) = std::conj(c);
    }
    return v;
}

namespace {

template <class Vec>
NCPolynomial from_vector_impl(const Vec& v, int d, int m, double drop_tol) {
    const std::size_t n = checked_pow(d, m, memory_budget());
    if (static_cast<std::size_t>(v.size()) != n) throw ShapeError("from_vector: length is not d^m");
    NCPolynomial p(d, m);
    Word w(m);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const cplx c = v(static_cast<Eigen::Index>(idx));
        if (std::abs(c) <= drop_tol) continue;
        std::size_t r = idx;
        for (int k = m - 1; k >= 0; --k) {
            w[k] = static_cast<int>(r % d);
            r /= d;
        }
        p.add(w, std::conj(c));
    }
    return p;
}

}  // namespace

NCPolynomial from_vector(const CVec& v, int d, int m, double drop_tol) { return from_vector_impl(v, d, m, drop_tol); }
NCPolynomial from_vector(const RVec& v, int d, int m, double drop_tol) { return from_vector_impl(v, d, m, drop_tol); }

bool is_mpi(const NCPolynomial& p, int D, SeededRng& rng, int trials) { return mpi_impl(p, D, rng, trials); }
bool is_mpi(const CompositePolynomial& p, int D, SeededRng& rng, int trials) { return mpi_impl(p, D, rng, trials); }

CentralityResult is_central(const NCPolynomial& p, int D, SeededRng& rng, int trials) {
    return central_impl(p, D, rng, trials);
}
CentralityResult is_central(const CompositePolynomial& p, int D, SeededRng& rng, int trials) {
    return central_impl(p, D, rng, trials);
}

NCPolynomial staircase_polynomial(int D, int i, int j) {
    if (D < 1 || i < 1 || i > D || j < 1 || j > D) throw ContractViolation("staircase_polynomial: index out of range");
    // c^(i) solves sum_p c_p k^p = delta_ik, so sum_p c_p B1^p = |i><i|
    RMat vander(D, D);
    for (int k = 1; k <= D; ++k)
        for (int p = 1; p <= D; ++p) vander(k - 1, p - 1) = std::pow(static_cast<double>(k), p);
    const Eigen::FullPivLU<RMat> lu(vander);
    const RVec ci = lu.solve(RVec(RVec::Unit(D, i - 1)));
    const RVec cj = lu.solve(RVec(RVec::Unit(D, j - 1)));

    // B2 is idempotent, so any positive power of X2 in the middle acts as B2
    const int degree = 2 * D + 1;
    NCPolynomial out(2, degree);
    for (int p = 1; p <= D; ++p)
        for (int q = 1; q <= D; ++q) {
            Word w;
            w.insert(w.end(), p, 0);
            w.insert(w.end(), degree - p - q, 1);
            w.insert(w.end(), q, 0);
            out.add(w, static_cast<double>(D) * ci(p - 1) * cj(q - 1));
        }
    return out;
}

CompositePolynomial prop1_separating_poly(int D) {
    if (D < 2) throw ContractViolation("prop1_separating_poly: D must be at least 2");
    const int n = 2 * (D - 1);
    CompositePolynomial c{standard_identity(n), {}};
    for (int k = 1; k <= D - 1; ++k) {
        c.inner.push_back(staircase_polynomial(D, k, k));
        c.inner.push_back(staircase_polynomial(D, k, k + 1));
    }
    return c;
}

}  // namespace bondwit
