#pragma once

#include <map>
#include <vector>

#include "bondwit/numerics.hpp"
#include "bondwit/rng.hpp"

namespace bondwit {

/// Letters are stored 0-based (X_1 is letter 0); serialized forms are 1-based.
using Word = std::vector<int>;

/// Homogeneous noncommutative polynomial sum_w c_w X_{w1}...X_{wm}.
class NCPolynomial {
public:
    NCPolynomial(int d, int degree);

    int d() const { return d_; }
    int degree() const { return degree_; }
    std::size_t size() const { return terms_.size(); }
    const std::map<Word, cplx>& terms() const { return terms_; }

    /// Adds c to the coefficient of w; coefficients that become zero are dropped.
    void add(const Word& w, cplx c);
    cplx coeff(const Word& w) const;
    double coefficient_norm() const;

    NCPolynomial operator+(const NCPolynomial& o) const;
    NCPolynomial operator-(const NCPolynomial& o) const;
    NCPolynomial operator*(const NCPolynomial& o) const;  // concatenation product
    NCPolynomial scaled(cplx s) const;

    static NCPolynomial monomial(int d, const Word& w, cplx c = 1.0);
    static NCPolynomial variable(int d, int letter) { return monomial(d, Word{letter}); }

private:
    int d_;
    int degree_;
    std::map<Word, cplx> terms_;
};

NCPolynomial commutator(const NCPolynomial& a, const NCPolynomial& b);

CMat evaluate(const NCPolynomial& p, const std::vector<CMat>& X);
/// Same sum with |c_w| and entrywise |X|: an entrywise bound on the terms.
RMat abs_evaluate(const NCPolynomial& p, const std::vector<RMat>& absX);

/// Polynomial of polynomials: outer(inner_1(X), ..., inner_k(X)).
struct CompositePolynomial {
    NCPolynomial outer;
    std::vector<NCPolynomial> inner;

    int d() const { return inner.empty() ? 0 : inner.front().d(); }
    int degree() const;
    /// Full expansion; throws ResourceError when the term count exceeds the budget.
    NCPolynomial expand(std::size_t max_terms = std::size_t(1) << 22) const;
};

CMat evaluate(const CompositePolynomial& p, const std::vector<CMat>& X);

NCPolynomial standard_identity(int N);

/// Component at word w is conj(c_w); word index has the first letter most significant.
CVec to_vector(const NCPolynomial& p);
/// Inverse of to_vector; entries with |v_w| <= drop_tol are omitted.
NCPolynomial from_vector(const CVec& v, int d, int m, double drop_tol = 0.0);
NCPolynomial from_vector(const RVec& v, int d, int m, double drop_tol = 0.0);

inline constexpr int kDefaultTrials = 8;
inline constexpr double kIdentityTolerance = 1e-9;

bool is_mpi(const NCPolynomial& p, int D, SeededRng& rng, int trials = kDefaultTrials);
bool is_mpi(const CompositePolynomial& p, int D, SeededRng& rng, int trials = kDefaultTrials);

struct CentralityResult {
    bool central = false;
    std::vector<cplx> scalars;  // tr P(X) / D per trial
};

CentralityResult is_central(const NCPolynomial& p, int D, SeededRng& rng, int trials = kDefaultTrials);
CentralityResult is_central(const CompositePolynomial& p, int D, SeededRng& rng, int trials = kDefaultTrials);

/// Polynomials in two variables mapping the pair of injective_pair(D) to the
/// elementary matrix |i><j| (1-based i, j).
NCPolynomial staircase_polynomial(int D, int i, int j);
/// F_{2(D-1)} applied to the staircase |1><1|, |1><2|, |2><2|, ..., |D-1><D|.
CompositePolynomial prop1_separating_poly(int D);

}  // namespace bondwit
