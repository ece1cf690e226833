#include "bondwit/mps.hpp"

#include <cmath>
#include <string>

#include "bondwit/errors.hpp"

namespace bondwit {

namespace {

template <class Mat>
Mat word_products_impl(const std::vector<Mat>& A, int n, const Mat* left) {
    if (A.empty()) throw ShapeError("word_products: empty matrix tuple");
    if (n < 0) throw ContractViolation("word_products: negative word length");
    const Eigen::Index D = A[0].rows();
    const auto d = static_cast<Eigen::Index>(A.size());
    for (const auto& a : A)
        if (a.rows() != D || a.cols() != D) throw ShapeError("word_products: matrices must be square of equal size");
    const std::size_t count = checked_pow(static_cast<std::size_t>(d), n, memory_budget() / static_cast<std::size_t>(D * D));
    (void)count;

    Mat start = left ? *left : Mat(Mat::Identity(D, D));
    if (start.rows() != D || start.cols() != D) throw ShapeError("word_products: boundary has wrong size");
    Mat cur(1, D * D);
    for (Eigen::Index a = 0; a < D; ++a)
        for (Eigen::Index b = 0; b < D; ++b) cur(0, a * D + b) = start(a, b);

    const Mat id = Mat::Identity(D, D);
    std::vector<Mat> right(d);
    for (Eigen::Index i = 0; i < d; ++i) right[i] = kron(id, A[i]);
    for (int step = 0; step < n; ++step) {
        Mat next(cur.rows() * d, D * D);
        for (Eigen::Index i = 0; i < d; ++i) {
            const Mat t = cur * right[i];
            for (Eigen::Index w = 0; w < cur.rows(); ++w) next.row(w * d + i) = t.row(w);
        }
        cur.swap(next);
    }
    return cur;
}

template <class Mat>
Mat apply_impl(const LocalHamiltonian& H, const Mat& x, bool real_only) {
    using Scalar = typename Mat::Scalar;
    const auto dim = static_cast<Eigen::Index>(H.dim());
    if (x.rows() != dim) throw ShapeError("LocalHamiltonian::apply: vector length mismatch");
    Mat y = Mat::Zero(x.rows(), x.cols());
    const auto n = H.n;
    const auto d = static_cast<Eigen::Index>(H.d);

    auto rotate = [&](const Mat& v, int s) {
        // site (s + p) mod n moves to position p
        if (s == 0) return v;
        const Eigen::Index tail = static_cast<Eigen::Index>(checked_pow(d, n - s));
        const Eigen::Index head = static_cast<Eigen::Index>(checked_pow(d, s));
        Mat out(v.rows(), v.cols());
        for (Eigen::Index idx = 0; idx < dim; ++idx) out.row((idx % tail) * head + idx / tail) = v.row(idx);
        return out;
    };

    for (const auto& t : H.terms) {
        Mat h;
        if constexpr (std::is_same_v<Scalar, double>) {
            if (real_only && t.h.imag().cwiseAbs().maxCoeff() > 1e-13)
                throw ContractViolation("LocalHamiltonian::apply: complex term applied to a real vector");
            h = t.h.real();
        } else {
            h = t.h;
        }
        const Mat hT = h.transpose();
        const bool wraps = t.start + t.width > n;
        const int s = wraps ? t.start : 0;
        const int pos = wraps ? 0 : t.start;
        const Mat xr = wraps ? rotate(x, s) : x;
        Mat yr = Mat::Zero(x.rows(), x.cols());

        const Eigen::Index dl = static_cast<Eigen::Index>(checked_pow(d, pos));
        const Eigen::Index dk = static_cast<Eigen::Index>(checked_pow(d, t.width));
        const Eigen::Index dr = static_cast<Eigen::Index>(checked_pow(d, n - pos - t.width));
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            for (Eigen::Index l = 0; l < dl; ++l) {
                const Eigen::Index off = l * dk * dr;
                Eigen::Map<const Mat> xin(xr.col(c).data() + off, dr, dk);
                Eigen::Map<Mat> yout(yr.col(c).data() + off, dr, dk);
                yout.noalias() += xin * hT;
            }
        if (wraps) {
            // inverse rotation: position p goes back to site (s + p) mod n
            const Eigen::Index head = static_cast<Eigen::Index>(checked_pow(d, s));
            const Eigen::Index tail = static_cast<Eigen::Index>(checked_pow(d, n - s));
            for (Eigen::Index idx = 0; idx < dim; ++idx) y.row(idx) += yr.row((idx % tail) * head + idx / tail);
        } else {
            y += yr;
        }
    }
    return y;
}

CMat orthonormal_rows(const CMat& m, double rel_tol) {
    Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinV);
    const RVec& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++r;
    return svd.matrixV().leftCols(r).adjoint();
}

}  // namespace

void MpsSpec::validate() const {
    if (d < 2) throw ShapeError("MpsSpec: physical dimension must be at least 2");
    if (D < 1) throw ShapeError("MpsSpec: bond dimension must be positive");
    if (static_cast<int>(A.size()) != d) throw ShapeError("MpsSpec: expected d matrices");
    for (const auto& a : A)
        if (a.rows() != D || a.cols() != D) throw ShapeError("MpsSpec: matrices must be DxD");
    if (omega.rows() != D || omega.cols() != D) throw ShapeError("MpsSpec: boundary must be DxD");
}

MpsSpec MpsSpec::random(int d, int D, SeededRng& rng, bool complex_entries) {
    MpsSpec s;
    s.d = d;
    s.D = D;
    s.seed = rng.seed();
    auto draw = [&]() {
        CMat m(D, D);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) m(i, j) = complex_entries ? rng.complex_normal() : cplx(rng.normal(), 0.0);
        return m;
    };
    for (int i = 0; i < d; ++i) s.A.push_back(draw());
    s.omega = draw();
    return s;
}

void ImpsSpec::validate(double tol) const {
    if (d < 2 || D < 1 || static_cast<int>(A.size()) != d) throw ShapeError("ImpsSpec: inconsistent dimensions");
    CMat g = CMat::Zero(D, D), e = CMat::Zero(D, D);
    for (const auto& a : A) {
        if (a.rows() != D || a.cols() != D) throw ShapeError("ImpsSpec: matrices must be DxD");
        g += a * a.adjoint();
        e += a.adjoint() * sigma * a;
    }
    if ((g - CMat::Identity(D, D)).norm() > tol) throw ContractViolation("ImpsSpec: channel is not normalized");
    if ((e - sigma).norm() > tol) throw ContractViolation("ImpsSpec: sigma is not a fixed point");
    if (std::abs(sigma.trace() - 1.0) > tol) throw ContractViolation("ImpsSpec: sigma does not have unit trace");
    if (hermitian_min_eig(CMat((sigma + sigma.adjoint()) * 0.5)) < -tol) throw ContractViolation("ImpsSpec: sigma is not PSD");
}

ImpsSpec ImpsSpec::from_matrices(std::vector<CMat> A) {
    ImpsSpec s;
    if (A.empty()) throw ShapeError("ImpsSpec: empty matrix tuple");
    s.d = static_cast<int>(A.size());
    s.D = static_cast<int>(A[0].rows());
    s.A = normalize_channel(A);
    s.sigma = fixed_point(s.A);
    return s;
}

ImpsSpec ImpsSpec::random(int d, int D, SeededRng& rng, bool complex_entries) {
    std::vector<CMat> A;
    for (int i = 0; i < d; ++i) {
        CMat m(D, D);
        for (int r = 0; r < D; ++r)
            for (int c = 0; c < D; ++c) m(r, c) = complex_entries ? rng.complex_normal() : cplx(rng.normal(), 0.0);
        A.push_back(m);
    }
    ImpsSpec s = from_matrices(std::move(A));
    s.seed = rng.seed();
    return s;
}

void LocalHamiltonian::validate() const {
    if (n < 1 || d < 2) throw ShapeError("LocalHamiltonian: invalid chain");
    for (const auto& t : terms) {
        if (t.width < 1 || t.width > n) throw ShapeError("LocalHamiltonian: window wider than the chain");
        if (t.start < 0 || t.start >= n) throw ShapeError("LocalHamiltonian: window start outside the chain");
        if (!periodic && t.start + t.width > n) throw ShapeError("LocalHamiltonian: window does not fit in the open chain");
        const auto side = static_cast<Eigen::Index>(checked_pow(d, t.width));
        if (t.h.rows() != side || t.h.cols() != side) throw ShapeError("LocalHamiltonian: term size does not match window");
        if (!is_hermitian(t.h, 1e-10)) throw ContractViolation("LocalHamiltonian: term is not Hermitian");
    }
}

bool LocalHamiltonian::is_real(double tol) const {
    for (const auto& t : terms)
        if (t.h.size() > 0 && t.h.imag().cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

std::size_t LocalHamiltonian::dim() const { return checked_pow(d, n, memory_budget()); }

RMat LocalHamiltonian::apply(const RMat& x) const { return apply_impl(*this, x, true); }
CMat LocalHamiltonian::apply(const CMat& x) const { return apply_impl(*this, x, false); }

CMat LocalHamiltonian::dense() const {
    const auto n_ = static_cast<Eigen::Index>(dim());
    if (static_cast<std::size_t>(n_) * n_ > memory_budget()) throw ResourceError("LocalHamiltonian: dense matrix exceeds budget");
    return apply(CMat(CMat::Identity(n_, n_)));
}

RMat LocalHamiltonian::dense_real() const {
    const auto n_ = static_cast<Eigen::Index>(dim());
    if (static_cast<std::size_t>(n_) * n_ > memory_budget()) throw ResourceError("LocalHamiltonian: dense matrix exceeds budget");
    return apply(RMat(RMat::Identity(n_, n_)));
}

double LocalHamiltonian::ground_energy() const {
    const auto n_ = static_cast<Eigen::Index>(dim());
    if (n_ <= 2048) return is_real() ? hermitian_min_eig(dense_real()) : hermitian_min_eig(dense());
    if (!is_real()) throw ContractViolation("ground_energy: large complex Hamiltonians are not supported");
    return lanczos_min_eig([this](const RVec& v) { return RVec(apply(RMat(v))); }, n_);
}

LocalHamiltonian LocalHamiltonian::scaled(double s) const {
    LocalHamiltonian out = *this;
    for (auto& t : out.terms) t.h *= s;
    return out;
}

CMat word_products(const std::vector<CMat>& A, int n, const CMat* left) { return word_products_impl(A, n, left); }
RMat word_products(const std::vector<RMat>& A, int n, const RMat* left) { return word_products_impl(A, n, left); }

CVec build_state(const MpsSpec& spec, int n) {
    spec.validate();
    if (n < 1) throw ContractViolation("build_state: need at least one site");
    const std::size_t total = checked_pow(spec.d, n, memory_budget());
    const int n1 = n / 2, n2 = n - n1;
    const Eigen::Index D = spec.D;
    const CMat pre = word_products(spec.A, n1, &spec.omega);
    const CMat suf = word_products(spec.A, n2);
    CMat suf_t(suf.rows(), D * D);
    for (Eigen::Index a = 0; a < D; ++a)
        for (Eigen::Index b = 0; b < D; ++b) suf_t.col(a * D + b) = suf.col(b * D + a);
    // column-major (d^n2 x d^n1) layout equals the row-major amplitude table
    CMat r = suf_t * pre.transpose();
    CVec out = Eigen::Map<CVec>(r.data(), static_cast<Eigen::Index>(total));
    return out;
}

cplx overlap(const MpsSpec& spec1, const MpsSpec& spec2, int n) {
    spec1.validate();
    spec2.validate();
    if (spec1.d != spec2.d) throw ShapeError("overlap: physical dimensions differ");
    const Eigen::Index side = spec1.D * spec2.D;
    CMat t = CMat::Zero(side, side);
    for (int i = 0; i < spec1.d; ++i) t += kron(CMat(spec2.A[i].conjugate()), spec1.A[i]);
    CMat m = kron(CMat(spec2.omega.conjugate()), spec1.omega);
    // square-and-multiply on the transfer matrix
    CMat p = CMat::Identity(side, side);
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) p = p * t;
        if (e > 1) t = t * t;
    }
    return (m * p).trace();
}

std::vector<CMat> normalize_channel(const std::vector<CMat>& A) {
    if (A.empty()) throw ShapeError("normalize_channel: empty tuple");
    const Eigen::Index D = A[0].rows();
    CMat g = CMat::Zero(D, D);
    for (const auto& a : A) {
        if (a.rows() != D || a.cols() != D) throw ShapeError("normalize_channel: matrices must be square of equal size");
        g += a * a.adjoint();
    }
    const CMat s = hermitian_inv_sqrt(g, 1e-13);
    std::vector<CMat> out;
    out.reserve(A.size());
    for (const auto& a : A) out.push_back(s * a);
    return out;
}

CMat fixed_point(const std::vector<CMat>& A) {
    if (A.empty()) throw ShapeError("fixed_point: empty tuple");
    const Eigen::Index D = A[0].rows();
    CMat g = CMat::Zero(D, D);
    for (const auto& a : A) g += a * a.adjoint();
    if ((g - CMat::Identity(D, D)).norm() > 1e-8) throw ContractViolation("fixed_point: channel is not normalized");

    // column-major vec: vec(A^dag X A) = (A^T (x) A^dag) vec(X)
    CMat t = CMat::Zero(D * D, D * D);
    for (const auto& a : A) t += kron(CMat(a.transpose()), CMat(a.adjoint()));

    auto unit_eigvecs = [](const CMat& m) {
        Eigen::ComplexEigenSolver<CMat> es(m);
        if (es.info() != Eigen::Success) throw SolverError("fixed_point: eigensolver failed");
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-8) keep.push_back(i);
        CMat v(m.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
        return v;
    };
    const CMat v = unit_eigvecs(t);
    const CMat u = unit_eigvecs(CMat(t.adjoint()));
    if (v.cols() == 0 || v.cols() != u.cols()) throw SolverError("fixed_point: could not isolate the unit eigenspace");

    CVec id = CVec::Zero(D * D);
    for (Eigen::Index i = 0; i < D; ++i) id(i * D + i) = 1.0 / static_cast<double>(D);
    // spectral projection of I/D onto the fixed-point space
    const CMat uv = u.adjoint() * v;
    const CVec coeffs = uv.fullPivLu().solve(u.adjoint() * id);
    const CVec vs = v * coeffs;
    CMat sigma = Eigen::Map<const CMat>(vs.data(), D, D);
    sigma = (sigma + sigma.adjoint()).eval() * 0.5;
    const cplx tr = sigma.trace();
    if (std::abs(tr) < 1e-14) throw DegeneracyError("fixed_point: projected matrix has zero trace");
    sigma /= tr.real();
    return sigma;
}

CMat imps_rdm(const ImpsSpec& spec, int m) {
    if (m < 1) throw ContractViolation("imps_rdm: need at least one site");
    const std::size_t side = checked_pow(spec.d, m, memory_budget());
    if (side * side > memory_budget()) throw ResourceError("imps_rdm: density matrix exceeds budget");
    const Eigen::Index D = spec.D;
    const CMat w = word_products(spec.A, m);
    const CMat q = w * kron(CMat(spec.sigma.transpose()), CMat(CMat::Identity(D, D)));
    CMat rho = q * w.adjoint();
    return (rho + rho.adjoint()) * 0.5;
}

std::optional<int> injectivity_order(const std::vector<CMat>& A, int k_max) {
    if (k_max < 1) throw ContractViolation("injectivity_order: k_max must be positive");
    if (A.empty()) throw ShapeError("injectivity_order: empty tuple");
    const Eigen::Index D = A[0].rows();
    const Eigen::Index full = D * D;
    const CMat id = CMat::Identity(D, D);
    std::vector<CMat> right;
    for (const auto& a : A) right.push_back(kron(id, a));

    CMat basis(1, full);
    for (Eigen::Index a = 0; a < D; ++a)
        for (Eigen::Index b = 0; b < D; ++b) basis(0, a * D + b) = id(a, b);
    for (int k = 1; k <= k_max; ++k) {
        CMat stacked(basis.rows() * static_cast<Eigen::Index>(A.size()), full);
        for (std::size_t i = 0; i < A.size(); ++i)
            stacked.middleRows(static_cast<Eigen::Index>(i) * basis.rows(), basis.rows()) = basis * right[i];
        basis = orthonormal_rows(stacked, kRankTolerance);
        if (basis.rows() == full) return k;
    }
    return std::nullopt;
}

std::pair<CMat, CMat> injective_pair(int D) {
    if (D < 1) throw ContractViolation("injective_pair: D must be positive");
    CMat b1 = CMat::Zero(D, D);
    for (int j = 0; j < D; ++j) b1(j, j) = j + 1.0;
    CMat b2 = CMat::Constant(D, D, 1.0 / D);
    return {b1, b2};
}

LocalHamiltonian parent_hamiltonian(const MpsSpec& spec, int n, int k) {
    spec.validate();
    if (k < 1) throw ContractViolation("parent_hamiltonian: k must be positive");
    if (n < 2 * k) throw PreconditionError("parent_hamiltonian: chain shorter than the 2k window");
    const auto order = injectivity_order(spec.A, k);
    if (!order) throw PreconditionError("parent_hamiltonian: matrices are not injective at order " + std::to_string(k));

    const int width = 2 * k;
    const CMat w = word_products(spec.A, width);
    // orthonormal columns spanning the window states
    const CMat u = orthonormal_rows(CMat(w.adjoint()), kRankTolerance).adjoint();
    const Eigen::Index side = w.rows();
    CMat h = CMat::Identity(side, side) - u * u.adjoint();
    h = (h + h.adjoint()).eval() * 0.5;

    LocalHamiltonian H;
    H.n = n;
    H.d = spec.d;
    H.periodic = true;
    for (int s = 0; s < n; ++s) H.terms.push_back({s, width, h});

    if (checked_pow(spec.d, n, memory_budget()) <= 4096) {
        const int g = ground_space_dimension(H);
        MpsSpec ti = spec;
        ti.omega = CMat::Identity(spec.D, spec.D);
        const CVec psi = build_state(ti, n);
        const double resid = H.apply(CMat(psi)).norm() / std::max(psi.norm(), 1e-300);
        if (g != 1 || resid > 1e-8)
            throw DegeneracyError("parent_hamiltonian: ground space has dimension " + std::to_string(g) +
                                  ", MPS residual " + std::to_string(resid));
    }
    return H;
}

int ground_space_dimension(const LocalHamiltonian& H, double tol) {
    const RVec ev = H.is_real() ? hermitian_eigenvalues(H.dense_real()) : hermitian_eigenvalues(H.dense());
    int count = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) - ev(0) < tol) ++count;
    return count;
}

}  // namespace bondwit
