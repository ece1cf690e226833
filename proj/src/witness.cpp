#include "bondwit/witness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "bondwit/errors.hpp"

namespace bondwit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int log_d(Eigen::Index size, int d) {
    int n = 0;
    Eigen::Index p = 1;
    while (p < size) {
        p *= d;
        ++n;
    }
    if (p != size) throw ShapeError("operator size is not a power of the local dimension");
    return n;
}

RMat sigma_dot_sigma() {
    // σx⊗σx + σy⊗σy + σz⊗σz in the basis |00>,|01>,|10>,|11>
    RMat s = RMat::Zero(4, 4);
    s(0, 0) = 1;
    s(3, 3) = 1;
    s(1, 1) = -1;
    s(2, 2) = -1;
    s(1, 2) = 2;
    s(2, 1) = 2;
    return s;
}

HamiltonianTerm real_term(int start, int width, const RMat& h) {
    HamiltonianTerm t;
    t.start = start;
    t.width = width;
    t.h = h.cast<cplx>();
    return t;
}

// kron(I_{d^s}, h, I_{d^{n-s-w}})
RMat embed(const RMat& h, int d, int s, int n) {
    const int w = log_d(h.rows(), d);
    const auto left = static_cast<Eigen::Index>(checked_pow(d, s));
    const auto right = static_cast<Eigen::Index>(checked_pow(d, n - s - w));
    return kron(kron(RMat::Identity(left, left), h), RMat::Identity(right, right));
}

struct CutData {
    std::vector<CutGlueOperator> ops;
    std::vector<RMat> L;  // (C_j ⊗ I) B
    std::vector<int> q, r;
};

CutData build_cuts(int d, int D, int n, const std::vector<int>& cuts, const RMat& frame, const WitnessOptions& opt) {
    CutData c;
    for (int j : cuts) {
        if (j < 1 || j >= n) throw ContractViolation("cut position must lie in 1 .. n-1");
        SeededRng rng = SeededRng(opt.seed).derive(1000 + static_cast<std::uint64_t>(j));
        CutGlueOperator op = cut_and_glue(d, D, j, rng, opt.span);
        const int r = static_cast<int>(checked_pow(d, n - j));
        c.q.push_back(op.q());
        c.r.push_back(r);
        c.L.push_back(op.q() > 0 ? apply_cut_rows(op, frame, n) : RMat(0, frame.cols()));
        c.ops.push_back(std::move(op));
    }
    return c;
}

// PT(L X Lᵀ)
RMat cut_block(const RMat& L, const RMat& X, int q, int r) { return partial_transpose_first(RMat(L * X * L.transpose()), q, r); }

struct PrimalForm {
    SdpProblem problem;
    std::vector<int> active;  // indices into the cut list that carry a block
};

// min ⟨H̃, X⟩ s.t. tr X = 1, Y_j = PT(L_j X L_jᵀ), X, Y_j ⪰ 0. Row 0 is the trace.
PrimalForm primal_form(const RMat& Ht, const CutData& cd, bool ppt) {
    const int t = static_cast<int>(Ht.rows());
    std::vector<int> blocks{t};
    PrimalForm pf;
    if (ppt)
        for (std::size_t i = 0; i < cd.L.size(); ++i)
            if (cd.q[i] > 0) {
                pf.active.push_back(static_cast<int>(i));
                blocks.push_back(cd.q[i] * cd.r[i]);
            }
    pf.problem = SdpProblem(blocks);
    BlockMatrix c(blocks.size());
    c[0] = Ht;
    pf.problem.set_objective(c);
    int rows = 1;
    for (std::size_t b = 1; b < blocks.size(); ++b) rows += svec_size(blocks[b]);
    pf.problem.reserve(rows);
    pf.problem.add_block_constraint(0, RMat::Identity(t, t), 1.0);
    for (std::size_t b = 1; b < blocks.size(); ++b) {
        const int i = pf.active[b - 1];
        const int n = blocks[b];
        const RMat& L = cd.L[i];
        const Eigen::Index off = pf.problem.offset(static_cast<int>(b));
        for (int e = 0; e < svec_size(n); ++e) {
            RVec unit = RVec::Zero(svec_size(n));
            unit(e) = 1.0;
            const RMat pe = partial_transpose_first(smat(unit, n), cd.q[i], cd.r[i]);
            RVec a = RVec::Zero(pf.problem.svec_dim());
            a.head(svec_size(t)) = -svec(RMat(L.transpose() * pe * L));
            a(off + e) = 1.0;
            pf.problem.add_constraint_svec(a, 0.0);
        }
    }
    return pf;
}

void fill_bound(WitnessBound& wb, const SdpSolution& s) {
    wb.status = s.status;
    wb.primal = s.primal_objective;
    wb.dual = s.dual_objective;
    wb.gap = s.gap;
    wb.iterations = s.iterations;
    wb.message = s.message;
}

void finish_certificate(DualCertificate& c) {
    c.f_min_eig = c.f.size() ? hermitian_min_eig(c.f) : 0.0;
    c.g_pt_min_eig.clear();
    for (std::size_t i = 0; i < c.g.size(); ++i) {
        const int q = static_cast<int>(c.cut_matrices[i].rows());
        if (q == 0 || c.g[i].size() == 0) {
            c.g_pt_min_eig.push_back(0.0);
            continue;
        }
        const int r = static_cast<int>(c.g[i].rows()) / q;
        c.g_pt_min_eig.push_back(hermitian_min_eig(partial_transpose_first(c.g[i], q, r)));
    }
}

RMat certificate_remainder(const RMat& Ht, const DualCertificate& c) {
    const Eigen::Index t = Ht.rows();
    RMat r = Ht - c.mu * RMat::Identity(t, t) - c.f;
    for (std::size_t i = 0; i < c.g.size(); ++i) {
        if (c.cut_matrices[i].rows() == 0 || c.g[i].size() == 0) continue;
        CutGlueOperator op;
        op.d = c.d;
        op.j = log_d(c.cut_matrices[i].cols(), c.d);
        op.matrix = c.cut_matrices[i];
        const RMat L = apply_cut_rows(op, c.frame, c.n);
        r -= L.transpose() * c.g[i] * L;
    }
    return r;
}

// Certificate from the primal form: f = Z_X, g_j = PT(Z_{Y_j}), μ = y_0.
DualCertificate primal_form_certificate(const RMat& Ht, const PrimalForm& pf, const CutData& cd, const SdpSolution& s,
                                        const RMat& frame, int d, int n, const std::vector<int>& cuts) {
    DualCertificate c;
    c.d = d;
    c.n = n;
    c.frame = frame;
    c.cuts = cuts;
    c.mu = s.y.size() ? s.y(0) : 0.0;
    c.f = s.Z.empty() ? RMat() : s.Z[0];
    for (std::size_t i = 0; i < cd.ops.size(); ++i) {
        c.cut_matrices.push_back(cd.ops[i].matrix);
        c.g.push_back(RMat());
    }
    for (std::size_t b = 0; b < pf.active.size(); ++b) {
        const int i = pf.active[b];
        c.g[i] = partial_transpose_first(s.Z[b + 1], cd.q[i], cd.r[i]);
    }
    finish_certificate(c);
    c.remainder = certificate_remainder(Ht, c);
    c.residual = c.remainder.norm();
    return c;
}

WitnessBound base_bound(int d, int D, int n, const std::vector<int>& cuts, bool ppt, bool span, const CutData& cd, int t) {
    WitnessBound wb;
    wb.d = d;
    wb.D = D;
    wb.n = n;
    wb.cuts = cuts;
    wb.ppt = ppt;
    wb.span = span;
    wb.basis_size = t;
    wb.cut_ranks = cd.q;
    return wb;
}

BoundResult solve_primal(const RMat& Ht, const RMat& frame, int d, int D, int n, const std::vector<int>& cuts, bool ppt,
                         bool span, const WitnessOptions& opt, Clock::time_point t0) {
    const int t = static_cast<int>(Ht.rows());
    const CutData cd = ppt ? build_cuts(d, D, n, cuts, frame, opt) : CutData{};
    BoundResult out;
    out.bound = base_bound(d, D, n, cuts, ppt, span, cd, t);
    if (!ppt) {
        // the relaxation collapses to the lowest eigenvalue on the span
        Eigen::SelfAdjointEigenSolver<RMat> es(Ht);
        const double e = es.eigenvalues()(0);
        out.bound.value = out.bound.primal = out.bound.dual = e;
        out.bound.status = SdpStatus::Optimal;
        out.certificate.d = d;
        out.certificate.n = n;
        out.certificate.mu = e;
        out.certificate.frame = frame;
        out.certificate.f = Ht - e * RMat::Identity(t, t);
        finish_certificate(out.certificate);
        out.certificate.remainder = certificate_remainder(Ht, out.certificate);
        out.certificate.residual = out.certificate.remainder.norm();
        out.bound.seconds = seconds_since(t0);
        return out;
    }
    const PrimalForm pf = primal_form(Ht, cd, true);
    const SdpSolution s = solve(pf.problem, opt.sdp);
    fill_bound(out.bound, s);
    if (s.status != SdpStatus::Optimal) {
        out.bound.seconds = seconds_since(t0);
        throw SolverError("witness SDP did not reach optimality: " + to_string(s.status) + " " + s.message);
    }
    out.certificate = primal_form_certificate(Ht, pf, cd, s, frame, d, n, cuts);
    out.bound.value = out.certificate.mu;
    out.bound.seconds = seconds_since(t0);
    return out;
}

RMat placement_average(const RMat& term, int d, int N) {
    const int w = log_d(term.rows(), d);
    if (w > N) throw ContractViolation("term is wider than the window");
    const auto side = static_cast<Eigen::Index>(checked_pow(d, N, memory_budget()));
    RMat avg = RMat::Zero(side, side);
    for (int s = 0; s + w <= N; ++s) avg += embed(term, d, s, N);
    return avg / static_cast<double>(N - w + 1);
}

}  // namespace

CutGlueOperator cut_and_glue(int d, int D, int j, const QuotientResult& quotient) {
    CutGlueOperator c = cut_and_glue(d, D, j, quotient.basis);
    c.polynomials = quotient.representatives;
    return c;
}

CutGlueOperator cut_and_glue(int d, int D, int j, const SubspaceBasis& quotient) {
    if (quotient.ambient() != checked_pow(d, j)) throw ShapeError("cut_and_glue: quotient basis has the wrong length");
    if (quotient.size() == 0) throw NoOperatorError("cut_and_glue: quotient space is empty");
    CutGlueOperator c;
    c.d = d;
    c.D = D;
    c.j = j;
    c.matrix = quotient.vectors.transpose();
    for (int i = 0; i < quotient.size(); ++i) c.polynomials.push_back(from_vector(RVec(quotient.vectors.col(i)), d, j));
    return c;
}

CutGlueOperator cut_and_glue(int d, int D, int j, SeededRng& rng, const SpanOptions& opt) {
    return cut_and_glue(d, D, j, quotient_basis(d, D, j, rng, opt));
}

CVec apply_cut(const CutGlueOperator& C, const CVec& psi, int n, int start) {
    const auto dj = static_cast<Eigen::Index>(checked_pow(C.d, C.j));
    if (C.matrix.cols() != dj) throw ShapeError("apply_cut: operator width mismatch");
    if (start < 0 || start + C.j > n) throw ContractViolation("apply_cut: window outside the chain");
    if (psi.size() != static_cast<Eigen::Index>(checked_pow(C.d, n))) throw ShapeError("apply_cut: state length mismatch");
    const auto left = static_cast<Eigen::Index>(checked_pow(C.d, start));
    const auto right = static_cast<Eigen::Index>(checked_pow(C.d, n - start - C.j));
    const Eigen::Index q = C.matrix.rows();
    CVec out = CVec::Zero(q * left * right);
    const CMat Cc = C.matrix.cast<cplx>();
    for (Eigen::Index l = 0; l < left; ++l) {
        Eigen::Map<const CMat> in(psi.data() + l * dj * right, right, dj);
        const CMat o = in * Cc.transpose();  // right × q
        for (Eigen::Index i = 0; i < q; ++i) out.segment((i * left + l) * right, right) = o.col(i);
    }
    return out;
}

RMat apply_cut_rows(const CutGlueOperator& C, const RMat& m, int n) {
    const auto dj = static_cast<Eigen::Index>(checked_pow(C.d, C.j));
    const auto r = static_cast<Eigen::Index>(checked_pow(C.d, n - C.j));
    if (C.matrix.cols() != dj) throw ShapeError("apply_cut_rows: operator width mismatch");
    if (m.rows() != dj * r) throw ShapeError("apply_cut_rows: row count mismatch");
    const Eigen::Index q = C.matrix.rows();
    RMat out(q * r, m.cols());
    const RMat Ct = C.matrix.transpose();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Map<const RMat> in(m.col(c).data(), r, dj);
        Eigen::Map<RMat> o(out.col(c).data(), r, q);
        o.noalias() = in * Ct;
    }
    return out;
}

RMat heisenberg_term() { return sigma_dot_sigma() / 4.0; }

LocalHamiltonian heisenberg(int N) {
    if (N < 2) throw ContractViolation("heisenberg: need at least two sites");
    LocalHamiltonian H;
    H.n = N;
    H.d = 2;
    const RMat h = heisenberg_term();
    for (int s = 0; s + 1 < N; ++s) H.terms.push_back(real_term(s, 2, h));
    return H;
}

RMat majumdar_ghosh_term() {
    const RMat h = heisenberg_term();
    const RMat nn = kron(h, RMat::Identity(2, 2));
    // σ⃗_1·σ⃗_3/4: conjugate σ⃗_1·σ⃗_2 by the swap of sites 2 and 3
    RMat swap23 = RMat::Zero(8, 8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) swap23(a * 4 + c * 2 + b, a * 4 + b * 2 + c) = 1.0;
    const RMat nnn = swap23 * nn * swap23;
    return nn + 0.5 * nnn;
}

LocalHamiltonian majumdar_ghosh(int N) {
    if (N < 3) throw ContractViolation("majumdar_ghosh: need at least three sites");
    LocalHamiltonian H;
    H.n = N;
    H.d = 2;
    for (int s = 0; s + 2 < N; ++s) H.terms.push_back(real_term(s, 3, majumdar_ghosh_term()));
    H.terms.push_back(real_term(N - 2, 2, heisenberg_term()));
    return H;
}

std::vector<int> default_cuts(int d, int D, int n, SeededRng& rng) {
    std::vector<int> cuts;
    for (int j = std::max(1, 2 * D); j < n; ++j) {
        SeededRng r = rng.derive(static_cast<std::uint64_t>(j));
        if (quotient_dim_exact(d, D, j, r) > 0) cuts.push_back(j);
    }
    return cuts;
}

BoundResult mps_lower_bound(const LocalHamiltonian& H, int D, const std::vector<int>& cuts, bool ppt, const WitnessOptions& opt) {
    const auto t0 = Clock::now();
    H.validate();
    if (!H.is_real()) throw ContractViolation("mps_lower_bound: Hamiltonian must be real");
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(H.d, D, H.n, rng, opt.span);
    const RMat Ht = project_operator(H, B);
    return solve_primal(Ht, B.vectors, H.d, D, H.n, cuts, ppt, false, opt, t0);
}

BoundResult imps_lower_bound(const RMat& term, int d, int D, int N, const std::vector<int>& cuts, bool ppt, bool use_span,
                             const WitnessOptions& opt) {
    const auto t0 = Clock::now();
    if (!is_hermitian(term)) throw ContractViolation("imps_lower_bound: term is not symmetric");
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(d, D, N, rng, opt.span);
    const RMat Ht = project_operator(placement_average(term, d, N), B);
    if (!use_span) return solve_primal(Ht, B.vectors, d, D, N, cuts, ppt, false, opt, t0);

    const int t = B.size();
    SeededRng srng = SeededRng(opt.seed).derive(77);
    const SubspaceBasis S = imps_rdm_span(d, D, N, srng, opt.span, &B.vectors, false);
    const RMat& V = S.vectors;  // sdim × p
    const Eigen::Index p = V.cols();
    const RVec u = V.transpose() * svec(RMat::Identity(t, t));
    if (u.norm() < 1e-12) throw DegeneracyError("imps_lower_bound: span has no trace-one element");
    const RVec e0 = V * u / u.squaredNorm();
    // traceless directions: Householder reflection mapping u to a multiple of e_1
    RVec w = u;
    w(0) += (u(0) >= 0 ? 1.0 : -1.0) * u.norm();
    w.normalize();
    RMat VN = V - 2.0 * (V * w) * w.transpose();
    VN = RMat(VN.rightCols(p - 1));

    const CutData cd = ppt ? build_cuts(d, D, N, cuts, B.vectors, opt) : CutData{};
    BoundResult out;
    out.bound = base_bound(d, D, N, cuts, ppt, true, cd, t);
    out.bound.span_size = static_cast<int>(p);

    std::vector<int> blocks{t}, active;
    for (std::size_t i = 0; i < cd.L.size(); ++i)
        if (cd.q[i] > 0) {
            active.push_back(static_cast<int>(i));
            blocks.push_back(cd.q[i] * cd.r[i]);
        }
    SdpProblem prob(blocks);
    auto lift = [&](const RVec& sv, double sign) {
        RVec a(prob.svec_dim());
        const RMat X = smat(sv, t);
        a.head(svec_size(t)) = sign * sv;
        for (std::size_t b = 0; b < active.size(); ++b) {
            const int i = active[b];
            a.segment(prob.offset(static_cast<int>(b + 1)), svec_size(blocks[b + 1])) =
                sign * svec(cut_block(cd.L[i], X, cd.q[i], cd.r[i]));
        }
        return a;
    };
    const RVec c = lift(e0, 1.0);
    prob.set_objective(prob.to_blocks(c));
    const RVec hsv = svec(Ht);
    prob.reserve(static_cast<int>(p - 1));
    for (Eigen::Index k = 0; k < p - 1; ++k) prob.add_constraint_svec(lift(RVec(VN.col(k)), -1.0), -hsv.dot(VN.col(k)));
    const SdpSolution s = solve(prob, opt.sdp);
    fill_bound(out.bound, s);
    if (s.status != SdpStatus::Optimal) {
        out.bound.seconds = seconds_since(t0);
        throw SolverError("witness SDP did not reach optimality: " + to_string(s.status) + " " + s.message);
    }
    const double h0 = hsv.dot(e0);
    // ⟨H̃, X⟩ over the span is h0 − bᵀy; the certified side is h0 − ⟨C, W⟩
    out.bound.primal = h0 - s.dual_objective;
    out.bound.dual = h0 - s.primal_objective;
    out.bound.value = out.bound.dual;

    DualCertificate& cert = out.certificate;
    cert.d = d;
    cert.n = N;
    cert.frame = B.vectors;
    cert.cuts = cuts;
    cert.mu = out.bound.value;
    cert.f = s.X[0];
    for (std::size_t i = 0; i < cd.ops.size(); ++i) {
        cert.cut_matrices.push_back(cd.ops[i].matrix);
        cert.g.push_back(RMat());
    }
    for (std::size_t b = 0; b < active.size(); ++b) {
        const int i = active[b];
        cert.g[i] = partial_transpose_first(s.X[b + 1], cd.q[i], cd.r[i]);
    }
    finish_certificate(cert);
    cert.remainder = certificate_remainder(Ht, cert);
    cert.span_directions = V;
    cert.residual = (V.transpose() * svec(cert.remainder)).norm();
    out.bound.seconds = seconds_since(t0);
    return out;
}

double simplified_bound(const LocalHamiltonian& H, int D, const WitnessOptions& opt) {
    H.validate();
    if (D < 0) return H.ground_energy();
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(H.d, D, H.n, rng, opt.span);
    if (static_cast<std::size_t>(B.size()) == B.ambient()) return H.ground_energy();
    if (B.size() <= 2000) {
        if (H.is_real()) return hermitian_min_eig(project_operator(H, B));
        const CMat Bc = B.vectors.cast<cplx>();
        return hermitian_min_eig(CMat(Bc.adjoint() * H.apply(Bc)));
    }
    if (!H.is_real()) throw ContractViolation("simplified_bound: large spans need a real Hamiltonian");
    auto apply = [&](const RVec& v) -> RVec {
        const RMat x = B.vectors * v;
        return B.vectors.transpose() * H.apply(x);
    };
    return lanczos_min_eig(apply, B.size(), opt.seed);
}

double certificate_residual(const LocalHamiltonian& H, const DualCertificate& c) {
    if (c.frame.size() == 0) throw ContractViolation("certificate_residual: certificate has no frame");
    const RMat Ht = c.frame.transpose() * H.apply(c.frame);
    return certificate_residual(Ht, c);
}

double certificate_residual(const RMat& h_projected, const DualCertificate& c) {
    const RMat r = certificate_remainder(h_projected, c);
    if (c.span_directions.size() == 0) return r.norm();
    return (c.span_directions.transpose() * svec(r)).norm();
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return "feasible";
        case Verdict::Infeasible: return "infeasible";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

FeasibilityResult feasibility_test(const std::vector<ExpectationConstraint>& constraints, int d, int D, int n,
                                   const std::vector<int>& cuts, bool ppt, const WitnessOptions& opt) {
    SeededRng rng(opt.seed);
    const SubspaceBasis B = mps_span_basis(d, D, n, rng, opt.span);
    const int t = B.size();
    const auto side = static_cast<Eigen::Index>(checked_pow(d, n));
    const CutData cd = ppt ? build_cuts(d, D, n, cuts, B.vectors, opt) : CutData{};

    PrimalForm pf = primal_form(RMat::Zero(t, t), cd, ppt);
    // rebuild with slack blocks appended
    std::vector<int> blocks = pf.problem.blocks();
    int nslack = 0;
    for (const auto& c : constraints) {
        if (c.observable.rows() != side || c.observable.cols() != side) throw ShapeError("feasibility_test: observable size");
        if (c.tolerance < 0) throw ContractViolation("feasibility_test: negative tolerance");
        if (c.tolerance > 0) nslack += 2;
    }
    for (int i = 0; i < nslack; ++i) blocks.push_back(1);
    SdpProblem prob(blocks);
    const Eigen::Index base = pf.problem.svec_dim();
    prob.reserve(pf.problem.num_constraints() + 2 * static_cast<int>(constraints.size()));
    RVec a = RVec::Zero(prob.svec_dim());
    a.head(base) = pf.problem.constraint(0);
    prob.add_constraint_svec(a, 1.0);
    int slack = 0;
    for (const auto& c : constraints) {
        const RVec o = svec(RMat(B.vectors.transpose() * c.observable * B.vectors));
        if (c.tolerance == 0) {
            a.setZero();
            a.head(svec_size(t)) = o;
            prob.add_constraint_svec(a, c.target);
            continue;
        }
        a.setZero();
        a.head(svec_size(t)) = o;
        a(base + slack) = -1.0;
        prob.add_constraint_svec(a, c.target - c.tolerance);
        a.setZero();
        a.head(svec_size(t)) = o;
        a(base + slack + 1) = 1.0;
        prob.add_constraint_svec(a, c.target + c.tolerance);
        slack += 2;
    }
    for (int k = 1; k < pf.problem.num_constraints(); ++k) {
        a.setZero();
        a.head(base) = pf.problem.constraint(k);
        prob.add_constraint_svec(a, pf.problem.rhs(k));
    }

    FeasibilityResult r;
    r.solution = solve(prob, opt.sdp);
    if (r.solution.status == SdpStatus::Optimal) {
        r.verdict = Verdict::Feasible;
    } else if (r.solution.status == SdpStatus::InfeasibleCertificate && r.solution.primal_infeasible) {
        r.verdict = Verdict::Infeasible;
        r.certificate = r.solution.ray_y;
        r.separation = r.solution.violation;
    }
    return r;
}

NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f, RVec x0, double diameter, int iterations) {
    const Eigen::Index n = x0.size();
    if (n == 0) throw ContractViolation("nelder_mead: empty parameter vector");
    std::vector<RVec> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    NelderMeadResult out;
    for (Eigen::Index i = 0; i < n; ++i) xs[i + 1](i) += diameter;
    for (Eigen::Index i = 0; i <= n; ++i) fs[i] = f(xs[i]);
    out.evaluations = static_cast<int>(n + 1);
    std::vector<Eigen::Index> order(n + 1);
    for (int it = 0; it < iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return fs[a] < fs[b]; });
        const Eigen::Index best = order.front(), worst = order.back(), second = order[n - 1];
        if (std::abs(fs[worst] - fs[best]) <= 1e-15 * (1 + std::abs(fs[best]))) break;
        RVec centroid = RVec::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) centroid += xs[order[i]];
        centroid /= static_cast<double>(n);
        const RVec xr = centroid + (centroid - xs[worst]);
        const double fr = f(xr);
        ++out.evaluations;
        if (fr < fs[best]) {
            const RVec xe = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(xe);
            ++out.evaluations;
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        const bool outside = fr < fs[worst];
        const RVec xc = outside ? RVec(centroid + 0.5 * (xr - centroid)) : RVec(centroid + 0.5 * (xs[worst] - centroid));
        const double fc = f(xc);
        ++out.evaluations;
        if (fc < (outside ? fr : fs[worst])) {
            xs[worst] = xc;
            fs[worst] = fc;
            continue;
        }
        for (Eigen::Index i = 1; i <= n; ++i) {
            const Eigen::Index k = order[i];
            xs[k] = xs[best] + 0.5 * (xs[k] - xs[best]);
            fs[k] = f(xs[k]);
            ++out.evaluations;
        }
    }
    const auto it = std::min_element(fs.begin(), fs.end());
    out.x = xs[it - fs.begin()];
    out.value = *it;
    return out;
}

namespace {

std::vector<CMat> unpack(const RVec& x, int d, int D, bool complex) {
    std::vector<CMat> A(d, CMat(D, D));
    const Eigen::Index per = static_cast<Eigen::Index>(D) * D;
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < D; ++r)
            for (int c = 0; c < D; ++c) {
                const Eigen::Index k = i * per + r * D + c;
                A[i](r, c) = complex ? cplx(x(2 * k), x(2 * k + 1)) : cplx(x(k), 0.0);
            }
    return A;
}

}  // namespace

VariationalResult variational_upper_bound(const RMat& term, int d, int D, SeededRng& rng, const VariationalOptions& opt) {
    if (!is_hermitian(term)) throw ContractViolation("variational_upper_bound: term is not symmetric");
    if (opt.restarts < 1) throw ContractViolation("variational_upper_bound: need at least one restart");
    const int w = log_d(term.rows(), d);
    const CMat tc = term.cast<cplx>();
    const Eigen::Index npar = static_cast<Eigen::Index>(d) * D * D * (opt.complex ? 2 : 1);
    auto energy = [&](const RVec& x) {
        try {
            const ImpsSpec s = ImpsSpec::from_matrices(unpack(x, d, D, opt.complex));
            return (tc * imps_rdm(s, w)).trace().real();
        } catch (const Error&) {
            return 1e6;
        }
    };
    VariationalResult out;
    out.value = std::numeric_limits<double>::infinity();
    RVec best;
    for (int r = 0; r < opt.restarts; ++r) {
        SeededRng sr = rng.derive(static_cast<std::uint64_t>(r));
        RVec x0(npar);
        for (Eigen::Index i = 0; i < npar; ++i) x0(i) = sr.normal();
        const NelderMeadResult nm = nelder_mead(energy, x0, opt.diameter, opt.iterations);
        out.restart_values.push_back(nm.value);
        if (nm.value < out.value) {
            out.value = nm.value;
            best = nm.x;
        }
    }
    out.spec = ImpsSpec::from_matrices(unpack(best, d, D, opt.complex));
    out.spec.seed = rng.seed();
    return out;
}

RMat separating_projector(int d, int D, int& m, int max_m, SeededRng& rng, const SpanOptions& opt) {
    for (int k = 1; k <= max_m; ++k) {
        SeededRng r1 = rng.derive(2 * static_cast<std::uint64_t>(k)), r2 = rng.derive(2 * static_cast<std::uint64_t>(k) + 1);
        const SubspaceBasis low = mps_span_basis(d, D, k, r1, opt);
        if (static_cast<std::size_t>(low.size()) == low.ambient()) continue;
        const SubspaceBasis high = mps_span_basis(d, D + 1, k, r2, opt);
        if (high.size() <= low.size()) continue;
        const RMat resid = high.vectors - low.vectors * (low.vectors.transpose() * high.vectors);
        const RMat q = orthonormal_range(resid, 1e-8);
        if (q.cols() != high.size() - low.size())
            throw DegeneracyError("separating_projector: spans are not nested at the expected rank");
        m = k;
        return q * q.transpose();
    }
    throw NoOperatorError("separating_projector: no window up to the maximum separates the bond dimensions");
}

Prop1Family prop1_hamiltonian(int D_prime, int D, int n, double lambda, SeededRng& rng, const SpanOptions& opt) {
    const int d = 2;
    if (D_prime < 2 || D_prime > D) throw PreconditionError("prop1_hamiltonian: need 2 <= D' <= D");
    Prop1Family fam;
    SeededRng gen = rng.derive(1);
    for (int attempt = 0; attempt < 16; ++attempt) {
        fam.generator = MpsSpec::random(d, D_prime, gen, false);
        fam.generator.omega = CMat::Identity(D_prime, D_prime);
        const auto k = injectivity_order(fam.generator.A, 2 * D_prime * D_prime);
        if (k) {
            fam.injectivity_k = *k;
            break;
        }
    }
    if (fam.injectivity_k == 0) throw DegeneracyError("prop1_hamiltonian: no injective generator found");
    fam.H = parent_hamiltonian(fam.generator, n, fam.injectivity_k);
    SeededRng sep = rng.derive(2);
    fam.h = separating_projector(d, D, fam.window, n, sep, opt);
    double norm = 0.0;
    for (const auto& t : fam.H.terms) norm += hermitian_eigenvalues(t.h).cwiseAbs().maxCoeff();
    fam.lambda = lambda > 0 ? lambda : 10.0 * norm;
    fam.H_lambda = fam.H;
    for (int s = 0; s + fam.window <= n; ++s) fam.H_lambda.terms.push_back(real_term(s, fam.window, -fam.lambda * fam.h));
    return fam;
}

}  // namespace bondwit
