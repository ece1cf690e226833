#include "bondwit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bondwit/errors.hpp"

namespace bondwit {

SdpProblem::SdpProblem(std::vector<int> blocks) : blocks_(std::move(blocks)) {
    offsets_.reserve(blocks_.size());
    for (int n : blocks_) {
        if (n <= 0) throw ShapeError("SdpProblem: block sizes must be positive");
        offsets_.push_back(svec_dim_);
        svec_dim_ += svec_size(n);
    }
    if (total_dim() > 4000) throw ResourceError("SdpProblem: total block dimension above 4000");
    for (int n : blocks_) objective_.push_back(RMat::Zero(n, n));
    cols_.resize(svec_dim_, 0);
    rhs_.resize(0);
}

int SdpProblem::total_dim() const {
    int t = 0;
    for (int n : blocks_) t += n;
    return t;
}

RVec SdpProblem::objective_svec() const { return to_svec(objective_); }

void SdpProblem::set_objective(BlockMatrix c) {
    if (c.size() != blocks_.size()) throw ShapeError("SdpProblem: objective block count mismatch");
    for (std::size_t b = 0; b < c.size(); ++b) {
        if (c[b].size() == 0) c[b] = RMat::Zero(blocks_[b], blocks_[b]);
        if (c[b].rows() != blocks_[b] || c[b].cols() != blocks_[b]) throw ShapeError("SdpProblem: objective block shape");
    }
    objective_ = std::move(c);
}

void SdpProblem::set_objective_block(int block, const RMat& c) {
    if (c.rows() != blocks_.at(block) || c.cols() != blocks_[block]) throw ShapeError("SdpProblem: objective block shape");
    objective_[block] = c;
}

void SdpProblem::reserve(int m) {
    if (m <= cols_.cols()) return;
    cols_.conservativeResize(Eigen::NoChange, m);
    rhs_.conservativeResize(m);
}

int SdpProblem::add_constraint_svec(const Eigen::Ref<const RVec>& a, double b) {
    if (a.size() != svec_dim_) throw ShapeError("SdpProblem: constraint length mismatch");
    if (m_ == cols_.cols()) reserve(std::max(16, 2 * m_));
    cols_.col(m_) = a;
    rhs_(m_) = b;
    return m_++;
}

int SdpProblem::add_constraint(const BlockMatrix& a, double b) {
    if (a.size() > blocks_.size()) throw ShapeError("SdpProblem: too many constraint blocks");
    RVec v = RVec::Zero(svec_dim_);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].size() == 0) continue;
        if (a[k].rows() != blocks_[k] || a[k].cols() != blocks_[k]) throw ShapeError("SdpProblem: constraint block shape");
        v.segment(offsets_[k], svec_size(blocks_[k])) = svec(a[k]);
    }
    return add_constraint_svec(v, b);
}

int SdpProblem::add_block_constraint(int block, const RMat& a, double b) {
    if (a.rows() != blocks_.at(block) || a.cols() != blocks_[block]) throw ShapeError("SdpProblem: constraint block shape");
    RVec v = RVec::Zero(svec_dim_);
    v.segment(offsets_[block], svec_size(blocks_[block])) = svec(a);
    return add_constraint_svec(v, b);
}

void SdpProblem::scale_constraint(int k, double s) {
    if (k < 0 || k >= m_) throw ContractViolation("SdpProblem: constraint index out of range");
    cols_.col(k) *= s;
    rhs_(k) *= s;
}

void SdpProblem::validate() const {
    if (blocks_.empty()) throw ContractViolation("SdpProblem: no blocks");
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (!is_hermitian(objective_[b], 1e-10)) throw ContractViolation("SdpProblem: objective block not symmetric");
    if (!cols_.leftCols(m_).allFinite() || !rhs_.head(m_).allFinite()) throw ContractViolation("SdpProblem: non-finite data");
}

RVec SdpProblem::to_svec(const BlockMatrix& x) const {
    if (x.size() != blocks_.size()) throw ShapeError("SdpProblem: block count mismatch");
    RVec v(svec_dim_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) v.segment(offsets_[b], svec_size(blocks_[b])) = svec(x[b]);
    return v;
}

BlockMatrix SdpProblem::to_blocks(const Eigen::Ref<const RVec>& v) const {
    BlockMatrix out;
    out.reserve(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        out.push_back(smat(v.segment(offsets_[b], svec_size(blocks_[b])), blocks_[b]));
    return out;
}

BlockMatrix SdpProblem::adjoint(const Eigen::Ref<const RVec>& y) const {
    if (y.size() != m_) throw ShapeError("SdpProblem: dual vector length mismatch");
    return to_blocks(constraints() * y);
}

RVec SdpProblem::apply(const BlockMatrix& x) const { return constraints().transpose() * to_svec(x); }

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::InfeasibleCertificate: return "infeasible-certificate";
        case SdpStatus::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

PresolveResult presolve_detailed(const SdpProblem& p, double rel_tol) {
    const int m = p.num_constraints();
    const Eigen::Index n = p.svec_dim();
    PresolveResult res;
    GramSchmidt gs(n, rel_tol, false);
    std::vector<int> dropped;
    constexpr int kChunk = 64;
    for (int k0 = 0; k0 < m; k0 += kChunk) {
        const int nb = std::min(kChunk, m - k0);
        RMat block = p.constraints().middleCols(k0, nb);
        std::vector<bool> acc = gs.add(std::move(block));
        for (int j = 0; j < nb; ++j) (acc[j] ? res.kept : dropped).push_back(k0 + j);
    }

    res.problem = SdpProblem(p.blocks());
    res.problem.set_objective(p.objective());
    res.problem.reserve(static_cast<int>(res.kept.size()));
    for (int k : res.kept) res.problem.add_constraint_svec(p.constraint(k), p.rhs(k));
    if (dropped.empty() || res.kept.empty()) {
        if (!dropped.empty()) {
            // every constraint is numerically zero
            for (int k : dropped)
                if (std::abs(p.rhs(k)) > rel_tol * (1.0 + p.rhs().head(m).norm())) {
                    res.inconsistent = true;
                    res.ray = RVec::Zero(m);
                    res.ray(k) = p.rhs(k) > 0 ? 1.0 : -1.0;
                    break;
                }
        }
        return res;
    }

    const RMat gk = res.problem.constraints();
    Eigen::HouseholderQR<RMat> qr(gk);
    const double bnorm = 1.0 + p.rhs().head(m).norm();
    for (int k : dropped) {
        RVec c = qr.solve(RVec(p.constraint(k)));
        double bk = p.rhs(k);
        for (std::size_t i = 0; i < res.kept.size(); ++i) bk -= c(i) * p.rhs(res.kept[i]);
        const double scale = 1.0 + c.lpNorm<1>();
        if (std::abs(bk) > 1e3 * rel_tol * bnorm * scale) {
            res.inconsistent = true;
            res.ray = RVec::Zero(m);
            const double sgn = bk > 0 ? 1.0 : -1.0;
            res.ray(k) = sgn;
            for (std::size_t i = 0; i < res.kept.size(); ++i) res.ray(res.kept[i]) = -sgn * c(i);
            res.ray /= res.ray.norm();
            break;
        }
    }
    return res;
}

SdpProblem presolve(const SdpProblem& p) { return presolve_detailed(p).problem; }

namespace {

struct BlockScaling {
    RMat R;       // X = R Λ Rᵀ, Z = R⁻ᵀ Λ R⁻¹
    RVec lambda;
};

// U with Λ∘U = V (Jordan product), U_ij = 2 V_ij / (λ_i + λ_j).
RMat jordan_solve(const RVec& lam, const RMat& v) {
    RMat u(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) u(i, j) = 2.0 * v(i, j) / (lam(i) + lam(j));
    return u;
}

// Largest α ≤ cap with Λ + αΔ ⪰ 0.
double max_step(const RVec& lam, const RMat& delta) {
    const RVec s = lam.cwiseSqrt().cwiseInverse();
    const RMat p = s.asDiagonal() * delta * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly);
    const double e = es.eigenvalues()(0);
    return e < 0 ? -1.0 / e : std::numeric_limits<double>::infinity();
}

double scalar_step(double v, double dv) { return dv < 0 ? -v / dv : std::numeric_limits<double>::infinity(); }

class HsdSolver {
public:
    HsdSolver(SdpProblem p, const SdpOptions& opt) : p_(std::move(p)), opt_(opt) {
        const int m = p_.num_constraints();
        col_scale_ = RVec::Ones(m);
        for (int k = 0; k < m; ++k) {
            const double nk = p_.constraint(k).norm();
            if (nk > 0) {
                col_scale_(k) = nk;
                p_.scale_constraint(k, 1.0 / nk);
            }
        }
        c_ = p_.objective_svec();
        b_ = p_.rhs().head(m);
        c_norm_orig_ = c_.norm();
        b_norm_orig_ = (b_.cwiseProduct(col_scale_)).norm();
        sc_ = 1.0 / std::max(1.0, c_.norm());
        sb_ = 1.0 / std::max(1.0, b_.norm());
        c_ *= sc_;
        b_ *= sb_;
        p_.set_objective(p_.to_blocks(c_));
    }

    SdpSolution run();

private:
    int nb() const { return p_.num_blocks(); }
    auto seg(RVec& v, int b) const { return v.segment(p_.offset(b), svec_size(p_.blocks()[b])); }
    auto seg(const RVec& v, int b) const { return v.segment(p_.offset(b), svec_size(p_.blocks()[b])); }

    bool factor();
    void build_schur();
    struct Direction {
        RVec dx, dz;    // scaled space, svec
        RVec dX, dZ;    // original space, svec
        RVec dy;
        double dtau = 0, dkappa = 0;
    };
    Direction direction(double gamma, const RVec& rc, double rtau);
    double step_length(const Direction& d) const;
    RVec scaled_lambda_svec() const;
    RVec schur_solve(const RVec& r) const;
    void fill_unscaled(SdpSolution& s, double tau) const;

    SdpProblem p_;
    SdpOptions opt_;
    RVec col_scale_, c_, b_;
    double sc_ = 1, sb_ = 1, c_norm_orig_ = 0, b_norm_orig_ = 0;

    RVec x_, z_, y_;
    double tau_ = 1, kappa_ = 1;
    RVec rp_, rd_;
    double rg_ = 0;

    std::vector<BlockScaling> scal_;
    RMat gs_;
    Eigen::LLT<RMat> schur_;
    RMat schur_m_;
    RVec ct_, rdt_, g_, dy2_;
    double cwc_ = 0;
};

bool HsdSolver::factor() {
    scal_.resize(nb());
    for (int b = 0; b < nb(); ++b) {
        const int n = p_.blocks()[b];
        const RMat X = smat(seg(x_, b), n), Z = smat(seg(z_, b), n);
        Eigen::LLT<RMat> lx(X), lz(Z);
        if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
        const RMat Lx = lx.matrixL(), Lz = lz.matrixL();
        Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVec lam = svd.singularValues();
        if (lam.minCoeff() <= 0 || !lam.allFinite()) return false;
        scal_[b].lambda = lam;
        scal_[b].R = Lx * svd.matrixV() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
    }
    return true;
}

void HsdSolver::build_schur() {
    const int m = p_.num_constraints();
    gs_.resize(p_.svec_dim(), m);
    const auto A = p_.constraints();
    for (int k = 0; k < m; ++k) {
        for (int b = 0; b < nb(); ++b) {
            const int n = p_.blocks()[b];
            auto src = A.col(k).segment(p_.offset(b), svec_size(n));
            auto dst = gs_.col(k).segment(p_.offset(b), svec_size(n));
            if (src.squaredNorm() == 0.0) {
                dst.setZero();
                continue;
            }
            const RMat& R = scal_[b].R;
            if (n == 1) {
                dst(0) = src(0) * R(0, 0) * R(0, 0);
                continue;
            }
            const RMat a = smat(src, n);
            dst = svec(R.transpose() * a * R);
        }
    }
    RMat M = RMat::Zero(m, m);
    M.selfadjointView<Eigen::Lower>().rankUpdate(gs_.transpose());
    M = M.selfadjointView<Eigen::Lower>();
    schur_.compute(M);
    if (schur_.info() != Eigen::Success) {
        const double shift = 1e-13 * std::max(1.0, M.diagonal().maxCoeff());
        M.diagonal().array() += shift;
        schur_.compute(M);
    }
    schur_m_ = std::move(M);

    ct_.resize(p_.svec_dim());
    rdt_.resize(p_.svec_dim());
    for (int b = 0; b < nb(); ++b) {
        const int n = p_.blocks()[b];
        const RMat& R = scal_[b].R;
        seg(ct_, b) = svec(R.transpose() * smat(seg(c_, b), n) * R);
        seg(rdt_, b) = svec(R.transpose() * smat(seg(rd_, b), n) * R);
    }
    g_ = gs_.transpose() * ct_;
    cwc_ = ct_.squaredNorm();
    // separate solves: |g| dwarfs |b| near the optimum
    dy2_ = schur_solve(g_) + schur_solve(b_);
}

RVec HsdSolver::schur_solve(const RVec& r) const {
    RVec x = schur_.solve(r);
    x += schur_.solve(r - schur_m_ * x);
    return x;
}

RVec HsdSolver::scaled_lambda_svec() const {
    RVec v = RVec::Zero(p_.svec_dim());
    for (int b = 0; b < nb(); ++b) v.segment(p_.offset(b), svec_size(p_.blocks()[b])) = svec(RMat(scal_[b].lambda.asDiagonal()));
    return v;
}

HsdSolver::Direction HsdSolver::direction(double gamma, const RVec& rc, double rtau) {
    const double w = 1.0 - gamma;
    Direction d;
    const RVec rhs1 = w * rp_ - gs_.transpose() * rc + w * (gs_.transpose() * rdt_);
    const RVec dy1 = schur_solve(rhs1);
    const double c0 = ct_.dot(rc) - w * ct_.dot(rdt_);
    const RVec gmb = g_ - b_;
    const double denom = gmb.dot(dy2_) - cwc_ - kappa_ / tau_;
    d.dtau = (-w * rg_ - c0 - gmb.dot(dy1) - rtau / tau_) / denom;
    d.dy = dy1 + d.dtau * dy2_;
    d.dkappa = (rtau - kappa_ * d.dtau) / tau_;
    d.dz = w * rdt_ - gs_ * d.dy + d.dtau * ct_;
    d.dx = rc - d.dz;
    d.dZ = w * rd_ - p_.constraints() * d.dy + d.dtau * c_;
    d.dX.resize(p_.svec_dim());
    for (int b = 0; b < nb(); ++b) {
        const int n = p_.blocks()[b];
        const RMat& R = scal_[b].R;
        seg(d.dX, b) = svec(R * smat(seg(d.dx, b), n) * R.transpose());
    }
    return d;
}

double HsdSolver::step_length(const Direction& d) const {
    double a = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb(); ++b) {
        const int n = p_.blocks()[b];
        a = std::min(a, max_step(scal_[b].lambda, smat(seg(d.dx, b), n)));
        a = std::min(a, max_step(scal_[b].lambda, smat(seg(d.dz, b), n)));
    }
    a = std::min(a, scalar_step(tau_, d.dtau));
    a = std::min(a, scalar_step(kappa_, d.dkappa));
    return a;
}

void HsdSolver::fill_unscaled(SdpSolution& s, double tau) const {
    const RVec x = x_ / (sb_ * tau);
    const RVec z = z_ / (sc_ * tau);
    const RVec y = y_.cwiseQuotient(col_scale_) / (sc_ * tau);
    s.X = p_.to_blocks(x);
    s.Z = p_.to_blocks(z);
    s.y = y;
}

SdpSolution HsdSolver::run() {
    const int m = p_.num_constraints();
    const Eigen::Index nsv = p_.svec_dim();
    const double nu = p_.total_dim() + 1.0;
    x_ = RVec::Zero(nsv);
    for (int b = 0; b < nb(); ++b) seg(x_, b) = svec(RMat::Identity(p_.blocks()[b], p_.blocks()[b]));
    z_ = x_;
    y_ = RVec::Zero(m);
    tau_ = kappa_ = 1.0;

    SdpSolution sol;
    const auto A = p_.constraints();
    int stalls = 0, polished = 0;
    bool have_best = false;
    SdpSolution best;
    for (int it = 0; it <= opt_.max_iter; ++it) {
        rp_ = b_ * tau_ - A.transpose() * x_;
        rd_ = c_ * tau_ - A * y_ - z_;
        const double cx = c_.dot(x_), by = b_.dot(y_);
        rg_ = cx - by + kappa_;
        const double mu = (x_.dot(z_) + tau_ * kappa_) / nu;

        // unscaled, normalized by τ
        const double pobj = cx / (sc_ * sb_ * tau_);
        const double dobj = by / (sc_ * sb_ * tau_);
        const double pres = (rp_.cwiseProduct(col_scale_)).norm() / (sb_ * tau_) / (1.0 + b_norm_orig_);
        const double dres = rd_.norm() / (sc_ * tau_) / (1.0 + c_norm_orig_);
        const double gap = std::abs(pobj - dobj);
        sol.iterations = it;
        sol.primal_objective = pobj;
        sol.dual_objective = dobj;
        sol.gap = gap;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        if (opt_.record_history) {
            SdpIterate h;
            h.iteration = it;
            h.primal_objective = pobj;
            h.dual_objective = dobj;
            h.primal_residual = pres;
            h.dual_residual = dres;
            h.mu = mu;
            h.tau = tau_;
            h.kappa = kappa_;
            h.corrected_gap = pobj - dobj - (rd_.dot(x_) - y_.dot(rp_)) / (sc_ * sb_ * tau_ * tau_);
            sol.history.push_back(h);
        }
        if (!std::isfinite(pobj) || !std::isfinite(dobj)) {
            sol.message = "non-finite iterate";
            break;
        }
        const bool passes = pres < opt_.feas_tol && dres < opt_.feas_tol && gap < opt_.gap_tol * (1.0 + std::abs(pobj));
        if (passes && (!have_best || gap < best.gap)) {
            best = sol;
            best.history.clear();
            best.status = SdpStatus::Optimal;
            best.message = "converged";
            fill_unscaled(best, tau_);
            have_best = true;
        }
        if (have_best && (best.gap < opt_.polish_gap * (1.0 + std::abs(best.primal_objective)) || polished++ >= opt_.polish_iter)) {
            best.history = std::move(sol.history);
            return best;
        }
        // Farkas ray for the primal: Σ y_k A_k + Z ≈ 0, bᵀy > 0
        if (by > 0) {
            const double res = (A * y_ + z_).norm() / by;
            if (res < opt_.infeas_tol) {
                RVec y = y_.cwiseQuotient(col_scale_);
                // unscaled bᵀy = (b̂/sb)·ŷ
                const double bty = by / sb_;
                const double yn = y.norm();
                sol.status = SdpStatus::InfeasibleCertificate;
                sol.primal_infeasible = true;
                sol.ray_y = y / yn;
                sol.violation = bty / yn;
                sol.message = "primal infeasible";
                return sol;
            }
        }
        if (cx < 0) {
            const double res = (A.transpose() * x_).norm() / (-cx);
            if (res < opt_.infeas_tol) {
                const RVec x = x_ / x_.norm();
                sol.status = SdpStatus::InfeasibleCertificate;
                sol.primal_infeasible = false;
                sol.ray_X = p_.to_blocks(x);
                sol.violation = -(cx / sc_) / x_.norm();
                sol.message = "dual infeasible";
                return sol;
            }
        }
        if (it == opt_.max_iter) {
            sol.message = "iteration cap";
            break;
        }
        if (!factor()) {
            sol.message = "loss of positive definiteness";
            break;
        }
        build_schur();

        // predictor
        const RVec lam = scaled_lambda_svec();
        Direction aff = direction(0.0, -lam, -tau_ * kappa_);
        const double a_aff = std::min(1.0, step_length(aff));
        double mu_aff = 0.0;
        {
            double s = 0.0;
            for (int b = 0; b < nb(); ++b) {
                const int n = p_.blocks()[b];
                const RMat L = scal_[b].lambda.asDiagonal();
                const RMat xs = L + a_aff * smat(seg(aff.dx, b), n);
                const RMat zs = L + a_aff * smat(seg(aff.dz, b), n);
                s += (xs.cwiseProduct(zs)).sum();
            }
            mu_aff = (s + (tau_ + a_aff * aff.dtau) * (kappa_ + a_aff * aff.dkappa)) / nu;
        }
        const double sigma = std::clamp(std::pow(std::max(0.0, mu_aff) / mu, 3.0), 0.0, 1.0);

        // corrector
        RVec rc(nsv);
        for (int b = 0; b < nb(); ++b) {
            const int n = p_.blocks()[b];
            const RVec& l = scal_[b].lambda;
            const RMat dxa = smat(seg(aff.dx, b), n), dza = smat(seg(aff.dz, b), n);
            RMat v = -RMat(l.array().square().matrix().asDiagonal()) - 0.5 * (dxa * dza + dza * dxa);
            v.diagonal().array() += sigma * mu;
            seg(rc, b) = svec(jordan_solve(l, v));
        }
        const double rtau = sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa;
        Direction d = direction(sigma, rc, rtau);
        const double amax = step_length(d);
        const double alpha = std::min(1.0, opt_.step_fraction * amax);
        if (opt_.record_history) sol.history.back().step = alpha;
        if (!(alpha > 0) || !std::isfinite(alpha)) {
            sol.message = "zero step";
            break;
        }
        stalls = alpha < 1e-8 ? stalls + 1 : 0;
        if (stalls > 5) {
            sol.message = "stalled";
            break;
        }
        x_ += alpha * d.dX;
        z_ += alpha * d.dZ;
        y_ += alpha * d.dy;
        tau_ += alpha * d.dtau;
        kappa_ += alpha * d.dkappa;

        // keep the iterate scale bounded
        const double s = std::max({x_.norm(), z_.norm(), tau_});
        if (s > 1e8) {
            x_ /= s;
            z_ /= s;
            y_ /= s;
            tau_ /= s;
            kappa_ /= s;
        }
    }
    if (have_best) {
        best.history = std::move(sol.history);
        return best;
    }
    sol.status = SdpStatus::Indeterminate;
    if (tau_ > 0) fill_unscaled(sol, tau_);
    return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) {
    p.validate();
    const int m0 = p.num_constraints();
    PresolveResult pre;
    if (opt.presolve) {
        pre = presolve_detailed(p);
    } else {
        pre.problem = p;
        for (int k = 0; k < m0; ++k) pre.kept.push_back(k);
    }
    SdpSolution sol;
    if (pre.inconsistent) {
        sol.status = SdpStatus::InfeasibleCertificate;
        sol.primal_infeasible = true;
        sol.ray_y = pre.ray;
        sol.violation = pre.ray.dot(p.rhs().head(m0));
        sol.removed_constraints = m0 - static_cast<int>(pre.kept.size());
        sol.message = "inconsistent equality constraints";
        return sol;
    }
    HsdSolver solver(std::move(pre.problem), opt);
    sol = solver.run();
    sol.removed_constraints = m0 - static_cast<int>(pre.kept.size());
    auto lift = [&](const RVec& v) {
        RVec full = RVec::Zero(m0);
        for (std::size_t i = 0; i < pre.kept.size(); ++i) full(pre.kept[i]) = v(i);
        return full;
    };
    if (sol.y.size() == static_cast<Eigen::Index>(pre.kept.size())) sol.y = lift(sol.y);
    if (sol.ray_y.size() == static_cast<Eigen::Index>(pre.kept.size())) sol.ray_y = lift(sol.ray_y);
    return sol;
}

double solution_violation(const SdpProblem& p, const SdpSolution& s) {
    double v = 0.0;
    for (const RMat& x : s.X) v = std::max(v, -hermitian_min_eig(x));
    for (const RMat& z : s.Z) v = std::max(v, -hermitian_min_eig(z));
    const int m = p.num_constraints();
    v = std::max(v, (p.apply(s.X) - p.rhs().head(m)).norm() / (1.0 + p.rhs().head(m).norm()));
    const BlockMatrix aty = p.adjoint(s.y);
    double r = 0.0, c = 0.0;
    for (int b = 0; b < p.num_blocks(); ++b) {
        r += (p.objective()[b] - aty[b] - s.Z[b]).squaredNorm();
        c += p.objective()[b].squaredNorm();
    }
    return std::max(v, std::sqrt(r) / (1.0 + std::sqrt(c)));
}

}  // namespace bondwit
