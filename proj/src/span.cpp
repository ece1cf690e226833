#include "bondwit/span.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "bondwit/errors.hpp"
#include "bondwit/modular.hpp"
#include "bondwit/rational.hpp"

namespace bondwit {

std::string to_string(SubspaceKind k) {
    switch (k) {
        case SubspaceKind::MpsSpan: return "mps-span";
        case SubspaceKind::CommutatorSpan: return "commutator-span";
        case SubspaceKind::Quotient: return "quotient";
        case SubspaceKind::ImpsRdmSpan: return "imps-rdm-span";
        case SubspaceKind::ConstrainedSpan: return "constrained-span";
    }
    return "unknown";
}

SubspaceKind subspace_kind_from_string(const std::string& s) {
    for (auto k : {SubspaceKind::MpsSpan, SubspaceKind::CommutatorSpan, SubspaceKind::Quotient, SubspaceKind::ImpsRdmSpan,
                   SubspaceKind::ConstrainedSpan})
        if (to_string(k) == s) return k;
    throw ContractViolation("unknown subspace kind '" + s + "'");
}

namespace {

enum class Boundary { Full, Traceless, Identity };

/// Runs `fn` on samples first..first+count-1, each with its own derived
/// stream, so the output does not depend on the worker count.
template <class T>
std::vector<T> collect(std::size_t first, std::size_t count, int workers, const SeededRng& base,
                       const std::function<T(SeededRng&)>& fn) {
    std::vector<T> out(count);
    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            SeededRng r = base.derive(first + i);
            out[i] = fn(r);
        }
    };
    if (workers <= 1 || count < 2) {
        run(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t w = std::min<std::size_t>(workers, count);
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run, count * k / w, count * (k + 1) / w);
    for (auto& t : pool) t.join();
    return out;
}

int vectors_per_sample(int D, Boundary b) { return b == Boundary::Traceless ? D * D - 1 : D * D; }

RMat boundary_columns(const RMat& w, int D, Boundary b) {
    if (b != Boundary::Traceless) return w;
    RMat out(w.rows(), D * D - 1);
    Eigen::Index k = 0;
    for (int a = 0; a < D; ++a)
        for (int c = 0; c < D; ++c)
            if (a != c) out.col(k++) = w.col(a * D + c);
    for (int a = 0; a + 1 < D; ++a) out.col(k++) = w.col(a * D + a) - w.col((D - 1) * D + D - 1);
    return out;
}

RMat float_sample(int d, int D, int m, Boundary b, SeededRng& rng) {
    std::vector<RMat> A;
    const double s = 1.0 / std::sqrt(static_cast<double>(D));
    for (int i = 0; i < d; ++i) {
        if (b == Boundary::Identity && i == d - 1) {
            A.push_back(RMat::Identity(D, D));
            continue;
        }
        RMat a(D, D);
        for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = s * rng.normal();
        A.push_back(a);
    }
    return boundary_columns(word_products(A, m), D, b);
}

SubspaceBasis float_span(SubspaceKind kind, int d, int D, int m, Boundary b, SeededRng& rng, const SpanOptions& opt,
                         Eigen::Index target) {
    const auto dim = static_cast<Eigen::Index>(checked_pow(d, m, memory_budget()));
    SubspaceBasis out;
    out.kind = kind;
    out.d = d;
    out.D = D;
    out.m = m;
    out.seed = rng.seed();
    out.tolerance = opt.tolerance;
    const int per = vectors_per_sample(D, b);
    if (per == 0) {
        out.vectors = RMat(dim, 0);
        return out;
    }
    const Eigen::Index cap = target >= 0 ? target : dim;
    if (static_cast<std::size_t>(dim) * static_cast<std::size_t>(std::max<Eigen::Index>(cap, 1)) > 4 * memory_budget())
        throw ResourceError("span basis of " + std::to_string(cap) + " vectors of length " + std::to_string(dim) +
                            " exceeds budget");

    const SeededRng base(rng.next_u64());
    GramSchmidt gs(dim, opt.tolerance);
    const std::size_t batch = std::max<std::size_t>(1, 64 / per);
    std::size_t next = 0;
    int run = 0;
    while (gs.rank() < cap && next < opt.max_samples) {
        if (target < 0 && run >= opt.stop_after) break;
        if (target >= 0 && run >= 20 * opt.stop_after)
            throw DegeneracyError("float span stalled at " + std::to_string(gs.rank()) + " of exact dimension " +
                                  std::to_string(target));
        const auto mats = collect<RMat>(next, batch, opt.workers, base,
                                        [&](SeededRng& r) { return float_sample(d, D, m, b, r); });
        RMat block(dim, static_cast<Eigen::Index>(batch) * per);
        for (std::size_t s = 0; s < batch; ++s) block.middleCols(static_cast<Eigen::Index>(s) * per, per) = mats[s];
        const auto acc = gs.add(std::move(block), cap);
        for (std::size_t s = 0; s < batch; ++s) {
            const bool any = std::any_of(acc.begin() + s * per, acc.begin() + (s + 1) * per, [](bool x) { return x; });
            run = any ? 0 : run + 1;
        }
        next += batch;
    }
    out.samples = next;
    out.vectors = gs.take();
    return out;
}

// Residues of the word products of integer matrices.
ResidueRows modular_word_products(const std::vector<ResidueRows>& A, int m, std::int64_t p) {
    const Eigen::Index D = A[0].rows();
    const auto d = static_cast<Eigen::Index>(A.size());
    const double pd = static_cast<double>(p), inv = 1.0 / pd;
    auto reduce = [&](ResidueRows& x) {
        auto a = x.array();
        a -= pd * (a * inv).floor();
        a = (a < 0.0).select(a + pd, a);
        a = (a >= pd).select(a - pd, a);
    };
    std::vector<ResidueRows> right;
    for (const auto& a : A) {
        ResidueRows k = ResidueRows::Zero(D * D, D * D);
        for (Eigen::Index r = 0; r < D; ++r) k.block(r * D, r * D, D, D) = a;
        right.push_back(k);
    }
    ResidueRows cur = ResidueRows::Zero(1, D * D);
    for (Eigen::Index a = 0; a < D; ++a) cur(0, a * D + a) = 1;
    if (D * D > 64) throw ResourceError("modular word products support D <= 8");
    for (int step = 0; step < m; ++step) {
        ResidueRows next(cur.rows() * d, D * D);
        for (Eigen::Index i = 0; i < d; ++i) {
            ResidueRows t = cur * right[i];
            reduce(t);
            for (Eigen::Index w = 0; w < cur.rows(); ++w) next.row(w * d + i) = t.row(w);
        }
        cur.swap(next);
    }
    return cur;
}

std::vector<std::vector<long>> integer_tuple(int d, int D, Boundary b, SeededRng& rng) {
    std::vector<std::vector<long>> A;
    for (int i = 0; i < d; ++i) {
        std::vector<long> a(static_cast<std::size_t>(D * D));
        if (b == Boundary::Identity && i == d - 1) {
            for (int k = 0; k < D; ++k) a[k * D + k] = 1;
        } else {
            for (auto& v : a) v = static_cast<long>(rng.uniform_int(-9, 9));
        }
        A.push_back(a);
    }
    return A;
}

ResidueRows modular_sample(int d, int D, int m, Boundary b, std::int64_t p, SeededRng& rng) {
    const auto ints = integer_tuple(d, D, b, rng);
    std::vector<ResidueRows> A;
    for (const auto& a : ints) {
        ResidueRows r(D, D);
        for (int k = 0; k < D * D; ++k) r(k / D, k % D) = static_cast<double>(mod_reduce(a[k], p));
        A.push_back(r);
    }
    const ResidueRows w = modular_word_products(A, m, p);
    const int per = vectors_per_sample(D, b);
    ResidueRows rows(per, w.rows());
    if (b != Boundary::Traceless) {
        rows = w.transpose();
        return rows;
    }
    Eigen::Index k = 0;
    for (int a = 0; a < D; ++a)
        for (int c = 0; c < D; ++c)
            if (a != c) rows.row(k++) = w.col(a * D + c).transpose();
    for (int a = 0; a + 1 < D; ++a) {
        ResidueRows diff = (w.col(a * D + a) - w.col((D - 1) * D + D - 1)).transpose();
        auto arr = diff.array();
        arr = (arr < 0.0).select(arr + static_cast<double>(p), arr);
        rows.row(k++) = diff;
    }
    return rows;
}

std::size_t modular_rank(int d, int D, int m, Boundary b, SeededRng& rng, const SpanOptions& opt) {
    const std::size_t cols = checked_pow(d, m, memory_budget());
    const int per = vectors_per_sample(D, b);
    if (per == 0) return 0;
    const std::size_t maxrank = std::min<std::size_t>(cols, memory_budget() * 8 / std::max<std::size_t>(cols, 1));
    (void)maxrank;
    ModularEchelon ech(cols);
    const SeededRng base(rng.next_u64());
    const std::size_t batch = std::max<std::size_t>(1, 128 / per);
    std::size_t next = 0;
    int run = 0;
    while (!ech.full() && run < opt.stop_after && next < opt.max_samples) {
        const auto mats = collect<ResidueRows>(next, batch, opt.workers, base, [&](SeededRng& r) {
            return modular_sample(d, D, m, b, ech.prime(), r);
        });
        ResidueRows rows(static_cast<Eigen::Index>(batch) * per, static_cast<Eigen::Index>(cols));
        for (std::size_t s = 0; s < batch; ++s) rows.middleRows(static_cast<Eigen::Index>(s) * per, per) = mats[s];
        const auto acc = ech.add_rows(std::move(rows));
        for (std::size_t s = 0; s < batch; ++s) {
            const bool any = std::any_of(acc.begin() + s * per, acc.begin() + (s + 1) * per, [](bool x) { return x; });
            run = any ? 0 : run + 1;
        }
        next += batch;
    }
    return ech.rank();
}

std::size_t rational_span_rank(int d, int D, int m, Boundary b, SeededRng& rng, const SpanOptions& opt) {
    const std::size_t cols = checked_pow(d, m, std::size_t(1) << 12);
    const int per = vectors_per_sample(D, b);
    if (per == 0) return 0;
    std::vector<std::vector<mpz_class>> rows;
    std::size_t rank = 0;
    int run = 0;
    const SeededRng base(rng.next_u64());
    for (std::size_t s = 0; run < opt.stop_after && rank < cols && s < opt.max_samples; ++s) {
        SeededRng r = base.derive(s);
        const auto ints = integer_tuple(d, D, b, r);
        // exact word products, row w holds (A_w)_{ab} at a*D+b
        std::vector<std::vector<mpz_class>> cur(1, std::vector<mpz_class>(D * D));
        for (int a = 0; a < D; ++a) cur[0][a * D + a] = 1;
        for (int step = 0; step < m; ++step) {
            std::vector<std::vector<mpz_class>> next(cur.size() * d, std::vector<mpz_class>(D * D));
            for (std::size_t w = 0; w < cur.size(); ++w)
                for (int i = 0; i < d; ++i)
                    for (int a = 0; a < D; ++a)
                        for (int c = 0; c < D; ++c) {
                            mpz_class acc = 0;
                            for (int k = 0; k < D; ++k) acc += cur[w][a * D + k] * ints[i][k * D + c];
                            next[w * d + i][a * D + c] = acc;
                        }
            cur.swap(next);
        }
        std::vector<std::vector<mpz_class>> fresh;
        for (int a = 0; a < D; ++a)
            for (int c = 0; c < D; ++c) {
                if (b == Boundary::Traceless && a == c) continue;
                std::vector<mpz_class> row(cols);
                for (std::size_t w = 0; w < cols; ++w) row[w] = cur[w][a * D + c];
                fresh.push_back(row);
            }
        if (b == Boundary::Traceless)
            for (int a = 0; a + 1 < D; ++a) {
                std::vector<mpz_class> row(cols);
                for (std::size_t w = 0; w < cols; ++w) row[w] = cur[w][a * D + a] - cur[w][(D - 1) * D + D - 1];
                fresh.push_back(row);
            }
        rows.insert(rows.end(), fresh.begin(), fresh.end());
        RationalMatrix mat(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j) mat(i, j) = rows[i][j];
        const std::size_t nr = rational_rank(mat);
        run = nr > rank ? 0 : run + 1;
        rank = nr;
    }
    return rank;
}

std::size_t exact_rank(int d, int D, int m, Boundary b, SeededRng& rng, const SpanOptions& opt) {
    return opt.backend == ExactBackend::Rational ? rational_span_rank(d, D, m, b, rng, opt) : modular_rank(d, D, m, b, rng, opt);
}

SubspaceBasis span_with_mode(SubspaceKind kind, int d, int D, int m, Boundary b, SeededRng& rng, const SpanOptions& opt) {
    if (d < 2 || D < 1 || m < 1) throw ContractViolation("span: need d >= 2, D >= 1, m >= 1");
    if (opt.mode == SpanMode::Float) return float_span(kind, d, D, m, b, rng, opt, -1);
    const auto target = static_cast<Eigen::Index>(exact_rank(d, D, m, b, rng, opt));
    SubspaceBasis out = float_span(kind, d, D, m, b, rng, opt, target);
    out.exact = true;
    return out;
}

}  // namespace

SubspaceBasis mps_span_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    return span_with_mode(SubspaceKind::MpsSpan, d, D, m, Boundary::Full, rng, opt);
}

std::size_t mps_span_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    if (d < 2 || D < 1 || m < 1) throw ContractViolation("mps_span_dim_exact: need d >= 2, D >= 1, m >= 1");
    return exact_rank(d, D, m, Boundary::Full, rng, opt);
}

mpz_class dim_upper_bound(int d, int D, int m) {
    const unsigned long k = static_cast<unsigned long>(d) * D * D;
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m) + k - 1, k - 1);
    return mpz_class(D * D) * binom;
}

SubspaceBasis commutator_span_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    return span_with_mode(SubspaceKind::CommutatorSpan, d, D, m, Boundary::Traceless, rng, opt);
}

std::size_t commutator_span_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    return exact_rank(d, D, m, Boundary::Traceless, rng, opt);
}

QuotientResult quotient_basis(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    QuotientResult res;
    const SubspaceBasis B = mps_span_basis(d, D, m, rng, opt);
    const SubspaceBasis C = commutator_span_basis(d, D, m, rng, opt);
    res.mps_dim = static_cast<std::size_t>(B.size());
    res.commutator_dim = static_cast<std::size_t>(C.size());
    const Eigen::Index t = B.size(), c = C.size();
    if (c > t) throw DegeneracyError("quotient_basis: commutator span larger than the MPS span");

    SubspaceBasis Q = B;
    Q.kind = SubspaceKind::Quotient;
    if (c == 0) {
        Q.vectors = B.vectors;
    } else {
        // C lies inside span(B); its complement there is spanned by the
        // left singular vectors of B^T C beyond the first c
        const RMat M = B.vectors.transpose() * C.vectors;
        Eigen::BDCSVD<RMat> svd(M, Eigen::ComputeFullU);
        const RVec& s = svd.singularValues();
        if (s.size() > 0 && s(s.size() - 1) < 0.5)
            throw DegeneracyError("quotient_basis: commutator span is not contained in the MPS span");
        Q.vectors = B.vectors * svd.matrixU().rightCols(t - c);
    }
    Q.samples = B.samples + C.samples;
    for (Eigen::Index k = 0; k < Q.vectors.cols(); ++k) res.representatives.push_back(from_vector(RVec(Q.vectors.col(k)), d, m));
    res.basis = std::move(Q);
    return res;
}

std::size_t quotient_dim_exact(int d, int D, int m, SeededRng& rng, const SpanOptions& opt) {
    const std::size_t a = mps_span_dim_exact(d, D, m, rng, opt);
    const std::size_t b = commutator_span_dim_exact(d, D, m, rng, opt);
    if (b > a) throw DegeneracyError("quotient_dim_exact: commutator rank exceeds MPS rank");
    return a - b;
}

RVec asvec(const RMat& a) {
    const int n = static_cast<int>(a.rows());
    RVec v(n * (n - 1) / 2);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) v(k++) = M_SQRT2 * 0.5 * (a(i, j) - a(j, i));
    return v;
}

RMat asmat(const Eigen::Ref<const RVec>& v, int n) {
    RMat a = RMat::Zero(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            a(i, j) = v(k) * M_SQRT1_2;
            a(j, i) = -a(i, j);
            ++k;
        }
    return a;
}

SubspaceBasis imps_rdm_span(int d, int D, int N, SeededRng& rng, const SpanOptions& opt, const RMat* frame,
                            bool with_antisymmetric) {
    RMat B;
    if (frame) {
        B = *frame;
    } else {
        SpanOptions fo = opt;
        B = mps_span_basis(d, D, N, rng, fo).vectors;
    }
    const auto dim = static_cast<Eigen::Index>(checked_pow(d, N, memory_budget()));
    if (B.rows() != dim) throw ShapeError("imps_rdm_span: frame has the wrong length");
    const int t = static_cast<int>(B.cols());
    const Eigen::Index sdim = svec_size(t), adim = static_cast<Eigen::Index>(t) * (t - 1) / 2;
    if (static_cast<std::size_t>(sdim) * static_cast<std::size_t>(sdim) > 4 * memory_budget() &&
        static_cast<std::size_t>(sdim) * 4096 > memory_budget())
        throw ResourceError("imps_rdm_span: coordinate space too large");

    SubspaceBasis out;
    out.kind = SubspaceKind::ImpsRdmSpan;
    out.d = d;
    out.D = D;
    out.m = N;
    out.seed = rng.seed();
    out.tolerance = opt.tolerance;

    struct Sample {
        RVec re, im;
    };
    const SeededRng base(rng.next_u64());
    GramSchmidt gs(sdim, opt.tolerance), ga(adim, opt.tolerance);
    const std::size_t batch = 64;
    std::size_t next = 0;
    int run = 0;
    const CMat Bc = B.cast<cplx>();
    while (run < opt.stop_after && next < opt.max_samples && gs.rank() < sdim) {
        const auto samples = collect<Sample>(next, batch, opt.workers, base, [&](SeededRng& r) {
            const ImpsSpec s = ImpsSpec::random(d, D, r, true);
            const CMat w = word_products(s.A, N);
            const CMat q = w * kron(CMat(s.sigma.transpose()), CMat(CMat::Identity(D, D)));
            const CMat x = (Bc.transpose() * q) * (Bc.transpose() * w.conjugate()).transpose();
            Sample out_s;
            out_s.re = svec(RMat(x.real()));
            if (with_antisymmetric) out_s.im = asvec(RMat(x.imag()));
            return out_s;
        });
        RMat re(sdim, static_cast<Eigen::Index>(batch)), im(adim, with_antisymmetric ? static_cast<Eigen::Index>(batch) : 0);
        for (std::size_t k = 0; k < batch; ++k) {
            re.col(static_cast<Eigen::Index>(k)) = samples[k].re;
            if (with_antisymmetric) im.col(static_cast<Eigen::Index>(k)) = samples[k].im;
        }
        const auto ar = gs.add(std::move(re));
        std::vector<bool> ai(batch, false);
        if (with_antisymmetric && adim > 0) ai = ga.add(std::move(im));
        for (std::size_t k = 0; k < batch; ++k) run = (ar[k] || ai[k]) ? 0 : run + 1;
        next += batch;
    }
    out.samples = next;
    out.vectors = gs.take();
    if (with_antisymmetric) out.antisymmetric = ga.take();
    out.frame = std::move(B);
    return out;
}

SubspaceBasis constrained_span_basis(int d, int D, int n, SeededRng& rng, const SpanOptions& opt) {
    return span_with_mode(SubspaceKind::ConstrainedSpan, d, D, n, Boundary::Identity, rng, opt);
}

RMat project_operator(const LocalHamiltonian& H, const SubspaceBasis& B) {
    if (B.kind == SubspaceKind::ImpsRdmSpan) throw ContractViolation("project_operator: basis is not a site-space basis");
    if (B.ambient() != H.dim()) throw ShapeError("project_operator: basis length differs from the Hamiltonian dimension");
    const RMat hb = H.apply(B.vectors);
    RMat out = B.vectors.transpose() * hb;
    return (out + out.transpose()) * 0.5;
}

RMat project_operator(const RMat& H, const SubspaceBasis& B) {
    if (B.kind == SubspaceKind::ImpsRdmSpan) throw ContractViolation("project_operator: basis is not a site-space basis");
    if (H.rows() != H.cols() || static_cast<std::size_t>(H.rows()) != B.ambient())
        throw ShapeError("project_operator: operator size differs from the basis length");
    RMat out = B.vectors.transpose() * H * B.vectors;
    return (out + out.transpose()) * 0.5;
}

PepsCount peps_annihilator_exists(int d, int D, int N, int L) {
    if (d < 1 || D < 1 || N < 1 || L < 1) throw ContractViolation("peps_annihilator_exists: arguments must be positive");
    PepsCount c;
    mpz_class volume, boundary;
    mpz_ui_pow_ui(volume.get_mpz_t(), L, N);
    mpz_ui_pow_ui(boundary.get_mpz_t(), L, N - 1);
    boundary *= 2 * N;
    mpz_pow_ui(c.states.get_mpz_t(), mpz_class(d).get_mpz_t(), volume.get_ui());
    mpz_class dd;
    mpz_ui_pow_ui(dd.get_mpz_t(), D, 2 * N);
    dd *= d;
    mpz_class bnd;
    mpz_pow_ui(bnd.get_mpz_t(), mpz_class(D).get_mpz_t(), boundary.get_ui());
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), volume.get_ui() + dd.get_ui() - 1, dd.get_ui() - 1);
    c.monomials = bnd * binom;
    c.exists = c.states > c.monomials;
    return c;
}

}  // namespace bondwit
