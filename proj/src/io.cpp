#include "bondwit/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>
#include <set>

#include "bondwit/errors.hpp"

namespace bondwit {

namespace {

static_assert(std::endian::native == std::endian::little, "basis container assumes a little-endian host");

template <class Mat>
json part_rows(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

RMat rows_to_matrix(const json& rows, Eigen::Index r, Eigen::Index c) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r) throw ShapeError("matrix json: row count mismatch");
    RMat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != c) throw ShapeError("matrix json: column count mismatch");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
    }
    return m;
}

json matrices_to_json(const std::vector<CMat>& A) {
    json a = json::array();
    for (const auto& m : A) a.push_back(matrix_to_json(m));
    return a;
}

std::vector<CMat> matrices_from_json(const json& j) {
    std::vector<CMat> A;
    for (const auto& m : j) A.push_back(cmatrix_from_json(m));
    return A;
}

json blocks_to_json(const BlockMatrix& b) {
    json a = json::array();
    for (const auto& m : b) a.push_back(symmetric_to_json(m));
    return a;
}

}  // namespace

json matrix_to_json(const CMat& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", part_rows(RMat(m.real()))}, {"im", part_rows(RMat(m.imag()))}};
}

json matrix_to_json(const RMat& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", part_rows(m)}}; }

CMat cmatrix_from_json(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
    CMat m = rows_to_matrix(j.at("re"), r, c).cast<cplx>();
    if (j.contains("im")) m.imag() = rows_to_matrix(j.at("im"), r, c);
    return m;
}

RMat rmatrix_from_json(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
    if (j.contains("im") && rows_to_matrix(j.at("im"), r, c).cwiseAbs().maxCoeff() > 0)
        throw ContractViolation("matrix json: expected a real matrix");
    return rows_to_matrix(j.at("re"), r, c);
}

json symmetric_to_json(const RMat& m) {
    json lower = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k <= i; ++k) lower.push_back(m(i, k));
    return {{"n", m.rows()}, {"lower", lower}};
}

RMat symmetric_from_json(const json& j) {
    const auto n = j.at("n").get<Eigen::Index>();
    const json& lower = j.at("lower");
    if (static_cast<Eigen::Index>(lower.size()) != n * (n + 1) / 2) throw ShapeError("symmetric json: wrong entry count");
    RMat m(n, n);
    std::size_t e = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k <= i; ++k) m(i, k) = m(k, i) = lower[e++].get<double>();
    return m;
}

json to_json(const MpsSpec& s) {
    return {{"type", "mps"}, {"d", s.d}, {"D", s.D}, {"A", matrices_to_json(s.A)}, {"omega", matrix_to_json(s.omega)},
            {"seed", s.seed}};
}

MpsSpec mps_spec_from_json(const json& j) {
    MpsSpec s;
    s.A = matrices_from_json(j.at("A"));
    s.d = j.value("d", static_cast<int>(s.A.size()));
    s.D = j.value("D", s.A.empty() ? 1 : static_cast<int>(s.A[0].rows()));
    s.omega = j.contains("omega") ? cmatrix_from_json(j.at("omega")) : CMat(CMat::Identity(s.D, s.D));
    s.seed = j.value("seed", std::uint64_t(0));
    s.validate();
    return s;
}

json to_json(const ImpsSpec& s) {
    return {{"type", "imps"}, {"d", s.d}, {"D", s.D}, {"A", matrices_to_json(s.A)}, {"sigma", matrix_to_json(s.sigma)},
            {"seed", s.seed}};
}

ImpsSpec imps_spec_from_json(const json& j) {
    ImpsSpec s;
    if (j.contains("sigma")) {
        s.A = matrices_from_json(j.at("A"));
        s.d = static_cast<int>(s.A.size());
        s.D = s.A.empty() ? 1 : static_cast<int>(s.A[0].rows());
        s.sigma = cmatrix_from_json(j.at("sigma"));
        s.validate();
    } else {
        s = ImpsSpec::from_matrices(matrices_from_json(j.at("A")));
    }
    s.seed = j.value("seed", std::uint64_t(0));
    return s;
}

json to_json(const NCPolynomial& p) {
    json terms = json::array();
    for (const auto& [w, c] : p.terms()) {
        json word = json::array();
        for (int x : w) word.push_back(x + 1);
        terms.push_back(json::array({word, c.real(), c.imag()}));
    }
    return {{"d", p.d()}, {"degree", p.degree()}, {"terms", terms}};
}

NCPolynomial ncpoly_from_json(const json& j) {
    NCPolynomial p(j.at("d").get<int>(), j.at("degree").get<int>());
    for (const auto& t : j.at("terms")) {
        Word w;
        for (const auto& x : t.at(0)) w.push_back(x.get<int>() - 1);
        p.add(w, cplx(t.at(1).get<double>(), t.at(2).get<double>()));
    }
    return p;
}

json basis_manifest(const SubspaceBasis& b, const std::string& data_file) {
    json m = {{"kind", to_string(b.kind)},
              {"d", b.d},
              {"D", b.D},
              {"m", b.m},
              {"dimension", b.size()},
              {"ambient", b.ambient()},
              {"seed", b.seed},
              {"samples", b.samples},
              {"tolerance", b.tolerance},
              {"exact", b.exact},
              {"data", data_file},
              {"layout", "float64 little-endian, interleaved re/im, column-major"}};
    if (b.frame.size()) m["frame_columns"] = b.frame.cols();
    return m;
}

void write_basis(const std::string& stem, const SubspaceBasis& b) {
    const std::string bin = stem + ".bin";
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw Error("write_basis: cannot open " + bin);
    std::vector<double> buf(2 * b.vectors.rows());
    for (Eigen::Index c = 0; c < b.vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < b.vectors.rows(); ++r) {
            buf[2 * r] = b.vectors(r, c);
            buf[2 * r + 1] = 0.0;
        }
        os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    if (!os) throw Error("write_basis: write failed for " + bin);
    const std::size_t slash = bin.find_last_of('/');
    std::ofstream js(stem + ".json");
    js << basis_manifest(b, slash == std::string::npos ? bin : bin.substr(slash + 1)).dump(2) << "\n";
    if (!js) throw Error("write_basis: cannot write manifest");
}

SubspaceBasis read_basis(const std::string& stem) {
    std::ifstream js(stem + ".json");
    if (!js) throw Error("read_basis: cannot open manifest " + stem + ".json");
    const json m = json::parse(js);
    SubspaceBasis b;
    b.kind = subspace_kind_from_string(m.at("kind").get<std::string>());
    b.d = m.at("d");
    b.D = m.at("D");
    b.m = m.at("m");
    b.seed = m.value("seed", std::uint64_t(0));
    b.samples = m.value("samples", std::size_t(0));
    b.tolerance = m.value("tolerance", 0.0);
    b.exact = m.value("exact", false);
    const auto rows = m.at("ambient").get<Eigen::Index>();
    const auto cols = m.at("dimension").get<Eigen::Index>();
    std::ifstream is(stem + ".bin", std::ios::binary);
    if (!is) throw Error("read_basis: cannot open data file");
    std::vector<double> buf(2 * rows);
    b.vectors.resize(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!is) throw ShapeError("read_basis: data file is shorter than the manifest says");
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (buf[2 * r + 1] != 0.0) throw ContractViolation("read_basis: complex basis vectors are not supported");
            b.vectors(r, c) = buf[2 * r];
        }
    }
    return b;
}

void write_dims_csv(std::ostream& os, const DimTable& table) {
    std::set<int> Ds, ms;
    for (const auto& [k, v] : table) {
        Ds.insert(k.first);
        ms.insert(k.second);
    }
    os << "D";
    for (int m : ms) os << ",m=" << m;
    os << "\n";
    for (int D : Ds) {
        os << D;
        for (int m : ms) {
            const auto it = table.find({D, m});
            os << "," << (it == table.end() ? std::string("x") : it->second);
        }
        os << "\n";
    }
}

json to_json(const SdpProblem& p) {
    json cons = json::array();
    for (int k = 0; k < p.num_constraints(); ++k) {
        const BlockMatrix a = p.to_blocks(p.constraint(k));
        cons.push_back({{"A", blocks_to_json(a)}, {"b", p.rhs(k)}});
    }
    return {{"blocks", p.blocks()}, {"objective", blocks_to_json(p.objective())}, {"constraints", cons}};
}

SdpProblem sdp_problem_from_json(const json& j) {
    SdpProblem p(j.at("blocks").get<std::vector<int>>());
    BlockMatrix c;
    for (const auto& m : j.at("objective")) c.push_back(symmetric_from_json(m));
    p.set_objective(c);
    p.reserve(static_cast<int>(j.at("constraints").size()));
    for (const auto& con : j.at("constraints")) {
        BlockMatrix a;
        for (const auto& m : con.at("A")) a.push_back(symmetric_from_json(m));
        p.add_constraint(a, con.at("b").get<double>());
    }
    return p;
}

json to_json(const SdpSolution& s) {
    json j = {{"status", to_string(s.status)},
              {"primal_objective", s.primal_objective},
              {"dual_objective", s.dual_objective},
              {"gap", s.gap},
              {"primal_residual", s.primal_residual},
              {"dual_residual", s.dual_residual},
              {"iterations", s.iterations},
              {"removed_constraints", s.removed_constraints},
              {"message", s.message},
              {"X", blocks_to_json(s.X)},
              {"Z", blocks_to_json(s.Z)},
              {"y", std::vector<double>(s.y.data(), s.y.data() + s.y.size())}};
    if (s.status == SdpStatus::InfeasibleCertificate) {
        j["primal_infeasible"] = s.primal_infeasible;
        j["violation"] = s.violation;
        j["ray_y"] = std::vector<double>(s.ray_y.data(), s.ray_y.data() + s.ray_y.size());
        j["ray_X"] = blocks_to_json(s.ray_X);
    }
    return j;
}

json to_json(const WitnessBound& b) {
    return {{"value", b.value},
            {"d", b.d},
            {"D", b.D},
            {"n", b.n},
            {"cuts", b.cuts},
            {"ppt", b.ppt},
            {"span", b.span},
            {"status", to_string(b.status)},
            {"primal", b.primal},
            {"dual", b.dual},
            {"gap", b.gap},
            {"iterations", b.iterations},
            {"basis_size", b.basis_size},
            {"span_size", b.span_size},
            {"cut_ranks", b.cut_ranks},
            {"seconds", b.seconds},
            {"message", b.message}};
}

json to_json(const DualCertificate& c) {
    json g = json::array(), cm = json::array();
    for (const auto& m : c.g) g.push_back(symmetric_to_json(m));
    for (const auto& m : c.cut_matrices) cm.push_back(matrix_to_json(m));
    json j = {{"d", c.d},
              {"n", c.n},
              {"mu", c.mu},
              {"frame", matrix_to_json(c.frame)},
              {"f", symmetric_to_json(c.f)},
              {"cuts", c.cuts},
              {"cut_matrices", cm},
              {"g", g},
              {"residual", c.residual},
              {"f_min_eig", c.f_min_eig},
              {"g_pt_min_eig", c.g_pt_min_eig}};
    if (c.span_directions.size()) j["span_directions"] = matrix_to_json(c.span_directions);
    return j;
}

json to_json(const FeasibilityResult& r) {
    json j = {{"verdict", to_string(r.verdict)},
              {"separation", r.separation},
              {"solver_status", to_string(r.solution.status)},
              {"iterations", r.solution.iterations},
              {"message", r.solution.message}};
    if (r.verdict == Verdict::Infeasible)
        j["certificate"] = std::vector<double>(r.certificate.data(), r.certificate.data() + r.certificate.size());
    return j;
}

}  // namespace bondwit
