#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bondwit/errors.hpp"
#include "bondwit/io.hpp"
#include "bondwit/witness.hpp"

using namespace bondwit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitResource = 4;

using Clock = std::chrono::steady_clock;

struct RunConfig {
    std::string command;
    int d = 2;
    std::string D = "2";
    std::string m = "5..15";
    int n = 7;
    std::uint64_t seed = 1;
    std::string mode = "float";
    std::string cuts;
    bool ppt = true;
    bool span = false;
    bool imps = false;
    std::string ham = "heisenberg";
    std::string matrix;
    std::string data;
    std::string kind = "mps-span";
    std::string out;
    std::string certificate;
    std::string format = "json";
    int workers = 1;
    int D_prime = 2;
    double lambda = -1.0;
    int restarts = 32;
    int iterations = 2000;
};

json config_json(const RunConfig& c) {
    return {{"command", c.command}, {"d", c.d},           {"D", c.D},         {"m", c.m},
            {"n", c.n},             {"seed", c.seed},     {"mode", c.mode},   {"cuts", c.cuts},
            {"ppt", c.ppt},         {"span", c.span},     {"imps", c.imps},   {"ham", c.ham},
            {"matrix", c.matrix},   {"data", c.data},     {"kind", c.kind},   {"out", c.out},
            {"certificate", c.certificate},               {"format", c.format},
            {"workers", c.workers}, {"D_prime", c.D_prime}, {"lambda", c.lambda},
            {"restarts", c.restarts}, {"iterations", c.iterations}};
}

// "5..15", "3,5,7" or "4"
std::vector<int> parse_range(const std::string& s) {
    std::vector<int> out;
    if (s.empty()) return out;
    const auto dots = s.find("..");
    try {
        if (dots != std::string::npos) {
            const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
            if (b < a) throw ContractViolation("empty range " + s);
            for (int i = a; i <= b; ++i) out.push_back(i);
            return out;
        }
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    } catch (const std::logic_error&) {
        throw ContractViolation("cannot parse integer list '" + s + "'");
    }
    return out;
}

int single(const std::string& s, const char* what) {
    const auto v = parse_range(s);
    if (v.size() != 1) throw ContractViolation(std::string(what) + " must be a single integer");
    return v[0];
}

SpanOptions span_options(const RunConfig& c) {
    SpanOptions o;
    if (c.mode == "exact") o.mode = SpanMode::Exact;
    else if (c.mode != "float") throw ContractViolation("mode must be float or exact");
    if (c.workers < 1) throw ContractViolation("workers must be positive");
    o.workers = c.workers;
    return o;
}

WitnessOptions witness_options(const RunConfig& c) {
    WitnessOptions o;
    o.seed = c.seed;
    o.span = span_options(c);
    return o;
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw Error("cannot open output file " + c.out);
    os << text;
}

json envelope(const RunConfig& c, Clock::time_point t0) {
    return {{"config", config_json(c)},
            {"version", kVersion},
            {"seed", c.seed},
            {"memory_budget", memory_budget()},
            {"timings", {{"total_seconds", std::chrono::duration<double>(Clock::now() - t0).count()}}}};
}

std::string csv_header(const RunConfig& c, Clock::time_point t0) {
    return "# " + envelope(c, t0).dump() + "\n";
}

int run_table(const RunConfig& c, bool quotient) {
    const auto t0 = Clock::now();
    const auto Ds = parse_range(c.D), ms = parse_range(c.m);
    if (Ds.empty() || ms.empty()) throw ContractViolation("empty D or m range");
    for (int D : Ds)
        if (D < 1) throw ContractViolation("D must be positive");
    for (int m : ms)
        if (m < 1) throw ContractViolation("m must be positive");
    if (c.d < 2) throw ContractViolation("d must be at least 2");
    SpanOptions opt = span_options(c);
    if (c.mode != "float") opt.mode = SpanMode::Exact;

    DimTable dims, bounds;
    json rows = json::array();
    bool overrun = false;
    for (int D : Ds)
        for (int m : ms) {
            json row = {{"D", D}, {"m", m}};
            const auto ts = Clock::now();
            try {
                SeededRng rng(c.seed);
                std::size_t v;
                if (c.mode == "exact") {
                    v = quotient ? quotient_dim_exact(c.d, D, m, rng, opt) : mps_span_dim_exact(c.d, D, m, rng, opt);
                } else if (quotient) {
                    v = quotient_basis(c.d, D, m, rng, opt).basis.size();
                } else {
                    v = static_cast<std::size_t>(mps_span_basis(c.d, D, m, rng, opt).size());
                }
                dims[{D, m}] = std::to_string(v);
                row["dimension"] = v;
            } catch (const ResourceError& e) {
                overrun = true;
                dims[{D, m}] = "x";
                row["dimension"] = nullptr;
                row["error"] = e.what();
            }
            if (!quotient) {
                const std::string ub = dim_upper_bound(c.d, D, m).get_str();
                bounds[{D, m}] = ub;
                row["upper_bound"] = ub;
            }
            row["seconds"] = std::chrono::duration<double>(Clock::now() - ts).count();
            rows.push_back(row);
        }

    if (c.format == "csv") {
        std::ostringstream os;
        os << csv_header(c, t0);
        os << "# " << (quotient ? "quotient dimension" : "span dimension") << "\n";
        write_dims_csv(os, dims);
        if (!quotient) {
            os << "# upper bound\n";
            write_dims_csv(os, bounds);
        }
        emit(c, os.str());
    } else if (c.format == "json") {
        json j = envelope(c, t0);
        j["table"] = quotient ? "quotient" : "mps-span";
        j["rows"] = rows;
        emit(c, j.dump(2) + "\n");
    } else {
        throw ContractViolation("format must be json or csv");
    }
    return overrun ? kExitResource : kExitOk;
}

RMat named_term(const std::string& ham) {
    if (ham == "heisenberg") return heisenberg_term();
    if (ham == "mg") return majumdar_ghosh_term();
    throw ContractViolation("unknown Hamiltonian '" + ham + "' (heisenberg or mg)");
}

LocalHamiltonian named_chain(const std::string& ham, int n) {
    if (ham == "heisenberg") return heisenberg(n);
    if (ham == "mg") return majumdar_ghosh(n);
    throw ContractViolation("unknown Hamiltonian '" + ham + "' (heisenberg or mg)");
}

RMat read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open matrix file " + path);
    const json j = json::parse(is);
    return j.contains("lower") ? symmetric_from_json(j) : rmatrix_from_json(j);
}

int run_bound(const RunConfig& c) {
    const auto t0 = Clock::now();
    const int D = single(c.D, "D");
    const WitnessOptions opt = witness_options(c);
    const std::vector<int> cuts = parse_range(c.cuts);
    json j = envelope(c, t0);
    BoundResult r;
    double normalization = 1.0;
    bool have_certificate = true;

    if (c.imps) {
        const RMat term = c.matrix.empty() ? named_term(c.ham) : read_matrix_file(c.matrix);
        r = imps_lower_bound(term, c.d, D, c.n, cuts, c.ppt, c.span, opt);
    } else {
        LocalHamiltonian H;
        if (c.matrix.empty()) {
            H = named_chain(c.ham, c.n);
            normalization = static_cast<double>(c.n - 1);
        } else {
            H.n = c.n;
            H.d = c.d;
            HamiltonianTerm t;
            t.start = 0;
            t.width = c.n;
            t.h = read_matrix_file(c.matrix).cast<cplx>();
            H.terms.push_back(t);
        }
        if (!c.ppt && checked_pow(c.d, c.n) > 2048) {
            // large spans: the relaxation is a single projected eigenvalue
            const auto ts = Clock::now();
            r.bound.value = simplified_bound(H, D, opt);
            r.bound.d = c.d;
            r.bound.D = D;
            r.bound.n = c.n;
            r.bound.status = SdpStatus::Optimal;
            r.bound.primal = r.bound.dual = r.bound.value;
            r.bound.seconds = std::chrono::duration<double>(Clock::now() - ts).count();
            have_certificate = false;
        } else {
            r = mps_lower_bound(H, D, cuts, c.ppt, opt);
        }
    }
    j["bound"] = to_json(r.bound);
    j["normalization"] = normalization;
    j["value"] = r.bound.value / normalization;
    if (have_certificate) {
        j["certificate_residual"] = r.certificate.residual;
        if (!c.certificate.empty()) {
            std::ofstream os(c.certificate);
            if (!os) throw Error("cannot open certificate file " + c.certificate);
            os << to_json(r.certificate).dump() << "\n";
            j["certificate_path"] = c.certificate;
        }
    }
    j["timings"]["total_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    emit(c, j.dump(2) + "\n");
    return r.bound.status == SdpStatus::Optimal ? kExitOk : kExitIndeterminate;
}

// {"d", "D", "n", "cuts", "ppt", "constraints": [{"ham": "heisenberg", "scale": s} or
// {"matrix": {...}}, "value", "tolerance"}]}
int run_feasible(const RunConfig& c) {
    const auto t0 = Clock::now();
    if (c.data.empty()) throw ContractViolation("feasible needs --data");
    std::ifstream is(c.data);
    if (!is) throw Error("cannot open data file " + c.data);
    const json data = json::parse(is);
    const int d = data.value("d", c.d);
    const int D = data.contains("D") ? data.at("D").get<int>() : single(c.D, "D");
    const int n = data.value("n", c.n);
    const std::vector<int> cuts = data.contains("cuts") ? data.at("cuts").get<std::vector<int>>() : parse_range(c.cuts);
    const bool ppt = data.value("ppt", c.ppt);
    std::vector<ExpectationConstraint> cons;
    for (const auto& e : data.at("constraints")) {
        ExpectationConstraint k;
        if (e.contains("ham")) k.observable = named_chain(e.at("ham").get<std::string>(), n).dense_real() * e.value("scale", 1.0);
        else k.observable = e.at("matrix").contains("lower") ? symmetric_from_json(e.at("matrix")) : rmatrix_from_json(e.at("matrix"));
        k.target = e.at("value").get<double>();
        k.tolerance = e.value("tolerance", 0.0);
        cons.push_back(std::move(k));
    }
    const FeasibilityResult r = feasibility_test(cons, d, D, n, cuts, ppt, witness_options(c));
    json j = envelope(c, t0);
    j["problem"] = {{"d", d}, {"D", D}, {"n", n}, {"cuts", cuts}, {"ppt", ppt}, {"constraints", cons.size()}};
    j["result"] = to_json(r);
    if (!c.certificate.empty()) {
        std::ofstream os(c.certificate);
        if (!os) throw Error("cannot open certificate file " + c.certificate);
        os << to_json(r).dump() << "\n";
        j["certificate_path"] = c.certificate;
    }
    j["timings"]["total_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    emit(c, j.dump(2) + "\n");
    if (r.verdict == Verdict::Infeasible) return kExitInfeasible;
    if (r.verdict == Verdict::Indeterminate) return kExitIndeterminate;
    return kExitOk;
}

int run_basis(const RunConfig& c) {
    const auto t0 = Clock::now();
    if (c.out.empty()) throw ContractViolation("basis needs --out <stem>");
    const int D = single(c.D, "D"), m = single(c.m, "m");
    const SpanOptions opt = span_options(c);
    SeededRng rng(c.seed);
    SubspaceBasis b;
    switch (subspace_kind_from_string(c.kind)) {
        case SubspaceKind::MpsSpan: b = mps_span_basis(c.d, D, m, rng, opt); break;
        case SubspaceKind::CommutatorSpan: b = commutator_span_basis(c.d, D, m, rng, opt); break;
        case SubspaceKind::Quotient: b = quotient_basis(c.d, D, m, rng, opt).basis; break;
        case SubspaceKind::ConstrainedSpan: b = constrained_span_basis(c.d, D, m, rng, opt); break;
        case SubspaceKind::ImpsRdmSpan: b = imps_rdm_span(c.d, D, m, rng, opt); break;
    }
    write_basis(c.out, b);
    json j = envelope(c, t0);
    j["manifest"] = basis_manifest(b, c.out + ".bin");
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int run_prop1(const RunConfig& c) {
    const auto t0 = Clock::now();
    const int D = single(c.D, "D");
    SeededRng rng(c.seed);
    const Prop1Family f = prop1_hamiltonian(c.D_prime, D, c.n, c.lambda, rng, span_options(c));
    const CVec gen = build_state(f.generator, c.n);
    const CMat g = gen;
    SeededRng brng(c.seed);
    const SubspaceBasis B = mps_span_basis(2, D, c.n, brng, span_options(c));
    const RVec e0 = hermitian_eigenvalues(project_operator(f.H, B));
    const RVec e1 = hermitian_eigenvalues(project_operator(f.H_lambda, B));
    json j = envelope(c, t0);
    j["generator"] = to_json(f.generator);
    j["injectivity_k"] = f.injectivity_k;
    j["window"] = f.window;
    j["h_rank"] = std::lround(f.h.trace());
    j["lambda"] = f.lambda;
    j["generator_energy"] = (g.adjoint() * f.H_lambda.apply(g))(0, 0).real() / gen.squaredNorm();
    j["ground_energy_H"] = f.H.ground_energy();
    j["ground_energy_H_lambda"] = f.H_lambda.ground_energy();
    j["projected_min_H"] = e0(0);
    j["projected_min_H_lambda"] = e1(0);
    j["projected_spectrum_shift"] = (e0 - e1).cwiseAbs().maxCoeff();
    j["timings"]["total_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    emit(c, j.dump(2) + "\n");
    return kExitOk;
}

int run_variational(const RunConfig& c) {
    const auto t0 = Clock::now();
    const int D = single(c.D, "D");
    const RMat term = c.matrix.empty() ? named_term(c.ham) : read_matrix_file(c.matrix);
    VariationalOptions o;
    o.restarts = c.restarts;
    o.iterations = c.iterations;
    SeededRng rng(c.seed);
    const VariationalResult r = variational_upper_bound(term, c.d, D, rng, o);
    json j = envelope(c, t0);
    j["value"] = r.value;
    j["restart_values"] = r.restart_values;
    j["spec"] = to_json(r.spec);
    j["timings"]["total_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    emit(c, j.dump(2) + "\n");
    return kExitOk;
}

void apply_memory_env() {
    const char* v = std::getenv("BONDWIT_MEMORY_BUDGET");
    if (!v || !*v) return;
    char* end = nullptr;
    const unsigned long long entries = std::strtoull(v, &end, 10);
    if (*end != '\0' || entries == 0) throw ContractViolation("BONDWIT_MEMORY_BUDGET must be a positive entry count");
    set_memory_budget(static_cast<std::size_t>(entries));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bond-dimension witnesses: MPS spans, quotient spaces and SDP lower bounds"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App* s) {
        s->add_option("--d", c.d, "local dimension");
        s->add_option("--D", c.D, "bond dimension (list or range for tables)");
        s->add_option("--seed", c.seed, "master seed");
        s->add_option("--mode", c.mode, "float or exact")->check(CLI::IsMember({"float", "exact"}));
        s->add_option("--workers", c.workers, "sampling workers");
        s->add_option("--out", c.out, "output path (stdout when empty)");
    };

    auto* dims = app.add_subcommand("dims", "dimension table of the MPS span");
    common(dims);
    dims->add_option("--m", c.m, "site range, e.g. 5..15");
    dims->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* qdims = app.add_subcommand("qdims", "dimension table of the quotient spaces");
    common(qdims);
    qdims->add_option("--m", c.m, "site range");
    qdims->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* bound = app.add_subcommand("bound", "witness lower bound");
    common(bound);
    bound->add_option("--ham", c.ham, "heisenberg or mg");
    bound->add_option("--matrix", c.matrix, "JSON matrix file instead of a named Hamiltonian");
    bound->add_option("--n,--N", c.n, "chain length or window size");
    bound->add_option("--cuts", c.cuts, "cut positions, e.g. 5,6");
    bound->add_flag("--ppt,!--no-ppt", c.ppt, "impose the cut-and-glue PPT constraints");
    bound->add_flag("--span", c.span, "restrict to the span of iMPS reduced density matrices");
    bound->add_flag("--imps", c.imps, "translation-invariant hierarchy for a local term");
    bound->add_option("--certificate", c.certificate, "write the dual certificate here");

    auto* feas = app.add_subcommand("feasible", "feasibility of expectation-value data");
    common(feas);
    feas->add_option("--data", c.data, "constraint file")->required();
    feas->add_option("--n", c.n, "chain length (overridden by the file)");
    feas->add_option("--cuts", c.cuts, "cut positions");
    feas->add_flag("--ppt,!--no-ppt", c.ppt, "impose the PPT constraints");
    feas->add_option("--certificate", c.certificate, "write the verdict and certificate here");

    auto* basis = app.add_subcommand("basis", "export a subspace basis");
    common(basis);
    basis->add_option("--kind", c.kind, "mps-span, commutator-span, quotient, imps-rdm-span, constrained-span");
    basis->add_option("--m", c.m, "number of sites");

    auto* prop1 = app.add_subcommand("prop1", "separating Hamiltonian family demonstration");
    common(prop1);
    prop1->add_option("--Dp", c.D_prime, "bond dimension of the generating MPS");
    prop1->add_option("--n", c.n, "chain length");
    prop1->add_option("--lambda", c.lambda, "coupling (<= 0 selects the default)");

    auto* var = app.add_subcommand("variational", "Nelder-Mead upper bound over iMPS");
    common(var);
    var->add_option("--ham", c.ham, "heisenberg or mg");
    var->add_option("--matrix", c.matrix, "JSON matrix file for the local term");
    var->add_option("--restarts", c.restarts, "number of restarts");
    var->add_option("--iterations", c.iterations, "iterations per restart");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        apply_memory_env();
        c.command = app.get_subcommands().front()->get_name();
        if (*dims) return run_table(c, false);
        if (*qdims) return run_table(c, true);
        if (*bound) return run_bound(c);
        if (*feas) return run_feasible(c);
        if (*basis) return run_basis(c);
        if (*prop1) return run_prop1(c);
        if (*var) return run_variational(c);
    } catch (const ResourceError& e) {
        std::cerr << "resource overrun: " << e.what() << "\n";
        return kExitResource;
    } catch (const SolverError& e) {
        std::cerr << "solver: " << e.what() << "\n";
        return kExitIndeterminate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
