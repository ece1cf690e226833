#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "bondwit/mps.hpp"
#include "bondwit/ncpoly.hpp"
#include "bondwit/sdp.hpp"
#include "bondwit/span.hpp"
#include "bondwit/witness.hpp"

namespace bondwit {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

/// Dense matrices: {"rows", "cols", "re": [[...]], "im": [[...]]}, row-major.
json matrix_to_json(const CMat& m);
json matrix_to_json(const RMat& m);
CMat cmatrix_from_json(const json& j);
RMat rmatrix_from_json(const json& j);

/// Symmetric matrices: {"n", "lower": [...]} with the lower triangle row-major.
json symmetric_to_json(const RMat& m);
RMat symmetric_from_json(const json& j);

json to_json(const MpsSpec& s);
MpsSpec mps_spec_from_json(const json& j);
json to_json(const ImpsSpec& s);
ImpsSpec imps_spec_from_json(const json& j);

/// {"d", "degree", "terms": [[[w1, ..., wm], re, im], ...]} with 1-based letters.
json to_json(const NCPolynomial& p);
NCPolynomial ncpoly_from_json(const json& j);

/// Basis container: `<stem>.bin` holds the columns as little-endian float64
/// interleaved (re, im), column after column; `<stem>.json` is the manifest.
void write_basis(const std::string& stem, const SubspaceBasis& b);
SubspaceBasis read_basis(const std::string& stem);
json basis_manifest(const SubspaceBasis& b, const std::string& data_file);

/// Table cells keyed by (D, m); missing cells are written as "x".
using DimTable = std::map<std::pair<int, int>, std::string>;
void write_dims_csv(std::ostream& os, const DimTable& table);

json to_json(const SdpProblem& p);
SdpProblem sdp_problem_from_json(const json& j);
json to_json(const SdpSolution& s);

json to_json(const WitnessBound& b);
json to_json(const DualCertificate& c);

json to_json(const FeasibilityResult& r);

}  // namespace bondwit
