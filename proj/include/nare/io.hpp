#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nare/diagnostics.hpp"
#include "nare/problem.hpp"
#include "nare/subspace_shift.hpp"

namespace nare::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Dense Matrix Market, `%%MatrixMarket matrix array real general`,
/// column-major, one value per line.
Matrix<double> read_matrix_market(std::istream& in);
Matrix<double> read_matrix_market(const std::string& path);
void write_matrix_market(std::ostream& out, const Matrix<double>& m);
void write_matrix_market(const std::string& path, const Matrix<double>& m);

json matrix_to_json(const Matrix<double>& m);
Matrix<double> matrix_from_json(const json& j, const std::string& name);

/// {m, n, A, B, C, D, metadata}
json problem_to_json(const NareProblem<double>& p, const json& metadata = json::object());
NareProblem<double> problem_from_json(const json& j);

/// A JSON file, or a directory holding A.mtx, B.mtx, C.mtx, D.mtx.
NareProblem<double> load_problem(const std::string& path);
void save_problem_bundle(const std::string& dir, const NareProblem<double>& p);

json to_json(const DiagnosticsReport& r);
json to_json(const SdaOutcome<double>& o, bool include_solution = false);
json to_json(const SushiResult<double>& r, bool include_solution = false);

/// Aligned plain-text report: one line per problem, criticality before and after the shift.
std::string criticality_header();
std::string criticality_row(const std::string& label, const DiagnosticsReport& r);

/// Short scientific formatting used in tables ("4.5e-03").
std::string sci(double v, int digits = 2);

}  // namespace nare::io
