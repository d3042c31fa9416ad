#include "nare/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace nare::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_fail(const std::string& what) { throw Error(ErrorCode::Io, what); }

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Matrix<double> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) io_fail("matrix market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "array" ||
      lower(field) != "real" || lower(symmetry) != "general") {
    io_fail("matrix market: expected '%%MatrixMarket matrix array real general'");
  }
  do {
    if (!std::getline(in, line)) io_fail("matrix market: missing size line");
  } while (line.empty() || line[0] == '%');

  long rows = 0, cols = 0;
  std::istringstream sz(line);
  if (!(sz >> rows >> cols) || rows <= 0 || cols <= 0) io_fail("matrix market: bad size line");

  Matrix<double> m(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      double v;
      if (!(in >> v)) io_fail("matrix market: too few entries");
      if (!std::isfinite(v)) io_fail("matrix market: non-finite entry");
      m(i, j) = v;
    }
  }
  return m;
}

Matrix<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix<double>& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
}

void write_matrix_market(const std::string& path, const Matrix<double>& m) {
  std::ofstream out(path);
  if (!out) io_fail("cannot write " + path);
  write_matrix_market(out, m);
  if (!out) io_fail("write failed for " + path);
}

json matrix_to_json(const Matrix<double>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix<double> matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) io_fail(name + ": expected nested arrays");
  const Index rows = static_cast<Index>(j.size()), cols = static_cast<Index>(j[0].size());
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& r = j[i];
    if (!r.is_array() || static_cast<Index>(r.size()) != cols) io_fail(name + ": ragged rows");
    for (Index c = 0; c < cols; ++c) {
      if (!r[c].is_number()) io_fail(name + ": non-numeric entry");
      m(i, c) = r[c].get<double>();
    }
  }
  return m;
}

json problem_to_json(const NareProblem<double>& p, const json& metadata) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["m"] = p.m();
  j["n"] = p.n();
  j["A"] = matrix_to_json(p.A);
  j["B"] = matrix_to_json(p.B);
  j["C"] = matrix_to_json(p.C);
  j["D"] = matrix_to_json(p.D);
  j["metadata"] = metadata;
  return j;
}

NareProblem<double> problem_from_json(const json& j) {
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key)) io_fail(std::string("problem: missing field ") + key);
  NareProblem<double> p(matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"),
                        matrix_from_json(j["C"], "C"), matrix_from_json(j["D"], "D"));
  if (j.contains("m") && j["m"].get<long>() != p.m()) io_fail("problem: m does not match A");
  if (j.contains("n") && j["n"].get<long>() != p.n()) io_fail("problem: n does not match D");
  return p;
}

NareProblem<double> load_problem(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    const fs::path dir(path);
    return NareProblem<double>(read_matrix_market((dir / "A.mtx").string()),
                               read_matrix_market((dir / "B.mtx").string()),
                               read_matrix_market((dir / "C.mtx").string()),
                               read_matrix_market((dir / "D.mtx").string()));
  }
  std::ifstream in(path);
  if (!in) io_fail("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    io_fail(path + ": " + e.what());
  }
  return problem_from_json(j);
}

void save_problem_bundle(const std::string& dir, const NareProblem<double>& p) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) io_fail("cannot create " + dir);
  const fs::path d(dir);
  write_matrix_market((d / "A.mtx").string(), p.A);
  write_matrix_market((d / "B.mtx").string(), p.B);
  write_matrix_market((d / "C.mtx").string(), p.C);
  write_matrix_market((d / "D.mtx").string(), p.D);
}

json to_json(const DiagnosticsReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = r.n;
  j["m"] = r.m;
  j["gamma"] = number(r.gamma);
  j["lambda_n"] = number(r.lambda_n);
  j["lambda_n1"] = number(r.lambda_n1);
  j["gap"] = number(r.gap);
  j["cayley_gap"] = number(r.cayley_gap);
  j["sep_f_w"] = number(r.sep_f_w);
  j["relsep_w"] = number(r.relsep_w);
  j["relsep_central"] = number(r.relsep_central);
  j["delta_central"] = number(r.delta_central);
  j["cond_uv"] = number(r.cond_uv);
  j["k"] = r.k;
  j["s"] = number(r.s);
  j["gap_shifted"] = number(r.gap_shifted);
  j["cayley_gap_shifted"] = number(r.cayley_gap_shifted);
  j["relsep_w_shifted"] = number(r.relsep_w_shifted);
  j["notes"] = r.notes;
  return j;
}

json to_json(const SdaOutcome<double>& o, bool include_solution) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["steps"] = o.steps;
  j["steps_run"] = o.steps_run;
  j["converged"] = o.converged;
  j["gamma"] = o.gamma;
  j["residual"] = number(o.residual);
  j["dual_residual"] = number(o.dual_residual);
  json hist = json::array();
  for (double r : o.residual_history) hist.push_back(number(r));
  j["residual_history"] = hist;
  if (include_solution) {
    j["X"] = matrix_to_json(o.X);
    j["Y"] = matrix_to_json(o.Y);
  }
  return j;
}

json to_json(const SushiResult<double>& r, bool include_solution) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["k"] = r.central.k;
  j["k_max_reached"] = r.k_max_reached;
  j["s"] = r.plan.s;
  j["s_clamped"] = r.plan.clamped;
  json eigs = json::array();
  for (Index i = 0; i < r.central.central_eigs.size(); ++i) {
    eigs.push_back({r.central.central_eigs(i).real(), r.central.central_eigs(i).imag()});
  }
  j["central_eigs"] = eigs;
  j["xi_next_estimate"] = r.plan.xi_next;
  j["inv_iter_steps"] = r.central.inv_iter_steps;
  j["inv_iter_steps_left"] = r.central.inv_iter_steps_left;
  j["cond_uv"] = r.central.cond_uv;
  j["sda_steps"] = r.sda.steps;
  j["sda_steps_run"] = r.sda.steps_run;
  j["residual"] = number(r.solution.residual);
  j["classification"] = to_string(r.classification);
  j["timings"] = r.timings;
  if (include_solution) j["X"] = matrix_to_json(r.solution.X);
  return j;
}

std::string sci(double v, int digits) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

std::string criticality_header() {
  std::ostringstream os;
  os << std::left << std::setw(10) << "problem" << std::right << std::setw(10) << "gap(H)"
     << std::setw(11) << "relsep(W)" << std::setw(11) << "gapC(H)" << std::setw(11) << "relsep(U)"
     << std::setw(10) << "gap(Hs)" << std::setw(11) << "relsep(Ws)" << std::setw(11) << "gapC(Hs)";
  return os.str();
}

std::string criticality_row(const std::string& label, const DiagnosticsReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(10) << label << std::right << std::setw(10) << sci(r.gap)
     << std::setw(11) << sci(r.relsep_w) << std::setw(11) << sci(r.cayley_gap, 4)
     << std::setw(11) << sci(r.relsep_central) << std::setw(10) << sci(r.gap_shifted)
     << std::setw(11) << sci(r.relsep_w_shifted) << std::setw(11) << sci(r.cayley_gap_shifted);
  return os.str();
}

}  // namespace nare::io
