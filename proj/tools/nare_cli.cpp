#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nare/generators.hpp"
#include "nare/io.hpp"
#include "nare/subspace_shift.hpp"

namespace {

using nare::io::json;

enum Exit { kOk = 0, kGeneric = 1, kBreakdown = 2, kNoConvergence = 3, kClassification = 4, kIo = 5 };

int exit_code_for(nare::ErrorCode c) {
  switch (c) {
    case nare::ErrorCode::Breakdown:
    case nare::ErrorCode::InitSingular:
      return kBreakdown;
    case nare::ErrorCode::NoConvergence:
      return kNoConvergence;
    case nare::ErrorCode::NotMMatrix:
    case nare::ErrorCode::ClassificationAmbiguous:
      return kClassification;
    case nare::ErrorCode::Io:
      return kIo;
    default:
      return kGeneric;
  }
}

struct Source {
  std::string input;
  std::string family = "transport";
  int n = 4;
  std::optional<double> beta;
  double alpha = 1e-3;
  double c = 1.0;
  std::uint64_t seed = 1;
  int panel_points = 4;
};

struct Common {
  Source src;
  std::string format = "json";
  bool trace = false;
  bool force = false;
  bool single = false;
  bool with_solution = false;
  std::optional<double> tol;
  std::optional<int> max_steps;
  std::optional<double> gamma;
  std::optional<int> k;
  std::optional<double> s;
};

void add_source_options(CLI::App* cmd, Source& src) {
  cmd->add_option("--input", src.input, "problem file (JSON) or directory with A/B/C/D.mtx");
  cmd->add_option("--family", src.family, "generator family")->check(CLI::IsMember({"transport", "random"}));
  cmd->add_option("--n", src.n, "problem size")->check(CLI::PositiveNumber);
  cmd->add_option("--beta", src.beta, "transport: (alpha, c) = (beta, 1 - beta)");
  cmd->add_option("--alpha", src.alpha, "transport alpha or random-family alpha");
  cmd->add_option("--c", src.c, "transport c");
  cmd->add_option("--seed", src.seed, "random-family seed");
  cmd->add_option("--panel-points", src.panel_points, "transport: Gauss points per panel");
}

void add_solver_options(CLI::App* cmd, Common& o) {
  add_source_options(cmd, o.src);
  cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--tol", o.tol, "SDA stopping tolerance");
  cmd->add_option("--max-steps", o.max_steps, "SDA step limit");
  cmd->add_option("--gamma", o.gamma, "override gamma*");
  cmd->add_flag("--trace", o.trace, "per-step JSON lines on stderr");
  cmd->add_flag("--force", o.force, "skip the M-matrix check");
  cmd->add_flag("--float", o.single, "run in single precision");
  cmd->add_flag("--solution", o.with_solution, "include X in the JSON report");
}

json source_metadata(const Source& s) {
  json meta;
  meta["generator_version"] = nare::kGeneratorVersion;
  if (!s.input.empty()) {
    meta["family"] = "file";
    meta["path"] = s.input;
    return meta;
  }
  meta["family"] = s.family;
  if (s.family == "transport") {
    meta["parameters"] = {{"n", s.n}, {"alpha", s.beta ? *s.beta : s.alpha},
                          {"c", s.beta ? 1.0 - *s.beta : s.c}, {"panel_points", s.panel_points}};
  } else {
    meta["parameters"] = {{"n", s.n}, {"alpha", s.alpha}};
    meta["seed"] = s.seed;
    meta["random_engine"] = nare::kRandomEngine;
  }
  return meta;
}

nare::NareProblem<double> load(const Source& s) {
  if (!s.input.empty()) return nare::io::load_problem(s.input);
  if (s.family == "transport") {
    nare::TransportSpec spec = s.beta ? nare::TransportSpec::from_beta(s.n, *s.beta)
                                      : nare::TransportSpec{s.n, s.alpha, s.c, s.panel_points};
    spec.panel_points = s.panel_points;
    return nare::transport_problem(spec);
  }
  return nare::random_mnare({s.n, s.alpha, s.seed});
}

template <typename S>
nare::SdaConfig<S> sda_config(const Common& o) {
  nare::SdaConfig<S> cfg;
  if (o.tol) cfg.tol = static_cast<S>(*o.tol);
  if (o.max_steps) cfg.max_steps = *o.max_steps;
  if (o.gamma) cfg.gamma = static_cast<S>(*o.gamma);
  return cfg;
}

template <typename S>
nare::SdaTrace<S> tracer(const Common& o) {
  if (!o.trace) return {};
  return [](const nare::SdaTraceRecord<S>& r) {
    json j = {{"step", r.step},
              {"relative_change", double(r.relative_change)},
              {"residual", double(r.residual)},
              {"condition", double(r.condition)}};
    std::cerr << j.dump() << "\n";
  };
}

template <typename S>
nare::SdaOutcome<double> widen(const nare::SdaOutcome<S>& o) {
  nare::SdaOutcome<double> w;
  w.X = o.X.template cast<double>();
  w.Y = o.Y.template cast<double>();
  w.steps = o.steps;
  w.steps_run = o.steps_run;
  for (S r : o.residual_history) w.residual_history.push_back(r);
  w.residual = o.residual;
  w.best_residual = o.best_residual;
  w.dual_residual = o.dual_residual;
  w.gamma = o.gamma;
  w.converged = o.converged;
  return w;
}

void check_mmatrix(const nare::NareProblem<double>& p, bool force) {
  if (force) return;
  if (nare::classify_mmatrix<double>(nare::build_m(p)).tag == nare::MMatrixTag::NotM) {
    throw nare::Error(nare::ErrorCode::NotMMatrix, "coefficient matrix is not an M-matrix (use --force)",
                      "classify");
  }
}

std::string g(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit_sda(const Common& o, const nare::SdaOutcome<double>& out) {
  if (o.format == "json") {
    std::cout << nare::io::to_json(out, o.with_solution).dump(2) << "\n";
  } else if (o.format == "csv") {
    std::cout << "steps,steps_run,residual,gamma,converged\n"
              << out.steps << "," << out.steps_run << "," << g(out.residual) << "," << g(out.gamma) << ","
              << (out.converged ? 1 : 0) << "\n";
  } else {
    std::cout << "steps      " << out.steps << " (" << out.steps_run << " run)\n"
              << "residual   " << nare::io::sci(out.residual) << "\n"
              << "gamma      " << g(out.gamma) << "\n";
  }
}

int cmd_solve(const Common& o) {
  const auto p = load(o.src);
  check_mmatrix(p, o.force);
  if (o.single) {
    emit_sda(o, widen(nare::sda_solve<float>(p.cast<float>(), sda_config<float>(o), tracer<float>(o))));
  } else {
    emit_sda(o, nare::sda_solve<double>(p, sda_config<double>(o), tracer<double>(o)));
  }
  return kOk;
}

template <typename S>
nare::SushiOptions<S> sushi_options(const Common& o) {
  nare::SushiOptions<S> opt;
  if (o.k) opt.k = *o.k;
  if (o.s) opt.s = static_cast<S>(*o.s);
  opt.sda = sda_config<S>(o);
  opt.force = o.force;
  return opt;
}

template <typename S>
json sushi_report(const nare::SushiResult<S>& r, bool with_solution) {
  json j;
  j["schema_version"] = nare::io::kSchemaVersion;
  j["k"] = r.central.k;
  j["k_max_reached"] = r.k_max_reached;
  j["s"] = double(r.plan.s);
  j["s_clamped"] = r.plan.clamped;
  json eigs = json::array();
  for (Eigen::Index i = 0; i < r.central.central_eigs.size(); ++i)
    eigs.push_back({double(r.central.central_eigs(i).real()), double(r.central.central_eigs(i).imag())});
  j["central_eigs"] = eigs;
  j["inv_iter_steps"] = r.central.inv_iter_steps;
  j["cond_uv"] = double(r.central.cond_uv);
  j["sda_steps"] = r.sda.steps;
  j["residual"] = double(r.solution.residual);
  j["classification"] = nare::to_string(r.classification);
  j["timings"] = r.timings;
  if (with_solution) j["X"] = nare::io::matrix_to_json(r.solution.X.template cast<double>());
  return j;
}

int cmd_sushi(const Common& o) {
  const auto p = load(o.src);
  json j = o.single ? sushi_report(nare::sushi_solve<float>(p.cast<float>(), sushi_options<float>(o), tracer<float>(o)),
                                   o.with_solution)
                    : sushi_report(nare::sushi_solve<double>(p, sushi_options<double>(o), tracer<double>(o)),
                                   o.with_solution);
  if (o.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    std::cout << "k,s,inv_iter_steps,sda_steps,residual,cond_uv\n"
              << j["k"] << "," << g(j["s"]) << "," << j["inv_iter_steps"] << "," << j["sda_steps"] << ","
              << g(j["residual"]) << "," << g(j["cond_uv"]) << "\n";
  } else {
    std::cout << "k          " << j["k"] << "\n"
              << "s          " << g(j["s"]) << "\n"
              << "orth its   " << j["inv_iter_steps"] << "\n"
              << "SDA steps  " << j["sda_steps"] << "\n"
              << "residual   " << nare::io::sci(j["residual"]) << "\n";
  }
  return kOk;
}

int cmd_diagnose(const Common& o) {
  const auto p = load(o.src);
  const auto r = nare::diagnose<double>(p, o.k.value_or(2), true, o.s);
  if (o.format == "json") {
    std::cout << nare::io::to_json(r).dump(2) << "\n";
  } else if (o.format == "csv") {
    std::cout << "gap,relsep_w,cayley_gap,relsep_central,gap_shifted,relsep_w_shifted,cayley_gap_shifted\n"
              << g(r.gap) << "," << g(r.relsep_w) << "," << g(r.cayley_gap) << "," << g(r.relsep_central) << ","
              << g(r.gap_shifted) << "," << g(r.relsep_w_shifted) << "," << g(r.cayley_gap_shifted) << "\n";
  } else {
    std::cout << nare::io::criticality_header() << "\n" << nare::io::criticality_row("problem", r) << "\n";
    for (const auto& note : r.notes) std::cout << "note: " << note << "\n";
  }
  return kOk;
}

int cmd_gen(const Source& src, const std::string& out, const std::string& bundle) {
  const auto p = load(src);
  if (!bundle.empty()) nare::io::save_problem_bundle(bundle, p);
  const std::string text = nare::io::problem_to_json(p, source_metadata(src)).dump() + "\n";
  if (out.empty()) {
    if (bundle.empty()) std::cout << text;
    return kOk;
  }
  std::ofstream f(out);
  if (!(f << text)) throw nare::Error(nare::ErrorCode::Io, "cannot write " + out);
  return kOk;
}

struct BenchCell {
  int n = 0;
  double param = 0;
  std::uint64_t seed = 0;
  std::string row;
};

std::string bench_row(const Source& base, const Common& o, BenchCell& cell) {
  Source src = base;
  src.n = cell.n;
  if (src.family == "transport") {
    src.beta = cell.param;
  } else {
    src.alpha = cell.param;
    src.seed = cell.seed;
  }
  std::ostringstream row;
  row << cell.n << "," << g(cell.param) << "," << (src.family == "random" ? std::to_string(cell.seed) : "");
  std::string gap, delta, sda_its, sda_res, su_its, orth_its, su_res, err;
  try {
    const auto p = load(src);
    const auto h = nare::build_h(p);
    const auto sp = nare::ordered_spectrum(h);
    gap = g(nare::gap_of(sp));
    Eigen::VectorXcd central(2);
    central << sp.lambda_n(), sp.lambda_n1();
    delta = g(nare::delta_central<double>(h.matrix(), central));
    try {
      const auto sda = nare::sda_solve<double>(p, sda_config<double>(o));
      sda_its = std::to_string(sda.steps);
      sda_res = nare::io::sci(sda.residual);
    } catch (const nare::Error& e) {
      err += std::string("sda:") + nare::to_string(e.code()) + ";";
    }
    try {
      const auto su = nare::sushi_solve<double>(p, sushi_options<double>(o));
      su_its = std::to_string(su.sda.steps);
      orth_its = std::to_string(su.central.inv_iter_steps);
      su_res = nare::io::sci(su.solution.residual);
    } catch (const nare::Error& e) {
      err += std::string("sushi:") + nare::to_string(e.code()) + ";";
    }
  } catch (const nare::Error& e) {
    err += std::string("problem:") + nare::to_string(e.code()) + ";";
  }
  row << "," << gap << "," << delta << "," << sda_its << "," << sda_res << "," << su_its << "," << orth_its << ","
      << su_res << "," << err;
  return row.str();
}

int cmd_bench(const Common& o, const std::vector<int>& ns, std::vector<double> params,
              std::vector<std::uint64_t> seeds, unsigned threads) {
  const bool transport = o.src.family == "transport";
  if (params.empty()) params = transport ? std::vector<double>{1e-3, 1e-6, 1e-12} : std::vector<double>{1e-3};
  if (transport || seeds.empty()) seeds = {o.src.seed};
  std::vector<BenchCell> cells;
  for (int n : ns)
    for (double prm : params)
      for (auto sd : seeds) cells.push_back({n, prm, sd, {}});

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < cells.size(); i += threads) cells[i].row = bench_row(o.src, o, cells[i]);
    });
  }
  for (auto& th : pool) th.join();

  std::cout << "n," << (transport ? "beta" : "alpha")
            << ",seed,gap,delta,sda_its,sda_res,sushi_its,orth_its,sushi_res,error\n";
  for (const auto& c : cells) std::cout << c.row << "\n";
  return kOk;
}

int report_error(const nare::Error& e, const std::string& format) {
  const int code = exit_code_for(e.code());
  std::cerr << "error";
  if (!e.stage().empty()) std::cerr << " [" << e.stage() << "]";
  std::cerr << ": " << e.what() << "\n";
  if (format == "json") {
    json j = {{"schema_version", nare::io::kSchemaVersion},
              {"error", {{"code", nare::to_string(e.code())}, {"exit_code", code}, {"message", e.what()}}}};
    if (!e.stage().empty()) j["error"]["stage"] = e.stage();
    std::cout << j.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"M-NARE solver: structured doubling and subspace shift"};
  app.require_subcommand(1);

  Common gen_opt;
  std::string gen_out, gen_bundle;
  auto* gen = app.add_subcommand("gen", "generate a benchmark problem");
  add_source_options(gen, gen_opt.src);
  gen->add_option("--out", gen_out, "write JSON here instead of stdout");
  gen->add_option("--bundle", gen_bundle, "also write A/B/C/D.mtx into this directory");

  Common solve_opt;
  auto* solve = app.add_subcommand("solve", "plain SDA");
  add_solver_options(solve, solve_opt);

  Common sushi_opt;
  auto* sushi = app.add_subcommand("sushi", "subspace shift followed by SDA");
  add_solver_options(sushi, sushi_opt);
  sushi->add_option("--k", sushi_opt.k, "central subspace dimension (detected when omitted)");
  sushi->add_option("--s", sushi_opt.s, "shift parameter (estimated when omitted)");

  Common diag_opt;
  auto* diag = app.add_subcommand("diagnose", "criticality measures before and after the shift");
  add_source_options(diag, diag_opt.src);
  diag->add_option("--format", diag_opt.format)->check(CLI::IsMember({"json", "csv", "table"}));
  diag->add_option("--k", diag_opt.k);
  diag->add_option("--s", diag_opt.s);

  Common bench_opt;
  bench_opt.format = "csv";
  std::vector<int> bench_ns;
  std::vector<double> bench_params;
  std::vector<std::uint64_t> bench_seeds;
  unsigned bench_threads = 0;
  auto* bench = app.add_subcommand("bench", "SDA vs SuShi over a parameter grid (CSV)");
  bench->add_option("--family", bench_opt.src.family)->check(CLI::IsMember({"transport", "random"}));
  bench->add_option("--n", bench_ns, "sizes")->delimiter(',')->required();
  bench->add_option("--params", bench_params, "beta (transport) or alpha (random) values")->delimiter(',');
  bench->add_option("--seeds", bench_seeds, "random-family seeds")->delimiter(',');
  bench->add_option("--threads", bench_threads, "worker threads (0 = hardware)");
  bench->add_option("--tol", bench_opt.tol);
  bench->add_option("--max-steps", bench_opt.max_steps);

  CLI11_PARSE(app, argc, argv);

  std::string format = "json";
  try {
    if (*gen) return cmd_gen(gen_opt.src, gen_out, gen_bundle);
    if (*solve) {
      format = solve_opt.format;
      return cmd_solve(solve_opt);
    }
    if (*sushi) {
      format = sushi_opt.format;
      return cmd_sushi(sushi_opt);
    }
    if (*diag) {
      format = diag_opt.format;
      return cmd_diagnose(diag_opt);
    }
    if (*bench) {
      format = "csv";
      return cmd_bench(bench_opt, bench_ns, bench_params, bench_seeds, bench_threads);
    }
  } catch (const nare::Error& e) {
    return report_error(e, format);
  } catch (const std::exception& e) {
    return report_error(nare::Error(nare::ErrorCode::InvalidArgument, e.what()), format);
  }
  return kOk;
}
