#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nare/diagnostics.hpp"
#include "nare/generators.hpp"
#include "nare/sda.hpp"

namespace nare {

template <typename S>
Matrix<S> seeded_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  PortableUniform rng(seed);
  Matrix<S> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<S>(2.0 * rng() - 1.0);
  return orthonormalize(m);
}

/// Estimates |xi_{k+1}|, the smallest eigenvalue modulus of H outside the
/// invariant subspace span(V), by power iteration with (I - V V^T) H^{-1}.
template <typename S>
S estimate_next_modulus(const LuFactor<S>& lu, const Matrix<S>& v, int steps = 6,
                        std::uint64_t seed = 2) {
  const Index dim = v.rows();
  Vector<S> w = seeded_orthonormal<S>(dim, 1, seed).col(0);
  auto project = [&](const Vector<S>& x) -> Vector<S> { return x - v * (v.transpose() * x); };
  w = project(w);
  w /= w.norm();
  std::vector<S> growth;
  for (int i = 0; i < steps; ++i) {
    Vector<S> y = project(lu.solve(w));
    const S nr = y.norm();
    if (!(nr > S(0))) break;
    growth.push_back(nr);
    w = y / nr;
  }
  if (growth.empty()) return std::numeric_limits<S>::infinity();
  const std::size_t take = std::min<std::size_t>(3, growth.size());
  S logsum = S(0);
  for (std::size_t i = growth.size() - take; i < growth.size(); ++i) logsum += std::log(growth[i]);
  return S(1) / std::exp(logsum / static_cast<S>(take));
}

template <typename S>
struct OrthIteration {
  Matrix<S> Q;
  int steps = 0;
  bool converged = false;
  S t_estimate = S(1);       // |xi_k| / |xi_{k+1}|
  S next_modulus = S(0);     // estimated |xi_{k+1}|
  std::vector<S> residuals;  // invariant-subspace residual per step
  std::vector<S> distances;  // distance between successive iterates
};

/// Inverse orthogonal iteration Q_{j+1} R = H^{-1} Q_j from a seeded start.
/// Stops when ||H Q - Q (Q^T H Q)||_F / ||H||_F <= tol.
template <typename S>
OrthIteration<S> inverse_orthogonal_iteration(const Matrix<S>& h, Index k,
                                              S tol = precision_floor<S>(1e-14, 4),
                                              int max_iters = 100, std::uint64_t seed = 1) {
  require(h.rows() == h.cols(), "inverse_orthogonal_iteration: H must be square");
  require(k >= 1 && k < h.rows(), "inverse_orthogonal_iteration: k out of range");
  // Near-critical H is nearly singular by construction; only a zero pivot stops us.
  const LuFactor<S> lu(h);
  if (lu.exactly_singular()) {
    throw Error(ErrorCode::SingularH, "inverse_orthogonal_iteration: H is singular");
  }

  OrthIteration<S> out;
  const S hn = h.norm();
  Matrix<S> q = seeded_orthonormal<S>(h.rows(), k, seed);
  Matrix<S> best_q = q;
  S best = std::numeric_limits<S>::infinity();
  int since_best = 0, best_step = 0;
  for (int j = 1; j <= max_iters; ++j) {
    Matrix<S> qn = orthonormalize<S>(lu.solve(q));
    out.distances.push_back(subspace_distance(qn, q));
    q = std::move(qn);
    const Matrix<S> hq = h * q;
    const S r = (hq - q * (q.transpose() * hq)).norm() / hn;
    out.residuals.push_back(r);
    if (r < best) {
      best = r;
      best_q = q;
      best_step = j;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (r <= tol) {
      out.converged = true;
      break;
    }
    // Roundoff floor above tol (low precision, large H): accept the best
    // iterate once it stops improving.
    if (since_best >= 3 && best <= S(1e3) * tol) {
      out.converged = true;
      break;
    }
  }
  out.Q = best_q;
  out.steps = best_step;
  q = best_q;

  const Spectrum<S> ritz = eigenvalues<S>(q.transpose() * h * q);
  const S xik = ritz.cwiseAbs().maxCoeff();
  out.next_modulus = estimate_next_modulus(lu, q);
  out.t_estimate = out.next_modulus > S(0) ? xik / out.next_modulus : S(1);
  return out;
}

template <typename S>
struct CentralSubspaces {
  Matrix<S> V;  // right
  Matrix<S> U;  // left
  Index k = 0;
  Spectrum<S> central_eigs;  // of V^T H V, nondecreasing modulus
  int inv_iter_steps = 0;    // iteration on H
  int inv_iter_steps_left = 0;
  S rate_estimate_t = S(1);
  S next_modulus = S(0);
  S cond_uv = S(1);
  S h_norm = S(0);
};

template <typename S>
struct CentralPairOptions {
  S tol = precision_floor<S>(1e-14, 4);
  int max_iters = 100;
  S max_cond_uv = S(1e8);
};

template <typename S>
CentralSubspaces<S> compute_central_pair(const Matrix<S>& h, Index k,
                                         const CentralPairOptions<S>& opt = {}) {
  const OrthIteration<S> right = inverse_orthogonal_iteration<S>(h, k, opt.tol, opt.max_iters);
  if (!right.converged) {
    throw Error(ErrorCode::NoConvergence,
                "central pair: right iteration did not converge in " + std::to_string(opt.max_iters));
  }
  const Matrix<S> ht = h.transpose();
  const OrthIteration<S> left = inverse_orthogonal_iteration<S>(ht, k, opt.tol, opt.max_iters);
  if (!left.converged) {
    throw Error(ErrorCode::NoConvergence,
                "central pair: left iteration did not converge in " + std::to_string(opt.max_iters));
  }
  CentralSubspaces<S> cs;
  cs.V = right.Q;
  cs.U = left.Q;
  cs.k = k;
  cs.central_eigs = sort_by_modulus<S>(eigenvalues<S>(cs.V.transpose() * h * cs.V));
  cs.inv_iter_steps = right.steps;
  cs.inv_iter_steps_left = left.steps;
  cs.rate_estimate_t = right.t_estimate;
  cs.next_modulus = right.next_modulus;
  cs.h_norm = h.norm();
  cs.cond_uv = cond_uv(cs.U, cs.V);
  if (!(cs.cond_uv <= opt.max_cond_uv)) {
    throw Error(ErrorCode::CentralPairIllConditioned,
                "central pair: cond(U^T V) = " + std::to_string(double(cs.cond_uv)));
  }
  return cs;
}

template <typename S>
struct KDetection {
  Index k = 2;
  S t_estimate = S(1);
  bool k_max_reached = false;
};

/// Smallest k >= k0 whose probe iteration predicts rate t <= slow_threshold.
template <typename S>
KDetection<S> detect_k(const Matrix<S>& h, Index k0 = 2, Index k_max = 8,
                       S slow_threshold = S(0.5), int probe_iters = 8) {
  require(k0 >= 2, "detect_k: k0 must be at least 2");
  k_max = std::min<Index>(k_max, h.rows() - 1);
  require(k_max >= k0, "detect_k: k_max below k0");
  KDetection<S> out;
  for (Index k = k0; k <= k_max; ++k) {
    const OrthIteration<S> probe = inverse_orthogonal_iteration<S>(h, k, S(0), probe_iters);
    out.k = k;
    out.t_estimate = probe.t_estimate;
    if (probe.t_estimate <= slow_threshold) return out;
  }
  out.k_max_reached = true;
  return out;
}

template <typename S>
struct ShiftPlan {
  S s = S(0);
  Index k = 0;
  S xi_1 = S(0);
  S xi_k = S(0);
  S xi_next = S(0);
  bool clamped = false;
  bool explicit_s = false;
};

struct ShiftLimits {
  double s_min = 0.1;
  double s_max = 1e6;
};

/// s = |xi_{k+1}| / |xi_1| - 1, clamped to [s_min, s_max].
template <typename S>
ShiftPlan<S> choose_shift_s(const CentralSubspaces<S>& cs, std::optional<S> explicit_s = {},
                            ShiftLimits lim = {}) {
  require(cs.central_eigs.size() >= 1, "choose_shift_s: no central eigenvalues");
  ShiftPlan<S> plan;
  plan.k = cs.k;
  plan.xi_1 = std::abs(cs.central_eigs(0));
  plan.xi_k = std::abs(cs.central_eigs(cs.central_eigs.size() - 1));
  plan.xi_next = cs.next_modulus;
  if (explicit_s) {
    require(*explicit_s > S(0) && std::isfinite(double(*explicit_s)), "choose_shift_s: s must be positive");
    plan.s = *explicit_s;
    plan.explicit_s = true;
    return plan;
  }
  if (plan.xi_1 < machine_eps<S>() * cs.h_norm) {
    throw Error(ErrorCode::DegenerateSpectrum, "choose_shift_s: |xi_1| is at roundoff level");
  }
  S s = plan.xi_next / plan.xi_1 - S(1);
  if (!std::isfinite(double(s)) || s < S(lim.s_min)) {
    s = S(lim.s_min);
    plan.clamped = true;
  } else if (s > S(lim.s_max)) {
    s = S(lim.s_max);
    plan.clamped = true;
  }
  plan.s = s;
  return plan;
}

/// H (I + s V (U^T V)^{-1} U^T), assembled as H + s V (V^T H V) (U^T V)^{-1} U^T,
/// which is the same matrix when span(V) is H-invariant.
template <typename S>
Matrix<S> build_shifted_matrix(const Matrix<S>& h, const Matrix<S>& u, const Matrix<S>& v, S s) {
  require(u.rows() == h.rows() && v.rows() == h.rows() && u.cols() == v.cols(),
          "build_shifted_h: U, V do not match H");
  if (s == S(0)) return h;
  const LuFactor<S> lu(Matrix<S>(u.transpose() * v));
  if (lu.singular()) throw Error(ErrorCode::UVSingular, "build_shifted_h: U^T V is singular");
  const Matrix<S> t = v.transpose() * h * v;
  // (U^T V)^{-1} U^T
  const Matrix<S> mu = lu.solve(u.transpose());
  return h + s * (v * (t * mu));
}

template <typename S>
LinearizingMatrix<S> build_shifted_h(const LinearizingMatrix<S>& h, const CentralSubspaces<S>& cs, S s) {
  return LinearizingMatrix<S>(build_shifted_matrix(h.matrix(), cs.U, cs.V, s), h.n(), h.m());
}

/// Brauer rank-one shift H + s v u^T / (u^T v).
template <typename S>
Matrix<S> classical_shift(const Matrix<S>& h, const Vector<S>& v, const Vector<S>& u, S s) {
  require(v.size() == h.rows() && u.size() == h.rows(), "classical_shift: vector sizes");
  const S uv = u.dot(v);
  if (!(std::abs(uv) >= S(1e-12) * u.norm() * v.norm())) {
    throw Error(ErrorCode::OrthogonalPair, "classical_shift: u^T v vanishes");
  }
  return h + (s / uv) * v * u.transpose();
}

template <typename S>
struct SushiOptions {
  std::optional<Index> k;  // fixed k; detected when empty
  Index k0 = 2;
  Index k_max = 8;
  S slow_threshold = S(0.5);
  std::optional<S> s;
  ShiftLimits limits;
  CentralPairOptions<S> central;
  SdaConfig<S> sda;
  bool force = false;  // skip the M-matrix precondition
};

template <typename S>
struct SushiResult {
  Solution<S> solution;
  CentralSubspaces<S> central;
  ShiftPlan<S> plan;
  SdaOutcome<S> sda;
  MMatrixTag classification = MMatrixTag::NotM;
  bool k_max_reached = false;
  std::map<std::string, double> timings;  // seconds per stage
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, std::map<std::string, double>& timings, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto r = f();
    timings[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

}  // namespace detail

template <typename S>
SushiResult<S> sushi_solve(const NareProblem<S>& p, const SushiOptions<S>& opt = {},
                           const SdaTrace<S>& trace = {}) {
  SushiResult<S> out;
  auto& tm = out.timings;
  const LinearizingMatrix<S> h = build_h(p);

  out.classification = detail::run_stage("classify", tm, [&] {
    const MMatrixTag tag = classify_mmatrix<S>(build_m(p)).tag;
    if (tag == MMatrixTag::NotM && !opt.force) {
      throw Error(ErrorCode::NotMMatrix, "sushi: coefficient matrix is not an M-matrix");
    }
    return tag;
  });

  const Index k = detail::run_stage("detect_k", tm, [&] {
    if (opt.k) return *opt.k;
    const KDetection<S> kd = detect_k<S>(h.matrix(), opt.k0, opt.k_max, opt.slow_threshold);
    out.k_max_reached = kd.k_max_reached;
    return kd.k;
  });

  out.central = detail::run_stage("central_pair", tm, [&] {
    return compute_central_pair<S>(h.matrix(), k, opt.central);
  });
  out.plan = detail::run_stage("choose_s", tm, [&] {
    return choose_shift_s<S>(out.central, opt.s, opt.limits);
  });
  const LinearizingMatrix<S> hs = detail::run_stage("shift", tm, [&] {
    return build_shifted_h(h, out.central, out.plan.s);
  });

  SdaConfig<S> cfg = opt.sda;
  if (!cfg.gamma) cfg.gamma = gamma_star(p);
  out.sda = detail::run_stage("sda", tm, [&] { return sda_solve(hs.blocks(), p, cfg, trace); });

  out.solution.X = out.sda.X;
  out.solution.residual = relative_residual(p, out.sda.X);
  out.solution.iterations = out.sda.steps;
  return out;
}

/// Criticality of H, of the central
/// subspace, and of the shifted matrix (with s from the exact spectrum when
/// `exact_s` is set).
template <typename S>
DiagnosticsReport diagnose(const NareProblem<S>& p, Index k = 2, bool exact_s = true,
                           std::optional<S> explicit_s = {}) {
  DiagnosticsReport r;
  r.n = static_cast<int>(p.n());
  r.m = static_cast<int>(p.m());
  r.k = static_cast<int>(k);
  const LinearizingMatrix<S> h = build_h(p);
  const S gamma = gamma_star(p);
  r.gamma = gamma;

  const OrderedSpectrum<S> sp = ordered_spectrum(h);
  r.lambda_n = sp.lambda_n().real();
  r.lambda_n1 = sp.lambda_n1().real();
  r.gap = gap_of(sp);
  r.cayley_gap = cayley_rate(sp, gamma);

  std::optional<Matrix<S>> w;
  try {
    const SdaOutcome<S> sol = sda_solve(p);
    Matrix<S> basis(p.n() + p.m(), p.n());
    basis << Matrix<S>::Identity(p.n(), p.n()), sol.X;
    w = orthonormalize(basis);
    const S rs = relsep_of_subspace<S>(h.matrix(), *w);
    r.relsep_w = rs;
    r.sep_f_w = rs * spectral_norm(h.matrix());
  } catch (const Error& e) {
    r.notes.push_back(std::string("relsep_w: ") + e.what());
  }

  try {
    const CentralSubspaces<S> cs = compute_central_pair<S>(h.matrix(), k);
    r.cond_uv = cs.cond_uv;
    r.relsep_central = relsep_of_subspace<S>(h.matrix(), cs.V);
    r.delta_central = delta_central<S>(h.matrix(), cs.central_eigs);

    std::optional<S> s = explicit_s;
    if (!s && exact_s) {
      const Spectrum<S> xi = sort_by_modulus<S>(eigenvalues(h.matrix()));
      s = std::abs(xi(k)) / std::abs(xi(0)) - S(1);
    }
    const ShiftPlan<S> plan = choose_shift_s<S>(cs, s);
    r.s = plan.s;
    const LinearizingMatrix<S> hs = build_shifted_h(h, cs, plan.s);
    const OrderedSpectrum<S> sps = ordered_spectrum(hs);
    r.gap_shifted = gap_of(sps);
    r.cayley_gap_shifted = cayley_rate(sps, gamma);
    if (w) r.relsep_w_shifted = relsep_of_subspace<S>(hs.matrix(), *w);
  } catch (const Error& e) {
    r.notes.push_back(std::string("central: ") + e.what());
  }
  return r;
}

}  // namespace nare
