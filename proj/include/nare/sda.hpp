#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "nare/problem.hpp"

namespace nare {

template <typename S>
struct SdaState {
  Matrix<S> E;   // n x n
  Matrix<S> F;   // m x m
  Matrix<S> G;   // n x m, converges to the dual solution Y
  Matrix<S> Hm;  // m x n, converges to the primal solution X
  int step = 0;
  S last_condition = S(1);
};

template <typename S>
struct SdaConfig {
  std::optional<S> gamma;  // defaults to gamma_star of the reference problem
  S tol = precision_floor<S>(1e-15, 4);
  int max_steps = 60;
  S breakdown_threshold = S(1e13);
  // Residual stagnation stop: no improvement for `stall_steps` once the
  // relative change is already below `stall_change`.
  int stall_steps = 3;
  S stall_change = S(1e-6);
};

template <typename S>
struct SdaTraceRecord {
  int step;
  S relative_change;
  S residual;
  S condition;
};

template <typename S>
using SdaTrace = std::function<void(const SdaTraceRecord<S>&)>;

template <typename S>
struct SdaOutcome {
  Matrix<S> X;  // m x n
  Matrix<S> Y;  // n x m
  int steps = 0;      // step with the smallest residual
  int steps_run = 0;  // doubling steps executed; X is the last iterate
  std::vector<S> residual_history;
  S residual = S(0);       // of the returned X
  S best_residual = S(0);  // at `steps`
  S dual_residual = std::numeric_limits<S>::quiet_NaN();
  S gamma = S(0);
  bool converged = false;
};

template <typename S>
SdaState<S> sda_init(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c,
                     const Matrix<S>& d, S gamma) {
  const Index m = a.rows(), n = d.rows();
  require(gamma > S(0), "sda_init: gamma must be positive");
  const Matrix<S> im = Matrix<S>::Identity(m, m), in = Matrix<S>::Identity(n, n);
  const Matrix<S> ag = a + gamma * im;
  const Matrix<S> dg = d + gamma * in;

  auto factor = [](const Matrix<S>& mat, const char* name) {
    LuFactor<S> lu(mat);
    if (lu.singular()) {
      throw Error(ErrorCode::InitSingular, std::string("sda_init: ") + name + " is singular");
    }
    return lu;
  };

  const LuFactor<S> lu_a = factor(ag, "A_gamma");
  const LuFactor<S> lu_d = factor(dg, "D_gamma");
  const Matrix<S> dinv_c = lu_d.solve(c);  // D_g^{-1} C
  const Matrix<S> ainv_b = lu_a.solve(b);  // A_g^{-1} B
  const LuFactor<S> lu_w = factor(Matrix<S>(ag - b * dinv_c), "W_gamma");
  const LuFactor<S> lu_v = factor(Matrix<S>(dg - c * ainv_b), "V_gamma");

  const Matrix<S> winv = lu_w.solve(im);
  SdaState<S> s;
  s.E = in - S(2) * gamma * lu_v.solve(in);
  s.F = im - S(2) * gamma * winv;
  s.G = S(2) * gamma * dinv_c * winv;
  s.Hm = S(2) * gamma * winv * b * lu_d.solve(in);
  s.step = 0;
  return s;
}

template <typename S>
SdaState<S> sda_init(const NareProblem<S>& p, S gamma) {
  return sda_init<S>(p.A, p.B, p.C, p.D, gamma);
}

template <typename S>
SdaState<S> sda_step(const SdaState<S>& s, const SdaConfig<S>& cfg) {
  const Index n = s.E.rows(), m = s.F.rows();
  const LuFactor<S> lu1(Matrix<S>(Matrix<S>::Identity(n, n) - s.G * s.Hm));
  const LuFactor<S> lu2(Matrix<S>(Matrix<S>::Identity(m, m) - s.Hm * s.G));
  const S cond = std::max(lu1.condition_estimate(), lu2.condition_estimate());
  if (lu1.singular() || lu2.singular() || !(cond <= cfg.breakdown_threshold)) {
    throw BreakdownError(s.step + 1, static_cast<double>(cond));
  }

  Matrix<S> rhs1(n, n + m);
  rhs1 << s.E, s.G * s.F;
  const Matrix<S> z1 = lu1.solve(rhs1);
  Matrix<S> rhs2(m, m + n);
  rhs2 << s.F, s.Hm * s.E;
  const Matrix<S> z2 = lu2.solve(rhs2);

  SdaState<S> next;
  next.E = s.E * z1.leftCols(n);
  next.G = s.G + s.E * z1.rightCols(m);
  next.F = s.F * z2.leftCols(m);
  next.Hm = s.Hm + s.F * z2.rightCols(n);
  next.step = s.step + 1;
  next.last_condition = cond;
  return next;
}

/// Runs SDA on `blocks` (possibly a shifted equation) and measures residuals
/// against `reference`. Returns the iterate with the smallest residual.
template <typename S>
SdaOutcome<S> sda_solve(const NareProblem<S>& blocks, const NareProblem<S>& reference,
                        const SdaConfig<S>& cfg = {}, const SdaTrace<S>& trace = {}) {
  require(blocks.m() == reference.m() && blocks.n() == reference.n(),
          "sda_solve: shifted and reference problems differ in size");
  require(cfg.max_steps >= 1, "sda_solve: max_steps must be positive");
  const S gamma = cfg.gamma ? *cfg.gamma : gamma_star(reference);

  SdaOutcome<S> out;
  out.gamma = gamma;
  SdaState<S> st = sda_init(blocks, gamma);

  S best = std::numeric_limits<S>::infinity();
  S last = best;
  int since_best = 0, best_step = 0;

  for (int k = 1; k <= cfg.max_steps; ++k) {
    SdaState<S> nx = sda_step(st, cfg);
    const S hn = nx.Hm.norm();
    const S change = hn > S(0) ? (nx.Hm - st.Hm).norm() / hn : (nx.Hm - st.Hm).norm();
    S res = std::numeric_limits<S>::infinity();
    try {
      res = relative_residual(reference, nx.Hm);
    } catch (const Error&) {
    }
    if (!nx.Hm.allFinite()) throw BreakdownError(k, std::numeric_limits<double>::infinity());
    out.residual_history.push_back(res);
    if (trace) trace({k, change, res, nx.last_condition});
    st = std::move(nx);
    out.steps_run = k;
    last = res;

    if (res < best) {
      best = res;
      best_step = k;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (change <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (change < cfg.stall_change && since_best >= cfg.stall_steps) {
      out.converged = true;
      break;
    }
  }

  out.X = st.Hm;
  out.Y = st.G;
  out.steps = best_step;
  out.residual = last;
  out.best_residual = best;
  if (!out.converged && !(last <= cfg.tol * S(100))) {
    throw Error(ErrorCode::NoConvergence,
                "SDA: no convergence in " + std::to_string(cfg.max_steps) + " steps");
  }
  out.converged = true;
  try {
    const NareProblem<S> dual(reference.D, reference.C, reference.B, reference.A);
    out.dual_residual = relative_residual(dual, out.Y);
  } catch (const Error&) {
  }
  return out;
}

template <typename S>
SdaOutcome<S> sda_solve(const NareProblem<S>& p, const SdaConfig<S>& cfg = {},
                        const SdaTrace<S>& trace = {}) {
  return sda_solve(p, p, cfg, trace);
}

/// max_i |C(l_i)| over the n rightmost eigenvalues divided by
/// min_j |C(l_{n+j})| over the m leftmost ones.
template <typename S>
S cayley_rate(const OrderedSpectrum<S>& sp, S gamma) {
  S num = S(0);
  S den = std::numeric_limits<S>::infinity();
  for (Index i = 0; i < sp.values.size(); ++i) {
    // A stable eigenvalue at the pole -gamma has |C| = inf and drops out of the minimum.
    const std::complex<S> z = sp.values(i);
    const bool pole = std::abs(z + gamma) < machine_eps<S>() * (std::abs(z) + std::abs(gamma));
    const S c = pole ? std::numeric_limits<S>::infinity() : std::abs(cayley(z, gamma));
    if (i < sp.n) {
      num = std::max(num, c);
    } else {
      den = std::min(den, c);
    }
  }
  if (!(den > S(0))) return std::numeric_limits<S>::infinity();
  return num / den;
}

template <typename S>
S predicted_rate(const LinearizingMatrix<S>& h, S gamma) {
  return cayley_rate(ordered_spectrum(h), gamma);
}

}  // namespace nare
