#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nare/sda.hpp"

namespace nare {

enum class NormKind { Spectral, Frobenius };

template <typename Derived>
typename Derived::Scalar matrix_norm(const Eigen::MatrixBase<Derived>& m, NormKind kind) {
  return kind == NormKind::Frobenius ? m.norm() : spectral_norm(m);
}

template <typename S>
S gap_of(const OrderedSpectrum<S>& sp) {
  return std::abs(sp.lambda_n() - sp.lambda_n1());
}

template <typename S>
S gap_of(const LinearizingMatrix<S>& h) {
  return gap_of(ordered_spectrum(h));
}

template <typename S>
S cayley_gap(const LinearizingMatrix<S>& h, S gamma) {
  const OrderedSpectrum<S> sp = ordered_spectrum(h);
  for (Index i = 0; i < sp.values.size(); ++i) cayley(sp.values(i), gamma);
  return cayley_rate(sp, gamma);
}

template <typename S>
S sep_f(const Matrix<S>& m, const Matrix<S>& n, Index cap = kKroneckerCap) {
  return smallest_singular_value<S>(kron_sylvester_operator(m, n, cap));
}

/// ||H W - W (W^T H W)||_F / ||H||_F for an orthonormal W.
template <typename S>
S invariance_defect(const Matrix<S>& h, const Matrix<S>& w) {
  const Matrix<S> hw = h * w;
  return (hw - w * (w.transpose() * hw)).norm() / h.norm();
}

/// sep_F(A11, A22) / ||H||, where [A11 A12; 0 A22] = Q^T H Q and the leading
/// columns of Q span `basis`.
template <typename S>
S relsep_of_subspace(const Matrix<S>& h, const Matrix<S>& basis,
                     NormKind norm = NormKind::Spectral, S defect_tol = S(1e-8)) {
  require(h.rows() == h.cols() && basis.rows() == h.rows(),
          "relsep_of_subspace: basis and matrix sizes differ");
  const Index dim = h.rows(), k = basis.cols();
  require(k >= 1 && k < dim, "relsep_of_subspace: need a proper subspace");
  const Matrix<S> w = orthonormalize(basis);
  const S defect = invariance_defect(h, w);
  if (!(defect <= defect_tol)) {
    throw Error(ErrorCode::NotInvariant, "relsep_of_subspace: subspace is not invariant (defect " +
                                             std::to_string(double(defect)) + ")");
  }
  Eigen::HouseholderQR<Matrix<S>> qr(w);
  const Matrix<S> q = qr.householderQ();
  const Matrix<S> t = q.transpose() * h * q;
  const S sep = sep_f<S>(t.topLeftCorner(k, k), t.bottomRightCorner(dim - k, dim - k));
  return sep / matrix_norm(h, norm);
}

/// ||P1 - P2|| for the orthogonal projectors onto span(B1), span(B2).
template <typename S>
S subspace_distance(const Matrix<S>& b1, const Matrix<S>& b2, NormKind norm = NormKind::Spectral) {
  require(b1.rows() == b2.rows(), "subspace_distance: ambient dimensions differ");
  if (norm == NormKind::Spectral && b1.cols() == b2.cols()) {
    // Equal dimensions: the distance is the sine of the largest principal
    // angle, ||(I - P1) B2||_2.
    const Matrix<S> r = b2 - b1 * (b1.transpose() * b2);
    return std::min(S(1), spectral_norm(r));
  }
  const Matrix<S> d = b1 * b1.transpose() - b2 * b2.transpose();
  return matrix_norm(d, norm);
}

/// Right-hand side of ||X - Xt|| <= (||I||^2 + ||X||^2)^(1/2) (||I||^2 + ||Xt||^2)^(1/2) dist.
template <typename S>
S solution_distance_bound(const Matrix<S>& x, const Matrix<S>& xt, S dist,
                          NormKind norm = NormKind::Frobenius) {
  require(x.rows() == xt.rows() && x.cols() == xt.cols(), "solution_distance_bound: shape mismatch");
  const S id2 = norm == NormKind::Frobenius ? static_cast<S>(x.cols()) : S(1);
  const S nx = matrix_norm(x, norm), nxt = matrix_norm(xt, norm);
  return std::sqrt(id2 + nx * nx) * std::sqrt(id2 + nxt * nxt) * dist;
}

/// Minimum distance from the central eigenvalues to the rest of sigma(H).
/// Central values are matched greedily to sigma(H) within rel_tol * ||H||_2.
template <typename S>
S delta_central(const Matrix<S>& h, const Spectrum<S>& central, S rel_tol = S(1e-6)) {
  const Spectrum<S> all = eigenvalues(h);
  const S tol = rel_tol * spectral_norm(h);
  std::vector<bool> used(all.size(), false);
  for (Index c = 0; c < central.size(); ++c) {
    Index best = -1;
    S bd = std::numeric_limits<S>::infinity();
    for (Index i = 0; i < all.size(); ++i) {
      if (used[i]) continue;
      const S d = std::abs(all(i) - central(c));
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (best < 0 || !(bd <= tol)) {
      throw Error(ErrorCode::MatchFailure, "delta_central: central eigenvalue not in spectrum");
    }
    used[best] = true;
  }
  S delta = std::numeric_limits<S>::infinity();
  for (Index c = 0; c < central.size(); ++c)
    for (Index i = 0; i < all.size(); ++i)
      if (!used[i]) delta = std::min(delta, std::abs(all(i) - central(c)));
  return delta;
}

/// ||(U^T V)^{-1}||_2.
template <typename S>
S cond_uv(const Matrix<S>& u, const Matrix<S>& v) {
  require(u.rows() == v.rows() && u.cols() == v.cols(), "cond_uv: U and V shapes differ");
  const S smin = smallest_singular_value<S>(u.transpose() * v);
  if (!(smin > machine_eps<S>())) throw Error(ErrorCode::UVSingular, "cond_uv: U^T V is singular");
  return S(1) / smin;
}

/// Criticality measures of one problem. W = span[I; X] is the antistable
/// invariant subspace; "shifted" values refer to the subspace-shifted matrix.
/// Quantities that could not be computed are NaN.
struct DiagnosticsReport {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  int m = 0;
  double gamma = nan;
  double lambda_n = nan;
  double lambda_n1 = nan;
  double gap = nan;
  double cayley_gap = nan;
  double sep_f_w = nan;
  double relsep_w = nan;
  double relsep_central = nan;
  double delta_central = nan;
  double cond_uv = nan;
  int k = 0;
  double s = nan;
  double gap_shifted = nan;
  double cayley_gap_shifted = nan;
  double relsep_w_shifted = nan;
  std::vector<std::string> notes;
};

}  // namespace nare
