#pragma once

// Dense real kernels shared by the solver modules. Thin, checked wrappers
// around Eigen factorizations with the singularity conventions used
// throughout the library (thresholds relative to eps * ||M||_F * dim).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "nare/errors.hpp"

namespace nare {

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using Spectrum = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

inline constexpr Index kEigenvalueCap = 1024;
inline constexpr Index kKroneckerCap = 4096;

template <typename S>
constexpr S machine_eps() {
  return std::numeric_limits<S>::epsilon();
}

/// Tolerance `target` for double, but never tighter than `ulps` units of
/// roundoff in lower precision.
template <typename S>
constexpr S precision_floor(double target, double ulps) {
  return std::max(static_cast<S>(target), static_cast<S>(ulps) * machine_eps<S>());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const std::string& name) {
  require(m.allFinite(), name + " has non-finite entries");
}

template <typename S>
struct Norms {
  S frobenius;
  S spectral;
};

template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  if (m.size() == 0) return S(0);
  Matrix<S> a = m;
  Eigen::BDCSVD<Matrix<S>> svd(a);
  return svd.singularValues()(0);
}

template <typename Derived>
Norms<typename Derived::Scalar> norms(const Eigen::MatrixBase<Derived>& m) {
  return {m.norm(), spectral_norm(m)};
}

/// LU with partial pivoting plus the pivot-size singularity test. Kept as an
/// object so iterations can factor once and solve many times.
template <typename S>
class LuFactor {
 public:
  LuFactor() = default;

  explicit LuFactor(const Matrix<S>& m) { compute(m); }

  LuFactor& compute(const Matrix<S>& m) {
    require(m.rows() == m.cols(), "LU requires a square matrix");
    lu_.compute(m);
    const S scale = m.norm();
    const S threshold = machine_eps<S>() * scale * static_cast<S>(m.rows());
    const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
    min_pivot_ = m.rows() > 0 ? diag.minCoeff() : S(1);
    singular_ = !(min_pivot_ >= threshold) || scale == S(0);
    return *this;
  }

  bool singular() const { return singular_; }
  /// Zero or non-finite pivot: no solve is possible at all.
  bool exactly_singular() const { return !(min_pivot_ > S(0)) || !std::isfinite(double(min_pivot_)); }
  S min_pivot() const { return min_pivot_; }

  /// 1-norm condition number estimate (reciprocal of Eigen's rcond).
  S condition_estimate() const {
    const S rc = lu_.rcond();
    return rc > S(0) ? S(1) / rc : std::numeric_limits<S>::infinity();
  }

  template <typename Rhs>
  Matrix<S> solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    return lu_.solve(rhs);
  }

  const Eigen::PartialPivLU<Matrix<S>>& lu() const { return lu_; }

 private:
  Eigen::PartialPivLU<Matrix<S>> lu_;
  S min_pivot_ = S(0);
  bool singular_ = true;
};

/// Solves M X = RHS. Throws SingularMatrix when a pivot falls below
/// eps * ||M||_F * dim.
template <typename S>
Matrix<S> lu_solve(const Matrix<S>& m, const Matrix<S>& rhs) {
  require(m.rows() == m.cols(), "lu_solve: matrix must be square");
  require(rhs.rows() == m.rows(), "lu_solve: right-hand side has wrong row count");
  LuFactor<S> lu(m);
  if (lu.singular()) {
    throw Error(ErrorCode::SingularMatrix,
                "lu_solve: singular matrix (min pivot " + std::to_string(double(lu.min_pivot())) + ")");
  }
  return lu.solve(rhs);
}

template <typename S>
struct ThinQr {
  Matrix<S> q;
  Matrix<S> r;
};

/// Householder thin QR with nonnegative diagonal in R.
template <typename S>
ThinQr<S> thin_qr(const Matrix<S>& m) {
  const Index rows = m.rows(), cols = m.cols();
  require(rows >= cols, "thin_qr: need rows >= cols");
  Eigen::HouseholderQR<Matrix<S>> qr(m);
  ThinQr<S> out;
  out.q = qr.householderQ() * Matrix<S>::Identity(rows, cols);
  out.r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  const S threshold = machine_eps<S>() * m.norm() * static_cast<S>(rows);
  for (Index i = 0; i < cols; ++i) {
    if (!(std::abs(out.r(i, i)) >= threshold) || m.norm() == S(0)) {
      throw Error(ErrorCode::RankDeficient,
                  "thin_qr: rank deficient at column " + std::to_string(i));
    }
    if (out.r(i, i) < S(0)) {
      out.r.row(i) *= S(-1);
      out.q.col(i) *= S(-1);
    }
  }
  return out;
}

/// Orthonormal basis of the column span (Q factor of thin_qr).
template <typename S>
Matrix<S> orthonormalize(const Matrix<S>& m) {
  return thin_qr(m).q;
}

/// All eigenvalues of a real square matrix (Hessenberg reduction followed by
/// the shifted QR iteration).
template <typename S>
Spectrum<S> eigenvalues(const Matrix<S>& m, Index cap = kEigenvalueCap) {
  require(m.rows() == m.cols(), "eigenvalues: matrix must be square");
  if (m.rows() > cap) {
    throw Error(ErrorCode::DimensionCap,
                "eigenvalues: dimension " + std::to_string(m.rows()) + " exceeds cap");
  }
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Matrix<S>> es(m, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "eigenvalues: QR iteration did not converge");
  }
  return es.eigenvalues();
}

template <typename S>
S smallest_singular_value(const Matrix<S>& m) {
  require(m.size() > 0, "smallest_singular_value: empty matrix");
  Eigen::BDCSVD<Matrix<S>> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

/// Matrix of X -> M X - X N under column stacking: I_q (x) M - N^T (x) I_p.
template <typename S>
Matrix<S> kron_sylvester_operator(const Matrix<S>& m, const Matrix<S>& n,
                                  Index cap = kKroneckerCap) {
  require(m.rows() == m.cols() && n.rows() == n.cols(),
          "kron_sylvester_operator: square operands required");
  const Index p = m.rows(), q = n.rows();
  if (p * q > cap) {
    throw Error(ErrorCode::DimensionCap,
                "kron_sylvester_operator: size " + std::to_string(p * q) + " exceeds cap");
  }
  Matrix<S> k = Matrix<S>::Zero(p * q, p * q);
  for (Index j = 0; j < q; ++j) {
    k.block(j * p, j * p, p, p) = m;
    for (Index i = 0; i < q; ++i) {
      k.block(i * p, j * p, p, p).diagonal().array() -= n(j, i);
    }
  }
  return k;
}

/// Sorts by nonincreasing real part, ties by nonincreasing imaginary part.
template <typename S>
Spectrum<S> sort_by_real_desc(Spectrum<S> v) {
  std::sort(v.data(), v.data() + v.size(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return v;
}

/// Sorts by nondecreasing modulus, ties by real part then imaginary part.
template <typename S>
Spectrum<S> sort_by_modulus(Spectrum<S> v) {
  std::sort(v.data(), v.data() + v.size(), [](const auto& a, const auto& b) {
    const S ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

}  // namespace nare
