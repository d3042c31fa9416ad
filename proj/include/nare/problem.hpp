#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "nare/dense.hpp"

namespace nare {

/// Coefficients of X C X - A X - X D + B = 0 with X of size m x n.
template <typename S>
struct NareProblem {
  Matrix<S> A;  // m x m
  Matrix<S> B;  // m x n
  Matrix<S> C;  // n x m
  Matrix<S> D;  // n x n

  NareProblem() = default;

  NareProblem(Matrix<S> a, Matrix<S> b, Matrix<S> c, Matrix<S> d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    validate();
  }

  Index m() const { return A.rows(); }
  Index n() const { return D.rows(); }

  void validate() const {
    const Index mm = A.rows(), nn = D.rows();
    require(mm >= 1 && nn >= 1, "NARE: m and n must be at least 1");
    require(A.cols() == mm, "NARE: A must be m x m");
    require(D.cols() == nn, "NARE: D must be n x n");
    require(B.rows() == mm && B.cols() == nn, "NARE: B must be m x n");
    require(C.rows() == nn && C.cols() == mm, "NARE: C must be n x m");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(C, "C");
    require_finite(D, "D");
  }

  template <typename T>
  NareProblem<T> cast() const {
    return NareProblem<T>(A.template cast<T>(), B.template cast<T>(),
                          C.template cast<T>(), D.template cast<T>());
  }
};

/// H = [[D, -C], [B, -A]], with the first n rows/cols belonging to D.
template <typename S>
class LinearizingMatrix {
 public:
  LinearizingMatrix() = default;

  LinearizingMatrix(Matrix<S> h, Index n, Index m) : h_(std::move(h)), n_(n), m_(m) {
    require(n >= 1 && m >= 1, "linearizing matrix: n and m must be at least 1");
    require(h_.rows() == n + m && h_.cols() == n + m,
            "linearizing matrix: dimension must be n + m");
  }

  const Matrix<S>& matrix() const { return h_; }
  Index n() const { return n_; }
  Index m() const { return m_; }
  Index dim() const { return n_ + m_; }

  auto d_block() const { return h_.topLeftCorner(n_, n_); }
  auto c_block() const { return h_.topRightCorner(n_, m_); }      // holds -C
  auto b_block() const { return h_.bottomLeftCorner(m_, n_); }    // holds B
  auto a_block() const { return h_.bottomRightCorner(m_, m_); }   // holds -A

  /// Reads the coefficients back with the sign conventions of build_h.
  NareProblem<S> blocks() const {
    return NareProblem<S>(-Matrix<S>(a_block()), Matrix<S>(b_block()),
                          -Matrix<S>(c_block()), Matrix<S>(d_block()));
  }

 private:
  Matrix<S> h_;
  Index n_ = 0;
  Index m_ = 0;
};

template <typename S>
LinearizingMatrix<S> build_h(const NareProblem<S>& p) {
  const Index n = p.n(), m = p.m();
  Matrix<S> h(n + m, n + m);
  h << p.D, -p.C, p.B, -p.A;
  return LinearizingMatrix<S>(std::move(h), n, m);
}

template <typename S>
Matrix<S> build_m(const NareProblem<S>& p) {
  const Index n = p.n(), m = p.m();
  Matrix<S> mm(n + m, n + m);
  mm << p.D, -p.C, -p.B, p.A;
  return mm;
}

enum class MMatrixTag { NonsingularM, SingularM, NotM };

inline const char* to_string(MMatrixTag t) {
  switch (t) {
    case MMatrixTag::NonsingularM: return "NonsingularM";
    case MMatrixTag::SingularM: return "SingularM";
    case MMatrixTag::NotM: return "NotM";
  }
  return "?";
}

template <typename S>
struct MMatrixClass {
  MMatrixTag tag;
  // s - rho(N); NaN when the sign pattern already rules M out.
  S spectral_abscissa_evidence;
};

template <typename S>
MMatrixClass<S> classify_mmatrix(const Matrix<S>& mat, S singular_tol = S(1e-10)) {
  require(mat.rows() == mat.cols(), "classify_mmatrix: matrix must be square");
  const Index k = mat.rows();
  const S fro = mat.norm();
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i)
      if (i != j && mat(i, j) > S(1e-14) * fro)
        return {MMatrixTag::NotM, std::numeric_limits<S>::quiet_NaN()};

  const S s = mat.diagonal().maxCoeff();
  Matrix<S> nmat = s * Matrix<S>::Identity(k, k) - mat;
  const S rho = eigenvalues(nmat).cwiseAbs().maxCoeff();
  const S diff = s - rho;
  if (std::abs(diff) <= singular_tol * std::abs(s)) return {MMatrixTag::SingularM, diff};
  if (diff > S(0)) return {MMatrixTag::NonsingularM, diff};
  return {MMatrixTag::NotM, diff};
}

template <typename S>
Matrix<S> residual(const NareProblem<S>& p, const Matrix<S>& x) {
  require(x.rows() == p.m() && x.cols() == p.n(), "residual: X must be m x n");
  return x * p.C * x - p.A * x - x * p.D + p.B;
}

template <typename S>
S relative_residual(const NareProblem<S>& p, const Matrix<S>& x) {
  require(x.rows() == p.m() && x.cols() == p.n(), "relative_residual: X must be m x n");
  const Matrix<S> xcx = x * p.C * x;
  const Matrix<S> ax = p.A * x;
  const Matrix<S> xd = x * p.D;
  const S den = (xcx + p.B).norm() + (ax + xd).norm();
  if (!(den >= machine_eps<S>())) {
    throw Error(ErrorCode::DegenerateDenominator, "relative_residual: denominator vanishes");
  }
  return (xcx - ax - xd + p.B).norm() / den;
}

template <typename S>
S relative_error(const Matrix<S>& x, const Matrix<S>& ref) {
  require(x.rows() == ref.rows() && x.cols() == ref.cols(), "relative_error: shape mismatch");
  const S nr = ref.norm();
  if (!(nr > S(0))) throw Error(ErrorCode::ZeroReference, "relative_error: zero reference");
  return (x - ref).norm() / nr;
}

template <typename S>
S gamma_star(const NareProblem<S>& p) {
  return std::max(p.A.diagonal().maxCoeff(), p.D.diagonal().maxCoeff());
}

template <typename S>
std::complex<S> cayley(std::complex<S> z, S gamma) {
  require(gamma != S(0), "cayley: gamma must be nonzero");
  const std::complex<S> den = z + gamma;
  if (std::abs(den) < machine_eps<S>() * (std::abs(z) + std::abs(gamma))) {
    throw Error(ErrorCode::PoleHit, "cayley: z is at the pole -gamma");
  }
  return (z - gamma) / den;
}

/// ||H [I; X] - [I; X](D - C X)||_F / ||H||_F.
template <typename S>
S verify_invariant_pair(const LinearizingMatrix<S>& h, const Matrix<S>& x) {
  const Index n = h.n(), m = h.m();
  require(x.rows() == m && x.cols() == n, "verify_invariant_pair: X must be m x n");
  Matrix<S> w(n + m, n);
  w << Matrix<S>::Identity(n, n), x;
  const Matrix<S> hw = h.matrix() * w;
  // D - C X is the top block of H [I; X].
  const Matrix<S> core = hw.topRows(n);
  return (hw - w * core).norm() / h.matrix().norm();
}

/// Eigenvalues of H ordered by nonincreasing real part, checked to split as
/// n antistable followed by m stable.
template <typename S>
struct OrderedSpectrum {
  Spectrum<S> values;
  Index n = 0;
  std::complex<S> lambda_n() const { return values(n - 1); }
  std::complex<S> lambda_n1() const { return values(n); }
};

template <typename S>
OrderedSpectrum<S> ordered_spectrum(const Matrix<S>& h, Index n, S rel_tol = S(1e-10)) {
  require(n >= 1 && n < h.rows(), "ordered_spectrum: n out of range");
  OrderedSpectrum<S> out;
  out.values = sort_by_real_desc<S>(eigenvalues(h));
  out.n = n;
  const S tol = rel_tol * h.norm();
  if (out.lambda_n().real() < -tol || out.lambda_n1().real() > tol) {
    throw Error(ErrorCode::ClassificationAmbiguous,
                "eigenvalues do not split into " + std::to_string(n) + " antistable and " +
                    std::to_string(h.rows() - n) + " stable");
  }
  return out;
}

template <typename S>
OrderedSpectrum<S> ordered_spectrum(const LinearizingMatrix<S>& h, S rel_tol = S(1e-10)) {
  return ordered_spectrum(h.matrix(), h.n(), rel_tol);
}

template <typename S>
struct Solution {
  Matrix<S> X;
  S residual = S(0);
  int iterations = 0;
};

}  // namespace nare
