#pragma once

// Reference computations for the tests. Everything here is built from
// Eigen primitives directly (or by hand) and never calls into the library's
// algorithms, so a test comparing the two is a real cross-check.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                         double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

/// Entry-by-entry I_q (x) M - N^T (x) I_p.
inline Mat kron_operator(const Mat& m, const Mat& n) {
  const Eigen::Index p = m.rows(), q = n.rows();
  Mat k = Mat::Zero(p * q, p * q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index l = 0; l < q; ++l)
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index r = 0; r < p; ++r) {
          double v = 0.0;
          if (j == l) v += m(i, r);
          if (i == r) v -= n(l, j);
          k(j * p + i, l * p + r) = v;
        }
  return k;
}

inline Vec vec(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

inline double sigma_min_via_gram(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m.transpose() * m);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

inline double sigma_min_full_svd(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double two_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline Mat orth(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  return svd.matrixU();
}

inline double projector_distance(const Mat& a, const Mat& b, bool frobenius) {
  const Mat qa = orth(a), qb = orth(b);
  const Mat d = qa * qa.transpose() - qb * qb.transpose();
  return frobenius ? d.norm() : two_norm(d);
}

/// Solves A11 Z - Z A22 = A12 through the Kronecker form with full pivoting.
inline Mat sylvester(const Mat& a11, const Mat& a22, const Mat& a12) {
  const Mat k = kron_operator(a11, a22);
  const Vec z = k.fullPivLu().solve(vec(a12));
  return Eigen::Map<const Mat>(z.data(), a12.rows(), a12.cols());
}

/// Greedy nearest-neighbour pairing of two multisets; returns the largest
/// pair distance, or infinity when the sizes differ.
inline double multiset_distance(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bj = -1;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a(i) - b(j));
      if (d < best) {
        best = d;
        bj = j;
      }
    }
    used[bj] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

/// Real matrix S * blockdiag(...) * S^{-1} with prescribed spectrum. Complex
/// values must come in conjugate pairs (adjacent); each pair becomes a 2x2
/// rotation-scaling block.
inline Mat planted(const CVec& eigs, std::mt19937_64& rng, double mixing = 0.3) {
  const Eigen::Index n = eigs.size();
  Mat blocks = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(eigs(i).imag()) > 0) {
      const double a = eigs(i).real(), b = eigs(i).imag();
      blocks(i, i) = a;
      blocks(i + 1, i + 1) = a;
      blocks(i, i + 1) = b;
      blocks(i + 1, i) = -b;
      ++i;
    } else {
      blocks(i, i) = eigs(i).real();
    }
  }
  const Mat s = Mat::Identity(n, n) + mixing * random_matrix(n, n, rng);
  return s * blocks * s.inverse();
}

/// Roots of x c x - (a + d) x + b = 0; the smaller one is the minimal solution.
inline double scalar_minimal_solution(double a, double b, double c, double d) {
  const double p = a + d;
  const double disc = p * p - 4.0 * b * c;
  // Stable form of (p - sqrt(disc)) / (2c).
  return 2.0 * b / (p + std::sqrt(disc));
}

}  // namespace oracle
