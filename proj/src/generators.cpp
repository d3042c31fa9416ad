#include "nare/generators.hpp"

#include <cmath>
#include <numbers>

namespace nare {

Quadrature gauss_legendre(int p, double a, double b) {
  require(p >= 1, "gauss_legendre: need at least one point");
  Quadrature q;
  q.nodes.resize(p);
  q.weights.resize(p);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  if (p == 1) {
    q.nodes(0) = mid;
    q.weights(0) = 2.0 * half;
    return q;
  }
  for (int i = 0; i < (p + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (p + 0.5));
    double dp = 0.0;
    bool done = false;
    for (int it = 0; it < 100 && !done; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= p; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = p * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      done = std::abs(dx) <= 1e-15;
    }
    if (!done) throw Error(ErrorCode::QuadratureFailure, "gauss_legendre: Newton did not converge");
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes(p - 1 - i) = mid + half * x;
    q.nodes(i) = mid - half * x;
    q.weights(p - 1 - i) = half * w;
    q.weights(i) = half * w;
  }
  return q;
}

Quadrature composite_gauss_legendre(int panels, int p) {
  require(panels >= 1, "composite_gauss_legendre: need at least one panel");
  const Quadrature base = gauss_legendre(p, 0.0, 1.0);
  Quadrature q;
  q.nodes.resize(panels * p);
  q.weights.resize(panels * p);
  for (int j = 0; j < panels; ++j) {
    for (int i = 0; i < p; ++i) {
      q.nodes(j * p + i) = (j + base.nodes(i)) / panels;
      q.weights(j * p + i) = base.weights(i) / panels;
    }
  }
  return q;
}

NareProblem<double> transport_problem(const TransportSpec& spec) {
  require(spec.n >= 1, "transport_problem: n must be positive");
  require(spec.alpha >= 0.0 && spec.alpha < 1.0, "transport_problem: need 0 <= alpha < 1");
  require(spec.c > 0.0 && spec.c <= 1.0, "transport_problem: need 0 < c <= 1");
  const int p = spec.panel_points <= 0 ? spec.n : std::min(spec.panel_points, spec.n);
  require(spec.n % p == 0, "transport_problem: n must be a multiple of panel_points");

  const Quadrature q = composite_gauss_legendre(spec.n / p, p);
  const int n = spec.n;
  const double a = spec.alpha, c = spec.c;
  Vector<double> delta(n), gam(n), qv(n);
  for (int i = 0; i < n; ++i) {
    const double w = q.nodes(i);
    delta(i) = 1.0 / (c * w * (1.0 + a));
    gam(i) = 1.0 / (c * w * (1.0 - a));
    qv(i) = q.weights(i) / (2.0 * w);
  }
  const Vector<double> e = Vector<double>::Ones(n);
  Matrix<double> A = Matrix<double>(delta.asDiagonal()) - e * qv.transpose();
  Matrix<double> B = e * e.transpose();
  Matrix<double> C = qv * qv.transpose();
  Matrix<double> D = Matrix<double>(gam.asDiagonal()) - qv * e.transpose();
  return NareProblem<double>(std::move(A), std::move(B), std::move(C), std::move(D));
}

NareProblem<double> random_mnare(const RandomMnareSpec& spec) {
  require(spec.n >= 1, "random_mnare: n must be positive");
  require(spec.alpha > 0.0, "random_mnare: alpha must be positive");
  const Index n = spec.n, big = 2 * n;
  PortableUniform rng(spec.seed);
  Matrix<double> nmat(big, big);
  for (Index i = 0; i < big; ++i)
    for (Index j = 0; j < big; ++j) nmat(i, j) = rng();
  const double rho = eigenvalues(nmat).cwiseAbs().maxCoeff();
  const Matrix<double> m = (rho + spec.alpha) * Matrix<double>::Identity(big, big) - nmat;
  return NareProblem<double>(m.bottomRightCorner(n, n), -m.bottomLeftCorner(n, n),
                             -m.topRightCorner(n, n), m.topLeftCorner(n, n));
}

}  // namespace nare
