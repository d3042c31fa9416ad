#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "nare/problem.hpp"

namespace nare {

inline constexpr const char* kGeneratorVersion = "nare-gen/1";
inline constexpr const char* kRandomEngine = "mt19937_64";

struct Quadrature {
  Vector<double> nodes;
  Vector<double> weights;
};

/// p-point Gauss-Legendre rule on (a, b); nodes increasing.
Quadrature gauss_legendre(int p, double a = 0.0, double b = 1.0);

/// Composite rule: `panels` equal panels of (0,1), `p` Gauss points each.
Quadrature composite_gauss_legendre(int panels, int p);

struct TransportSpec {
  int n = 4;
  double alpha = 0.0;
  double c = 1.0;
  // Gauss points per panel; n / panel_points panels on (0,1).
  // panel_points == n is the plain n-point rule.
  int panel_points = 4;

  /// The benchmark parametrization (alpha, c) = (beta, 1 - beta).
  static TransportSpec from_beta(int n, double beta) {
    TransportSpec s;
    s.n = n;
    s.alpha = beta;
    s.c = 1.0 - beta;
    return s;
  }
};

NareProblem<double> transport_problem(const TransportSpec& spec);

struct RandomMnareSpec {
  int n = 10;
  double alpha = 1e-3;
  std::uint64_t seed = 1;
};

/// M = (rho(N) + alpha) I - N with N uniform(0,1), cut into
/// [[D, -C], [-B, A]] with m = n.
NareProblem<double> random_mnare(const RandomMnareSpec& spec);

/// Picks B so that X0 solves the equation exactly.
template <typename S>
NareProblem<S> reverse_engineered_problem(const Matrix<S>& x0, const Matrix<S>& a,
                                          const Matrix<S>& c, const Matrix<S>& d) {
  require(x0.rows() == a.rows() && x0.cols() == d.rows(),
          "reverse_engineered_problem: X0 must be m x n");
  require(c.rows() == d.rows() && c.cols() == a.rows(),
          "reverse_engineered_problem: C must be n x m");
  Matrix<S> b = a * x0 + x0 * d - x0 * c * x0;
  return NareProblem<S>(a, std::move(b), c, d);
}

/// Uniform doubles in [0,1) from mt19937_64 using the top 53 bits, so the
/// stream does not depend on the standard library's distribution code.
class PortableUniform {
 public:
  explicit PortableUniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nare
