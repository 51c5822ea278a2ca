#pragma once

#include <vector>

namespace nlb::quad {

/// Nodes and weights of a one-dimensional rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n points (exact for polynomials of degree 2n-1).
Rule gauss_legendre(int n);

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a, b > -1, built with the
/// Golub-Welsch algorithm. Exact for (1-x)^a (1+x)^b p(x) with deg p <= 2n-1.
Rule gauss_jacobi(int n, double a, double b);

/// Rule on [0, len] for integrals of t^beta f(t); the weight t^beta is folded
/// into the returned weights, so sum(w_i f(t_i)) ~ int_0^len t^beta f(t) dt.
struct ScaledRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
ScaledRule endpoint_power_rule(int n, double beta, double len);

/// Plain Gauss-Legendre mapped to [lo, hi].
ScaledRule mapped_legendre(int n, double lo, double hi);

template <class F>
double integrate(const ScaledRule& rule, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

}  // namespace nlb::quad
