#include <doctest.h>

#include <cmath>

#include "nlburgers/quadrature.hpp"

using namespace nlb;

namespace {
template <class F>
double apply(const quad::Rule& r, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}
}  // namespace

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 12}) {
    const auto r = quad::gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      CHECK(apply(r, [p](double x) { return std::pow(x, p); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss_jacobi absorbs the endpoint weight") {
  // int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  for (double a : {-0.5, 0.3, 1.2}) {
    const double b = -0.2;
    const auto r = quad::gauss_jacobi(8, a, b);
    const double exact = std::pow(2.0, a + b + 1) * std::exp(std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
    CHECK(apply(r, [](double) { return 1.0; }) == doctest::Approx(exact).epsilon(1e-12));
    // x^3 is integrated exactly as well
    const double m3 = apply(r, [](double x) { return x * x * x; });
    const double m3_fine = apply(quad::gauss_jacobi(20, a, b), [](double x) { return x * x * x; });
    CHECK(m3 == doctest::Approx(m3_fine).epsilon(1e-12));
  }
}

TEST_CASE("endpoint_power_rule handles t^beta on [0, len]") {
  const auto r = quad::endpoint_power_rule(6, -0.7, 2.0);
  // int_0^2 t^{-0.7} (1 + t) dt
  const double exact = std::pow(2.0, 0.3) / 0.3 + std::pow(2.0, 1.3) / 1.3;
  CHECK(quad::integrate(r, [](double t) { return 1.0 + t; }) == doctest::Approx(exact).epsilon(1e-12));
}
