#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlburgers/errors.hpp"
#include "nlburgers/kernel.hpp"

using namespace nlb;

namespace {

// Centered cubic B-spline (hat * hat) used by the Toeplitz oracle.
double bspline(double t) {
  t = std::abs(t);
  if (t >= 2.0) return 0.0;
  if (t >= 1.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
  return 2.0 / 3.0 - t * t + t * t * t / 2.0;
}

// Interior entries of A equal h^{1-a} F(|i-j|): for hats supported inside D the
// weighted form is the full-line form, a function of the offset only.
//   F(k) = 2 int_0^inf t^{-1-a} [2M(k) - M(t-k) - M(t+k)] dt.
double toeplitz_entry(int k, double a) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // On [0,1] the bracket is a cubic in t; integrate it in closed form.
  // Bracket coefficients: k=0: 2t^2 - t^3; k=1: -t^2 + 2t^3/3; k=2: -t^3/6; k>=3: 0.
  double c2 = 0.0, c3 = 0.0;
  if (k == 0) c2 = 2.0, c3 = -1.0;
  if (k == 1) c2 = -1.0, c3 = 2.0 / 3.0;
  if (k == 2) c3 = -1.0 / 6.0;
  double s = c2 / (2.0 - a) + c3 / (3.0 - a);
  const double T = k + 2.0;
  // one panel per unit interval: the spline has kinks at the integers
  for (int j = 1; j < k + 2; ++j)
    s += ts.integrate(
        [&](double t) { return std::pow(t, -1.0 - a) * (2.0 * bspline(k) - bspline(t - k) - bspline(t + k)); },
        static_cast<double>(j), j + 1.0);
  s += 2.0 * bspline(k) * std::pow(T, -a) / a;
  return 2.0 * s;
}

}  // namespace

TEST_CASE("rho_weight closed form and symmetry") {
  CHECK(rho_weight(0.0, FractionalOrder(1.0)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rho_weight(0.0, FractionalOrder(1.5)) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  for (double x : {0.1, 0.5, 0.93})
    CHECK(rho_weight(x, FractionalOrder(0.7)) == rho_weight(-x, FractionalOrder(0.7)));
  CHECK_THROWS_AS(rho_weight(1.0, FractionalOrder(1.0)), DomainError);
  CHECK_THROWS_AS(rho_weight(-1.2, FractionalOrder(1.0)), DomainError);
  CHECK_THROWS_AS(FractionalOrder(2.0), DomainError);
  CHECK_THROWS_AS(FractionalOrder(0.0), DomainError);
  CHECK(FractionalOrder(1.5).theorem_range());
  CHECK_FALSE(FractionalOrder(1.0).theorem_range());
}

TEST_CASE("rho_weight against exterior quadrature") {
  boost::math::quadrature::exp_sinh<double> es;
  const double inf = std::numeric_limits<double>::infinity();
  const double x = 0.5, a = 1.0;
  const double ref = 2.0 * (es.integrate([&](double s) { return std::pow(s + 1.0 - x, -1.0 - a); }, 0.0, inf) +
                            es.integrate([&](double s) { return std::pow(s + 1.0 + x, -1.0 - a); }, 0.0, inf));
  CHECK(std::abs(rho_weight(x, FractionalOrder(a)) - ref) <= 1e-10 * ref);
}

TEST_CASE("getoor constant") {
  CHECK(getoor_constant(FractionalOrder(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(getoor_constant(FractionalOrder(1e-8)) == doctest::Approx(1.0).epsilon(1e-7));
  const double a = 1.5;
  const double ref = std::pow(2.0, a) * boost::math::tgamma(a / 2 + 1) * boost::math::tgamma((a + 1) / 2) /
                     boost::math::tgamma(0.5);
  CHECK(getoor_constant(FractionalOrder(a)) == doctest::Approx(ref).epsilon(1e-14));
  // c_{1,1/2} = 1/pi
  CHECK(fractional_laplacian_constant(FractionalOrder(1.0)) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
}

TEST_CASE("assembled form: symmetry, positivity, Toeplitz oracle") {
  for (double a : {0.5, 1.0, 1.5}) {
    const Mesh mesh(32);
    const NonlocalForm form = assemble_form(mesh, FractionalOrder(a));
    CHECK((form.A() - form.A().transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((form.M() - form.M().transpose()).cwiseAbs().maxCoeff() == 0.0);
    // v^T A v >= (4/alpha) v^T M v
    Eigen::MatrixXd V = Eigen::MatrixXd::Random(mesh.n_dofs(), 5);
    for (int c = 0; c < 5; ++c) {
      const Eigen::VectorXd v = V.col(c);
      CHECK(v.dot(form.A() * v) >= (4.0 / a) * v.dot(form.M() * v));
    }
    const double h = mesh.h();
    for (int k = 0; k <= 6; ++k) {
      const double ref = std::pow(h, 1.0 - a) * toeplitz_entry(k, a);
      CHECK(form.A()(10, 10 + k) == doctest::Approx(ref).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(assemble_form(Mesh(3), FractionalOrder(1.0)), DomainError);
}

TEST_CASE("quadrature doubling changes A by < 1e-10 relative") {
  const Mesh mesh(24);
  for (double a : {0.5, 1.5, 1.9}) {
    const auto A1 = assemble_form(mesh, FractionalOrder(a)).A();
    const auto A2 = assemble_form(mesh, FractionalOrder(a), KernelQuadrature{}.doubled()).A();
    const double rel = ((A1 - A2).cwiseAbs().array() / A2.cwiseAbs().array().max(1e-300)).maxCoeff();
    CHECK(rel < 1e-10);
  }
}

TEST_CASE("apply_operator and the Getoor oracle at alpha = 1") {
  const Mesh mesh(256);
  const FractionalOrder alpha(1.0);
  const NonlocalForm form = assemble_form(mesh, alpha);
  const Field zero = Field::zero(mesh);
  CHECK(apply_operator(form, zero).values.cwiseAbs().maxCoeff() == 0.0);
  const Field u = Field::interpolate(mesh, [](double x) { return std::sqrt(1.0 - x * x); });
  const Field v = Field::interpolate(mesh, [](double x) { return x * (1.0 - x * x); });
  CHECK(v.values.dot(apply_operator(form, u).values) ==
        doctest::Approx(u.values.dot(apply_operator(form, v).values)).epsilon(1e-13));
  const Field w = strong_image(form, u);
  double err = 0.0;
  for (int k = 0; k < mesh.n_dofs(); ++k)
    if (std::abs(mesh.node(k)) <= 1.0 / 3.0) err = std::max(err, std::abs(symbol_scale_factor(alpha) * w.values(k) - 1.0));
  CHECK(err < 1e-3);
  CHECK_THROWS_AS(apply_operator(form, Field::zero(Mesh(128))), DimensionError);
}

TEST_CASE("Getoor identity by direct principal-value quadrature at 5 points") {
  // (-Delta)^{1/2} of sqrt(1-x^2)_+ with kernel c_{1,1/2} = 1/pi equals 1.
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const auto u = [](double y) { return std::abs(y) < 1.0 ? std::sqrt(1.0 - y * y) : 0.0; };
  for (double x : {-0.6, -0.3, 0.0, 0.25, 0.5}) {
    // symmetric form: int_0^inf (2u(x) - u(x+r) - u(x-r)) r^{-2} dr, split at the kinks
    const auto g = [&](double r) {
      // second difference cancels below r ~ 1e-4; use its limit -u''(x)
      if (r < 1e-4) return std::pow(1.0 - x * x, -1.5);
      return (2.0 * u(x) - u(x + r) - u(x - r)) / (r * r);
    };
    const double r1 = 1.0 - std::abs(x), r2 = 1.0 + std::abs(x);
    const double val = ts.integrate(g, 0.0, r1) + ts.integrate(g, r1, r2) +
                       es.integrate(g, r2, std::numeric_limits<double>::infinity());
    CHECK(val / M_PI == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("matrix dump format") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, -2.5, 3.0, 4.0;
  std::ostringstream os;
  write_matrix(os, m);
  CHECK(os.str().find("-2.5000000000000000e+00") != std::string::npos);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
