#include <doctest.h>

#include <cmath>

#include "nlburgers/errors.hpp"
#include "nlburgers/rng.hpp"
#include "nlburgers/spaces.hpp"

using namespace nlb;

TEST_CASE("norm split v^2 = gagliardo^2 + weighted^2") {
  const Mesh mesh(256);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.0));
  const Field u = Field::interpolate(mesh, [](double x) { return 1.0 - x * x; });
  const NormReport r = norms(u, form);
  const double v2 = r.v_norm * r.v_norm;
  CHECK(std::abs(v2 - r.gagliardo * r.gagliardo - r.weighted_l2 * r.weighted_l2) <= 1e-8 * v2);

  const NormReport z = norms(Field::zero(mesh), form);
  CHECK(z.l2 == 0.0);
  CHECK(z.v_norm == 0.0);
  CHECK(z.gagliardo == 0.0);
  CHECK(z.weighted_l2 == 0.0);

  const NormReport s = norms(Field(mesh, -3.0 * u.values), form);
  CHECK(s.l2 == doctest::Approx(3.0 * r.l2).epsilon(1e-13));
  CHECK(s.gagliardo == doctest::Approx(3.0 * r.gagliardo).epsilon(1e-13));
  CHECK(s.weighted_l2 == doctest::Approx(3.0 * r.weighted_l2).epsilon(1e-13));
}

TEST_CASE("rho lower bound and polarization") {
  for (double a : {0.6, 1.4, 1.9}) {
    const Mesh mesh(48);
    const NonlocalForm form = assemble_form(mesh, FractionalOrder(a));
    const PathRng rng(17, 0);
    Eigen::VectorXd x(mesh.n_dofs()), y(mesh.n_dofs());
    for (int k = 0; k < mesh.n_dofs(); ++k) x(k) = rng.normal(1, k), y(k) = rng.normal(2, k);
    const Field u(mesh, x), v(mesh, y);
    const NormReport r = norms(u, form);
    CHECK(r.weighted_l2 * r.weighted_l2 >= (4.0 / a) * r.l2 * r.l2);
    CHECK(r.v_norm >= std::sqrt(4.0 / a) * r.l2);
    const double pol = 0.25 * ((x + y).dot(form.A() * (x + y)) - (x - y).dot(form.A() * (x - y)));
    CHECK(std::abs(form.bilinear(u, v) - pol) <= 1e-10 * std::abs(form.bilinear(u, u)));
  }
}

TEST_CASE("spectral scale and dual norms") {
  const Mesh mesh(64);
  const FractionalOrder alpha(1.5);
  const NonlocalForm form = assemble_form(mesh, alpha);
  const EigenBasis basis = solve_eigenbasis(form, mesh.n_dofs());
  const SpectralScale scale(basis, alpha);

  // single mode: dual_norm(M phi_1) = lambda_1^{-s/alpha}
  const DualField w1(mesh, form.M() * basis.modes().col(0));
  for (double s : {0.3, 0.75, 2.0})
    CHECK(dual_norm(w1, scale, s) == doctest::Approx(std::pow(basis.lambdas()(0), -s / 1.5)).epsilon(1e-9));

  // dual_norm(A u, alpha/2) = ||u||_V, and the (alpha/2) scale reproduces v_norm
  const PathRng rng(5, 0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  for (int k = 0; k < 10; ++k) c(k) = rng.normal(0, k);
  const Field u = basis.reconstruct(c);
  const double v = std::sqrt(u.values.dot(form.A() * u.values));
  CHECK(scale.norm(c, 0.75) == doctest::Approx(v).epsilon(1e-8));
  CHECK(operator_dual_bound_check(u, form, scale) == doctest::Approx(1.0).epsilon(1e-8));

  // hat spike, full spectrum
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(mesh.n_dofs());
  spike(20) = 1.0;
  CHECK(operator_dual_bound_check(Field(mesh, spike), form, scale) == doctest::Approx(1.0).epsilon(1e-8));

  // non-increasing in s when every lambda_k >= 1
  REQUIRE(basis.lambdas().minCoeff() >= 1.0);
  const DualField w(mesh, form.A() * spike);
  CHECK(dual_norm(w, scale, 1.0) <= dual_norm(w, scale, 0.5));

  CHECK_THROWS_AS(dual_norm(w, scale, 0.0), DomainError);
  CHECK_THROWS_AS(operator_dual_bound_check(Field::zero(mesh), form, scale), DomainError);
}
