#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlburgers/errors.hpp"
#include "nlburgers/rng.hpp"
#include "nlburgers/trajectory.hpp"

using namespace nlb;

namespace {
double sin_bump(double x) { return std::sin(std::numbers::pi * (x + 1.0) / 2.0) * (1.0 - x * x); }
}  // namespace

TEST_CASE("eigenbasis invariants") {
  const Mesh mesh(64);
  for (double a : {0.7, 1.5}) {
    const NonlocalForm form = assemble_form(mesh, FractionalOrder(a));
    const EigenBasis b = solve_eigenbasis(form, 12);
    const Eigen::MatrixXd G = b.modes().transpose() * form.M() * b.modes();
    CHECK((G - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(b.lambdas()(0) >= 4.0 / a);
    for (int k = 1; k < 12; ++k) CHECK(b.lambdas()(k) >= b.lambdas()(k - 1));
    for (int k = 0; k < 12; ++k) {
      const Eigen::VectorXd v = b.modes().col(k);
      if (std::abs(v.sum()) > 1e-8 * v.cwiseAbs().sum()) CHECK(v.sum() > 0.0);
    }
  }
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.0));
  CHECK_THROWS_AS(solve_eigenbasis(form, 0), DomainError);
  CHECK_THROWS_AS(solve_eigenbasis(form, 64), DomainError);
  CHECK(solve_eigenbasis(form, 1).lambdas()(0) >= 4.0);
}

TEST_CASE("eigenvalue asymptotics at alpha = 1 and self-convergence") {
  // (c/2) lambda_k ~ k pi / 2 - pi / 8 in the symbol normalization.
  const FractionalOrder alpha(1.0);
  const NonlocalForm form = assemble_form(Mesh(1024), alpha);
  const EigenBasis b = solve_eigenbasis(form, 10);
  for (int k = 3; k <= 10; ++k) {
    const double ref = k * std::numbers::pi / 2.0 - std::numbers::pi / 8.0;
    CHECK(std::abs(symbol_scale_factor(alpha) * b.lambdas()(k - 1) - ref) <= 0.1 * ref);
  }
  // lambda_k(h) Cauchy in h
  std::vector<Eigen::VectorXd> lams;
  for (int N : {64, 128, 256}) lams.push_back(solve_eigenbasis(assemble_form(Mesh(N), alpha), 10).lambdas());
  for (int k = 0; k < 10; ++k) CHECK(std::abs(lams[2](k) - lams[1](k)) < std::abs(lams[1](k) - lams[0](k)));
}

TEST_CASE("projection") {
  const Mesh mesh(64);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 20);
  const ModalState s3 = project(b, Field(mesh, b.modes().col(2)));
  CHECK((s3.c - Eigen::VectorXd::Unit(20, 2)).cwiseAbs().maxCoeff() < 1e-10);
  const Field u = Field::interpolate(mesh, sin_bump);
  const ModalState s = project(b, u);
  CHECK((project(b, reconstruct(b, s)).c - s.c).cwiseAbs().maxCoeff() < 1e-12);
  const Field r = reconstruct(b, s);
  CHECK(r.values.dot(form.M() * r.values) <= u.values.dot(form.M() * u.values) * (1 + 1e-14));
  // completeness
  double prev = 1e300;
  for (int n : {4, 16, 63}) {
    const EigenBasis bn = solve_eigenbasis(form, n);
    const Eigen::VectorXd e = u.values - bn.reconstruct(project(bn, u).c).values;
    const double err = std::sqrt(e.dot(form.M() * e));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("convection tensor") {
  const Mesh mesh(96);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 16);
  const ConvectionTensor T = convection_tensor(b);
  for (int s = 0; s < 100; ++s) {
    const PathRng rng(8, s);
    Eigen::VectorXd c(16);
    for (int k = 0; k < 16; ++k) c(k) = rng.normal(0, k);
    CHECK(std::abs(T.cubic(c)) <= 1e-12 * c.squaredNorm() * c.norm() * 100.0);
  }
  // b(u,u,w) = -1/2 (u^2, w_x) for u = phi_1
  const Field u(mesh, b.modes().col(0)), w(mesh, b.modes().col(3));
  double ibp = 0.0;
  const double h = mesh.h();
  auto nod = [&](const Field& f, int p) { return (p <= 0 || p >= mesh.n_cells()) ? 0.0 : f.values(p - 1); };
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double a = nod(u, c), e = nod(u, c + 1);
    ibp += (nod(w, c + 1) - nod(w, c)) / h * h / 3.0 * (a * a + a * e + e * e);
  }
  CHECK(skew_trilinear(u, u, w) == doctest::Approx(-0.5 * ibp).epsilon(1e-10));
  CHECK(T(3, 0, 0) == doctest::Approx(-0.5 * ibp).epsilon(1e-10));
  const ConvectionTensor T1 = convection_tensor(solve_eigenbasis(form, 1));
  CHECK(std::abs(T1(0, 0, 0)) < 1e-14);
}

TEST_CASE("deterministic stepper") {
  const Mesh mesh(128);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 8);
  const ConvectionTensor T = convection_tensor(b);
  {
    ModalState z{Eigen::VectorXd::Zero(8), 0.0};
    DeterministicStepper st(b, T, 1e-3);
    st.step(z);
    CHECK(z.c.cwiseAbs().maxCoeff() == 0.0);
  }
  {
    const ConvectionTensor Z = T.zeroed();
    DeterministicStepper st(b, Z, 1e-3, Integrator::exponential_euler);
    ModalState s{Eigen::VectorXd::Unit(8, 4), 0.0};
    st.step(s);
    CHECK(s.c(4) == doctest::Approx(std::exp(-b.lambdas()(4) * 1e-3)).epsilon(1e-12));
  }
  {
    DeterministicStepper st(b, T, 50.0);
    ModalState s{Eigen::VectorXd::Constant(8, 1e7), 0.0};
    CHECK_THROWS_AS(st.step(s), BlowUpError);
  }
  CHECK_THROWS_AS(DeterministicStepper(b, T, 0.0), DomainError);
}

TEST_CASE("deterministic energy ledger is second order and h2 decreases") {
  const Mesh mesh(128);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 16);
  const ConvectionTensor T = convection_tensor(b);
  const ModalState s0 = project(b, Field::interpolate(mesh, sin_bump));
  double res[2];
  int i = 0;
  for (double dt : {2e-4, 1e-4}) {
    const Trajectory tr = run_deterministic(b, T, s0, dt, 0.2);
    double v2 = 0.0, worst = 0.0;
    for (int m = 1; m < tr.samples(); ++m) {
      v2 += 0.5 * dt * (tr.energy_v2[m] + tr.energy_v2[m - 1]);
      worst = std::max(worst, std::abs(tr.energy_h[m] + 2.0 * v2 - tr.energy_h[0]));
      CHECK(tr.energy_h[m] <= tr.energy_h[m - 1]);
    }
    res[i++] = worst;
  }
  CHECK(res[0] / res[1] >= 3.0);
}

TEST_CASE("trajectory csv round trip and determinism") {
  const Mesh mesh(32);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.2));
  const EigenBasis b = solve_eigenbasis(form, 4);
  const ConvectionTensor T = convection_tensor(b);
  const ModalState s0 = project(b, Field::interpolate(mesh, sin_bump));
  const Trajectory a = run_deterministic(b, T, s0, 1e-3, 0.05, 10);
  std::ostringstream o1, o2;
  write_trajectory_csv(o1, a);
  write_trajectory_csv(o2, run_deterministic(b, T, s0, 1e-3, 0.05, 10));
  CHECK(o1.str() == o2.str());
  CHECK(o1.str().rfind("t,c_1,c_2,c_3,c_4,energy_H,energy_V2\n", 0) == 0);
  std::istringstream in(o1.str());
  const Trajectory back = read_trajectory_csv(in);
  CHECK(back.samples() == a.samples());
  CHECK((back.coeffs - a.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(run_deterministic(b, T, s0, 3e-3, 0.05), DomainError);
}
