#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlburgers/diagnostics.hpp"
#include "nlburgers/errors.hpp"

using namespace nlb;

namespace {
double sin_bump(double x) { return std::sin(std::numbers::pi * (x + 1.0) / 2.0) * (1.0 - x * x); }

struct Fixture {
  Mesh mesh{64};
  NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  EigenBasis basis = solve_eigenbasis(form, 16);
  ConvectionTensor T = convection_tensor(basis);
};
}  // namespace

TEST_CASE("energy balance checks") {
  Fixture f;
  const ModalState zero{Eigen::VectorXd::Zero(16), 0.0};
  const Trajectory tz = run_deterministic(f.basis, f.T, zero, 1e-3, 0.1);
  const auto cz = check_energy_balance(EnergyLedger::from_trajectory(tz), LedgerKind::deterministic);
  CHECK(cz.pass);
  CHECK(cz.max_residual == 0.0);

  const ModalState s0 = project(f.basis, Field::interpolate(f.mesh, sin_bump));
  double r[2];
  int i = 0;
  for (double dt : {4e-4, 2e-4}) {
    const EnergyLedger L = EnergyLedger::from_trajectory(run_deterministic(f.basis, f.T, s0, dt, 0.5));
    for (std::size_t m = 1; m < L.v2_integral.size(); ++m) CHECK(L.v2_integral[m] >= L.v2_integral[m - 1]);
    r[i++] = check_energy_balance(L, LedgerKind::deterministic).max_residual;
  }
  CHECK(r[0] / r[1] >= 3.0);
  CHECK_THROWS_AS(check_energy_balance(EnergyLedger{}, LedgerKind::deterministic), Error);

  // zero noise, zero data: every stochastic residual vanishes
  const NoiseModel quiet = NoiseModel::power_law(NoiseKind::additive, 0.0, 0.1, 16);
  McOptions o;
  o.paths = 4;
  o.store_every = 10;
  const McResult mr = run_monte_carlo(f.basis, f.T, quiet, zero, 1e-3, 0.05, o);
  const auto cs = check_energy_balance(EnergyLedger::from_moments(mr.rows), LedgerKind::stochastic_mean);
  CHECK(cs.pass);
  CHECK(cs.max_residual == 0.0);
  CHECK_THROWS_AS(check_energy_balance(EnergyLedger::from_trajectory(tz), LedgerKind::stochastic_mean), Error);
}

TEST_CASE("gronwall envelope closed forms") {
  CHECK(gronwall_envelope(0.7, 0.0, 0.0, 1.0) == 0.7);
  const NoiseModel nm = NoiseModel::power_law(NoiseKind::additive, 0.1, 1.0, 3);
  CHECK(gronwall_envelope(0.5, nm, 3, 1.0) == doctest::Approx(0.5 + 0.01 * 49.0 / 36.0).epsilon(1e-14));
}

TEST_CASE("besov estimator") {
  Fixture f;
  const SpectralScale scale(f.basis, FractionalOrder(1.5));
  Trajectory flat;
  flat.coeffs = Eigen::MatrixXd::Ones(11, 16);
  for (int m = 0; m <= 10; ++m) flat.times.push_back(0.1 * m);
  const BesovEstimate e = besov_estimate(flat, scale, 0.3, 2.0);
  CHECK(e.seminorm_sq == 0.0);
  CHECK(e.l2_part > 0.0);

  const ModalState s0 = project(f.basis, Field::interpolate(f.mesh, sin_bump));
  const Trajectory tr = run_deterministic(f.basis, f.T, s0, 1e-3, 1.0, 20);
  const double d = default_besov_delta(1.5);
  CHECK(d == 4.0);
  CHECK(besov_estimate(tr, scale, 0.4, d).seminorm_sq >= besov_estimate(tr, scale, 0.1, d).seminorm_sq);
  CHECK_THROWS_AS(besov_estimate(tr, scale, 0.5, d), DomainError);
  CHECK_THROWS_AS(besov_estimate(tr, scale, 0.0, d), DomainError);
  Trajectory uneven = flat;
  uneven.times[3] += 0.05;
  CHECK_THROWS_AS(besov_estimate(uneven, scale, 0.2, d), DomainError);
}

TEST_CASE("weak residual") {
  Fixture f;
  const ModalState zero{Eigen::VectorXd::Zero(16), 0.0};
  const Trajectory tz = run_deterministic(f.basis, f.T, zero, 1e-3, 0.1);
  CHECK(weak_residual(tz, f.basis, f.form, quartic_bump()).max() == 0.0);

  const ModalState s0 = project(f.basis, Field::interpolate(f.mesh, sin_bump));
  const Trajectory tr = run_deterministic(f.basis, f.T, s0, 1e-3, 0.5);
  const WeakResidualReport rep = weak_residual(tr, f.basis, f.form, quartic_bump());
  CHECK(rep.residual.front() == 0.0);

  // first eigenmode as test function: near-exact by Galerkin orthogonality
  const Field phi1(f.mesh, f.basis.modes().col(0));
  const double u0sq = s0.c.squaredNorm();
  CHECK(weak_residual(tr, f.basis, f.form, phi1, "phi_1").max() <= 1e-3 * u0sq);

  TestFunction bad{"linear_hat", [](double x) { return 1.0 - std::abs(x); }, [](double x) { return x > 0 ? -1.0 : 1.0; },
                   [](double) { return 0.0; }};
  CHECK_THROWS_AS(validate_test_function(bad, FractionalOrder(1.5)), DomainError);
  TestFunction offset{"offset", [](double x) { return 2.0 - x * x; }, [](double x) { return -2.0 * x; },
                      [](double) { return -2.0; }};
  CHECK_THROWS_AS(weak_residual(tr, f.basis, f.form, offset), DomainError);
  CHECK_NOTHROW(validate_test_function(quartic_bump(), FractionalOrder(1.5)));
}

TEST_CASE("convergence studies") {
  const Mesh mesh(64);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const Field u0 = Field::interpolate(mesh, sin_bump);
  const auto same = convergence_in_modes(form, u0, {8, 8}, 1e-3, 0.2);
  CHECK(same.at(0).difference == 0.0);
  const auto rows = convergence_in_modes(form, u0, {4, 8, 16, 32}, 1e-3, 0.5);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].difference < rows[i - 1].difference);
  const auto mrows = convergence_in_mesh(FractionalOrder(1.5), sin_bump, {16, 32, 64, 128}, 12, 1e-3, 0.5);
  REQUIRE(mrows.size() == 3);
  for (std::size_t i = 1; i < mrows.size(); ++i) CHECK(mrows[i].difference < mrows[i - 1].difference);
}
