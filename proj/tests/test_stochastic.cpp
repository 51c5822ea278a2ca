#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlburgers/errors.hpp"
#include "nlburgers/stochastic.hpp"

using namespace nlb;

TEST_CASE("philox known-answer vectors") {
  auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);
  r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(r[0] == 0x408f276du);
  CHECK(r[1] == 0x41c83b0eu);
  CHECK(r[2] == 0xa20bc7c6u);
  CHECK(r[3] == 0x6d5451fdu);
}

TEST_CASE("noise model constants") {
  const NoiseModel add = NoiseModel::power_law(NoiseKind::additive, 1.0, 1.0, 3);
  CHECK(hs_norm_sq(add, Eigen::VectorXd::Zero(3)) == doctest::Approx(49.0 / 36.0).epsilon(1e-15));
  CHECK(add.growth_lambda(3) == doctest::Approx(49.0 / 36.0).epsilon(1e-15));
  CHECK(add.growth_c(3) == 0.0);
  const NoiseModel zero = NoiseModel::power_law(NoiseKind::additive, 0.0, 0.1, 5);
  CHECK(hs_norm_sq(zero, Eigen::VectorXd::Ones(5)) == 0.0);
  for (double eps : {0.1, 0.5})
    CHECK(NoiseModel::power_law(NoiseKind::additive, 1.0, eps, 4000).trace() <= power_law_trace_bound(eps));

  const NoiseModel mult = NoiseModel::power_law(NoiseKind::linear_multiplicative, 0.7, 0.1, 6);
  for (int s = 0; s < 20; ++s) {
    const PathRng rng(2, s);
    Eigen::VectorXd c(8), d(8);
    for (int k = 0; k < 8; ++k) c(k) = rng.normal(0, k), d(k) = rng.normal(1, k);
    CHECK(hs_norm_sq(mult, c) <= mult.growth_c(8) * c.squaredNorm() + 1e-15);
    // ||g(c) - g(d)||_HS = sigma (sum q_i (c_i - d_i)^2)^{1/2}
    const double diff = std::sqrt(hs_norm_sq(mult, c - d));
    CHECK(diff <= mult.lipschitz(8) * (c - d).norm() + 1e-15);
  }
  CHECK_THROWS_AS(NoiseModel::power_law(NoiseKind::additive, -1.0, 0.1, 3), DomainError);
}

TEST_CASE("wiener increments: variance, independence, determinism") {
  const NoiseModel nm = NoiseModel::power_law(NoiseKind::additive, 1.0, 0.1, 4);
  const double dt = 0.01;
  const int draws = 100000;
  const PathRng rng(123, 0);
  double s0 = 0, s1 = 0, s01 = 0, q0 = 0, q1 = 0, q01 = 0;
  for (int m = 0; m < draws; ++m) {
    const Eigen::VectorXd w = wiener_increment(nm, dt, rng, m);
    s0 += w(0) * w(0), s1 += w(1) * w(1), s01 += w(0) * w(1);
    q0 += std::pow(w(0), 4), q1 += std::pow(w(1), 4), q01 += w(0) * w(0) * w(1) * w(1);
  }
  const double n = draws;
  auto within = [&](double sum, double sumsq, double target) {
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    return std::abs(mean - target) <= 3.0 * se;
  };
  CHECK(within(s0, q0, nm.q(0) * dt));
  CHECK(within(s1, q1, nm.q(1) * dt));
  CHECK(within(s01, q01, 0.0));
  const PathRng again(123, 0);
  CHECK((wiener_increment(nm, dt, rng, 77) - wiener_increment(nm, dt, again, 77)).norm() == 0.0);
  CHECK((wiener_increment(nm, dt, rng, 77) - wiener_increment(nm, dt, PathRng(123, 1), 77)).norm() > 0.0);
  // nested truncation: a 2-mode model sees the same first two increments
  const NoiseModel small = NoiseModel::power_law(NoiseKind::additive, 1.0, 0.1, 2);
  CHECK((wiener_increment(small, dt, rng, 5) - wiener_increment(nm, dt, rng, 5).head(2)).norm() == 0.0);
}

TEST_CASE("sde step: zero noise and discrete Ornstein-Uhlenbeck variance") {
  const Mesh mesh(64);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 1);
  const ConvectionTensor Z = convection_tensor(b).zeroed();
  const double lam = b.lambdas()(0), dt = 1e-2;
  {
    const NoiseModel quiet = NoiseModel::power_law(NoiseKind::additive, 0.0, 0.1, 1);
    const SdeStepper st(b, Z, quiet, dt);
    ModalState s{Eigen::VectorXd::Constant(1, 2.0), 0.0};
    st.step(s, PathRng(1, 0), 0);
    CHECK(s.c(0) == doctest::Approx(2.0 / (1.0 + lam * dt)).epsilon(1e-15));
  }
  const double sigma = 0.8;
  const NoiseModel nm = NoiseModel::power_law(NoiseKind::additive, sigma, 0.1, 1);
  McOptions o;
  o.paths = 20000;
  o.seed = 31;
  o.store_every = 100;
  const McResult r = run_monte_carlo(b, Z, nm, ModalState{Eigen::VectorXd::Zero(1), 0.0}, dt, 2.0, o);
  // exact variance recursion v+ = (v + sigma^2 q dt) / (1 + lam dt)^2
  double v = 0.0;
  for (int m = 0; m < 200; ++m) v = (v + sigma * sigma * nm.q(0) * dt) / std::pow(1.0 + lam * dt, 2);
  const double stationary = sigma * sigma * nm.q(0) / (lam * (2.0 + lam * dt));
  CHECK(std::abs(v - stationary) < 1e-6 * stationary);
  CHECK(std::abs(r.rows.back().mean_h2 - v) <= 3.0 * r.rows.back().se_h2);
}

TEST_CASE("monte carlo is thread-count invariant and reproducible") {
  const Mesh mesh(32);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 6);
  const ConvectionTensor T = convection_tensor(b);
  const ModalState s0 = project(b, Field::interpolate(mesh, [](double x) { return 1.0 - x * x; }));
  const NoiseModel nm = NoiseModel::power_law(NoiseKind::linear_multiplicative, 0.5, 0.1, 6);
  std::string out[3];
  int i = 0;
  for (int threads : {1, 4, 1}) {
    McOptions o;
    o.paths = 37;
    o.seed = 9;
    o.threads = threads;
    o.store_every = 5;
    o.keep_paths = true;
    const McResult r = run_monte_carlo(b, T, nm, s0, 1e-3, 0.05, o);
    std::ostringstream os;
    write_moments_csv(os, r.rows);
    write_balance_csv(os, r.rows);
    write_paths_csv(os, r.paths);
    out[i++] = os.str();
  }
  CHECK(out[0] == out[1]);
  CHECK(out[0] == out[2]);
  CHECK(out[0].rfind("t,mean_H2,se_H2,mean_V2_int,se_V2_int,mean_sup_H4,se_sup_H4,hs_int,se_hs_int\n", 0) == 0);

  McOptions o;
  o.paths = 2;
  const ModalState huge{Eigen::VectorXd::Constant(6, 1e9), 0.0};
  CHECK_THROWS_AS(run_monte_carlo(b, T, nm, huge, 1e-3, 0.01, o), BlowUpError);
}
