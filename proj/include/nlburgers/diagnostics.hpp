#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlburgers/galerkin.hpp"
#include "nlburgers/spaces.hpp"
#include "nlburgers/stochastic.hpp"
#include "nlburgers/trajectory.hpp"

namespace nlb {

/// Energy accounting along a run. For deterministic runs
///   balance = h2 + 2 v2_integral - h2(0);
/// for Monte Carlo means the Ito term is subtracted as well and the standard
/// errors and the scheme's exact O(dt) remainder travel with the ledger.
struct EnergyLedger {
  std::vector<double> times, h2, v2_integral, hs_integral, balance_residual;
  std::vector<double> balance_se, bias, bias_se;  // stochastic means only

  static EnergyLedger from_trajectory(const Trajectory& traj);
  static EnergyLedger from_moments(const std::vector<MomentRow>& rows);
  bool empty() const { return times.empty(); }
};

enum class LedgerKind { deterministic, stochastic_mean };

struct BalanceCheck {
  bool pass = false;
  double max_residual = 0.0;  // relative to h2(0) for deterministic ledgers
  double worst_score = 0.0;   // stochastic: max |res - bias| / (3 (se + se_bias))
};

/// deterministic: max_t |balance| <= tol h2(0).
/// stochastic_mean: |balance - bias| <= 3 (se + se_bias) at every time.
BalanceCheck check_energy_balance(const EnergyLedger& ledger, LedgerKind kind, double tol = 1e-4);

/// e^{CT} (E||u_0||^2 + lambda T): majorant of sup_t E||u||_H^2 and of
/// E||u(t)||_H^2 + 2 E int_0^t ||u||_V^2.
double gronwall_envelope(double h0, double c, double lambda, double t_final);
double gronwall_envelope(double h0, const NoiseModel& model, int n_modes, double t_final);

/// Discrete Besov-Slobodetski quantity of Lemma-3.1 type, in the spectral
/// scale of the discrete operator:
///   seminorm_sq = sum_{m != l} ||u_m - u_l||_(-delta)^2 |t_m - t_l|^{-1-2 gamma} dt^2,
///   l2_part     = sum_m ||u_m||_(-delta)^2 dt.
struct BesovEstimate {
  double gamma = 0.0, delta = 0.0;
  double seminorm_sq = 0.0, l2_part = 0.0;
  double total() const { return seminorm_sq + l2_part; }
};

/// Throws DomainError unless 0 < gamma < 1/2 and delta > 0, and when the
/// samples are not uniformly spaced in time.
BesovEstimate besov_estimate(const Trajectory& traj, const SpectralScale& scale, double gamma, double delta);

/// Default delta = 2 + alpha + 1/2.
double default_besov_delta(double alpha);

/// Analytic test function for the weak formulation.
struct TestFunction {
  std::string id;
  std::function<double(double)> f, fx, fxx;
};

/// (1 - x^2)^2.
TestFunction quartic_bump();

/// Rejects (DomainError with the reason) test functions that do not vanish at
/// +-1, whose slope does not vanish there (rho phi would then be unbounded for
/// alpha > 1), or that are not finite with two derivatives on a fine sample.
void validate_test_function(const TestFunction& phi, FractionalOrder alpha);

struct WeakResidualReport {
  std::string test_id;
  std::vector<double> times, residual;
  double max() const;
};

/// |(u,phi) + int (u, A phi) - 1/2 int (u^2, phi_x) - (u_0, phi)| along the
/// stored samples, time integrals by trapezoid. (u, A phi) uses the assembled
/// operator on the interpolant of phi; the other pairings use Gauss quadrature
/// against phi itself.
WeakResidualReport weak_residual(const Trajectory& traj, const EigenBasis& basis, const NonlocalForm& form,
                                 const TestFunction& phi);
/// Same with a piecewise-linear test function given on the mesh.
WeakResidualReport weak_residual(const Trajectory& traj, const EigenBasis& basis, const NonlocalForm& form,
                                 const Field& phi, const std::string& id);

/// One row of a Galerkin convergence table: ||u^a - u^b||_{L^2(0,T;H)}.
struct ConvergenceRow {
  std::string kind;  // "modes" or "mesh"
  int level_a = 0, level_b = 0;
  double difference = 0.0;
};

/// First n modes of a basis.
EigenBasis truncate_basis(const EigenBasis& basis, int n);

/// Deterministic runs at each n of n_list on one mesh, compared pairwise
/// between successive entries.
std::vector<ConvergenceRow> convergence_in_modes(const NonlocalForm& form, const Field& u0,
                                                 const std::vector<int>& n_list, double dt, double t_final,
                                                 int store_every = 1);

/// Monte Carlo mean fields E c(t) at each n with common noise (same seed and
/// nested truncation), compared between successive entries.
std::vector<ConvergenceRow> convergence_in_modes_mean(const NonlocalForm& form, const Field& u0,
                                                      const std::vector<int>& n_list, const NoiseModel& model,
                                                      double dt, double t_final, McOptions opts);

/// Deterministic runs with n modes on each mesh of mesh_list (each mesh a
/// refinement of the previous), compared on the finest mesh.
std::vector<ConvergenceRow> convergence_in_mesh(FractionalOrder alpha, const std::function<double(double)>& u0,
                                                const std::vector<int>& mesh_list, int n_modes, double dt,
                                                double t_final, int store_every = 1);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

/// Machine-readable outcome of one check.
struct Verdict {
  std::string check_id;
  double quantity = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// `check_id,quantity,threshold,verdict`
void write_verdicts_csv(std::ostream& os, const std::vector<Verdict>& verdicts);

}  // namespace nlb
