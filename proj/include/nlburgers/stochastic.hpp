#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nlburgers/galerkin.hpp"
#include "nlburgers/rng.hpp"
#include "nlburgers/trajectory.hpp"

namespace nlb {

enum class NoiseKind { additive, linear_multiplicative };

/// Q-Wiener forcing on the first m eigenmodes. q holds the covariance
/// eigenvalues of Q (written lambda^Q_i to keep them apart from the operator
/// eigenvalues lambda_k). Intensities:
///   additive(sigma):              g(u) h = sigma h
///   linear_multiplicative(sigma): (g(u) h)_i = sigma c_i h_i
struct NoiseModel {
  NoiseKind kind = NoiseKind::additive;
  double sigma = 0.0;
  Eigen::VectorXd q;

  /// lambda^Q_i = i^{-(1+eps)}, i = 1..m.
  static NoiseModel power_law(NoiseKind kind, double sigma, double eps, int m);

  int dim() const { return static_cast<int>(q.size()); }
  double trace() const { return q.sum(); }

  // Constants of the growth and Lipschitz conditions
  //   ||g(u)||_HS^2 <= C ||u||_H^2 + lambda,   ||g(u) - g(v)||_HS <= L ||u - v||_H,
  // for the truncation to the first n modes.
  double growth_c(int n) const;
  double growth_lambda(int n) const;
  double lipschitz(int n) const;
};

/// sum_{i<m} i^{-(1+eps)} <= 1 + 1/eps, the bound on partial traces of the default spectrum.
double power_law_trace_bound(double eps);

/// Delta W_i = sqrt(lambda^Q_i dt) xi_i, i = 1..m, with xi drawn from the
/// counter-based stream at the given step.
Eigen::VectorXd wiener_increment(const NoiseModel& model, double dt, const PathRng& rng, std::uint64_t step);

/// ||P_n g(u) P~_n||_HS^2 = Tr(g Q g*) for u = sum c_k phi_k, n = c.size().
double hs_norm_sq(const NoiseModel& model, const Eigen::VectorXd& c);

/// Drift-implicit Euler-Maruyama for the Galerkin SDE:
///   c+ = [c + dt N(c) + g(c) dW] / (1 + lambda dt),  N(c) = -T:(c c).
/// Noise is truncated to the first min(m, n) modes.
class SdeStepper {
 public:
  SdeStepper(const EigenBasis& basis, const ConvectionTensor& tensor, const NoiseModel& model, double dt);

  double dt() const { return dt_; }

  struct StepInfo {
    double hs = 0.0;          // ||g(c)||_HS^2 at the old state (Ito point)
    double nonlinear_sq = 0.0;  // ||N(c)||^2
  };
  /// Advance in place using the normals of time step `step`; throws BlowUpError.
  StepInfo step(ModalState& s, const PathRng& rng, std::uint64_t step) const;

 private:
  const EigenBasis& basis_;
  const ConvectionTensor& tensor_;
  const NoiseModel& model_;
  double dt_;
  int active_;  // min(m, n)
  Eigen::VectorXd inv_factor_, sqrt_q_dt_;
};

struct McOptions {
  long paths = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  int store_every = 1;   // steps between checkpoints
  bool keep_paths = false;
};

/// Monte Carlo moments at one checkpoint; se_* are sample standard errors.
struct MomentRow {
  double t = 0.0;
  double mean_h2 = 0.0, se_h2 = 0.0;          // E ||u||_H^2
  double mean_v2_int = 0.0, se_v2_int = 0.0;  // E int_0^t ||u||_V^2 (trapezoid)
  double mean_sup_h4 = 0.0, se_sup_h4 = 0.0;  // E sup_{s<=t} ||u||_H^4
  double hs_int = 0.0, se_hs_int = 0.0;       // E int_0^t ||g||_HS^2 (left point)
  // Ito balance ||u||^2 + 2 int ||u||_V^2 - int ||g||_HS^2 - ||u_0||^2
  double mean_balance = 0.0, se_balance = 0.0;
  // Exact discrete remainder of the balance for this scheme, see run_monte_carlo.
  double mean_bias = 0.0, se_bias = 0.0;
};

struct McResult {
  std::vector<MomentRow> rows;
  std::vector<Trajectory> paths;  // filled when keep_paths
};

/// Runs opts.paths independent paths from s0 and aggregates moments at every
/// checkpoint. Paths are distributed over opts.threads workers; the reduction
/// runs in path-id order, so results do not depend on the thread count.
///
/// For the drift-implicit scheme the balance residual R satisfies exactly
///   R = dt (V_0 - V_M) + dt^2 sum_m (||N(c_m)||^2 - ||Lambda c_{m+1}||^2) + mean-zero terms,
/// with V = ||u||_V^2. The first part is reported as `bias`: it is O(dt) and is
/// the declared band for the Monte Carlo balance check.
McResult run_monte_carlo(const EigenBasis& basis, const ConvectionTensor& tensor, const NoiseModel& model,
                         const ModalState& s0, double dt, double t_final, const McOptions& opts);

/// `t, mean_H2, se_H2, mean_V2_int, se_V2_int, mean_sup_H4, se_sup_H4, hs_int, se_hs_int`
void write_moments_csv(std::ostream& os, const std::vector<MomentRow>& rows);
/// `t, mean_balance, se_balance, bias, se_bias`
void write_balance_csv(std::ostream& os, const std::vector<MomentRow>& rows);
/// Trajectories with a leading path_id column under one header.
void write_paths_csv(std::ostream& os, const std::vector<Trajectory>& paths);

/// Sample mean and standard error of the mean.
struct MeanSe {
  double mean = 0.0, se = 0.0;
};
MeanSe mean_se(const std::vector<double>& x);

}  // namespace nlb
