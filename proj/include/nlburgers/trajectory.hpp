#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlburgers/galerkin.hpp"

namespace nlb {

/// Modal coefficients sampled in time, with ||u||_H^2 and ||u||_V^2 per sample.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd coeffs;  // rows = samples, cols = modes
  std::vector<double> energy_h;
  std::vector<double> energy_v2;
  std::optional<long> path_id;

  int samples() const { return static_cast<int>(times.size()); }
  int modes() const { return static_cast<int>(coeffs.cols()); }
  Eigen::VectorXd state(int m) const { return coeffs.row(m).transpose(); }
};

/// Builds a Trajectory from states on an M-orthonormal basis, where
/// ||u||_H^2 = sum c_k^2 and ||u||_V^2 = sum lambda_k c_k^2.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const EigenBasis& basis, int capacity);
  void record(const ModalState& s);
  Trajectory finish(std::optional<long> path_id = std::nullopt);

 private:
  const EigenBasis& basis_;
  Trajectory traj_;
  int count_ = 0;
};

/// Integrate the deterministic Galerkin system from s0 to t_final, recording
/// every `store_every` steps (the first and last states are always recorded).
Trajectory run_deterministic(const EigenBasis& basis, const ConvectionTensor& tensor, ModalState s0,
                             double dt, double t_final, int store_every = 1,
                             Integrator scheme = Integrator::etd_rk2);

/// Number of steps of size dt reaching t_final; throws DomainError unless
/// t_final/dt is an integer to 1e-9 relative.
long step_count(double dt, double t_final);

/// CSV: `t,c_1..c_n,energy_H,energy_V2`, optionally preceded by `path_id`.
/// Values in %.16e.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

/// %.16e formatting used by every CSV writer.
std::string fmt_sci(double v);

}  // namespace nlb
