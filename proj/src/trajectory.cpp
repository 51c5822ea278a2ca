#include "nlburgers/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlburgers/errors.hpp"

namespace nlb {

std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

TrajectoryRecorder::TrajectoryRecorder(const EigenBasis& basis, int capacity) : basis_(basis) {
  traj_.coeffs.resize(capacity, basis.size());
  traj_.times.reserve(capacity);
  traj_.energy_h.reserve(capacity);
  traj_.energy_v2.reserve(capacity);
}

void TrajectoryRecorder::record(const ModalState& s) {
  if (count_ >= traj_.coeffs.rows()) traj_.coeffs.conservativeResize(2 * count_ + 1, Eigen::NoChange);
  traj_.coeffs.row(count_) = s.c.transpose();
  traj_.times.push_back(s.t);
  traj_.energy_h.push_back(s.c.squaredNorm());
  traj_.energy_v2.push_back(s.c.cwiseAbs2().dot(basis_.lambdas()));
  ++count_;
}

Trajectory TrajectoryRecorder::finish(std::optional<long> path_id) {
  traj_.coeffs.conservativeResize(count_, Eigen::NoChange);
  traj_.path_id = path_id;
  return std::move(traj_);
}

long step_count(double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final > 0.0)) throw DomainError("dt and t_final must be positive");
  const double r = t_final / dt;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - n) > 1e-9 * r)
    throw DomainError("t_final is not an integer multiple of dt");
  return n;
}

Trajectory run_deterministic(const EigenBasis& basis, const ConvectionTensor& tensor, ModalState s0,
                             double dt, double t_final, int store_every, Integrator scheme) {
  if (store_every < 1) throw DomainError("store_every must be >= 1");
  const long steps = step_count(dt, t_final);
  DeterministicStepper stepper(basis, tensor, dt, scheme);
  TrajectoryRecorder rec(basis, static_cast<int>(steps / store_every + 2));
  ModalState s = std::move(s0);
  const double t0 = s.t;
  rec.record(s);
  for (long m = 1; m <= steps; ++m) {
    stepper.step(s);
    s.t = t0 + m * dt;
    if (m % store_every == 0 || m == steps) rec.record(s);
  }
  return rec.finish();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.modes();
  if (traj.path_id) os << "path_id,";
  os << "t";
  for (int k = 1; k <= n; ++k) os << ",c_" << k;
  os << ",energy_H,energy_V2\n";
  for (int m = 0; m < traj.samples(); ++m) {
    if (traj.path_id) os << *traj.path_id << ',';
    os << fmt_sci(traj.times[m]);
    for (int k = 0; k < n; ++k) os << ',' << fmt_sci(traj.coeffs(m, k));
    os << ',' << fmt_sci(traj.energy_h[m]) << ',' << fmt_sci(traj.energy_v2[m]) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("trajectory csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const bool has_path = !header.empty() && header[0] == "path_id";
  const int offset = has_path ? 1 : 0;
  const int n = static_cast<int>(header.size()) - offset - 3;
  if (n < 1 || header[offset] != "t" || header[header.size() - 2] != "energy_H" ||
      header.back() != "energy_V2")
    throw Error("trajectory csv: unexpected header");

  Trajectory traj;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != n + offset + 3) throw Error("trajectory csv: ragged row");
    if (has_path) traj.path_id = static_cast<long>(vals[0]);
    traj.times.push_back(vals[offset]);
    traj.energy_h.push_back(vals[offset + n + 1]);
    traj.energy_v2.push_back(vals[offset + n + 2]);
    rows.push_back(std::move(vals));
  }
  traj.coeffs.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (int k = 0; k < n; ++k) traj.coeffs(static_cast<Eigen::Index>(m), k) = rows[m][offset + 1 + k];
  return traj;
}

}  // namespace nlb
