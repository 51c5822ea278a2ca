#include "nlburgers/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <ostream>
#include <thread>

#include "nlburgers/errors.hpp"

namespace nlb {

NoiseModel NoiseModel::power_law(NoiseKind kind, double sigma, double eps, int m) {
  if (!(sigma >= 0.0)) throw DomainError("noise: sigma must be >= 0");
  if (!(eps > 0.0)) throw DomainError("noise: eps must be > 0");
  if (m < 1) throw DomainError("noise: dimension must be >= 1");
  NoiseModel nm;
  nm.kind = kind;
  nm.sigma = sigma;
  nm.q.resize(m);
  for (int i = 0; i < m; ++i) nm.q(i) = std::pow(i + 1.0, -(1.0 + eps));
  return nm;
}

double power_law_trace_bound(double eps) { return 1.0 + 1.0 / eps; }

double NoiseModel::growth_c(int n) const {
  if (kind == NoiseKind::additive) return 0.0;
  const int a = std::min(dim(), n);
  return sigma * sigma * (a > 0 ? q.head(a).maxCoeff() : 0.0);
}

double NoiseModel::growth_lambda(int n) const {
  if (kind == NoiseKind::linear_multiplicative) return 0.0;
  return sigma * sigma * q.head(std::min(dim(), n)).sum();
}

double NoiseModel::lipschitz(int n) const { return std::sqrt(growth_c(n)); }

Eigen::VectorXd wiener_increment(const NoiseModel& model, double dt, const PathRng& rng, std::uint64_t step) {
  if (!(dt > 0.0)) throw DomainError("wiener_increment: dt must be positive");
  const int m = model.dim();
  Eigen::VectorXd dw(m);
  for (int j = 0; 2 * j < m; ++j) {
    const auto z = rng.normal_pair(step, static_cast<std::uint32_t>(j));
    dw(2 * j) = std::sqrt(model.q(2 * j) * dt) * z[0];
    if (2 * j + 1 < m) dw(2 * j + 1) = std::sqrt(model.q(2 * j + 1) * dt) * z[1];
  }
  return dw;
}

double hs_norm_sq(const NoiseModel& model, const Eigen::VectorXd& c) {
  const int a = std::min<int>(model.dim(), static_cast<int>(c.size()));
  const double s2 = model.sigma * model.sigma;
  if (model.kind == NoiseKind::additive) return s2 * model.q.head(a).sum();
  return s2 * model.q.head(a).dot(c.head(a).cwiseAbs2());
}

SdeStepper::SdeStepper(const EigenBasis& basis, const ConvectionTensor& tensor, const NoiseModel& model,
                       double dt)
    : basis_(basis), tensor_(tensor), model_(model), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (tensor.size() != basis.size()) throw DimensionError("tensor and basis sizes differ");
  const int n = basis.size();
  active_ = std::min(n, model.dim());
  inv_factor_ = (1.0 + dt * basis.lambdas().array()).inverse().matrix();
  sqrt_q_dt_ = (model.q.head(active_) * dt).cwiseSqrt();
}

SdeStepper::StepInfo SdeStepper::step(ModalState& s, const PathRng& rng, std::uint64_t step) const {
  StepInfo info;
  info.hs = hs_norm_sq(model_, s.c);
  const Eigen::VectorXd nl = -tensor_.contract(s.c);
  info.nonlinear_sq = nl.squaredNorm();
  Eigen::VectorXd rhs = s.c + dt_ * nl;
  if (model_.sigma != 0.0) {
    for (int j = 0; 2 * j < active_; ++j) {
      const auto z = rng.normal_pair(step, static_cast<std::uint32_t>(j));
      for (int r = 0; r < 2 && 2 * j + r < active_; ++r) {
        const int i = 2 * j + r;
        double g = model_.sigma * sqrt_q_dt_(i) * z[r];
        if (model_.kind == NoiseKind::linear_multiplicative) g *= s.c(i);
        rhs(i) += g;
      }
    }
  }
  s.c = inv_factor_.cwiseProduct(rhs);
  s.t += dt_;
  check_finite(s.c, s.t, "sde step");
  return info;
}

MeanSe mean_se(const std::vector<double>& x) {
  MeanSe r;
  const std::size_t n = x.size();
  if (n == 0) return r;
  for (double v : x) r.mean += v;
  r.mean /= static_cast<double>(n);
  if (n < 2) return r;
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return r;
}

namespace {

enum Slot { kH2, kV2, kSup, kHs, kBal, kBias, kSlots };

}  // namespace

McResult run_monte_carlo(const EigenBasis& basis, const ConvectionTensor& tensor, const NoiseModel& model,
                         const ModalState& s0, double dt, double t_final, const McOptions& opts) {
  if (opts.paths < 1) throw DomainError("mc: paths must be >= 1");
  if (opts.store_every < 1) throw DomainError("mc: store_every must be >= 1");
  if (s0.c.size() != basis.size()) throw DimensionError("mc: initial state has wrong size");
  const long steps = step_count(dt, t_final);
  std::vector<long> marks{0};
  for (long m = 1; m <= steps; ++m)
    if (m % opts.store_every == 0 || m == steps) marks.push_back(m);
  const std::size_t ncp = marks.size();

  const SdeStepper stepper(basis, tensor, model, dt);
  const Eigen::VectorXd& lam = basis.lambdas();
  std::vector<double> slots(static_cast<std::size_t>(opts.paths) * ncp * kSlots);
  std::vector<Trajectory> kept(opts.keep_paths ? opts.paths : 0);
  std::vector<std::exception_ptr> errors(opts.paths);

  auto run_path = [&](long p) {
    const PathRng rng(opts.seed, static_cast<std::uint64_t>(p));
    ModalState s = s0;
    const double h0 = s.c.squaredNorm();
    const double v0 = s.c.cwiseAbs2().dot(lam);
    double v_prev = v0, v2 = 0.0, hs = 0.0, sup = h0 * h0, rem = 0.0;
    double* out = &slots[static_cast<std::size_t>(p) * ncp * kSlots];
    std::optional<TrajectoryRecorder> rec;
    if (opts.keep_paths) rec.emplace(basis, static_cast<int>(ncp));
    auto record = [&](std::size_t cp, double h, double v) {
      double* o = out + cp * kSlots;
      o[kH2] = h;
      o[kV2] = v2;
      o[kSup] = sup;
      o[kHs] = hs;
      o[kBal] = h + 2.0 * v2 - hs - h0;
      o[kBias] = dt * (v0 - v) + rem;
      if (rec) rec->record(s);
    };
    record(0, h0, v0);
    std::size_t cp = 1;
    for (long m = 1; m <= steps; ++m) {
      const auto info = stepper.step(s, rng, static_cast<std::uint64_t>(m - 1));
      s.t = s0.t + m * dt;
      const double h = s.c.squaredNorm();
      const double v = s.c.cwiseAbs2().dot(lam);
      v2 += 0.5 * dt * (v_prev + v);
      hs += dt * info.hs;
      sup = std::max(sup, h * h);
      rem += dt * dt * (info.nonlinear_sq - s.c.cwiseProduct(lam).squaredNorm());
      v_prev = v;
      if (cp < ncp && marks[cp] == m) record(cp++, h, v);
    }
    if (rec) kept[p] = rec->finish(p);
  };

  const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(opts.paths)));
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long p; (p = next.fetch_add(1)) < opts.paths;) {
      try {
        run_path(p);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (long p = 0; p < opts.paths; ++p)
    if (errors[p]) {
      try {
        std::rethrow_exception(errors[p]);
      } catch (const BlowUpError& e) {
        throw BlowUpError(std::string(e.what()) + " on path " + std::to_string(p), e.time(), e.norm());
      }
    }

  McResult res;
  std::vector<double> col(opts.paths);
  for (std::size_t cp = 0; cp < ncp; ++cp) {
    MeanSe ms[kSlots];
    for (int k = 0; k < kSlots; ++k) {
      for (long p = 0; p < opts.paths; ++p) col[p] = slots[(static_cast<std::size_t>(p) * ncp + cp) * kSlots + k];
      ms[k] = mean_se(col);
    }
    MomentRow r;
    r.t = s0.t + marks[cp] * dt;
    r.mean_h2 = ms[kH2].mean, r.se_h2 = ms[kH2].se;
    r.mean_v2_int = ms[kV2].mean, r.se_v2_int = ms[kV2].se;
    r.mean_sup_h4 = ms[kSup].mean, r.se_sup_h4 = ms[kSup].se;
    r.hs_int = ms[kHs].mean, r.se_hs_int = ms[kHs].se;
    r.mean_balance = ms[kBal].mean, r.se_balance = ms[kBal].se;
    r.mean_bias = ms[kBias].mean, r.se_bias = ms[kBias].se;
    res.rows.push_back(r);
  }
  res.paths = std::move(kept);
  return res;
}

void write_moments_csv(std::ostream& os, const std::vector<MomentRow>& rows) {
  os << "t,mean_H2,se_H2,mean_V2_int,se_V2_int,mean_sup_H4,se_sup_H4,hs_int,se_hs_int\n";
  for (const auto& r : rows)
    os << fmt_sci(r.t) << ',' << fmt_sci(r.mean_h2) << ',' << fmt_sci(r.se_h2) << ',' << fmt_sci(r.mean_v2_int)
       << ',' << fmt_sci(r.se_v2_int) << ',' << fmt_sci(r.mean_sup_h4) << ',' << fmt_sci(r.se_sup_h4) << ','
       << fmt_sci(r.hs_int) << ',' << fmt_sci(r.se_hs_int) << '\n';
}

void write_balance_csv(std::ostream& os, const std::vector<MomentRow>& rows) {
  os << "t,mean_balance,se_balance,bias,se_bias\n";
  for (const auto& r : rows)
    os << fmt_sci(r.t) << ',' << fmt_sci(r.mean_balance) << ',' << fmt_sci(r.se_balance) << ','
       << fmt_sci(r.mean_bias) << ',' << fmt_sci(r.se_bias) << '\n';
}

void write_paths_csv(std::ostream& os, const std::vector<Trajectory>& paths) {
  if (paths.empty()) return;
  const int n = paths.front().modes();
  os << "path_id,t";
  for (int k = 1; k <= n; ++k) os << ",c_" << k;
  os << ",energy_H,energy_V2\n";
  for (const auto& tr : paths)
    for (int m = 0; m < tr.samples(); ++m) {
      os << tr.path_id.value_or(0) << ',' << fmt_sci(tr.times[m]);
      for (int k = 0; k < n; ++k) os << ',' << fmt_sci(tr.coeffs(m, k));
      os << ',' << fmt_sci(tr.energy_h[m]) << ',' << fmt_sci(tr.energy_v2[m]) << '\n';
    }
}

}  // namespace nlb
