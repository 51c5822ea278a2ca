#include "nlburgers/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "nlburgers/errors.hpp"
#include "nlburgers/quadrature.hpp"

namespace nlb {

EnergyLedger EnergyLedger::from_trajectory(const Trajectory& traj) {
  EnergyLedger L;
  const int S = traj.samples();
  L.times = traj.times;
  L.h2 = traj.energy_h;
  L.v2_integral.assign(S, 0.0);
  L.hs_integral.assign(S, 0.0);
  L.balance_residual.assign(S, 0.0);
  for (int m = 1; m < S; ++m)
    L.v2_integral[m] = L.v2_integral[m - 1] +
                       0.5 * (traj.times[m] - traj.times[m - 1]) * (traj.energy_v2[m] + traj.energy_v2[m - 1]);
  for (int m = 0; m < S; ++m) L.balance_residual[m] = L.h2[m] + 2.0 * L.v2_integral[m] - L.h2[0];
  return L;
}

EnergyLedger EnergyLedger::from_moments(const std::vector<MomentRow>& rows) {
  EnergyLedger L;
  for (const auto& r : rows) {
    L.times.push_back(r.t);
    L.h2.push_back(r.mean_h2);
    L.v2_integral.push_back(r.mean_v2_int);
    L.hs_integral.push_back(r.hs_int);
    L.balance_residual.push_back(r.mean_balance);
    L.balance_se.push_back(r.se_balance);
    L.bias.push_back(r.mean_bias);
    L.bias_se.push_back(r.se_bias);
  }
  return L;
}

BalanceCheck check_energy_balance(const EnergyLedger& ledger, LedgerKind kind, double tol) {
  if (ledger.empty()) throw Error("check_energy_balance: empty ledger");
  BalanceCheck out;
  const std::size_t S = ledger.times.size();
  if (kind == LedgerKind::deterministic) {
    const double ref = ledger.h2[0];
    for (double r : ledger.balance_residual) out.max_residual = std::max(out.max_residual, std::abs(r));
    if (ref > 0.0) out.max_residual /= ref;
    out.pass = out.max_residual <= tol;
    return out;
  }
  if (ledger.balance_se.size() != S || ledger.bias.size() != S || ledger.bias_se.size() != S)
    throw Error("check_energy_balance: ledger carries no Monte Carlo errors");
  out.pass = true;
  for (std::size_t m = 0; m < S; ++m) {
    out.max_residual = std::max(out.max_residual, std::abs(ledger.balance_residual[m]));
    const double dev = std::abs(ledger.balance_residual[m] - ledger.bias[m]);
    const double band = 3.0 * (ledger.balance_se[m] + ledger.bias_se[m]);
    if (band > 0.0) out.worst_score = std::max(out.worst_score, dev / band);
    if (dev > band && dev > 1e-14) out.pass = false;
  }
  return out;
}

double gronwall_envelope(double h0, double c, double lambda, double t_final) {
  return std::exp(c * t_final) * (h0 + lambda * t_final);
}

double gronwall_envelope(double h0, const NoiseModel& model, int n_modes, double t_final) {
  return gronwall_envelope(h0, model.growth_c(n_modes), model.growth_lambda(n_modes), t_final);
}

double default_besov_delta(double alpha) { return 2.0 + alpha + 0.5; }

BesovEstimate besov_estimate(const Trajectory& traj, const SpectralScale& scale, double gamma, double delta) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw DomainError("besov_estimate: gamma must lie in (0, 1/2)");
  if (!(delta > 0.0)) throw DomainError("besov_estimate: delta must be positive");
  if (traj.modes() != scale.basis().size()) throw DimensionError("besov_estimate: trajectory/basis size mismatch");
  const int S = traj.samples();
  BesovEstimate est{gamma, delta, 0.0, 0.0};
  if (S < 2) return est;
  const double dt = traj.times[1] - traj.times[0];
  for (int m = 1; m < S; ++m)
    if (std::abs(traj.times[m] - traj.times[m - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw DomainError("besov_estimate: samples are not uniformly spaced");

  const Eigen::VectorXd w = scale.weights(-delta);
  // Weighted coefficients so that ||u_m - u_l||^2 = |z_m - z_l|^2.
  const Eigen::MatrixXd z = traj.coeffs * w.cwiseSqrt().asDiagonal();
  for (int m = 0; m < S; ++m) est.l2_part += z.row(m).squaredNorm() * dt;
  for (int m = 0; m < S; ++m)
    for (int l = m + 1; l < S; ++l) {
      const double gap = (l - m) * dt;
      est.seminorm_sq += 2.0 * (z.row(m) - z.row(l)).squaredNorm() * std::pow(gap, -1.0 - 2.0 * gamma) * dt * dt;
    }
  return est;
}

TestFunction quartic_bump() {
  return {"quartic_bump", [](double x) { return (1 - x * x) * (1 - x * x); },
          [](double x) { return -4.0 * x * (1 - x * x); }, [](double x) { return 12.0 * x * x - 4.0; }};
}

void validate_test_function(const TestFunction& phi, FractionalOrder) {
  if (!phi.f || !phi.fx || !phi.fxx) throw DomainError("test function '" + phi.id + "': missing derivative");
  double scale = 0.0;
  const int K = 2000;
  for (int i = 0; i <= K; ++i) {
    const double x = -1.0 + 2.0 * i / K;
    const double v[3] = {phi.f(x), phi.fx(x), phi.fxx(x)};
    for (double y : v)
      if (!std::isfinite(y)) throw DomainError("test function '" + phi.id + "': not C^2 on [-1,1]");
    scale = std::max({scale, std::abs(v[0]), std::abs(v[1])});
  }
  const double tol = 1e-10 * std::max(1.0, scale);
  for (double e : {-1.0, 1.0}) {
    if (std::abs(phi.f(e)) > tol) throw DomainError("test function '" + phi.id + "': does not vanish at the boundary");
    if (std::abs(phi.fx(e)) > tol)
      throw DomainError("test function '" + phi.id + "': slope does not vanish at the boundary, rho*phi unbounded");
  }
}

double WeakResidualReport::max() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

namespace {

inline double nodal(const Eigen::VectorXd& v, int p, int N) { return (p <= 0 || p >= N) ? 0.0 : v(p - 1); }

// Shared time loop: pairings holds (u,phi), (u, A phi), (u^2, phi_x) per sample.
WeakResidualReport assemble_report(const Trajectory& traj, const std::string& id,
                                   const std::vector<std::array<double, 3>>& pairings) {
  WeakResidualReport rep;
  rep.test_id = id;
  rep.times = traj.times;
  const int S = traj.samples();
  rep.residual.assign(S, 0.0);
  double lin = 0.0, conv = 0.0;
  for (int m = 0; m < S; ++m) {
    if (m > 0) {
      const double dt = traj.times[m] - traj.times[m - 1];
      lin += 0.5 * dt * (pairings[m][1] + pairings[m - 1][1]);
      conv += 0.5 * dt * (pairings[m][2] + pairings[m - 1][2]);
    }
    rep.residual[m] = std::abs(pairings[m][0] + lin - 0.5 * conv - pairings[0][0]);
  }
  return rep;
}

}  // namespace

WeakResidualReport weak_residual(const Trajectory& traj, const EigenBasis& basis, const NonlocalForm& form,
                                 const TestFunction& phi) {
  validate_test_function(phi, form.alpha());
  if (!(basis.mesh() == form.mesh())) throw DimensionError("weak_residual: mesh mismatch");
  if (traj.modes() != basis.size()) throw DimensionError("weak_residual: trajectory/basis size mismatch");
  const Mesh& mesh = form.mesh();
  const int N = mesh.n_cells();
  const double h = mesh.h();
  const auto rule = quad::gauss_legendre(4);
  const int q = static_cast<int>(rule.size());
  // phi and phi_x at the Gauss points of every cell.
  Eigen::MatrixXd f(N, q), fx(N, q);
  for (int c = 0; c < N; ++c)
    for (int g = 0; g < q; ++g) {
      const double x = -1.0 + (c + 0.5 * (1.0 + rule.nodes[g])) * h;
      f(c, g) = phi.f(x);
      fx(c, g) = phi.fx(x);
    }
  const Eigen::VectorXd a_phi = form.A() * Field::interpolate(mesh, phi.f).values;

  std::vector<std::array<double, 3>> pairings(traj.samples());
  for (int m = 0; m < traj.samples(); ++m) {
    const Eigen::VectorXd u = basis.modes() * traj.state(m);
    double up = 0.0, uu = 0.0;
    for (int c = 0; c < N; ++c) {
      const double ua = nodal(u, c, N), ub = nodal(u, c + 1, N);
      for (int g = 0; g < q; ++g) {
        const double xi = 0.5 * (1.0 + rule.nodes[g]);
        const double v = (1.0 - xi) * ua + xi * ub;
        const double w = 0.5 * h * rule.weights[g];
        up += w * v * f(c, g);
        uu += w * v * v * fx(c, g);
      }
    }
    pairings[m] = {up, u.dot(a_phi), uu};
  }
  return assemble_report(traj, phi.id, pairings);
}

WeakResidualReport weak_residual(const Trajectory& traj, const EigenBasis& basis, const NonlocalForm& form,
                                 const Field& phi, const std::string& id) {
  if (!(basis.mesh() == form.mesh()) || !(phi.mesh == form.mesh()))
    throw DimensionError("weak_residual: mesh mismatch");
  if (traj.modes() != basis.size()) throw DimensionError("weak_residual: trajectory/basis size mismatch");
  const int N = form.mesh().n_cells();
  const double h = form.mesh().h();
  const Eigen::VectorXd m_phi = form.M() * phi.values;
  const Eigen::VectorXd a_phi = form.A() * phi.values;
  std::vector<std::array<double, 3>> pairings(traj.samples());
  for (int m = 0; m < traj.samples(); ++m) {
    const Eigen::VectorXd u = basis.modes() * traj.state(m);
    double uu = 0.0;
    for (int c = 0; c < N; ++c) {
      const double ua = nodal(u, c, N), ub = nodal(u, c + 1, N);
      const double slope = (nodal(phi.values, c + 1, N) - nodal(phi.values, c, N)) / h;
      uu += slope * h / 3.0 * (ua * ua + ua * ub + ub * ub);
    }
    pairings[m] = {u.dot(m_phi), u.dot(a_phi), uu};
  }
  return assemble_report(traj, id, pairings);
}

EigenBasis truncate_basis(const EigenBasis& basis, int n) {
  if (n < 1 || n > basis.size()) throw DomainError("truncate_basis: n out of range");
  return EigenBasis(basis.mesh(), basis.lambdas().head(n), basis.modes().leftCols(n),
                    basis.mass_modes().leftCols(n));
}

namespace {

// sqrt(trapezoid of per-sample squared distances).
double l2_in_time(const std::vector<double>& times, const std::vector<double>& d2) {
  double s = 0.0;
  for (std::size_t m = 1; m < times.size(); ++m) s += 0.5 * (times[m] - times[m - 1]) * (d2[m] + d2[m - 1]);
  return std::sqrt(s);
}

}  // namespace

std::vector<ConvergenceRow> convergence_in_modes(const NonlocalForm& form, const Field& u0,
                                                 const std::vector<int>& n_list, double dt, double t_final,
                                                 int store_every) {
  if (n_list.empty()) return {};
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw DomainError("convergence: n_list must be ascending");
  const EigenBasis full = solve_eigenbasis(form, n_list.back());
  std::vector<Trajectory> runs;
  for (int n : n_list) {
    const EigenBasis b = truncate_basis(full, n);
    const ConvectionTensor T = convection_tensor(b);
    runs.push_back(run_deterministic(b, T, project(b, u0), dt, t_final, store_every));
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const auto& a = runs[i];
    const auto& b = runs[i + 1];
    std::vector<double> d2(a.samples());
    for (int m = 0; m < a.samples(); ++m) {
      Eigen::VectorXd diff = b.state(m);
      diff.head(a.modes()) -= a.state(m);
      d2[m] = diff.squaredNorm();
    }
    rows.push_back({"modes", n_list[i], n_list[i + 1], l2_in_time(a.times, d2)});
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_in_modes_mean(const NonlocalForm& form, const Field& u0,
                                                      const std::vector<int>& n_list, const NoiseModel& model,
                                                      double dt, double t_final, McOptions opts) {
  if (n_list.empty()) return {};
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw DomainError("convergence: n_list must be ascending");
  const EigenBasis full = solve_eigenbasis(form, n_list.back());
  opts.keep_paths = true;
  std::vector<Eigen::MatrixXd> means;
  std::vector<double> times;
  for (int n : n_list) {
    const EigenBasis b = truncate_basis(full, n);
    const ConvectionTensor T = convection_tensor(b);
    const McResult r = run_monte_carlo(b, T, model, project(b, u0), dt, t_final, opts);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(r.paths.front().samples(), n);
    for (const auto& tr : r.paths) mean += tr.coeffs;
    means.push_back(mean / static_cast<double>(r.paths.size()));
    times = r.paths.front().times;
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    Eigen::MatrixXd d = means[i + 1];
    d.leftCols(means[i].cols()) -= means[i];
    std::vector<double> d2(d.rows());
    for (int m = 0; m < d.rows(); ++m) d2[m] = d.row(m).squaredNorm();
    rows.push_back({"modes_mean", n_list[i], n_list[i + 1], l2_in_time(times, d2)});
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_in_mesh(FractionalOrder alpha, const std::function<double(double)>& u0,
                                                const std::vector<int>& mesh_list, int n_modes, double dt,
                                                double t_final, int store_every) {
  if (mesh_list.empty()) return {};
  if (!std::is_sorted(mesh_list.begin(), mesh_list.end())) throw DomainError("convergence: mesh_list must be ascending");
  const Mesh fine(mesh_list.back());
  for (int N : mesh_list)
    if (fine.n_cells() % N != 0) throw DomainError("convergence: meshes must be nested");
  const Eigen::MatrixXd Mf = assemble_mass(fine);

  // Nodal values on the finest mesh, one matrix (dofs x samples) per level.
  std::vector<Eigen::MatrixXd> on_fine;
  std::vector<double> times;
  for (int N : mesh_list) {
    const Mesh mesh(N);
    const NonlocalForm form = assemble_form(mesh, alpha);
    const EigenBasis b = solve_eigenbasis(form, std::min(n_modes, mesh.n_dofs()));
    const ConvectionTensor T = convection_tensor(b);
    const Trajectory tr = run_deterministic(b, T, project(b, Field::interpolate(mesh, u0)), dt, t_final, store_every);
    times = tr.times;
    Eigen::MatrixXd vals(fine.n_dofs(), tr.samples());
    for (int m = 0; m < tr.samples(); ++m) {
      const Field u = b.reconstruct(tr.state(m));
      for (int k = 0; k < fine.n_dofs(); ++k) vals(k, m) = u(fine.node(k));
    }
    on_fine.push_back(std::move(vals));
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i + 1 < on_fine.size(); ++i) {
    const Eigen::MatrixXd d = on_fine[i + 1] - on_fine[i];
    std::vector<double> d2(d.cols());
    for (int m = 0; m < d.cols(); ++m) d2[m] = d.col(m).dot(Mf * d.col(m));
    rows.push_back({"mesh", mesh_list[i], mesh_list[i + 1], l2_in_time(times, d2)});
  }
  return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "kind,level_a,level_b,difference\n";
  for (const auto& r : rows) os << r.kind << ',' << r.level_a << ',' << r.level_b << ',' << fmt_sci(r.difference) << '\n';
}

void write_verdicts_csv(std::ostream& os, const std::vector<Verdict>& verdicts) {
  os << "check_id,quantity,threshold,verdict\n";
  for (const auto& v : verdicts)
    os << v.check_id << ',' << fmt_sci(v.quantity) << ',' << fmt_sci(v.threshold) << ',' << (v.pass ? "PASS" : "FAIL")
       << '\n';
}

}  // namespace nlb
