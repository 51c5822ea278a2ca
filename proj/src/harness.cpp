#include "nlburgers/harness.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <cmath>
#include <ostream>

#include "nlburgers/acceptance.hpp"
#include "nlburgers/errors.hpp"

namespace nlb {

const char* const kCodeVersion = "nlburgers 1.0.0";

namespace fs = std::filesystem;

namespace {

struct Setup {
  Mesh mesh;
  NonlocalForm form;
  EigenBasis basis;
  ConvectionTensor tensor;
  Field u0;
  ModalState s0;
};

Setup build(const RunConfig& cfg) {
  const Mesh mesh(cfg.n_cells);
  if (cfg.n_modes > mesh.n_dofs()) throw ConfigError("n_modes must lie in [1, n_cells-1]");
  NonlocalForm form = assemble_form(mesh, FractionalOrder(cfg.alpha));
  EigenBasis basis = solve_eigenbasis(form, cfg.n_modes);
  ConvectionTensor tensor = convection_tensor(basis);
  Field u0 = initial_field(cfg, basis);
  ModalState s0 = project(basis, u0);
  return {mesh, std::move(form), std::move(basis), std::move(tensor), std::move(u0), std::move(s0)};
}

McOptions mc_options(const RunConfig& cfg, bool keep) {
  McOptions o;
  o.paths = cfg.mc_paths;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  o.store_every = cfg.store_every;
  o.keep_paths = keep;
  return o;
}

class Output {
 public:
  explicit Output(const RunConfig& cfg) : dir_(cfg.output_dir) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw Error("cannot open " + (dir_ / name).string() + " for writing");
    body(os);
    if (!os) throw Error("write failed for " + (dir_ / name).string());
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Verdict> mc_verdicts(const RunConfig& cfg, const McResult& r, double h0, int n) {
  std::vector<Verdict> v;
  const auto bal = check_energy_balance(EnergyLedger::from_moments(r.rows), LedgerKind::stochastic_mean);
  v.push_back({"ito_balance", bal.worst_score, 1.0, bal.pass});
  const double env = gronwall_envelope(h0, cfg.noise_model(), n, cfg.t_final);
  double worst_h = 0.0, worst_v = 0.0;
  bool ok_h = true, ok_v = true;
  for (const auto& row : r.rows) {
    worst_h = std::max(worst_h, row.mean_h2);
    worst_v = std::max(worst_v, 2.0 * row.mean_v2_int);
    ok_h = ok_h && row.mean_h2 - 3.0 * row.se_h2 <= env;
    ok_v = ok_v && 2.0 * (row.mean_v2_int - 3.0 * row.se_v2_int) <= env;
  }
  v.push_back({"gronwall_sup_h2", worst_h, env, ok_h});
  v.push_back({"gronwall_v2_integral", worst_v, env, ok_v});
  return v;
}

using Pipeline = std::function<void(const RunConfig&, Output&, SubcommandResult&, std::ostream&)>;

const std::map<std::string, Pipeline>& pipelines() {
  static const std::map<std::string, Pipeline> table{
      {"assemble",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const NonlocalForm form = assemble_form(Mesh(cfg.n_cells), FractionalOrder(cfg.alpha));
         out.write("stiffness.txt", [&](std::ostream& os) { write_matrix(os, form.A()); });
         out.write("mass.txt", [&](std::ostream& os) { write_matrix(os, form.M()); });
         log << "assembled " << form.mesh().n_dofs() << " x " << form.mesh().n_dofs() << " form\n";
       }},
      {"eigs",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const NonlocalForm form = assemble_form(Mesh(cfg.n_cells), FractionalOrder(cfg.alpha));
         const EigenBasis b = solve_eigenbasis(form, cfg.n_modes);
         out.write("eigs.csv", [&](std::ostream& os) {
           os << "k,lambda_k\n";
           for (int k = 0; k < b.size(); ++k) os << k + 1 << ',' << fmt_sci(b.lambdas()(k)) << '\n';
         });
         log << "lambda_1 = " << b.lambdas()(0) << "\n";
       }},
      {"run-det",
       [](const RunConfig& cfg, Output& out, SubcommandResult& res, std::ostream& log) {
         const Setup s = build(cfg);
         const Trajectory tr =
             run_deterministic(s.basis, s.tensor, s.s0, cfg.dt, cfg.t_final, cfg.store_every, cfg.integrator);
         const EnergyLedger L = EnergyLedger::from_trajectory(tr);
         out.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
         out.write("ledger.csv", [&](std::ostream& os) {
           os << "t,energy_H,v2_integral,balance_residual\n";
           for (std::size_t m = 0; m < L.times.size(); ++m)
             os << fmt_sci(L.times[m]) << ',' << fmt_sci(L.h2[m]) << ',' << fmt_sci(L.v2_integral[m]) << ','
                << fmt_sci(L.balance_residual[m]) << '\n';
         });
         const auto chk = check_energy_balance(L, LedgerKind::deterministic, cfg.energy_tol);
         res.verdicts.push_back({"energy_balance", chk.max_residual, cfg.energy_tol, chk.pass});
         log << "max relative ledger residual " << chk.max_residual << "\n";
       }},
      {"run-sde",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const Setup s = build(cfg);
         const NoiseModel nm = cfg.noise_model();
         const McResult r = run_monte_carlo(s.basis, s.tensor, nm, s.s0, cfg.dt, cfg.t_final, mc_options(cfg, true));
         out.write("paths.csv", [&](std::ostream& os) { write_paths_csv(os, r.paths); });
         out.write("moments.csv", [&](std::ostream& os) { write_moments_csv(os, r.rows); });
         log << r.paths.size() << " paths\n";
       }},
      {"mc-moments",
       [](const RunConfig& cfg, Output& out, SubcommandResult& res, std::ostream& log) {
         const Setup s = build(cfg);
         const NoiseModel nm = cfg.noise_model();
         const McResult r = run_monte_carlo(s.basis, s.tensor, nm, s.s0, cfg.dt, cfg.t_final, mc_options(cfg, false));
         out.write("moments.csv", [&](std::ostream& os) { write_moments_csv(os, r.rows); });
         out.write("balance.csv", [&](std::ostream& os) { write_balance_csv(os, r.rows); });
         res.verdicts = mc_verdicts(cfg, r, s.s0.c.squaredNorm(), s.basis.size());
         log << "E||u(T)||^2 = " << r.rows.back().mean_h2 << " +- " << r.rows.back().se_h2 << "\n";
       }},
      {"besov",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const Setup s = build(cfg);
         std::vector<Trajectory> paths;
         if (cfg.stochastic()) {
           const NoiseModel nm = cfg.noise_model();
           paths = run_monte_carlo(s.basis, s.tensor, nm, s.s0, cfg.dt, cfg.t_final, mc_options(cfg, true)).paths;
         } else {
           paths.push_back(run_deterministic(s.basis, s.tensor, s.s0, cfg.dt, cfg.t_final, cfg.store_every,
                                             cfg.integrator));
           paths.back().path_id = 0;
         }
         const SpectralScale scale(s.basis, FractionalOrder(cfg.alpha));
         std::vector<double> totals;
         out.write("besov.csv", [&](std::ostream& os) {
           os << "path_id,scale,gamma,delta,seminorm_sq,l2_part,total\n";
           for (const auto& tr : paths) {
             const auto e = besov_estimate(tr, scale, cfg.besov_gamma, cfg.effective_delta());
             totals.push_back(e.total());
             os << tr.path_id.value_or(0) << ",spectral," << fmt_sci(e.gamma) << ',' << fmt_sci(e.delta) << ','
                << fmt_sci(e.seminorm_sq) << ',' << fmt_sci(e.l2_part) << ',' << fmt_sci(e.total()) << '\n';
           }
         });
         const MeanSe ms = mean_se(totals);
         out.write("besov_summary.csv", [&](std::ostream& os) {
           os << "scale,gamma,delta,paths,mean,se\n"
              << "spectral," << fmt_sci(cfg.besov_gamma) << ',' << fmt_sci(cfg.effective_delta()) << ','
              << totals.size() << ',' << fmt_sci(ms.mean) << ',' << fmt_sci(ms.se) << '\n';
         });
         log << "besov mean " << ms.mean << " +- " << ms.se << " (spectral scale)\n";
       }},
      {"weak-residual",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const Setup s = build(cfg);
         const Trajectory tr =
             run_deterministic(s.basis, s.tensor, s.s0, cfg.dt, cfg.t_final, cfg.store_every, cfg.integrator);
         const WeakResidualReport rep = weak_residual(tr, s.basis, s.form, quartic_bump());
         out.write("weak_residual.csv", [&](std::ostream& os) {
           os << "test_id,t,residual\n";
           for (std::size_t m = 0; m < rep.times.size(); ++m)
             os << rep.test_id << ',' << fmt_sci(rep.times[m]) << ',' << fmt_sci(rep.residual[m]) << '\n';
         });
         log << "max weak residual " << rep.max() << "\n";
       }},
      {"convergence",
       [](const RunConfig& cfg, Output& out, SubcommandResult&, std::ostream& log) {
         const Mesh mesh(cfg.n_cells);
         const FractionalOrder alpha(cfg.alpha);
         const NonlocalForm form = assemble_form(mesh, alpha);
         for (int n : cfg.n_list)
           if (n > mesh.n_dofs()) throw ConfigError("n_list entries must not exceed n_cells-1");
         const EigenBasis big = solve_eigenbasis(form, cfg.n_list.back());
         const Field u0 = initial_field(cfg, big);
         std::vector<ConvergenceRow> rows =
             cfg.stochastic()
                 ? convergence_in_modes_mean(form, u0, cfg.n_list, cfg.noise_model(), cfg.dt, cfg.t_final,
                                             mc_options(cfg, true))
                 : convergence_in_modes(form, u0, cfg.n_list, cfg.dt, cfg.t_final, cfg.store_every);
         if (cfg.initial != InitialKind::random_modal) {
           const double a = cfg.alpha;
           const bool getoor = cfg.initial == InitialKind::getoor;
           const auto f = [a, getoor](double x) {
             return getoor ? std::pow(1.0 - x * x, a / 2.0)
                           : std::sin(std::numbers::pi * (x + 1.0) / 2.0) * (1.0 - x * x);
           };
           const auto mesh_rows =
               convergence_in_mesh(alpha, f, cfg.mesh_list, cfg.n_modes, cfg.dt, cfg.t_final, cfg.store_every);
           rows.insert(rows.end(), mesh_rows.begin(), mesh_rows.end());
         }
         out.write("convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, rows); });
         log << rows.size() << " convergence rows\n";
       }},
      {"check-all",
       [](const RunConfig& cfg, Output& out, SubcommandResult& res, std::ostream& log) {
         AcceptanceOptions o;
         o.threads = cfg.threads;
         o.scratch_dir = (fs::path(cfg.output_dir) / "acceptance_scratch").string();
         o.progress = &log;
         const auto results = run_acceptance(o);
         for (const auto& r : results) res.verdicts.insert(res.verdicts.end(), r.verdicts.begin(), r.verdicts.end());
         out.write("acceptance.txt", [&](std::ostream& os) {
           for (const auto& r : results) os << format_line(r) << '\n';
         });
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"assemble",      "eigs",        "run-det",  "run-sde", "mc-moments",
                                              "besov",         "weak-residual", "convergence", "check-all"};
  return names;
}

SubcommandResult run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log,
                                const std::vector<std::string>& notes) {
  const auto it = pipelines().find(name);
  if (it == pipelines().end()) throw ConfigError("unknown subcommand '" + name + "'");
  Output out(cfg);
  SubcommandResult res;
  out.write("config.txt", [&](std::ostream& os) { os << serialize(cfg); });
  it->second(cfg, out, res, log);
  if (!res.verdicts.empty()) {
    out.write("verdicts.csv", [&](std::ostream& os) { write_verdicts_csv(os, res.verdicts); });
    for (const auto& v : res.verdicts)
      if (!v.pass) res.exit_code = kExitCheck;
  }
  res.files = out.files();
  std::ofstream man(fs::path(cfg.output_dir) / "manifest.txt");
  man << "subcommand: " << name << '\n'
      << "config_hash: " << config_hash(cfg) << '\n'
      << "code_version: " << kCodeVersion << '\n'
      << "timestamp: " << utc_timestamp() << '\n'
      << "seed: " << cfg.seed << '\n'
      << "threads: " << cfg.threads << '\n';
  for (const auto& n : notes) man << "note: " << n << '\n';
  man << "files: ";
  for (std::size_t i = 0; i < res.files.size(); ++i) man << (i ? ", " : "") << res.files[i];
  man << ", manifest.txt\n";
  if (!man) throw Error("cannot write manifest.txt");
  return res;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const BlowUpError*>(&e)) return kExitBlowUp;
  return 1;
}

}  // namespace nlb
