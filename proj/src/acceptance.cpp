#include "nlburgers/acceptance.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "nlburgers/harness.hpp"

namespace nlb {

namespace fs = std::filesystem;

namespace {

double sin_bump(double x) { return std::sin(std::numbers::pi * (x + 1.0) / 2.0) * (1.0 - x * x); }

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Sup-moment / Besov ladder, n = 8..64 on one mesh with common noise.
struct LadderLevel {
  int n = 0;
  MeanSe sup_h4, besov;
  McResult mc;
  double h0 = 0.0;
  NoiseModel noise;
};

// Shared Monte Carlo runs.
struct Context {
  const AcceptanceOptions& opts;
  std::optional<McResult> ito;
  double ito_h0 = 0.0;
  std::optional<NoiseModel> ito_noise;
  std::optional<std::vector<LadderLevel>> ladder;

  void log(const std::string& s) const {
    if (opts.progress) *opts.progress << s << std::endl;
  }

  // Criterion 6 configuration: alpha 1.5, 128 cells, 16 modes, additive sigma 0.1.
  const McResult& ito_run() {
    if (!ito) {
      const Mesh mesh(128);
      const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
      const EigenBasis b = solve_eigenbasis(form, 16);
      const ConvectionTensor T = convection_tensor(b);
      const ModalState s0 = project(b, Field::interpolate(mesh, sin_bump));
      ito_noise = NoiseModel::power_law(NoiseKind::additive, 0.1, 0.1, 16);
      McOptions o;
      o.paths = 10000;
      o.seed = 20240601;
      o.threads = opts.threads;
      o.store_every = 100;
      ito_h0 = s0.c.squaredNorm();
      ito = run_monte_carlo(b, T, *ito_noise, s0, 1e-3, 1.0, o);
    }
    return *ito;
  }

  // Criterion 8 configuration: alpha 1.5, 128 cells, additive sigma 1, 1000 paths.
  const std::vector<LadderLevel>& ladder_runs() {
    if (!ladder) {
      const Mesh mesh(128);
      const FractionalOrder alpha(1.5);
      const NonlocalForm form = assemble_form(mesh, alpha);
      const EigenBasis full = solve_eigenbasis(form, 64);
      const Field u0 = Field::interpolate(mesh, sin_bump);
      ladder.emplace();
      for (int n : {8, 16, 32, 64}) {
        const EigenBasis b = truncate_basis(full, n);
        const ConvectionTensor T = convection_tensor(b);
        LadderLevel lev;
        lev.n = n;
        lev.noise = NoiseModel::power_law(NoiseKind::additive, 1.0, 0.1, n);
        McOptions o;
        o.paths = 1000;
        o.seed = 20240602;
        o.threads = opts.threads;
        o.store_every = 10;
        o.keep_paths = true;
        const ModalState s0 = project(b, u0);
        lev.h0 = s0.c.squaredNorm();
        lev.mc = run_monte_carlo(b, T, lev.noise, s0, 1e-3, 1.0, o);
        const SpectralScale scale(b, alpha);
        std::vector<double> bs;
        for (const auto& tr : lev.mc.paths) bs.push_back(besov_estimate(tr, scale, 0.4, default_besov_delta(1.5)).total());
        lev.besov = mean_se(bs);
        lev.sup_h4 = {lev.mc.rows.back().mean_sup_h4, lev.mc.rows.back().se_sup_h4};
        lev.mc.paths.clear();
        ladder->push_back(std::move(lev));
      }
    }
    return *ladder;
  }
};

CriterionResult criterion1(Context& ctx) {
  CriterionResult r{1, "operator oracle (Getoor)", true, "", {}};
  std::ostringstream d;
  for (double a : {0.5, 1.0, 1.5}) {
    const FractionalOrder alpha(a);
    const double target = getoor_constant(alpha);
    std::vector<double> errs;
    for (int N : {128, 256, 512, 1024}) {
      const Mesh mesh(N);
      const NonlocalForm form = assemble_form(mesh, alpha);
      const Field u = Field::interpolate(mesh, [a](double x) { return std::pow(1.0 - x * x, a / 2.0); });
      const Field w = strong_image(form, u);
      const double f = symbol_scale_factor(alpha);
      double err = 0.0;
      for (int k = 0; k < mesh.n_dofs(); ++k)
        if (std::abs(mesh.node(k)) <= 1.0 / 3.0 + 1e-12) err = std::max(err, std::abs(f * w.values(k) - target));
      errs.push_back(err);
    }
    d << "a=" << a << " err " << sci(errs.front()) << "->" << sci(errs.back()) << " ratios";
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double ratio = errs[i - 1] / errs[i];
      const bool ok = ratio >= 1.3;
      r.pass = r.pass && ok;
      r.verdicts.push_back({"c1.alpha" + std::to_string(a).substr(0, 3) + ".ratio" + std::to_string(i), ratio, 1.3, ok});
      d << ' ' << std::fixed << std::setprecision(2) << ratio;
      d.unsetf(std::ios::floatfield);
    }
    d << "; ";
    ctx.log("criterion 1: alpha " + std::to_string(a) + " done");
  }
  r.detail = d.str();
  return r;
}

CriterionResult criterion2(Context&) {
  CriterionResult r{2, "weight exactness", true, "", {}};
  boost::math::quadrature::exp_sinh<double> es;
  double worst = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    for (int i = 0; i < 20; ++i) {
      const double x = -0.95 + 0.1 * i;
      const double right = es.integrate([&](double s) { return std::pow(s + 1.0 - x, -1.0 - a); }, 0.0,
                                        std::numeric_limits<double>::infinity());
      const double left = es.integrate([&](double s) { return std::pow(s + 1.0 + x, -1.0 - a); }, 0.0,
                                       std::numeric_limits<double>::infinity());
      const double ref = 2.0 * (left + right);
      worst = std::max(worst, std::abs(rho_weight(x, FractionalOrder(a)) - ref) / ref);
    }
  }
  r.pass = worst <= 1e-10;
  r.verdicts.push_back({"c2.max_rel_error", worst, 1e-10, r.pass});
  r.detail = "max relative error " + sci(worst) + " over 60 points";
  return r;
}

CriterionResult criterion3(Context& ctx) {
  CriterionResult r{3, "energy-identity split", true, "", {}};
  double worst = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    const FractionalOrder alpha(a);
    for (int N : {64, 128}) {
      const Mesh mesh(N);
      const NonlocalForm form = assemble_form(mesh, alpha);
      for (int f = 0; f < 50; ++f) {
        const PathRng rng(3, static_cast<std::uint64_t>(f));
        Eigen::VectorXd v(mesh.n_dofs());
        for (int k = 0; k < mesh.n_dofs(); ++k) v(k) = rng.normal(static_cast<std::uint64_t>(N), k);
        const NormReport nr = norms(Field(mesh, v), form);
        const double v2 = nr.v_norm * nr.v_norm;
        const double split = nr.gagliardo * nr.gagliardo + nr.weighted_l2 * nr.weighted_l2;
        worst = std::max(worst, std::abs(v2 - split) / v2);
      }
    }
    ctx.log("criterion 3: alpha " + std::to_string(a) + " done");
  }
  r.pass = worst <= 1e-8;
  r.verdicts.push_back({"c3.max_rel_split", worst, 1e-8, r.pass});
  r.detail = "max relative split defect " + sci(worst) + " (50 fields x 2 meshes x 3 alphas)";
  return r;
}

CriterionResult criterion4(Context&) {
  CriterionResult r{4, "convection cancellation", true, "", {}};
  const Mesh mesh(128);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 32);
  const ConvectionTensor T = convection_tensor(b);
  const int n = 32;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const PathRng rng(4, static_cast<std::uint64_t>(s));
    Eigen::VectorXd c(n);
    for (int k = 0; k < n; ++k) c(k) = rng.normal(0, k);
    double scale = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale += std::abs(T(k, i, j) * c(k) * c(i) * c(j));
    worst = std::max(worst, std::abs(T.cubic(c)) / scale);
  }
  r.pass = worst <= 1e-12;
  r.verdicts.push_back({"c4.max_rel_cubic", worst, 1e-12, r.pass});
  r.detail = "max |sum T c c c| / sum |T c c c| = " + sci(worst) + " over 100 states";
  return r;
}

CriterionResult criterion5(Context&) {
  CriterionResult r{5, "deterministic energy balance", true, "", {}};
  const Mesh mesh(256);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 32);
  const ConvectionTensor T = convection_tensor(b);
  const ModalState s0 = project(b, Field::interpolate(mesh, sin_bump));
  double res[2];
  const double dts[2] = {1e-4, 5e-5};
  for (int i = 0; i < 2; ++i) {
    const Trajectory tr = run_deterministic(b, T, s0, dts[i], 1.0);
    res[i] = check_energy_balance(EnergyLedger::from_trajectory(tr), LedgerKind::deterministic).max_residual;
  }
  const bool ok1 = res[0] <= 1e-4;
  const double ratio = res[0] / res[1];
  const bool ok2 = ratio >= 3.0;
  r.pass = ok1 && ok2;
  r.verdicts.push_back({"c5.max_rel_residual", res[0], 1e-4, ok1});
  r.verdicts.push_back({"c5.halving_ratio", ratio, 3.0, ok2});
  r.detail = "residual " + sci(res[0]) + " at dt=1e-4, " + sci(res[1]) + " at dt=5e-5 (ratio " + sci(ratio) + ")";
  return r;
}

CriterionResult criterion6(Context& ctx) {
  CriterionResult r{6, "Ito mean-energy balance", true, "", {}};
  const McResult& mc = ctx.ito_run();
  int checked = 0;
  double worst = 0.0, worst_bias = 0.0;
  for (const auto& row : mc.rows) {
    if (row.t == 0.0) continue;
    ++checked;
    const double dev = std::abs(row.mean_balance - row.mean_bias);
    const double band = 3.0 * (row.se_balance + row.se_bias);
    worst = std::max(worst, dev / band);
    worst_bias = std::max(worst_bias, std::abs(row.mean_bias));
    const bool ok = dev <= band;
    r.pass = r.pass && ok;
    r.verdicts.push_back({"c6.t" + std::to_string(row.t).substr(0, 3), dev, band, ok});
  }
  r.pass = r.pass && checked == 10;
  r.detail = std::to_string(checked) + " checkpoints, max |R - bias| / 3SE = " + sci(worst) +
             ", max O(dt) bias " + sci(worst_bias) + " (10^4 paths, dt=1e-3)";
  return r;
}

CriterionResult criterion7(Context& ctx) {
  CriterionResult r{7, "Gronwall envelope", true, "", {}};
  struct Case {
    std::string id;
    const McResult* mc;
    double h0;
    NoiseModel noise;
    int n;
  };
  std::vector<Case> cases;
  ctx.ito_run();
  cases.push_back({"additive_s0.1", &*ctx.ito, ctx.ito_h0, *ctx.ito_noise, 16});
  for (const auto& lev : ctx.ladder_runs())
    cases.push_back({"ladder_n" + std::to_string(lev.n), &lev.mc, lev.h0, lev.noise, lev.n});

  // Multiplicative noise, sigma 0.5.
  const Mesh mesh(128);
  const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
  const EigenBasis b = solve_eigenbasis(form, 16);
  const ConvectionTensor T = convection_tensor(b);
  const ModalState s0 = project(b, Field::interpolate(mesh, sin_bump));
  const NoiseModel mult = NoiseModel::power_law(NoiseKind::linear_multiplicative, 0.5, 0.1, 16);
  McOptions o;
  o.paths = 2000;
  o.seed = 20240603;
  o.threads = ctx.opts.threads;
  o.store_every = 100;
  const McResult mres = run_monte_carlo(b, T, mult, s0, 1e-3, 1.0, o);
  cases.push_back({"multiplicative_s0.5", &mres, s0.c.squaredNorm(), mult, 16});

  double worst = 0.0;
  std::string failed;
  for (const auto& c : cases) {
    const double env = gronwall_envelope(c.h0, c.noise, c.n, 1.0);
    double sup_h = 0.0, v2 = 0.0;
    bool ok_h = true, ok_v = true;
    for (const auto& row : c.mc->rows) {
      ok_h = ok_h && row.mean_h2 - 3.0 * row.se_h2 <= env;
      ok_v = ok_v && 2.0 * (row.mean_v2_int - 3.0 * row.se_v2_int) <= env;
      sup_h = std::max(sup_h, row.mean_h2);
      v2 = std::max(v2, 2.0 * row.mean_v2_int);
    }
    worst = std::max({worst, sup_h / env, v2 / env});
    r.pass = r.pass && ok_h && ok_v;
    r.verdicts.push_back({"c7." + c.id + ".sup_h2", sup_h, env, ok_h});
    r.verdicts.push_back({"c7." + c.id + ".v2_integral", v2, env, ok_v});
    if (!ok_v) failed += c.id + " ";
    if (!ok_h) failed += c.id + "(sup) ";
  }
  r.detail = std::to_string(cases.size()) + " configs, max estimate/majorant = " + sci(worst);
  if (!failed.empty()) r.detail += ", over majorant: " + failed;
  return r;
}

CriterionResult criterion8(Context& ctx) {
  CriterionResult r{8, "uniform-in-n moment and Besov bounds", true, "", {}};
  const auto& lad = ctx.ladder_runs();
  std::ostringstream d;
  auto check = [&](const std::string& name, double factor, auto get) {
    const MeanSe& a = get(lad[0]);
    const MeanSe& b = get(lad[1]);
    const MeanSe& ref = a.mean >= b.mean ? a : b;
    double worst = 0.0;
    for (const auto& lev : lad) {
      const MeanSe& m = get(lev);
      const bool below = m.mean <= factor * ref.mean;
      const bool overlap = std::abs(m.mean - ref.mean) <= 3.0 * (m.se + ref.se);
      worst = std::max(worst, m.mean / ref.mean);
      r.pass = r.pass && below && overlap;
      r.verdicts.push_back({"c8." + name + ".n" + std::to_string(lev.n), m.mean, factor * ref.mean, below && overlap});
    }
    d << name << " max ratio to coarse " << sci(worst) << " (limit " << factor << "); ";
  };
  check("sup_h4", 1.1, [](const LadderLevel& l) -> const MeanSe& { return l.sup_h4; });
  check("besov", 1.2, [](const LadderLevel& l) -> const MeanSe& { return l.besov; });
  r.detail = d.str() + "n in {8,16,32,64}, 1000 paths";
  return r;
}

CriterionResult criterion9(Context& ctx) {
  CriterionResult r{9, "weak residual refinement", true, "", {}};
  std::vector<double> res;
  for (int lev = 0; lev < 4; ++lev) {
    const int N = 32 << lev;
    const double dt = 4e-3 / (1 << lev);
    const Mesh mesh(N);
    const NonlocalForm form = assemble_form(mesh, FractionalOrder(1.5));
    const EigenBasis b = solve_eigenbasis(form, N / 2);
    const ConvectionTensor T = convection_tensor(b);
    const Trajectory tr = run_deterministic(b, T, project(b, Field::interpolate(mesh, sin_bump)), dt, 1.0);
    res.push_back(weak_residual(tr, b, form, quartic_bump()).max());
    ctx.log("criterion 9: level " + std::to_string(lev) + " done");
  }
  std::ostringstream d;
  d << "residuals";
  for (double v : res) d << ' ' << sci(v);
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double ratio = res[i - 1] / res[i];
    const bool ok = ratio >= 1.5;
    r.pass = r.pass && ok;
    r.verdicts.push_back({"c9.ratio" + std::to_string(i), ratio, 1.5, ok});
  }
  r.detail = d.str() + " (N = 32..256, n = N/2, dt halved with h)";
  return r;
}

std::map<std::string, std::string> read_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name == "manifest.txt" || name == "config.txt") continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    out[name] = ss.str();
  }
  return out;
}

CriterionResult criterion10(Context& ctx) {
  CriterionResult r{10, "reproducibility", true, "", {}};
  RunConfig cfg = parse_config(
      "alpha = 1.5\nn_cells = 32\nn_modes = 8\ndt = 1e-3\nt_final = 0.1\nnoise = additive\nsigma = 0.5\n"
      "mc_paths = 24\nstore_every = 10\nn_list = 4, 8\nmesh_list = 16, 32\nseed = 99\n");
  int compared = 0, differing = 0;
  std::ostringstream sink;
  for (const auto& sub : subcommands()) {
    if (sub == "check-all") continue;
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 3, 1}) {
      cfg.threads = threads;
      cfg.output_dir = (fs::path(ctx.opts.scratch_dir) / (sub + "_" + std::to_string(runs.size()))).string();
      fs::remove_all(cfg.output_dir);
      run_subcommand(sub, cfg, sink);
      runs.push_back(read_outputs(cfg.output_dir));
    }
    for (const auto& [name, body] : runs[0]) {
      bool same = true;
      for (std::size_t i = 1; i < runs.size(); ++i) same = same && runs[i].count(name) && runs[i].at(name) == body;
      ++compared;
      if (!same) {
        ++differing;
        r.verdicts.push_back({"c10." + sub + "." + name, 1.0, 0.0, false});
      }
    }
  }
  r.pass = differing == 0 && compared > 0;
  r.verdicts.push_back({"c10.differing_files", static_cast<double>(differing), 0.0, r.pass});
  r.detail = std::to_string(compared) + " output files compared across threads {1,3} and a rerun, " +
             std::to_string(differing) + " differ";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, const std::vector<int>& only) {
  Context ctx{opts, {}, 0.0, {}, {}};
  using Fn = CriterionResult (*)(Context&);
  const Fn fns[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                    criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fns[id - 1](ctx);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream tail;
    tail.precision(1);
    tail << std::fixed << " [" << secs << " s]";
    r.detail += tail.str();
    ctx.log(format_line(r));
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + (r.pass ? " PASS " : " FAIL ") + r.title + ": " + r.detail;
}

}  // namespace nlb
