#include "nlburgers/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>

#include "nlburgers/errors.hpp"
#include "nlburgers/trajectory.hpp"

namespace nlb {

double RunConfig::effective_delta() const { return besov_delta > 0.0 ? besov_delta : 2.0 + alpha + 0.5; }

NoiseModel RunConfig::noise_model() const {
  if (!stochastic()) throw ConfigError("a noise block (noise = additive|multiplicative) is required");
  const auto kind = noise == NoiseChoice::additive ? NoiseKind::additive : NoiseKind::linear_multiplicative;
  return NoiseModel::power_law(kind, sigma, epsilon, effective_noise_dim());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key + ": '" + v + "' is not a number", line);
  return x;
}

long long to_int(const std::string& v, const std::string& key, int line) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": '" + v + "' is not an integer", line);
  return x;
}

std::vector<int> to_list(const std::string& v, const std::string& key, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long x = to_int(trim(item), key, line);
    if (x < 1 || x > 4096) throw ConfigError(key + ": entries must lie in [1, 4096]", line);
    out.push_back(static_cast<int>(x));
  }
  if (out.empty()) throw ConfigError(key + ": empty list", line);
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw ConfigError(key + ": list must be strictly ascending", line);
  return out;
}

void require(bool ok, const std::string& msg, int line) {
  if (!ok) throw ConfigError(msg, line);
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

using Setter = void (*)(RunConfig&, const std::string&, const std::string&, int);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"alpha",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.alpha = to_double(v, k, l);
         require(c.alpha > 0.0 && c.alpha < 2.0, "alpha must lie in (0,2)", l);
       }},
      {"n_cells",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 4 && x <= 4096, "n_cells must lie in [4, 4096]", l);
         c.n_cells = static_cast<int>(x);
       }},
      {"n_modes",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 1 && x <= 4095, "n_modes must lie in [1, n_cells-1]", l);
         c.n_modes = static_cast<int>(x);
       }},
      {"dt",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.dt = to_double(v, k, l);
         require(c.dt > 0.0, "dt must be positive", l);
       }},
      {"t_final",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.t_final = to_double(v, k, l);
         require(c.t_final > 0.0, "t_final must be positive", l);
       }},
      {"initial",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         if (v == "sin_bump") {
           c.initial = InitialKind::sin_bump;
         } else if (v == "getoor") {
           c.initial = InitialKind::getoor;
         } else if (v.rfind("random_modal(", 0) == 0 && v.back() == ')') {
           const std::string args = v.substr(13, v.size() - 14);
           const auto comma = args.find(',');
           require(comma != std::string::npos, "random_modal takes (k, seed)", l);
           const auto kk = to_int(trim(args.substr(0, comma)), k, l);
           const auto seed = to_int(trim(args.substr(comma + 1)), k, l);
           require(kk >= 1, "random_modal: k must be >= 1", l);
           require(seed >= 0, "random_modal: seed must be >= 0", l);
           c.initial = InitialKind::random_modal;
           c.initial_k = static_cast<int>(kk);
           c.initial_seed = static_cast<std::uint64_t>(seed);
         } else {
           throw ConfigError("initial must be sin_bump, getoor or random_modal(k, seed)", l);
         }
       }},
      {"noise",
       [](RunConfig& c, const std::string&, const std::string& v, int l) {
         if (v == "none") c.noise = NoiseChoice::none;
         else if (v == "additive") c.noise = NoiseChoice::additive;
         else if (v == "multiplicative") c.noise = NoiseChoice::multiplicative;
         else throw ConfigError("noise must be none, additive or multiplicative", l);
       }},
      {"sigma",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.sigma = to_double(v, k, l);
         require(c.sigma >= 0.0, "sigma must be >= 0", l);
       }},
      {"epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.epsilon = to_double(v, k, l);
         require(c.epsilon > 0.0, "epsilon must be positive", l);
       }},
      {"noise_dim",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 0 && x <= 4095, "noise_dim must lie in [0, 4095] (0 = n_modes)", l);
         c.noise_dim = static_cast<int>(x);
       }},
      {"mc_paths",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 1 && x <= 100000000, "mc_paths must lie in [1, 1e8]", l);
         c.mc_paths = static_cast<long>(x);
       }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 0, "seed must be >= 0", l);
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"threads",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 1 && x <= 1024, "threads must lie in [1, 1024]", l);
         c.threads = static_cast<int>(x);
       }},
      {"store_every",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto x = to_int(v, k, l);
         require(x >= 1, "store_every must be >= 1", l);
         c.store_every = static_cast<int>(x);
       }},
      {"integrator",
       [](RunConfig& c, const std::string&, const std::string& v, int l) {
         if (v == "etd_rk2") c.integrator = Integrator::etd_rk2;
         else if (v == "exponential_euler") c.integrator = Integrator::exponential_euler;
         else throw ConfigError("integrator must be etd_rk2 or exponential_euler", l);
       }},
      {"besov_gamma",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.besov_gamma = to_double(v, k, l);
         require(c.besov_gamma > 0.0 && c.besov_gamma < 0.5, "besov_gamma must lie in (0,0.5)", l);
       }},
      {"besov_delta",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.besov_delta = to_double(v, k, l);
         require(c.besov_delta >= 0.0, "besov_delta must be >= 0 (0 = 2+alpha+0.5)", l);
       }},
      {"n_list", [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.n_list = to_list(v, k, l); }},
      {"mesh_list",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.mesh_list = to_list(v, k, l); }},
      {"energy_tol",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.energy_tol = to_double(v, k, l);
         require(c.energy_tol > 0.0, "energy_tol must be positive", l);
       }},
      {"output_dir",
       [](RunConfig& c, const std::string&, const std::string& v, int l) {
         require(!v.empty(), "output_dir must not be empty", l);
         c.output_dir = v;
       }},
  };
  return table;
}

template <class LineOf>
void check_cross_fields(const RunConfig& cfg, LineOf at) {
  if (cfg.n_modes > cfg.n_cells - 1)
    throw ConfigError("n_modes must lie in [1, n_cells-1]", at("n_modes") ? at("n_modes") : at("n_cells"));
  {
    const double r = cfg.t_final / cfg.dt;
    if (std::abs(r - std::round(r)) > 1e-9 * r)
      throw ConfigError("t_final must be an integer multiple of dt", at("t_final") ? at("t_final") : at("dt"));
  }
  for (std::size_t i = 1; i < cfg.mesh_list.size(); ++i)
    if (cfg.mesh_list[i] % cfg.mesh_list[i - 1] != 0)
      throw ConfigError("mesh_list: each mesh must refine the previous one", at("mesh_list"));
  if (cfg.mesh_list.front() < 4) throw ConfigError("mesh_list: meshes need at least 4 cells", at("mesh_list"));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("expected 'key = value'", line);
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")", line);
    seen[key] = line;
    it->second(cfg, key, value, line);
  }
  check_cross_fields(cfg, [&](const char* k) { return seen.count(k) ? seen[k] : 0; });
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string key = trim(assignment.substr(0, eq == std::string::npos ? 0 : eq));
  const std::string value = eq == std::string::npos ? "" : trim(assignment.substr(eq + 1));
  if (eq == std::string::npos || key.empty() || value.empty())
    throw ConfigError("override '" + assignment + "': expected key=value");
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("override: unknown key '" + key + "'");
  try {
    it->second(cfg, key, value, 0);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("override: ") + e.what());
  }
}

void validate_config(const RunConfig& cfg) {
  check_cross_fields(cfg, [](const char*) { return 0; });
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  const char* init = c.initial == InitialKind::sin_bump ? "sin_bump" : "getoor";
  os << "alpha = " << fmt_num(c.alpha) << '\n'
     << "besov_delta = " << fmt_num(c.besov_delta) << '\n'
     << "besov_gamma = " << fmt_num(c.besov_gamma) << '\n'
     << "dt = " << fmt_num(c.dt) << '\n'
     << "energy_tol = " << fmt_num(c.energy_tol) << '\n'
     << "epsilon = " << fmt_num(c.epsilon) << '\n';
  if (c.initial == InitialKind::random_modal)
    os << "initial = random_modal(" << c.initial_k << ", " << c.initial_seed << ")\n";
  else
    os << "initial = " << init << '\n';
  os << "integrator = " << (c.integrator == Integrator::etd_rk2 ? "etd_rk2" : "exponential_euler") << '\n'
     << "mc_paths = " << c.mc_paths << '\n'
     << "mesh_list = " << join(c.mesh_list) << '\n'
     << "n_cells = " << c.n_cells << '\n'
     << "n_list = " << join(c.n_list) << '\n'
     << "n_modes = " << c.n_modes << '\n'
     << "noise = "
     << (c.noise == NoiseChoice::none ? "none" : c.noise == NoiseChoice::additive ? "additive" : "multiplicative")
     << '\n'
     << "noise_dim = " << c.noise_dim << '\n'
     << "output_dir = " << c.output_dir << '\n'
     << "seed = " << c.seed << '\n'
     << "sigma = " << fmt_num(c.sigma) << '\n'
     << "store_every = " << c.store_every << '\n'
     << "t_final = " << fmt_num(c.t_final) << '\n'
     << "threads = " << c.threads << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::istringstream is(serialize(cfg));
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("threads =", 0) == 0 || line.rfind("output_dir =", 0) == 0) continue;
    for (unsigned char ch : line + "\n") {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> apply_env_overrides(RunConfig& cfg) {
  std::vector<std::string> notes;
  if (const char* s = std::getenv("NLB_SEED"); s && *s) {
    const auto v = to_int(trim(s), "NLB_SEED", 0);
    if (v < 0) throw ConfigError("NLB_SEED must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(v);
    notes.push_back("seed from NLB_SEED");
  }
  if (const char* s = std::getenv("NLB_THREADS"); s && *s) {
    const auto v = to_int(trim(s), "NLB_THREADS", 0);
    if (v < 1 || v > 1024) throw ConfigError("NLB_THREADS must lie in [1, 1024]");
    cfg.threads = static_cast<int>(v);
    notes.push_back("threads from NLB_THREADS");
  }
  return notes;
}

Field initial_field(const RunConfig& cfg, const EigenBasis& basis) {
  const Mesh& mesh = basis.mesh();
  switch (cfg.initial) {
    case InitialKind::sin_bump:
      return Field::interpolate(mesh, [](double x) { return std::sin(std::numbers::pi * (x + 1.0) / 2.0) * (1.0 - x * x); });
    case InitialKind::getoor: {
      const double a = cfg.alpha;
      return Field::interpolate(mesh, [a](double x) { return std::pow(1.0 - x * x, a / 2.0); });
    }
    case InitialKind::random_modal: {
      // Path id 2^63 keeps this stream apart from every Monte Carlo path.
      const PathRng rng(cfg.initial_seed, 1ull << 63);
      Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
      for (int j = 0; j < std::min(cfg.initial_k, basis.size()); ++j)
        c(j) = rng.normal(0, static_cast<std::uint32_t>(j)) / (j + 1.0);
      return basis.reconstruct(c);
    }
  }
  throw ConfigError("unknown initial condition");
}

}  // namespace nlb
