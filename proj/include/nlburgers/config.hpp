#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlburgers/galerkin.hpp"
#include "nlburgers/stochastic.hpp"

namespace nlb {

enum class InitialKind { sin_bump, getoor, random_modal };
enum class NoiseChoice { none, additive, multiplicative };

/// Everything that affects the numbers of a run. Flat `key = value` text with
/// `#` comments; unknown keys are errors.
struct RunConfig {
  double alpha = 1.5;
  int n_cells = 256;
  int n_modes = 32;
  double dt = 1e-4;
  double t_final = 1.0;
  InitialKind initial = InitialKind::sin_bump;
  int initial_k = 8;                // random_modal(k, seed)
  std::uint64_t initial_seed = 1;
  NoiseChoice noise = NoiseChoice::none;
  double sigma = 0.1;
  double epsilon = 0.1;
  int noise_dim = 0;                // 0: equal to n_modes
  long mc_paths = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  int store_every = 1;
  Integrator integrator = Integrator::etd_rk2;
  double besov_gamma = 0.4;
  double besov_delta = 0.0;         // 0: 2 + alpha + 1/2
  std::vector<int> n_list{8, 16, 32, 64};
  std::vector<int> mesh_list{64, 128, 256};
  double energy_tol = 1e-4;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;

  bool stochastic() const { return noise != NoiseChoice::none; }
  int effective_noise_dim() const { return noise_dim > 0 ? noise_dim : n_modes; }
  double effective_delta() const;
  NoiseModel noise_model() const;  // requires a noise block
};

/// Parse and validate. Errors are ConfigError carrying the line number.
RunConfig parse_config(const std::string& text);
/// Applies one `key=value` on top of a parsed config (command-line --set).
void apply_override(RunConfig& cfg, const std::string& assignment);
/// Cross-field checks (n_modes < n_cells, t_final/dt integral, nested meshes).
void validate_config(const RunConfig& cfg);
/// Canonical text: every key, fixed order. parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);
/// FNV-1a of the canonical text without `threads` and `output_dir`, which do
/// not affect results. Independent of the order of keys in the source file.
std::string config_hash(const RunConfig& cfg);

/// Overrides from NLB_SEED and NLB_THREADS. Returns a note per applied override.
std::vector<std::string> apply_env_overrides(RunConfig& cfg);

/// Initial field of the catalog on the given mesh. random_modal draws
/// c_j = xi_j / j, j <= k, in the eigenbasis, so it needs the basis.
Field initial_field(const RunConfig& cfg, const EigenBasis& basis);

}  // namespace nlb
