#pragma once

#include <array>
#include <cstdint>

namespace nlb {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Counter-based normal stream for one Monte Carlo path. The normal drawn for
/// (step, index) depends only on (seed, path, step, index): increments do not
/// depend on the order of evaluation, the thread that computes them, or how
/// many modes are requested, so truncations at different n share their noise.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

  /// Standard normal for mode `index` at time step `step`.
  double normal(std::uint64_t step, std::uint32_t index) const;
  /// Normals for modes 2j and 2j+1 from one Philox block (Box-Muller).
  std::array<double, 2> normal_pair(std::uint64_t step, std::uint32_t j) const;

 private:
  std::uint64_t seed_, path_;
};

}  // namespace nlb
