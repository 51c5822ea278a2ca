#include "nlburgers/rng.hpp"

#include <cmath>
#include <numbers>

namespace nlb {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Uniform in (0, 1] from 64 random bits.
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

std::array<double, 2> PathRng::normal_pair(std::uint64_t step, std::uint32_t j) const {
  // counter = (pair index, step, path lo, path hi) mixed with the step high word
  const std::array<std::uint32_t, 4> ctr{j, static_cast<std::uint32_t>(step),
                                         static_cast<std::uint32_t>(path_),
                                         static_cast<std::uint32_t>(path_ >> 32) ^
                                             (static_cast<std::uint32_t>(step >> 32) << 16)};
  const auto r = philox4x32(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const double u1 = open_unit(r[0], r[1]);
  const double u2 = open_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(th), rad * std::sin(th)};
}

double PathRng::normal(std::uint64_t step, std::uint32_t index) const {
  return normal_pair(step, index / 2)[index % 2];
}

}  // namespace nlb
