#include "volterra/rng.hpp"

#include <cmath>
#include <numbers>

namespace volterra::rng {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Counter philox4x32_10(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

double standard_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, std::uint32_t component) {
  const Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), component, stream};
  const Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Counter out = philox4x32_10(ctr, key);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const std::uint64_t a = ((static_cast<std::uint64_t>(out[0]) << 32) | out[1]) >> 11;
  const std::uint64_t b = ((static_cast<std::uint64_t>(out[2]) << 32) | out[3]) >> 11;
  const double u1 = (static_cast<double>(a) + 1.0) * kScale;  // (0,1]
  const double u2 = static_cast<double>(b) * kScale;          // [0,1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform01(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, std::uint32_t component) {
  const Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), component, stream};
  const Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Counter out = philox4x32_10(ctr, key);
  const std::uint64_t a = ((static_cast<std::uint64_t>(out[0]) << 32) | out[1]) >> 11;
  return static_cast<double>(a) / 9007199254740992.0;
}

}  // namespace volterra::rng
