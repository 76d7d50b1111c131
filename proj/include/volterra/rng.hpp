#pragma once

#include <array>
#include <cstdint>

namespace volterra::rng {

// Philox4x32-10 counter-based generator (Random123 family). Stateless:
// the output is a pure function of (counter, key).
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32_10(Counter ctr, Key key);

// Standard normal for the tuple (seed, stream, index, component).
// Counter = (index lo, index hi, component, stream), key = (seed lo, seed hi).
// The first two output words give u1 in (0,1], the last two u2 in [0,1), and the
// value is sqrt(-2 ln u1) cos(2 pi u2).
double standard_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, std::uint32_t component);

// Uniform on [0,1) from the first two output words of the same counter layout.
double uniform01(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, std::uint32_t component);

}  // namespace volterra::rng
