#pragma once

// Portable random streams.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by four
// successive SplitMix64 outputs of the 64-bit seed. Uniform doubles take
// the top 53 bits of a draw; normals use the Box-Muller transform and
// consume two uniforms per pair. Every step is specified here so the same
// seed produces the same stream in any language.

#include <array>
#include <cstdint>

namespace ridgelab {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Seed for trial `index` of a run: base ^ splitmix64-hash(index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;
  // [0, 1)
  double uniform() noexcept;
  // Standard normal.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ridgelab
