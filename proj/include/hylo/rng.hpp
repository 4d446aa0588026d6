#pragma once

// splitmix64 streams and seeded random fields.

#include <cstdint>
#include <string_view>

#include "hylo/field_state.hpp"

namespace hylo {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  // Independent stream for a named stage: seed mixed with the name hash.
  static SplitMix64 stream(std::uint64_t seed, std::string_view stage);

  std::uint64_t next();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Random field whose Fourier coefficients are uniform in the unit square for
// every bin with |k_i| <= band * k_nyquist_i on all axes and zero elsewhere.
// `real_valued` keeps only the real part.
ComplexField random_bandlimited(const Grid& grid, SplitMix64& rng, double band, bool real_valued);

// Every component drawn with random_bandlimited and scaled by `amplitude`
// relative to a unit maximum modulus.
FieldState random_state(ModelTag tag, const Grid& grid, SplitMix64& rng, double band, double amplitude);

}  // namespace hylo
