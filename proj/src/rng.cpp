#include "hylo/rng.hpp"

#include <algorithm>
#include <cmath>

#include "hylo/errors.hpp"
#include "hylo/spectral.hpp"

namespace hylo {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::string_view stage) {
  SplitMix64 mix(seed ^ fnv1a64(stage));
  return SplitMix64(mix.next());
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

ComplexField random_bandlimited(const Grid& grid, SplitMix64& rng, double band, bool real_valued) {
  if (!(band > 0.0 && band <= 1.0)) throw InvalidArgument("band limit must lie in (0, 1]");
  ComplexField hat(grid.size());
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    const auto ijk = grid.unravel(idx);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a) {
      const int n = grid.n(a);
      const int i = ijk[a] <= n / 2 ? ijk[a] : n - ijk[a];
      if (2.0 * i > band * n) inside = false;
    }
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    if (inside) hat[idx] = cplx(re, im);
  }
  spectral::inverse_inplace(grid, hat);
  if (real_valued) {
    for (auto& z : hat) z = cplx(z.real(), 0.0);
  }
  return hat;
}

FieldState random_state(ModelTag tag, const Grid& grid, SplitMix64& rng, double band, double amplitude) {
  std::vector<ComplexField> comps;
  for (std::size_t c = 0; c < component_count(tag); ++c) {
    auto f = random_bandlimited(grid, rng, band, !is_complex_model(tag));
    double m = 0.0;
    for (const auto& z : f) m = std::max(m, std::abs(z));
    const double s = m > 0.0 ? amplitude / m : 0.0;
    for (auto& z : f) z *= s;
    comps.push_back(std::move(f));
  }
  return FieldState::from_components(tag, grid, std::move(comps));
}

}  // namespace hylo
