#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hylo/models.hpp"
#include "hylo/rng.hpp"

namespace hylo::test {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline ModelSpec focusing_nls(int n = 512, double L = 40.0) {
  return ModelSpec(ModelTag::NLS, Grid::line(n, L), WSpec::single_power(1.0, 1.0, 4.0));
}

inline FieldState from_real(ModelTag tag, const Grid& g, const RealField& u) {
  ComplexField c(u.begin(), u.end());
  if (component_count(tag) == 2) c.resize(2 * g.size(), cplx{});
  return FieldState(tag, g, std::move(c));
}

// max_i |a_i - b_i| over every component.
inline double max_abs_diff(const FieldState& a, const FieldState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double max_abs(const FieldState& a) {
  double m = 0.0;
  for (const cplx& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace hylo::test
