#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hylo/grid.hpp"

namespace hylo {

enum class ModelTag { NLS, NWE, NBE };

std::string_view to_string(ModelTag tag);
ModelTag model_tag_from_string(std::string_view name);  // throws InvalidArgument

// Number of fields carried by a state of the given model.
inline std::size_t component_count(ModelTag tag) { return tag == ModelTag::NLS ? 1 : 2; }
// Component names used in file headers: psi | psi,phi | u,v.
std::vector<std::string> component_names(ModelTag tag);
inline bool is_complex_model(ModelTag tag) { return tag != ModelTag::NBE; }

// Immutable sampled state. NLS: psi. NWE: (psi, phi = d_t psi). NBE: (u, v =
// d_t u), stored as complex samples whose imaginary parts are forced to zero.
// All samples are finite; construction throws NumericalFailure otherwise.
class FieldState {
 public:
  FieldState(ModelTag tag, Grid grid, ComplexField data);
  static FieldState zero(ModelTag tag, const Grid& grid);
  static FieldState from_components(ModelTag tag, const Grid& grid,
                                    std::vector<ComplexField> components);

  ModelTag model() const { return tag_; }
  const Grid& grid() const { return grid_; }
  std::size_t num_components() const { return component_count(tag_); }
  std::size_t points() const { return grid_.size(); }

  // All components back to back (component-major).
  std::span<const cplx> data() const { return data_; }
  std::span<const cplx> component(std::size_t c) const {
    return std::span<const cplx>(data_).subspan(c * points(), points());
  }
  ComplexField component_copy(std::size_t c) const {
    auto s = component(c);
    return {s.begin(), s.end()};
  }

  // Moves the samples out (used by arithmetic helpers to avoid a copy).
  ComplexField release() && { return std::move(data_); }

 private:
  ModelTag tag_;
  Grid grid_;
  ComplexField data_;
};

// Shift in grid points along each axis, reduced modulo n_i.
class LatticeShift {
 public:
  LatticeShift() = default;
  LatticeShift(const Grid& grid, std::vector<long> z);
  const std::array<int, 3>& z() const { return z_; }
  LatticeShift inverse(const Grid& grid) const;

 private:
  std::array<int, 3> z_{0, 0, 0};
};

void require_same_grid(const FieldState& a, const FieldState& b);

// Pointwise arithmetic on whole states (same model and grid).
FieldState add_scaled(const FieldState& x, double alpha, const FieldState& d);  // x + alpha d
FieldState scaled(const FieldState& x, double alpha);
FieldState phase_rotated(const FieldState& x, double theta);  // e^{i theta} x, all components
// Replaces one component, keeping the others.
FieldState with_component(const FieldState& x, std::size_t c, ComplexField values);

}  // namespace hylo
