#include "hylo/field_state.hpp"

#include <cmath>

#include "hylo/errors.hpp"
#include "hylo/kernels.hpp"

namespace hylo {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::NLS: return "NLS";
    case ModelTag::NWE: return "NWE";
    case ModelTag::NBE: return "NBE";
  }
  return "?";
}

ModelTag model_tag_from_string(std::string_view name) {
  if (name == "NLS") return ModelTag::NLS;
  if (name == "NWE") return ModelTag::NWE;
  if (name == "NBE") return ModelTag::NBE;
  throw InvalidArgument("unknown model tag '" + std::string(name) + "'");
}

std::vector<std::string> component_names(ModelTag tag) {
  switch (tag) {
    case ModelTag::NLS: return {"psi"};
    case ModelTag::NWE: return {"psi", "phi"};
    case ModelTag::NBE: return {"u", "v"};
  }
  return {};
}

FieldState::FieldState(ModelTag tag, Grid grid, ComplexField data)
    : tag_(tag), grid_(std::move(grid)), data_(std::move(data)) {
  if (data_.size() != component_count(tag_) * grid_.size()) {
    throw InvalidArgument("field state: sample count does not match grid and model");
  }
  if (tag_ == ModelTag::NBE) {
    for (auto& z : data_) z = cplx(z.real(), 0.0);
  }
  for (const auto& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericalFailure("field state contains non-finite samples");
    }
  }
}

FieldState FieldState::zero(ModelTag tag, const Grid& grid) {
  return FieldState(tag, grid, ComplexField(component_count(tag) * grid.size()));
}

FieldState FieldState::from_components(ModelTag tag, const Grid& grid,
                                       std::vector<ComplexField> components) {
  if (components.size() != component_count(tag)) {
    throw InvalidArgument("field state: wrong number of components for model");
  }
  ComplexField data;
  data.reserve(component_count(tag) * grid.size());
  for (auto& c : components) {
    if (c.size() != grid.size()) throw InvalidArgument("field state: component size mismatch");
    data.insert(data.end(), c.begin(), c.end());
  }
  return FieldState(tag, grid, std::move(data));
}

LatticeShift::LatticeShift(const Grid& grid, std::vector<long> z) {
  if (static_cast<int>(z.size()) != grid.dim()) {
    throw InvalidArgument("lattice shift length differs from grid dimension");
  }
  for (int a = 0; a < grid.dim(); ++a) {
    const long n = grid.n(a);
    z_[a] = static_cast<int>(((z[a] % n) + n) % n);
  }
}

LatticeShift LatticeShift::inverse(const Grid& grid) const {
  std::vector<long> neg(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) neg[a] = -static_cast<long>(z_[a]);
  return LatticeShift(grid, std::move(neg));
}

void require_same_grid(const FieldState& a, const FieldState& b) {
  if (a.model() != b.model()) throw InvalidArgument("states belong to different models");
  if (!(a.grid() == b.grid())) throw InvalidArgument("states live on different grids");
}

FieldState add_scaled(const FieldState& x, double alpha, const FieldState& d) {
  require_same_grid(x, d);
  ComplexField out(x.data().begin(), x.data().end());
  kernels::axpy(alpha, kernels::as_reals(d.data()), kernels::as_reals(std::span<cplx>(out)));
  return FieldState(x.model(), x.grid(), std::move(out));
}

FieldState scaled(const FieldState& x, double alpha) {
  ComplexField out(x.data().begin(), x.data().end());
  kernels::scale(alpha, kernels::as_reals(std::span<cplx>(out)));
  return FieldState(x.model(), x.grid(), std::move(out));
}

FieldState phase_rotated(const FieldState& x, double theta) {
  if (!is_complex_model(x.model())) return x;
  const cplx rot = std::polar(1.0, theta);
  ComplexField out(x.data().begin(), x.data().end());
  for (auto& z : out) z *= rot;
  return FieldState(x.model(), x.grid(), std::move(out));
}

FieldState with_component(const FieldState& x, std::size_t c, ComplexField values) {
  if (values.size() != x.points()) throw InvalidArgument("component size mismatch");
  ComplexField out(x.data().begin(), x.data().end());
  std::copy(values.begin(), values.end(), out.begin() + c * x.points());
  return FieldState(x.model(), x.grid(), std::move(out));
}

}  // namespace hylo
