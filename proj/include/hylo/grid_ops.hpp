#pragma once

// Quadrature, the auxiliary (sharp) seminorm, the lattice-translation action
// and the orbit distance modulo translations (and global phase for the
// complex models).

#include <span>
#include <vector>

#include "hylo/field_state.hpp"

namespace hylo {

// (prod h_i) * sum of samples.
double integrate(const Grid& grid, std::span<const double> f);

// NLS/NWE: sup over grid points z of (integral of |psi|^2 over the periodic
// unit ball around z)^{1/2}. NBE: max |u|. Throws InvalidArgument for
// complex models on boxes with some L_i <= 2 (the unit ball would wrap).
double sharp_seminorm(const FieldState& state);

// (g_z u)(x) = u(x - z h): exact circular shift of every component.
FieldState translate(const FieldState& state, const LatticeShift& shift);

// Fourier weights of the phase-space norm for component c, in storage order:
// psi of NLS/NWE -> 1 + |k|^2, u of NBE -> 1 + k^4, velocities -> 1.
std::vector<double> x_norm_weights(ModelTag tag, const Grid& grid, std::size_t component);

// Phase-space inner product Re <a, b>_X and norm ||u||_X.
double x_inner(const FieldState& a, const FieldState& b);
double x_norm_of(const FieldState& state);

struct OrbitAlignment {
  double distance = 0.0;
  std::vector<double> shift;  // physical shift applied to b (continuous)
  std::vector<long> grid_shift;
  double phase = 0.0;         // e^{i phase} applied to b
};

// min over shifts s and (complex models) phases theta of ||a - e^{i theta} T_s b||_X.
// Coarse stage: every grid shift through one FFT cross-correlation. Fine
// stage: golden-section refinement of a continuous (spectral) shift within one
// cell per axis. The exact grid-shift candidate is always kept, so states on
// the same lattice orbit are at distance zero.
OrbitAlignment align_orbit(const FieldState& a, const FieldState& b);
double orbit_distance(const FieldState& a, const FieldState& b);
// e^{i phase} T_shift b: the representative of b's orbit closest to a.
FieldState apply_alignment(const FieldState& b, const OrbitAlignment& al);

// Continuous translation by `shift` (physical units), via Fourier phases.
FieldState translate_continuous(const FieldState& state, const std::vector<double>& shift);

}  // namespace hylo
