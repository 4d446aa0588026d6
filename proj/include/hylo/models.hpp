#pragma once

// Energy, charge, their L2 gradients, the phase-space norm and one time step
// for each of the three models.
//
//   NLS  i psi_t = -1/2 Lap psi + 1/2 W'(psi)
//        E = 1/2 int |grad psi|^2 + int W(|psi|),   C = int |psi|^2
//   NWE  psi_t = phi,  phi_t = Lap psi - W'(psi)
//        E = 1/2 int |phi|^2 + 1/2 int |grad psi|^2 + int W,   C = Im int phi conj(psi)
//   NBE  u_t = v,  v_t = -u_xxxx - W'(u)          (dimension 1, real fields)
//        E = 1/2 int v^2 + 1/2 int u_xx^2 + int W,   C = -int v u_x
//
// Gradients are taken with respect to the real inner product Re int g conj(d),
// so that <grad F, d> is the directional derivative of F along d.

#include "hylo/field_state.hpp"
#include "hylo/nonlinearity.hpp"

namespace hylo {

struct ModelSpec {
  ModelTag tag = ModelTag::NLS;
  Grid grid = Grid::line(256, 40.0);
  WSpec w;

  ModelSpec(ModelTag tag, Grid grid, WSpec w);
  int dim() const { return grid.dim(); }
};

double energy(const ModelSpec& spec, const FieldState& state);
double charge(const ModelSpec& spec, const FieldState& state);
FieldState grad_energy(const ModelSpec& spec, const FieldState& state);
FieldState grad_charge(const ModelSpec& spec, const FieldState& state);

// Kinetic (gradient) part of the energy alone, and the potential part.
double gradient_energy(const ModelSpec& spec, const FieldState& state);
double potential_energy(const ModelSpec& spec, const FieldState& state);

double x_norm(const ModelSpec& spec, const FieldState& state);
// Riesz map of the phase-space metric: divides every Fourier coefficient by
// its norm weight, turning an L2 gradient into the X gradient.
FieldState precondition(const ModelSpec& spec, const FieldState& gradient);

// Largest |W''(|psi|)| over the grid.
double max_w_curvature(const ModelSpec& spec, const FieldState& state);

// One Strang step. NLS: half nonlinear phase rotation, exact linear
// propagator, half rotation. NWE/NBE: half kick, exact linear flow of
// psi_tt = -(L + m^2) psi, half kick. Throws InvalidArgument for dt <= 0 and
// NumericalFailure when dt * max|W''| > 0.5 for NWE/NBE.
FieldState evolve_step(const ModelSpec& spec, const FieldState& state, double dt);

// Reversal of the direction of time: conj(psi) for NLS, flips phi or v.
FieldState time_reversed(const FieldState& state);

// Real Gaussian profile A exp(-|x|^2 / (2 sigma^2)) cos(k0 x_0).
RealField gaussian_profile(const Grid& grid, double amplitude, double sigma, double carrier = 0.0);

// Model states built from a real profile u: NLS psi = u; NWE standing pair
// (u, -i omega u); NBE traveling pair (u, -speed u_x).
FieldState profile_state(const ModelSpec& spec, const RealField& u, double omega_or_speed = 1.0);

}  // namespace hylo
