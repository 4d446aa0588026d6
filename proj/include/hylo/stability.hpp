#pragma once

// Lyapunov function V = (E - e)^2 + (C - c)^2 and perturbation experiments
// around a computed minimizer.

#include <cstdint>
#include <string>
#include <vector>

#include "hylo/dynamics.hpp"
#include "hylo/minimizer.hpp"

namespace hylo {

enum class PerturbationKind { additive_noise, amplitude_scale, shift_and_phase };

std::string_view to_string(PerturbationKind k);
PerturbationKind perturbation_kind_from_string(std::string_view name);

struct Perturbation {
  PerturbationKind kind = PerturbationKind::additive_noise;
  double epsilon = 0.0;      // X-norm of the noise, or the relative amplitude change
  double band_limit = 0.25;  // fraction of the Nyquist wavenumber (noise)
  std::uint64_t seed = 1;
  std::vector<long> shift;   // grid points (shift_and_phase)
  double theta = 0.0;        // global phase (shift_and_phase)
};

// epsilon = 0 (and a zero shift and phase) returns the state unchanged.
FieldState apply_perturbation(const ModelSpec& spec, const FieldState& state, const Perturbation& p);

double lyapunov_v(const ModelSpec& spec, const FieldState& state, double e_ref, double c_ref);

struct StabilityOptions {
  double T = 50.0;
  double dt = 1e-3;
  int record_every = 100;
  double kappa = 4.0;
  double abs_tol = 1e-6;
  int jobs = 1;
};

struct StabilityRow {
  Perturbation perturbation;
  double perturbation_norm = 0.0;  // ||perturbed - reference||_X
  double v0 = 0.0;
  double max_v = 0.0;
  double initial_distance = 0.0;
  double max_orbit_distance = 0.0;
  bool stable = false;
  std::string verdict;
  EvolutionTrace trace;
};

struct StabilityReport {
  double e_ref = 0.0;
  double c_ref = 0.0;
  StabilityOptions options;
  std::vector<StabilityRow> rows;
};

// Evolves each perturbed copy of result.state with V and orbit distance
// attached. verdict: stable iff max_t V <= kappa V(0) + abs_tol and no
// blow-up. Throws InvalidArgument when the result did not converge.
StabilityReport run_stability(const ModelSpec& spec, const MinimizeResult& result,
                              const std::vector<Perturbation>& perturbations, const StabilityOptions& opts = {});

struct VScanRow {
  double radius = 0.0;
  double min_v = 0.0;
  int samples = 0;
};

// For each radius r, min over K directions eta of V(u + r eta), where the
// eta are band-limited noise made L2-orthogonal to grad C and grad E and
// normalized in the X norm. The same directions serve every radius.
std::vector<VScanRow> v_separation_scan(const ModelSpec& spec, const MinimizeResult& result,
                                        const std::vector<double>& radii, int samples = 64,
                                        std::uint64_t seed = 1, double band_limit = 0.25);

}  // namespace hylo
