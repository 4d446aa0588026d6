#pragma once

// Descent on J_delta, charge-constrained refinement and delta continuation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hylo/functionals.hpp"

namespace hylo {

struct MinimizeOptions {
  int max_iters = 20000;
  double grad_tol = 1e-8;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 60;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DescentRecord {
  int iteration = 0;
  double value = 0.0;  // J_delta (penalized) or E (constrained)
  double step = 0.0;
  double grad_norm = 0.0;
};

struct MinimizeResult {
  explicit MinimizeResult(FieldState s) : state(std::move(s)) {}

  FieldState state;
  double e_delta = 0.0;
  double c_delta = 0.0;  // |C|
  double j_value = 0.0;
  double lambda_mult = 0.0;
  double kkt_residual = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<DescentRecord> log;
};

// L2 inner product Re sum conj over all components, times the cell volume.
double l2_inner(const FieldState& a, const FieldState& b);
double l2_norm(const FieldState& a);

// gradE - lambda gradC with lambda = <gradE, gradC> / <gradC, gradC>.
struct MultiplierFit {
  double lambda = 0.0;
  double residual = 0.0;  // ||gradE - lambda gradC||
  double kkt = 0.0;       // residual / (1 + ||gradE||)
};
MultiplierFit multiplier_fit(const FieldState& grad_e, const FieldState& grad_c);

// L2 gradient of J_delta.
FieldState grad_j_delta(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params);

// Preconditioned (X-metric) gradient descent on J_delta with Armijo
// backtracking. The first trial step is opts.initial_step; later trials start
// from the Barzilai-Borwein step. When the Armijo decrease falls below the
// resolution of J (1e-13 (1 + |J|)), a step is also accepted if J does not
// rise beyond that resolution and the slope along the direction shrinks by
// at least 10%.
MinimizeResult minimize_jdelta(const ModelSpec& spec, const PenaltyParams& params, const FieldState& init,
                               const MinimizeOptions& opts = {});

// Rescales one component so that C = c_target (signed): NLS psi, NWE phi,
// NBE v. Throws NumericalFailure when C is too close to 0 or has the wrong
// sign for NLS.
FieldState restore_charge(const ModelSpec& spec, const FieldState& state, double c_target);

// Projected descent of E on {C = c_target}; lambda_mult and kkt_residual
// come from multiplier_fit at the final state.
MinimizeResult refine_constrained(const ModelSpec& spec, double c_target, const FieldState& init,
                                  const MinimizeOptions& opts = {});

// Gaussian probe with the smallest J_delta (40 x 40 log grid, refined twice).
FieldState jdelta_seed(const ModelSpec& spec, const PenaltyParams& params);
// Gaussian probe of the given charge whose width minimizes E at that charge.
FieldState charge_seed(const ModelSpec& spec, double c_target);

// `count` geometric points from 0.9 delta_bar down to 0.55 delta_bar.
std::vector<double> default_delta_list(double delta_bar, int count = 5);

struct ContinuationMember {
  double delta = 0.0;
  MinimizeResult penalized;
  MinimizeResult refined;
};

struct ContinuationResult {
  std::vector<ContinuationMember> members;
  std::vector<std::vector<double>> distances;  // pairwise orbit distances of refined states
};

// Warm-started chain over a decreasing delta list: J_delta descent (from
// `init` or jdelta_seed for the first), then constrained refinement at the
// member's own charge. Throws NumericalFailure when a link does not converge.
ContinuationResult delta_continuation(const ModelSpec& spec, const PenaltyParams& base,
                                      const std::vector<double>& delta_list, const MinimizeOptions& opts = {},
                                      std::optional<FieldState> init = std::nullopt);

}  // namespace hylo
