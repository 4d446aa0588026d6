#pragma once

// Derived functionals built on E and C and the probes that estimate the
// constants they depend on.
//
//   Lambda(u) = E(u) / |C(u)|
//   Phi(u)    = E(u) + 2 a |C(u)|^s
//   J_delta   = Lambda + delta Phi  >=  (delta/2) Phi - M,
//   M         = -a min_{t >= 0} ((delta/2) t^s - t^{s-1}).

#include <cstdint>
#include <optional>
#include <vector>

#include "hylo/models.hpp"

namespace hylo {

struct PenaltyParams {
  double delta = 0.01;
  double a = 0.0;
  double s_exp = 2.0;

  void validate() const;  // delta > 0, a >= 0, s_exp >= 1
};

// Throws NearZeroCharge when |C| < 1e-12 (1 + ||u||_X).
double lambda_ratio(const ModelSpec& spec, const FieldState& state);
double phi(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params);
double j_delta(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params);

// Closed form through t* = 2(s-1)/(delta s); s = 1 returns a.
double bound_m(const PenaltyParams& params);
// Same quantity from a dense scan of [0, 2/delta] (1e4 points, then 1e4 more
// across the best cell pair).
double bound_m_scan(const PenaltyParams& params, int points = 10000);

struct NashExponents {
  double q = 0.0;
  double r = 0.0;
};
// q = p N (1/2 - 1/p), r = p - q.
NashExponents nash_exponents(int dim, double p);
// ||psi||_p^p / (||psi||_2^r ||grad psi||_2^q); throws InvalidArgument when
// grad psi vanishes.
double nash_ratio(const Grid& grid, std::span<const cplx> psi, double p);

struct NashCheck {
  double b_p = 0.0;            // max ratio over all probes
  double best_random = 0.0;    // max over random band-limited fields
  double best_gaussian = 0.0;  // max over the Gaussian widths
  int random_samples = 0;
  int gaussian_widths = 0;
};
// Max ratio over `random_samples` band-limited random fields and 30
// Gaussian widths. Throws InvalidArgument for p >= 2 + 4/N.
NashCheck nash_check(const Grid& grid, double p, int random_samples = 1000, std::uint64_t seed = 7);

struct CoercivityChoice {
  PenaltyParams params;
  double b_p = 0.0;       // empirical constant used (NLS)
  double a_young = 0.0;   // a before the safety factor
  NashExponents nash;
  bool sampled = false;   // true for the probe-based fallback
};
// NLS: s = r/(2 - q) and a = 2 a0 with a0 = ((2-q)/(2q)) (q (b/p) b_p)^{2/(2-q)}
// (Young's inequality applied to the Nash bound). a = 0 when the focusing
// coefficient b <= 0. NWE/NBE: s = 2, a = 2 max(0, sup over probes of
// -E/|C|^s). Throws InvalidArgument for supercritical NLS.
CoercivityChoice choose_coercivity_params(const ModelSpec& spec, std::uint64_t seed = 7);
// The probe-based rule on its own (also used for supercritical audits).
PenaltyParams sampled_coercivity_params(const ModelSpec& spec, double s_exp);

// Lambda of the best state in the probe family built from a real profile:
// NLS uses psi = u; NWE and NBE minimize over omega (or speed) in closed form.
struct ProbeValue {
  double ratio = 0.0;
  double omega = 0.0;  // omega (NWE) or speed (NBE); 0 for NLS
};
ProbeValue best_probe_ratio(const ModelSpec& spec, const RealField& u);
// Carrier wavenumber of the Gaussian probes: m^{1/2} for NBE (the bottom of
// its dispersion relation), 0 otherwise.
double probe_carrier(const ModelSpec& spec);

struct Lambda0Options {
  int scales = 8;
  int extrapolation_points = 4;
};

struct Lambda0Family {
  std::vector<double> eps;     // amplitude (vanishing) or 1/sigma (spreading)
  std::vector<double> ratios;
  double limit = 0.0;
};

struct Lambda0Estimate {
  double value = 0.0;
  Lambda0Family vanishing;
  Lambda0Family spreading;
  double sigma_ref = 0.0;
  double carrier = 0.0;
};
// Liminf of Lambda as the sharp seminorm tends to zero, estimated along a
// vanishing family (fixed shape, amplitude -> 0) and a spreading family
// (fixed charge, width up to L/8), each extrapolated to eps = 0 by a
// polynomial through its last points. Returns the smaller limit.
Lambda0Estimate lambda0_estimate(const ModelSpec& spec, const Lambda0Options& opts = {});

struct HylomorphyReport {
  double lambda0 = 0.0;
  double best_ratio = 0.0;
  double amplitude = 0.0;
  double width = 0.0;
  double omega = 0.0;
  double carrier = 0.0;
  double margin = 0.0;
  bool verdict = false;
  int evaluations = 0;
};

struct HylomorphyOptions {
  int grid_points = 40;
  int refinements = 2;
  double margin_rel = 1e-3;
  double amp_min = 1e-2;
  double amp_max = 10.0;
};
// Minimizes Lambda over Gaussian amplitude x width on a log grid refined
// around the best cell; verdict = best_ratio < lambda0 - margin.
HylomorphyReport hylomorphy_check(const ModelSpec& spec, const HylomorphyOptions& opts = {},
                                  std::optional<double> lambda0 = std::nullopt);
// The probe state described by a report.
FieldState witness_state(const ModelSpec& spec, const HylomorphyReport& rep);

// sup over the Gaussian family of (Lambda0 - Lambda(u)) / Phi(u): below this
// delta the penalized infimum sits under Lambda0 at some probe.
double delta_bar(const ModelSpec& spec, const PenaltyParams& params, double lambda0,
                 const HylomorphyOptions& opts = {});

// Lagrange polynomial through (x_i, y_i) evaluated at 0.
double extrapolate_to_zero(std::span<const double> x, std::span<const double> y);

}  // namespace hylo
