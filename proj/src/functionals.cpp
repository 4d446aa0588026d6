#include "hylo/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/kernels.hpp"
#include "hylo/rng.hpp"
#include "hylo/spectral.hpp"

namespace hylo {

void PenaltyParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("penalty delta must be > 0");
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("penalty a must be >= 0");
  if (!(s_exp >= 1.0) || !std::isfinite(s_exp)) throw InvalidArgument("penalty exponent s must be >= 1");
}

double lambda_ratio(const ModelSpec& spec, const FieldState& state) {
  const double c = charge(spec, state);
  if (std::abs(c) < 1e-12 * (1.0 + x_norm(spec, state))) {
    throw NearZeroCharge("charge too close to zero for E/|C|");
  }
  return energy(spec, state) / std::abs(c);
}

double phi(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params) {
  const double e = energy(spec, state);
  if (params.a == 0.0) return e;
  return e + 2.0 * params.a * std::pow(std::abs(charge(spec, state)), params.s_exp);
}

double j_delta(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params) {
  return lambda_ratio(spec, state) + params.delta * phi(spec, state, params);
}

double bound_m(const PenaltyParams& params) {
  params.validate();
  if (params.a == 0.0) return 0.0;
  const double s = params.s_exp;
  if (s == 1.0) return params.a;
  const double t = 2.0 * (s - 1.0) / (params.delta * s);
  const double g = 0.5 * params.delta * std::pow(t, s) - std::pow(t, s - 1.0);
  return -params.a * g;
}

double bound_m_scan(const PenaltyParams& params, int points) {
  params.validate();
  if (params.a == 0.0) return 0.0;
  const double s = params.s_exp;
  auto g = [&](double t) { return 0.5 * params.delta * std::pow(t, s) - std::pow(t, s - 1.0); };
  double lo = 0.0, hi = 2.0 / params.delta;
  double best = g(0.0);
  for (int level = 0; level < 2; ++level) {
    const double step = (hi - lo) / points;
    double arg = lo;
    for (int i = 0; i <= points; ++i) {
      const double t = lo + i * step;
      const double v = g(t);
      if (v < best) {
        best = v;
        arg = t;
      }
    }
    lo = std::max(0.0, arg - step);
    hi = arg + step;
  }
  return -params.a * best;
}

NashExponents nash_exponents(int dim, double p) {
  NashExponents e;
  e.q = p * dim * (0.5 - 1.0 / p);
  e.r = p - e.q;
  return e;
}

double nash_ratio(const Grid& grid, std::span<const cplx> psi, double p) {
  const auto ex = nash_exponents(grid.dim(), p);
  const double dv = grid.cell_volume();
  double lp = 0.0, l2 = 0.0;
  for (const auto& z : psi) {
    const double a = std::abs(z);
    lp += std::pow(a, p);
    l2 += a * a;
  }
  lp *= dv;
  l2 *= dv;
  const auto hat = spectral::forward(grid, psi);
  const double g2 = dv * spectral::parseval_factor(grid) * kernels::weighted_norm2(grid.k_squared(), hat);
  if (!(g2 > 1e-28 * (l2 + 1e-300))) throw InvalidArgument("Nash ratio undefined: gradient vanishes");
  return lp / (std::pow(l2, 0.5 * ex.r) * std::pow(g2, 0.5 * ex.q));
}

NashCheck nash_check(const Grid& grid, double p, int random_samples, std::uint64_t seed) {
  if (!(p > 2.0) || p >= 2.0 + 4.0 / grid.dim()) {
    throw InvalidArgument("Nash check needs 2 < p < 2 + 4/N");
  }
  NashCheck out;
  SplitMix64 rng = SplitMix64::stream(seed, "nash");
  const double bands[] = {0.05, 0.1, 0.25, 0.5};
  for (int i = 0; i < random_samples; ++i) {
    const auto f = random_bandlimited(grid, rng, bands[i % 4], false);
    try {
      out.best_random = std::max(out.best_random, nash_ratio(grid, f, p));
    } catch (const InvalidArgument&) {
    }
  }
  out.random_samples = random_samples;
  const double h = grid.max_spacing(), lmin = grid.min_length();
  const int widths = 30;
  const double w_lo = 4.0 * h, w_hi = lmin / 8.0;
  for (int i = 0; i < widths; ++i) {
    const double w = w_lo * std::pow(w_hi / w_lo, i / (widths - 1.0));
    const auto u = gaussian_profile(grid, 1.0, w);
    const ComplexField f(u.begin(), u.end());
    out.best_gaussian = std::max(out.best_gaussian, nash_ratio(grid, f, p));
  }
  out.gaussian_widths = widths;
  out.b_p = std::max(out.best_random, out.best_gaussian);
  return out;
}

PenaltyParams sampled_coercivity_params(const ModelSpec& spec, double s_exp) {
  PenaltyParams params;
  params.s_exp = s_exp;
  double worst = 0.0;
  auto consider = [&](const FieldState& st) {
    const double c = std::abs(charge(spec, st));
    if (c < 1e-12) return;
    worst = std::max(worst, -energy(spec, st) / std::pow(c, s_exp));
  };
  const double h = spec.grid.max_spacing(), lmin = spec.grid.min_length();
  const double omegas[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  for (int i = 0; i < 12; ++i) {
    const double amp = 1e-2 * std::pow(1e3, i / 11.0);
    for (int j = 0; j < 12; ++j) {
      const double w = 3.0 * h * std::pow(lmin / (24.0 * h), j / 11.0);
      const auto u = gaussian_profile(spec.grid, amp, w);
      if (spec.tag == ModelTag::NLS) {
        consider(profile_state(spec, u));
      } else {
        for (double om : omegas) consider(profile_state(spec, u, om));
      }
    }
  }
  SplitMix64 rng = SplitMix64::stream(0x5eed, "coercivity");
  for (int i = 0; i < 64; ++i) consider(random_state(spec.tag, spec.grid, rng, 0.25, 0.1 * (1 + i % 8)));
  params.a = 2.0 * std::max(0.0, worst);
  return params;
}

CoercivityChoice choose_coercivity_params(const ModelSpec& spec, std::uint64_t seed) {
  CoercivityChoice out;
  const WSpec& w = spec.w;
  const bool power = w.family != WFamily::Saturating;
  if (spec.tag != ModelTag::NLS) {
    out.params = sampled_coercivity_params(spec, 2.0);
    out.sampled = true;
    return out;
  }
  const int dim = spec.dim();
  if (power && w.b > 0.0 && w.p >= 2.0 + 4.0 / dim) {
    throw InvalidArgument("focusing power is not subcritical (p >= 2 + 4/N)");
  }
  out.nash = nash_exponents(dim, power ? w.p : 4.0);
  const double q = out.nash.q, r = out.nash.r;
  out.params.s_exp = std::max(1.0, r / (2.0 - q));
  if (!power || w.b <= 0.0) {
    out.params.a = 0.0;
    return out;
  }
  out.b_p = nash_check(spec.grid, w.p, 1000, seed).b_p;
  const double c3 = w.b / w.p;
  out.a_young = (2.0 - q) / (2.0 * q) * std::pow(q * c3 * out.b_p, 2.0 / (2.0 - q));
  out.params.a = 2.0 * out.a_young;
  return out;
}

double probe_carrier(const ModelSpec& spec) {
  return spec.tag == ModelTag::NBE ? std::pow(spec.w.m_sq, 0.25) : 0.0;
}

ProbeValue best_probe_ratio(const ModelSpec& spec, const RealField& u) {
  if (spec.tag == ModelTag::NLS) return {lambda_ratio(spec, profile_state(spec, u)), 0.0};
  const double p = std::abs(charge(spec, profile_state(spec, u, 1.0)));
  if (p < 1e-300) throw NearZeroCharge("probe profile carries no charge");
  const double r = energy(spec, profile_state(spec, u, 0.0));
  const double omega = r > 0.0 ? std::sqrt(2.0 * r / p) : 1e-3;
  return {0.5 * omega + r / (omega * p), omega};
}

double extrapolate_to_zero(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw InvalidArgument("extrapolation needs matching points");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
    }
    total += w * y[i];
  }
  return total;
}

namespace {

void finish_family(Lambda0Family& fam, int points) {
  const std::size_t k = std::min<std::size_t>(points, fam.eps.size());
  const std::size_t off = fam.eps.size() - k;
  fam.limit = extrapolate_to_zero(std::span<const double>(fam.eps).subspan(off),
                                  std::span<const double>(fam.ratios).subspan(off));
}

}  // namespace

Lambda0Estimate lambda0_estimate(const ModelSpec& spec, const Lambda0Options& opts) {
  if (opts.scales < 2 || opts.extrapolation_points < 1 || opts.extrapolation_points > opts.scales) {
    throw InvalidArgument("lambda0: need scales >= 2 and 1 <= extrapolation points <= scales");
  }
  Lambda0Estimate est;
  const Grid& g = spec.grid;
  est.sigma_ref = std::max(1.0, 4.0 * g.max_spacing());
  est.carrier = probe_carrier(spec);
  const double sigma_max = g.min_length() / 8.0;
  if (est.sigma_ref > sigma_max) throw InvalidArgument("probe family leaves the grid (sigma > L/8)");

  for (int k = 0; k < opts.scales; ++k) {
    const double amp = std::ldexp(1.0, -k);
    const auto u = gaussian_profile(g, amp, est.sigma_ref, est.carrier);
    est.vanishing.eps.push_back(amp);
    est.vanishing.ratios.push_back(best_probe_ratio(spec, u).ratio);
  }
  for (int k = 0; k < opts.scales; ++k) {
    const double sigma = sigma_max * std::pow(2.0, -0.5 * (opts.scales - 1 - k));
    const double amp = std::pow(est.sigma_ref / sigma, 0.5 * g.dim());
    const auto u = gaussian_profile(g, amp, sigma, est.carrier);
    est.spreading.eps.push_back(1.0 / sigma);
    est.spreading.ratios.push_back(best_probe_ratio(spec, u).ratio);
  }
  finish_family(est.vanishing, opts.extrapolation_points);
  finish_family(est.spreading, opts.extrapolation_points);
  est.value = std::min(est.vanishing.limit, est.spreading.limit);
  return est;
}

FieldState witness_state(const ModelSpec& spec, const HylomorphyReport& rep) {
  const auto u = gaussian_profile(spec.grid, rep.amplitude, rep.width, rep.carrier);
  return profile_state(spec, u, rep.omega);
}

namespace {

struct GridSearch {
  double amp = 0.0, width = 0.0, value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

// Minimizes objective(amp, width) over a log grid, then re-grids around the
// best point `refinements` times.
template <class F>
GridSearch log_grid_search(F&& objective, double a_lo, double a_hi, double w_lo, double w_hi, int points,
                           int refinements) {
  GridSearch best;
  for (int level = 0; level <= refinements; ++level) {
    const double la = std::log(a_lo), ua = std::log(a_hi);
    const double lw = std::log(w_lo), uw = std::log(w_hi);
    const double da = (ua - la) / (points - 1), dw = (uw - lw) / (points - 1);
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        const double amp = std::exp(la + i * da), w = std::exp(lw + j * dw);
        double v;
        try {
          v = objective(amp, w);
        } catch (const NearZeroCharge&) {
          continue;
        }
        ++best.evaluations;
        if (v < best.value) {
          best.value = v;
          best.amp = amp;
          best.width = w;
        }
      }
    }
    if (!std::isfinite(best.value)) break;
    a_lo = best.amp * std::exp(-da);
    a_hi = best.amp * std::exp(da);
    w_lo = std::max(w_lo, best.width * std::exp(-dw));
    w_hi = std::min(w_hi, best.width * std::exp(dw));
  }
  return best;
}

}  // namespace

HylomorphyReport hylomorphy_check(const ModelSpec& spec, const HylomorphyOptions& opts,
                                  std::optional<double> lambda0) {
  HylomorphyReport rep;
  rep.lambda0 = lambda0 ? *lambda0 : lambda0_estimate(spec).value;
  rep.margin = opts.margin_rel * std::abs(rep.lambda0);
  rep.carrier = probe_carrier(spec);
  const Grid& g = spec.grid;
  const double w_lo = 3.0 * g.max_spacing(), w_hi = g.min_length() / 8.0;
  auto objective = [&](double amp, double w) {
    return best_probe_ratio(spec, gaussian_profile(g, amp, w, rep.carrier)).ratio;
  };
  const auto best = log_grid_search(objective, opts.amp_min, opts.amp_max, w_lo, w_hi, opts.grid_points,
                                    opts.refinements);
  if (!std::isfinite(best.value)) throw NumericalFailure("hylomorphy search found no admissible probe");
  rep.amplitude = best.amp;
  rep.width = best.width;
  rep.evaluations = best.evaluations;
  rep.omega = best_probe_ratio(spec, gaussian_profile(g, best.amp, best.width, rep.carrier)).omega;
  rep.best_ratio = lambda_ratio(spec, witness_state(spec, rep));
  rep.verdict = rep.best_ratio < rep.lambda0 - rep.margin;
  return rep;
}

double delta_bar(const ModelSpec& spec, const PenaltyParams& params, double lambda0,
                 const HylomorphyOptions& opts) {
  const Grid& g = spec.grid;
  const double carrier = probe_carrier(spec);
  const double w_lo = 3.0 * g.max_spacing(), w_hi = g.min_length() / 8.0;
  auto objective = [&](double amp, double w) {
    const auto u = gaussian_profile(g, amp, w, carrier);
    const auto pv = best_probe_ratio(spec, u);
    const auto st = profile_state(spec, u, pv.omega);
    const double ph = phi(spec, st, params);
    if (!(pv.ratio < lambda0) || !(ph > 0.0)) return 0.0;
    return -(lambda0 - pv.ratio) / ph;
  };
  const auto best = log_grid_search(objective, opts.amp_min, opts.amp_max, w_lo, w_hi, opts.grid_points,
                                    opts.refinements);
  return std::max(0.0, -best.value);
}

}  // namespace hylo
