#include "hylo/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/kernels.hpp"

namespace hylo {

void MinimizeOptions::validate() const {
  if (max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw InvalidArgument("grad_tol must be > 0");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 0.5)) throw InvalidArgument("Armijo c1 must lie in (0, 0.5)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("backtrack factor must lie in (0, 1)");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial step must be > 0");
  if (max_backtracks < 1) throw InvalidArgument("max_backtracks must be >= 1");
}

double l2_inner(const FieldState& a, const FieldState& b) {
  require_same_grid(a, b);
  return a.grid().cell_volume() * kernels::dot(kernels::as_reals(a.data()), kernels::as_reals(b.data()));
}

double l2_norm(const FieldState& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

MultiplierFit multiplier_fit(const FieldState& grad_e, const FieldState& grad_c) {
  MultiplierFit fit;
  const double cc = l2_inner(grad_c, grad_c);
  fit.lambda = cc > 0.0 ? l2_inner(grad_e, grad_c) / cc : 0.0;
  fit.residual = l2_norm(add_scaled(grad_e, -fit.lambda, grad_c));
  fit.kkt = fit.residual / (1.0 + l2_norm(grad_e));
  return fit;
}

namespace {

struct JEval {
  double e = 0.0, c = 0.0, j = 0.0;
};

JEval eval_j(const ModelSpec& spec, const FieldState& x, const PenaltyParams& p) {
  JEval r;
  r.e = energy(spec, x);
  r.c = charge(spec, x);
  if (std::abs(r.c) < 1e-12 * (1.0 + x_norm(spec, x))) throw NearZeroCharge("charge too close to zero for E/|C|");
  const double ac = std::abs(r.c);
  r.j = r.e / ac + p.delta * (r.e + (p.a == 0.0 ? 0.0 : 2.0 * p.a * std::pow(ac, p.s_exp)));
  return r;
}

FieldState combine_j_gradient(const ModelSpec& spec, const FieldState& ge, const FieldState& gc, const JEval& v,
                              const PenaltyParams& p) {
  (void)spec;
  const double ac = std::abs(v.c);
  const double sgn = v.c < 0.0 ? -1.0 : 1.0;
  const double ce = 1.0 / ac + p.delta;
  double cc = sgn * (-v.e / (ac * ac));
  if (p.a != 0.0) cc += sgn * 2.0 * p.a * p.delta * p.s_exp * std::pow(ac, p.s_exp - 1.0);
  return add_scaled(scaled(ge, ce), cc, gc);
}

double bb_step(const FieldState& s, const FieldState& y, double fallback) {
  const double sy = l2_inner(s, y);
  const double ss = x_inner(s, s);
  if (sy > 0.0 && ss > 0.0 && std::isfinite(ss / sy)) return std::clamp(ss / sy, 1e-10, 1e6);
  return fallback;
}

MinimizeResult finish(MinimizeResult res, const ModelSpec& spec) {
  res.e_delta = energy(spec, res.state);
  res.c_delta = std::abs(charge(spec, res.state));
  const auto fit = multiplier_fit(grad_energy(spec, res.state), grad_charge(spec, res.state));
  res.lambda_mult = fit.lambda;
  res.kkt_residual = fit.kkt;
  return res;
}

}  // namespace

FieldState grad_j_delta(const ModelSpec& spec, const FieldState& state, const PenaltyParams& params) {
  const auto v = eval_j(spec, state, params);
  return combine_j_gradient(spec, grad_energy(spec, state), grad_charge(spec, state), v, params);
}

MinimizeResult minimize_jdelta(const ModelSpec& spec, const PenaltyParams& params, const FieldState& init,
                               const MinimizeOptions& opts) {
  opts.validate();
  params.validate();
  MinimizeResult res(init);
  FieldState x = init;
  JEval v = eval_j(spec, x, params);
  if (!std::isfinite(v.j)) throw NumericalFailure("J_delta is not finite at the initial state");
  FieldState ge = grad_energy(spec, x), gc = grad_charge(spec, x);
  FieldState g = combine_j_gradient(spec, ge, gc, v, params);
  std::optional<FieldState> x_prev, g_prev;
  double step = opts.initial_step;

  int it = 0;
  for (;; ++it) {
    const double gnorm = l2_norm(g);
    const double scale = 1.0 + x_norm(spec, x);
    const auto fit = multiplier_fit(ge, gc);
    res.grad_norm = gnorm;
    if (gnorm <= opts.grad_tol * scale && fit.kkt <= 10.0 * opts.grad_tol * scale) {
      res.converged = true;
      res.stop_reason = "gradient tolerance reached";
      break;
    }
    if (it >= opts.max_iters) {
      res.stop_reason = "iteration limit";
      break;
    }
    const FieldState d = scaled(precondition(spec, g), -1.0);
    const double slope = l2_inner(g, d);
    if (!(slope < 0.0)) {
      res.stop_reason = "no descent direction";
      break;
    }
    if (x_prev) step = bb_step(add_scaled(x, -1.0, *x_prev), add_scaled(g, -1.0, *g_prev), 2.0 * step);

    const double resolution = 1e-13 * (1.0 + std::abs(v.j));
    bool accepted = false;
    double t = step;
    std::optional<FieldState> xt;
    JEval vt;
    for (int k = 0; k < opts.max_backtracks; ++k, t *= opts.backtrack) {
      xt.emplace(add_scaled(x, t, d));
      try {
        vt = eval_j(spec, *xt, params);
      } catch (const NearZeroCharge&) {
        continue;
      }
      if (!std::isfinite(vt.j)) continue;
      if (vt.j <= v.j + opts.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      if (-opts.armijo_c1 * t * slope < resolution && vt.j <= v.j + resolution) {
        const FieldState gt = grad_j_delta(spec, *xt, params);
        if (std::abs(l2_inner(gt, d)) <= 0.9 * std::abs(slope)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      res.stop_reason = "line search stalled";
      break;
    }
    x_prev = x;
    g_prev = g;
    x = std::move(*xt);
    v = vt;
    ge = grad_energy(spec, x);
    gc = grad_charge(spec, x);
    g = combine_j_gradient(spec, ge, gc, v, params);
    step = t;
    res.log.push_back({it + 1, v.j, t, l2_norm(g)});
  }
  res.iters = static_cast<int>(res.log.size());
  res.state = x;
  res.j_value = v.j;
  return finish(std::move(res), spec);
}

FieldState restore_charge(const ModelSpec& spec, const FieldState& state, double c_target) {
  const double c = charge(spec, state);
  if (std::abs(c) < 1e-14 * (1.0 + x_norm(spec, state)) || !std::isfinite(c)) {
    throw NumericalFailure("charge restoration failed: C is too close to zero");
  }
  if (spec.tag == ModelTag::NLS) {
    if (!(c_target > 0.0)) throw NumericalFailure("NLS charge target must be positive");
    return scaled(state, std::sqrt(c_target / c));
  }
  ComplexField v = state.component_copy(1);
  const double f = c_target / c;
  for (auto& z : v) z *= f;
  return with_component(state, 1, std::move(v));
}

MinimizeResult refine_constrained(const ModelSpec& spec, double c_target, const FieldState& init,
                                  const MinimizeOptions& opts) {
  opts.validate();
  const double c0 = charge(spec, init);
  if (!(std::abs(c0 - c_target) <= 0.2 * std::abs(c_target))) {
    throw InvalidArgument("refine_constrained: initial charge not within 20% of the target");
  }
  MinimizeResult res(init);
  FieldState x = restore_charge(spec, init, c_target);
  double e = energy(spec, x);
  FieldState ge = grad_energy(spec, x), gc = grad_charge(spec, x);
  auto tangent = [&](const FieldState& a, const FieldState& b) {
    const auto f = multiplier_fit(a, b);
    return add_scaled(a, -f.lambda, b);
  };
  FieldState gp = tangent(ge, gc);
  std::optional<FieldState> x_prev, gp_prev;
  double step = opts.initial_step;

  for (int it = 0;; ++it) {
    const double gnorm = l2_norm(gp);
    const double scale = 1.0 + x_norm(spec, x);
    res.grad_norm = gnorm;
    if (gnorm <= opts.grad_tol * scale) {
      res.converged = true;
      res.stop_reason = "gradient tolerance reached";
      break;
    }
    if (it >= opts.max_iters) {
      res.stop_reason = "iteration limit";
      break;
    }
    // slope = <gE, d> = -<r, P r> because <gC, P r> = 0 for this lambda.
    const FieldState pgc = precondition(spec, gc);
    const double denom = l2_inner(pgc, gc);
    const double lam_p = denom > 0.0 ? l2_inner(ge, pgc) / denom : 0.0;
    const FieldState r = add_scaled(ge, -lam_p, gc);
    const FieldState d = scaled(precondition(spec, r), -1.0);
    const double slope = l2_inner(r, d);
    if (!(slope < 0.0)) {
      res.stop_reason = "no descent direction";
      break;
    }
    if (x_prev) step = bb_step(add_scaled(x, -1.0, *x_prev), add_scaled(gp, -1.0, *gp_prev), 2.0 * step);

    const double resolution = 1e-13 * (1.0 + std::abs(e));
    bool accepted = false;
    double t = step, et = 0.0;
    std::optional<FieldState> xt;
    for (int k = 0; k < opts.max_backtracks; ++k, t *= opts.backtrack) {
      try {
        xt.emplace(restore_charge(spec, add_scaled(x, t, d), c_target));
      } catch (const NumericalFailure&) {
        continue;
      }
      et = energy(spec, *xt);
      if (!std::isfinite(et)) continue;
      if (et <= e + opts.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      if (-opts.armijo_c1 * t * slope < resolution && et <= e + resolution) {
        const FieldState gpt = tangent(grad_energy(spec, *xt), grad_charge(spec, *xt));
        if (std::abs(l2_inner(gpt, d)) <= 0.9 * std::abs(slope)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      res.stop_reason = "line search stalled";
      break;
    }
    x_prev = x;
    gp_prev = gp;
    x = std::move(*xt);
    e = et;
    ge = grad_energy(spec, x);
    gc = grad_charge(spec, x);
    gp = tangent(ge, gc);
    step = t;
    res.log.push_back({it + 1, e, t, l2_norm(gp)});
  }
  res.iters = static_cast<int>(res.log.size());
  res.state = x;
  res.j_value = e;
  return finish(std::move(res), spec);
}

FieldState jdelta_seed(const ModelSpec& spec, const PenaltyParams& params) {
  const Grid& g = spec.grid;
  const double carrier = probe_carrier(spec);
  double a_lo = 1e-2, a_hi = 10.0;
  double w_lo = 3.0 * g.max_spacing(), w_hi = g.min_length() / 8.0;
  const int n = 40;
  double best = std::numeric_limits<double>::infinity(), best_a = 1.0, best_w = 1.0, best_om = 1.0;
  for (int level = 0; level < 3; ++level) {
    const double la = std::log(a_lo), lw = std::log(w_lo);
    const double da = (std::log(a_hi) - la) / (n - 1), dw = (std::log(w_hi) - lw) / (n - 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double amp = std::exp(la + i * da), w = std::exp(lw + j * dw);
        const auto u = gaussian_profile(g, amp, w, carrier);
        try {
          const auto pv = best_probe_ratio(spec, u);
          const double jv = j_delta(spec, profile_state(spec, u, pv.omega), params);
          if (jv < best) {
            best = jv;
            best_a = amp;
            best_w = w;
            best_om = pv.omega;
          }
        } catch (const NearZeroCharge&) {
        }
      }
    }
    a_lo = best_a * std::exp(-da);
    a_hi = best_a * std::exp(da);
    w_lo = std::max(w_lo, best_w * std::exp(-dw));
    w_hi = std::min(w_hi, best_w * std::exp(dw));
  }
  if (!std::isfinite(best)) throw NumericalFailure("no Gaussian probe with finite J_delta");
  return profile_state(spec, gaussian_profile(g, best_a, best_w, carrier), best_om);
}

FieldState charge_seed(const ModelSpec& spec, double c_target) {
  const Grid& g = spec.grid;
  const double carrier = probe_carrier(spec);
  const double w_lo = 3.0 * g.max_spacing(), w_hi = g.min_length() / 8.0;
  const int n = 200;
  double best = std::numeric_limits<double>::infinity();
  std::optional<FieldState> best_state;
  for (int j = 0; j < n; ++j) {
    const double w = w_lo * std::pow(w_hi / w_lo, j / (n - 1.0));
    const auto u = gaussian_profile(g, 1.0, w, carrier);
    try {
      FieldState st = profile_state(spec, u, best_probe_ratio(spec, u).omega);
      if (spec.tag != ModelTag::NLS && charge(spec, st) * c_target < 0.0) {
        st = with_component(st, 1, [&] {
          auto v = st.component_copy(1);
          for (auto& z : v) z = -z;
          return v;
        }());
      }
      st = restore_charge(spec, st, c_target);
      const double e = energy(spec, st);
      if (e < best) {
        best = e;
        best_state = std::move(st);
      }
    } catch (const Error&) {
    }
  }
  if (!best_state) throw NumericalFailure("no Gaussian probe reaches the requested charge");
  return *best_state;
}

std::vector<double> default_delta_list(double delta_bar, int count) {
  if (!(delta_bar > 0.0) || count < 1) throw InvalidArgument("delta list needs delta_bar > 0 and count >= 1");
  std::vector<double> out;
  const double hi = 0.9 * delta_bar, lo = 0.55 * delta_bar;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? hi : hi * std::pow(lo / hi, i / (count - 1.0)));
  return out;
}

ContinuationResult delta_continuation(const ModelSpec& spec, const PenaltyParams& base,
                                      const std::vector<double>& delta_list, const MinimizeOptions& opts,
                                      std::optional<FieldState> init) {
  if (delta_list.empty()) throw InvalidArgument("delta list is empty");
  for (std::size_t i = 0; i < delta_list.size(); ++i) {
    if (!(delta_list[i] > 0.0)) throw InvalidArgument("delta values must be positive");
    if (i > 0 && !(delta_list[i] < delta_list[i - 1])) throw InvalidArgument("delta list must be decreasing");
  }
  ContinuationResult out;
  PenaltyParams p = base;
  p.delta = delta_list.front();
  FieldState start = init ? *init : jdelta_seed(spec, p);
  for (double delta : delta_list) {
    p.delta = delta;
    ContinuationMember m{delta, minimize_jdelta(spec, p, start, opts), MinimizeResult(start)};
    if (!m.penalized.converged) {
      throw NumericalFailure("J_delta descent did not converge at delta = " + std::to_string(delta) + " (" +
                             m.penalized.stop_reason + ")");
    }
    m.refined = refine_constrained(spec, charge(spec, m.penalized.state), m.penalized.state, opts);
    if (!m.refined.converged) {
      throw NumericalFailure("constrained refinement did not converge at delta = " + std::to_string(delta) + " (" +
                             m.refined.stop_reason + ")");
    }
    start = m.penalized.state;
    out.members.push_back(std::move(m));
  }
  const std::size_t k = out.members.size();
  out.distances.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = orbit_distance(out.members[i].refined.state, out.members[j].refined.state);
      out.distances[i][j] = out.distances[j][i] = d;
    }
  }
  return out;
}

}  // namespace hylo
