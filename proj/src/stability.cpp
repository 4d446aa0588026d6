#include "hylo/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/rng.hpp"

namespace hylo {

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::additive_noise: return "additive_noise";
    case PerturbationKind::amplitude_scale: return "amplitude_scale";
    case PerturbationKind::shift_and_phase: return "shift_and_phase";
  }
  return "?";
}

PerturbationKind perturbation_kind_from_string(std::string_view name) {
  if (name == "additive_noise") return PerturbationKind::additive_noise;
  if (name == "amplitude_scale") return PerturbationKind::amplitude_scale;
  if (name == "shift_and_phase") return PerturbationKind::shift_and_phase;
  throw InvalidArgument("unknown perturbation kind '" + std::string(name) + "'");
}

FieldState apply_perturbation(const ModelSpec& spec, const FieldState& state, const Perturbation& p) {
  if (!(p.epsilon >= 0.0)) throw InvalidArgument("perturbation magnitude must be >= 0");
  switch (p.kind) {
    case PerturbationKind::additive_noise: {
      if (p.epsilon == 0.0) return state;
      SplitMix64 rng = SplitMix64::stream(p.seed, "perturbation");
      const FieldState eta = random_state(spec.tag, spec.grid, rng, p.band_limit, 1.0);
      return add_scaled(state, p.epsilon / x_norm(spec, eta), eta);
    }
    case PerturbationKind::amplitude_scale:
      if (p.epsilon == 0.0) return state;
      return scaled(state, 1.0 + p.epsilon);
    case PerturbationKind::shift_and_phase: {
      FieldState out = state;
      if (!p.shift.empty()) out = translate(out, LatticeShift(spec.grid, p.shift));
      if (p.theta != 0.0) out = phase_rotated(out, p.theta);
      return out;
    }
  }
  throw InvalidArgument("unknown perturbation kind");
}

double lyapunov_v(const ModelSpec& spec, const FieldState& state, double e_ref, double c_ref) {
  const double de = energy(spec, state) - e_ref;
  const double dc = charge(spec, state) - c_ref;
  return de * de + dc * dc;
}

namespace {

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

StabilityReport run_stability(const ModelSpec& spec, const MinimizeResult& result,
                              const std::vector<Perturbation>& perturbations, const StabilityOptions& opts) {
  if (!result.converged) throw InvalidArgument("stability runs need a converged minimizer");
  StabilityReport rep;
  rep.options = opts;
  rep.e_ref = energy(spec, result.state);
  rep.c_ref = charge(spec, result.state);
  const TraceReference ref{result.state, rep.e_ref, rep.c_ref};
  EvolveOptions eo;
  eo.T = opts.T;
  eo.dt = opts.dt;
  eo.record_every = opts.record_every;

  std::vector<std::optional<StabilityRow>> rows(perturbations.size());
  parallel_for(perturbations.size(), opts.jobs, [&](std::size_t i) {
    const FieldState start = apply_perturbation(spec, result.state, perturbations[i]);
    StabilityRow row;
    row.perturbation = perturbations[i];
    row.perturbation_norm = x_norm(spec, add_scaled(start, -1.0, result.state));
    row.trace = evolve(spec, start, eo, ref);
    row.v0 = row.trace.v.front();
    row.max_v = *std::max_element(row.trace.v.begin(), row.trace.v.end());
    row.initial_distance = row.trace.orbit_dist.front();
    row.max_orbit_distance = *std::max_element(row.trace.orbit_dist.begin(), row.trace.orbit_dist.end());
    if (row.trace.blow_up) {
      row.stable = false;
      row.verdict = "unstable(blow-up)";
    } else {
      row.stable = row.max_v <= opts.kappa * row.v0 + opts.abs_tol;
      row.verdict = row.stable ? "stable" : "unstable";
    }
    rows[i] = std::move(row);
  });
  for (auto& r : rows) rep.rows.push_back(std::move(*r));
  return rep;
}

std::vector<VScanRow> v_separation_scan(const ModelSpec& spec, const MinimizeResult& result,
                                        const std::vector<double>& radii, int samples, std::uint64_t seed,
                                        double band_limit) {
  if (samples < 1) throw InvalidArgument("v_separation_scan needs at least one sample");
  const FieldState& u = result.state;
  const double e_ref = energy(spec, u), c_ref = charge(spec, u);

  // Orthonormal (L2) basis of span{grad C, grad E}.
  std::vector<FieldState> basis;
  for (const FieldState& g : {grad_charge(spec, u), grad_energy(spec, u)}) {
    FieldState b = g;
    for (const auto& q : basis) b = add_scaled(b, -l2_inner(b, q), q);
    const double n = l2_norm(b);
    if (n > 1e-12 * (1.0 + l2_norm(g))) basis.push_back(scaled(b, 1.0 / n));
  }
  SplitMix64 rng = SplitMix64::stream(seed, "vscan");
  std::vector<FieldState> dirs;
  for (int k = 0; k < samples; ++k) {
    FieldState eta = random_state(spec.tag, spec.grid, rng, band_limit, 1.0);
    for (const auto& q : basis) eta = add_scaled(eta, -l2_inner(eta, q), q);
    dirs.push_back(scaled(eta, 1.0 / x_norm(spec, eta)));
  }
  std::vector<VScanRow> out;
  for (double r : radii) {
    if (!(r >= 0.0)) throw InvalidArgument("scan radii must be >= 0");
    VScanRow row;
    row.radius = r;
    row.samples = samples;
    row.min_v = std::numeric_limits<double>::infinity();
    for (const auto& eta : dirs) {
      row.min_v = std::min(row.min_v, lyapunov_v(spec, r == 0.0 ? u : add_scaled(u, r, eta), e_ref, c_ref));
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace hylo
