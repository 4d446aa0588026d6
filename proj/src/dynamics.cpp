#include "hylo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"

namespace hylo {

namespace {

bool sharp_defined(const FieldState& s) {
  if (s.model() == ModelTag::NBE) return true;
  for (int a = 0; a < s.grid().dim(); ++a) {
    if (s.grid().length(a) <= 2.0) return false;
  }
  return true;
}

}  // namespace

EvolutionTrace evolve(const ModelSpec& spec, const FieldState& state0, const EvolveOptions& opts,
                      const std::optional<TraceReference>& reference) {
  if (!(opts.T > 0.0) || !(opts.dt > 0.0)) throw InvalidArgument("evolve needs T > 0 and dt > 0");
  if (opts.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (reference) require_same_grid(state0, reference->state);

  EvolutionTrace tr;
  tr.dt = opts.dt;
  const long steps = std::max(1L, std::lround(opts.T / opts.dt));
  const double limit = opts.blowup_factor * (1.0 + x_norm(spec, state0));
  const bool with_sharp = opts.record_sharp && sharp_defined(state0);

  auto sample = [&](long k, const FieldState& s) {
    const double e = energy(spec, s), c = charge(spec, s), xn = x_norm(spec, s);
    tr.t.push_back(k * opts.dt);
    tr.energy.push_back(e);
    tr.charge.push_back(c);
    tr.xnorm.push_back(xn);
    tr.sharp.push_back(with_sharp ? sharp_seminorm(s) : std::numeric_limits<double>::quiet_NaN());
    if (reference) {
      tr.v.push_back(std::pow(e - reference->e_ref, 2) + std::pow(c - reference->c_ref, 2));
      tr.orbit_dist.push_back(orbit_distance(s, reference->state));
    }
    return xn;
  };

  FieldState s = state0;
  sample(0, s);
  for (long k = 1; k <= steps; ++k) {
    try {
      s = evolve_step(spec, s, opts.dt);
    } catch (const NumericalFailure& e) {
      tr.blow_up = true;
      tr.blow_up_reason = e.what();
      break;
    }
    tr.steps = k;
    if (k % opts.record_every == 0 || k == steps) {
      const double xn = sample(k, s);
      if (!(xn <= limit)) {
        tr.blow_up = true;
        tr.blow_up_reason = "phase-space norm exceeded the blow-up threshold";
        break;
      }
    }
  }
  tr.final_state = s;
  return tr;
}

ConservationSummary conservation_report(const EvolutionTrace& trace) {
  if (trace.size() == 0) throw InvalidArgument("conservation report needs a non-empty trace");
  ConservationSummary out;
  const double e0 = trace.energy.front(), c0 = trace.charge.front();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out.energy_drift = std::max(out.energy_drift, std::abs(trace.energy[i] - e0) / std::max(1.0, std::abs(e0)));
    out.charge_drift = std::max(out.charge_drift, std::abs(trace.charge[i] - c0) / std::max(1.0, std::abs(c0)));
  }
  return out;
}

}  // namespace hylo
