#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hylo/models.hpp"

namespace hylo {

// Reference orbit for V and orbit distance samples.
struct TraceReference {
  FieldState state;
  double e_ref = 0.0;
  double c_ref = 0.0;  // signed
};

struct EvolveOptions {
  double T = 1.0;
  double dt = 1e-3;
  int record_every = 1;
  // Abort once ||u||_X > blowup_factor (1 + ||u0||_X).
  double blowup_factor = 1e6;
  bool record_sharp = true;
};

struct EvolutionTrace {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> charge;
  std::vector<double> sharp;
  std::vector<double> xnorm;
  std::vector<double> v;           // empty without a reference
  std::vector<double> orbit_dist;  // empty without a reference
  double dt = 0.0;
  long steps = 0;
  bool blow_up = false;
  std::string blow_up_reason;
  std::optional<FieldState> final_state;

  std::size_t size() const { return t.size(); }
};

// Repeated evolve_step for round(T/dt) steps, sampling every record_every
// steps and at the final step.
EvolutionTrace evolve(const ModelSpec& spec, const FieldState& state0, const EvolveOptions& opts,
                      const std::optional<TraceReference>& reference = std::nullopt);

struct ConservationSummary {
  double energy_drift = 0.0;
  double charge_drift = 0.0;
};
// max_t |Q(t) - Q(0)| / max(1, |Q(0)|) for Q in {E, C}.
ConservationSummary conservation_report(const EvolutionTrace& trace);

}  // namespace hylo
