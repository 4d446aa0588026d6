#pragma once

// Hypothesis audit: EC-1..EC-4, the W conditions, the Nash probe and the
// hylomorphy condition, each with its evidence.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hylo/functionals.hpp"
#include "hylo/nonlinearity.hpp"

namespace hylo {

enum class Verdict { pass, fail, skipped };
std::string_view to_string(Verdict v);

struct HypothesisEntry {
  std::string id;
  Verdict verdict = Verdict::skipped;
  Evidence evidence = Evidence::skipped;
  std::map<std::string, double> parameters;
  std::string counterexample;  // state descriptor, set for every FAIL
  std::string note;
  int samples = 0;
};

struct HypothesisCertificate {
  ModelTag model = ModelTag::NLS;
  PenaltyParams params;
  int budget = 0;
  std::uint64_t seed = 0;
  std::vector<HypothesisEntry> entries;

  const HypothesisEntry& at(std::string_view id) const;  // throws InvalidArgument
  // EC-1, EC-2, EC-3i/ii/iii, EC-4-disjoint and hh all PASS.
  bool gate_pass() const;
};

struct AuditOptions {
  int budget = 10000;  // probe states; 0 skips every check
  std::uint64_t seed = 1;
};

// Sampled checks draw from per-check splitmix64 streams of `seed`, so the
// certificate is reproducible for fixed inputs.
HypothesisCertificate audit(const ModelSpec& spec, const PenaltyParams& params, const AuditOptions& opts = {});

// Fixed-mass Gaussian width sweep (mass 4, widths 1 .. 1/8) of E + a|C|^s;
// a strictly decreasing sequence here is the unbounded-below witness.
struct WidthSweep {
  std::vector<double> widths;
  std::vector<double> values;
  bool decreasing = false;
};
WidthSweep coercivity_width_sweep(const ModelSpec& spec, const PenaltyParams& params, double mass = 4.0,
                                  int points = 8);

}  // namespace hylo
