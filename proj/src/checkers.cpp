#include "hylo/checkers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/minimizer.hpp"
#include "hylo/rng.hpp"

namespace hylo {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::skipped: return "SKIPPED";
  }
  return "?";
}

const HypothesisEntry& HypothesisCertificate::at(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw InvalidArgument("certificate has no entry '" + std::string(id) + "'");
}

bool HypothesisCertificate::gate_pass() const {
  for (const char* id : {"EC-1", "EC-2", "EC-3i", "EC-3ii", "EC-3iii", "EC-4-disjoint", "hh"}) {
    if (at(id).verdict != Verdict::pass) return false;
  }
  return true;
}

namespace {

double coercive_value(const ModelSpec& spec, const FieldState& s, const PenaltyParams& p) {
  return energy(spec, s) + p.a * std::pow(std::abs(charge(spec, s)), p.s_exp);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

FieldState sweep_state(const ModelSpec& spec, double mass, double sigma) {
  const double carrier = probe_carrier(spec);
  RealField u = gaussian_profile(spec.grid, 1.0, sigma, carrier);
  double l2 = 0.0;
  for (double v : u) l2 += v * v;
  l2 *= spec.grid.cell_volume();
  const double scale = std::sqrt(mass / l2);
  for (double& v : u) v *= scale;
  return profile_state(spec, u, 1.0);
}

HypothesisEntry check_ec1(const ModelSpec& spec) {
  HypothesisEntry e;
  e.id = "EC-1";
  e.evidence = Evidence::analytic;
  e.samples = 1;
  const WValues w0 = w_eval(spec.w, 0.0);
  const FieldState z = FieldState::zero(spec.tag, spec.grid);
  const double e0 = energy(spec, z), c0 = charge(spec, z);
  const double ge = l2_norm(grad_energy(spec, z)), gc = l2_norm(grad_charge(spec, z));
  e.parameters = {{"W(0)", w0.w}, {"W'(0)", w0.dw}, {"E(0)", e0}, {"C(0)", c0}, {"|E'(0)|", ge}, {"|C'(0)|", gc}};
  const bool ok = w0.w == 0.0 && w0.dw == 0.0 && e0 == 0.0 && c0 == 0.0 && ge == 0.0 && gc == 0.0;
  e.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) e.counterexample = "zero state";
  return e;
}

HypothesisEntry check_ec2(const ModelSpec& spec, int count, std::uint64_t seed) {
  HypothesisEntry e;
  e.id = "EC-2";
  e.evidence = Evidence::sampled;
  e.samples = count;
  SplitMix64 rng = SplitMix64::stream(seed, "audit.ec2");
  double worst = 0.0;
  const double tol = 1e-12;
  for (int k = 0; k < count; ++k) {
    const double amp = std::exp(rng.uniform(std::log(0.05), std::log(2.0)));
    const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, amp);
    std::vector<long> z;
    for (int a = 0; a < spec.dim(); ++a) z.push_back(static_cast<long>(rng.uniform() * spec.grid.n(a)));
    const FieldState g = translate(u, LatticeShift(spec.grid, z));
    const double e0 = energy(spec, u), c0 = charge(spec, u);
    const double de = std::abs(energy(spec, g) - e0) / std::max(1.0, std::abs(e0));
    const double dc = std::abs(charge(spec, g) - c0) / std::max(1.0, std::abs(c0));
    const double d = std::max(de, dc);
    if (d > worst) {
      worst = d;
      if (d > tol && e.counterexample.empty()) {
        e.counterexample = "random state #" + std::to_string(k) + " amplitude " + fmt(amp) + " shift " +
                           std::to_string(z[0]) + ", relative change " + fmt(d);
      }
    }
  }
  e.parameters = {{"max_rel_change", worst}, {"tolerance", tol}};
  e.verdict = worst <= tol ? Verdict::pass : Verdict::fail;
  return e;
}

struct SweepTrend {
  WidthSweep sweep;
  bool accelerating = false;
  bool unbounded = false;
};

SweepTrend width_trend(const ModelSpec& spec, const PenaltyParams& params) {
  SweepTrend t;
  t.sweep = coercivity_width_sweep(spec, params);
  const auto& v = t.sweep.values;
  t.accelerating = v.size() >= 3;
  for (std::size_t i = 2; i < v.size(); ++i) {
    if (!(v[i - 1] - v[i] > v[i - 2] - v[i - 1])) t.accelerating = false;
  }
  t.unbounded = t.sweep.decreasing && t.accelerating;
  return t;
}

std::string sweep_witness(const SweepTrend& t, double mass) {
  const auto& s = t.sweep;
  std::string out = "gaussian mass " + fmt(mass) + " width sweep";
  for (std::size_t i = 0; i < s.widths.size(); ++i) {
    out += (i == 0 ? ": " : ", ") + fmt(s.widths[i]) + " -> " + fmt(s.values[i]);
  }
  return out;
}

HypothesisEntry check_ec3i(const ModelSpec& spec, const PenaltyParams& params, int count, std::uint64_t seed,
                           const SweepTrend& trend) {
  HypothesisEntry e;
  e.id = "EC-3i";
  e.evidence = Evidence::sampled;
  e.samples = count + static_cast<int>(trend.sweep.widths.size());
  SplitMix64 rng = SplitMix64::stream(seed, "audit.ec3i");
  const double tol = 1e-9;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const double band = std::array{0.05, 0.1, 0.25, 0.5}[k % 4];
    const double amp = std::exp(rng.uniform(std::log(1e-2), std::log(10.0)));
    const FieldState u = random_state(spec.tag, spec.grid, rng, band, amp);
    const double val = coercive_value(spec, u, params);
    if (val < worst) {
      worst = val;
      if (val < -tol && e.counterexample.empty()) {
        e.counterexample = "random state #" + std::to_string(k) + " band " + fmt(band) + " amplitude " + fmt(amp) +
                           ": E + a|C|^s = " + fmt(val);
      }
    }
  }
  for (double v : trend.sweep.values) worst = std::min(worst, v);
  e.parameters = {{"a", params.a}, {"s", params.s_exp}, {"min_value", worst}, {"tolerance", tol}};
  if (trend.unbounded) {
    e.evidence = Evidence::probe_family;
    e.verdict = Verdict::fail;
    e.counterexample = sweep_witness(trend, 4.0) + " (strictly decreasing with growing steps: unbounded below)";
  } else if (worst < -tol) {
    e.verdict = Verdict::fail;
    if (e.counterexample.empty()) e.counterexample = sweep_witness(trend, 4.0);
  } else {
    e.verdict = Verdict::pass;
  }
  return e;
}

HypothesisEntry check_ec3ii(const ModelSpec& spec, const PenaltyParams& params, int shapes, std::uint64_t seed,
                            const SweepTrend& trend) {
  HypothesisEntry e;
  e.id = "EC-3ii";
  e.evidence = Evidence::probe_family;
  e.note = "amplitude scaling of random shapes and the fixed-mass width sweep";
  SplitMix64 rng = SplitMix64::stream(seed, "audit.ec3ii");
  constexpr int kSteps = 11;
  double min_growth = std::numeric_limits<double>::infinity();
  for (int k = 0; k < shapes; ++k) {
    const FieldState u0 = random_state(spec.tag, spec.grid, rng, 0.25, 1.0);
    const FieldState u = scaled(u0, 1.0 / x_norm(spec, u0));
    std::vector<double> vals;
    for (int j = 0; j < kSteps; ++j) vals.push_back(coercive_value(spec, scaled(u, std::ldexp(1.0, j)), params));
    e.samples += kSteps;
    bool tail_up = true;
    for (int j = kSteps - 3; j < kSteps; ++j) tail_up = tail_up && vals[j] > vals[j - 1];
    const double growth = vals.back() / std::max(1.0, std::abs(vals.front()));
    min_growth = std::min(min_growth, tail_up ? growth : -1.0);
    if ((!tail_up || growth < 10.0) && e.counterexample.empty()) {
      e.counterexample = "random shape #" + std::to_string(k) + " scaled by 2^j, j < 11: E + a|C|^s " +
                         fmt(vals.front()) + " -> " + fmt(vals.back());
    }
  }
  e.samples += static_cast<int>(trend.sweep.widths.size());
  e.parameters = {{"min_growth", min_growth}, {"shapes", static_cast<double>(shapes)}};
  if (trend.unbounded) {
    e.verdict = Verdict::fail;
    e.counterexample = sweep_witness(trend, 4.0) + " (norm grows while E + a|C|^s falls)";
  } else {
    e.verdict = e.counterexample.empty() ? Verdict::pass : Verdict::fail;
  }
  return e;
}

HypothesisEntry check_ec3iii(const ModelSpec& spec, const PenaltyParams& params, int shapes, std::uint64_t seed) {
  HypothesisEntry e;
  e.id = "EC-3iii";
  e.evidence = Evidence::probe_family;
  e.note = "amplitude decreasing to 0";
  SplitMix64 rng = SplitMix64::stream(seed, "audit.ec3iii");
  constexpr int kSteps = 21;
  for (int k = 0; k < shapes && e.counterexample.empty(); ++k) {
    const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, 1.0);
    std::vector<double> vals, norms;
    for (int j = 0; j < kSteps; ++j) {
      const FieldState s = scaled(u, std::ldexp(1.0, -j));
      vals.push_back(coercive_value(spec, s, params));
      norms.push_back(x_norm(spec, s));
    }
    e.samples += kSteps;
    bool monotone = true;
    for (int j = kSteps / 2; j < kSteps; ++j) monotone = monotone && norms[j] < norms[j - 1];
    const bool to_zero = std::abs(vals.back()) <= 1e-6 * std::max(1.0, std::abs(vals.front()));
    if (!monotone || !to_zero) {
      e.counterexample = "random shape #" + std::to_string(k) + " scaled by 2^-j: E + a|C|^s -> " +
                         fmt(vals.back()) + ", ||u||_X -> " + fmt(norms.back());
    }
  }
  e.verdict = e.counterexample.empty() ? Verdict::pass : Verdict::fail;
  return e;
}

// Gaussian cut to zero beyond 8 sigma, centred at `center` along axis 0.
FieldState truncated_bump(const ModelSpec& spec, double amp, double sigma, double center, double omega) {
  const Grid& g = spec.grid;
  RealField u(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double x = g.coordinate(a, idx[a]) - (a == 0 ? center : 0.0);
      r2 += x * x;
    }
    if (r2 <= 64.0 * sigma * sigma) u[i] = amp * std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return profile_state(spec, u, omega);
}

HypothesisEntry check_ec4(const ModelSpec& spec, int pairs, std::uint64_t seed) {
  HypothesisEntry e;
  e.id = "EC-4-disjoint";
  e.evidence = Evidence::sampled;
  e.note = "only the disjoint-support instance of the splitting property is audited";
  const double h = spec.grid.max_spacing();
  const double sig_lo = 2.0 * h, sig_hi = spec.grid.min_length() / 40.0;
  if (!(sig_lo < sig_hi)) {
    e.verdict = Verdict::skipped;
    e.evidence = Evidence::skipped;
    e.note = "box too small for disjoint bumps at this resolution";
    return e;
  }
  const double tol = 1e-10;
  SplitMix64 rng = SplitMix64::stream(seed, "audit.ec4");
  const double quarter = 0.25 * spec.grid.length(0);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const double s1 = rng.uniform(sig_lo, sig_hi), s2 = rng.uniform(sig_lo, sig_hi);
    const double a1 = rng.uniform(0.1, 2.0), a2 = rng.uniform(0.1, 2.0);
    const double w1 = rng.uniform(0.3, 1.5), w2 = rng.uniform(0.3, 1.5);
    const FieldState u = truncated_bump(spec, a1, s1, -quarter, w1);
    const FieldState w = truncated_bump(spec, a2, s2, quarter, w2);
    const FieldState sum = add_scaled(u, 1.0, w);
    const double eu = energy(spec, u), ew = energy(spec, w), cu = charge(spec, u), cw = charge(spec, w);
    const double de = std::abs(energy(spec, sum) - eu - ew) / std::max(1e-300, std::abs(eu) + std::abs(ew));
    const double dc = std::abs(charge(spec, sum) - cu - cw) / std::max(1e-300, std::abs(cu) + std::abs(cw));
    const double d = std::max(de, dc);
    e.samples += 3;
    if (d > worst) {
      worst = d;
      if (d > tol && e.counterexample.empty()) {
        e.counterexample = "bumps sigma " + fmt(s1) + ", " + fmt(s2) + " at x = -+" + fmt(quarter) +
                           ": relative defect " + fmt(d);
      }
    }
  }
  e.parameters = {{"max_rel_defect", worst}, {"tolerance", tol}};
  e.verdict = worst <= tol ? Verdict::pass : Verdict::fail;
  return e;
}

std::vector<HypothesisEntry> w_entries(const ModelSpec& spec, const SweepTrend& trend) {
  std::vector<HypothesisEntry> out;
  const WConditionReport rep = check_w_conditions(spec.w, spec.tag, spec.dim());
  for (const auto& v : rep.verdicts) {
    HypothesisEntry e;
    e.id = v.id.rfind("W-", 0) == 0 ? v.id : "W-" + v.id;
    e.verdict = v.pass ? Verdict::pass : Verdict::fail;
    e.evidence = v.evidence;
    e.parameters = v.values;
    if (v.witness) e.parameters["witness_s"] = *v.witness;
    e.note = v.detail;
    e.samples = v.evidence == Evidence::sampled ? rep.samples : 1;
    if (!v.pass) {
      e.counterexample = v.witness ? "|psi| = " + fmt(*v.witness) + ": " + v.detail : v.detail;
      if (spec.tag == ModelTag::NLS && v.id == "Fp") e.counterexample += "; " + sweep_witness(trend, 4.0);
    }
    out.push_back(std::move(e));
  }
  return out;
}

HypothesisEntry check_nash(const ModelSpec& spec, int samples, std::uint64_t seed, const SweepTrend& trend) {
  HypothesisEntry e;
  e.id = "Nash";
  if (spec.tag != ModelTag::NLS) {
    e.note = "the Nash bound is only used for the Schrodinger model";
    return e;
  }
  const double p = spec.w.p;
  const double crit = 2.0 + 4.0 / spec.dim();
  const NashExponents ex = nash_exponents(spec.dim(), p);
  e.parameters = {{"p", p}, {"q", ex.q}, {"r", ex.r}, {"p_critical", crit}};
  if (p >= crit) {
    e.verdict = Verdict::fail;
    e.evidence = Evidence::analytic;
    e.note = "q >= 2: the gradient term cannot absorb the potential";
    e.counterexample = sweep_witness(trend, 4.0);
    return e;
  }
  e.evidence = Evidence::sampled;
  const NashCheck once = nash_check(spec.grid, p, samples, seed);
  const NashCheck twice = nash_check(spec.grid, p, 2 * samples, seed ^ 0x9e3779b97f4a7c15ULL);
  e.samples = 3 * samples + once.gaussian_widths + twice.gaussian_widths;
  const double change = std::abs(twice.b_p - once.b_p) / once.b_p;
  e.parameters["b_p"] = once.b_p;
  e.parameters["b_p_doubled"] = twice.b_p;
  e.parameters["relative_change"] = change;
  const bool ok = std::isfinite(once.b_p) && change <= 0.1;
  e.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) e.counterexample = "sample doubling moved b_p by " + fmt(change);
  return e;
}

HypothesisEntry check_hh(const ModelSpec& spec) {
  HypothesisEntry e;
  e.id = "hh";
  e.evidence = Evidence::probe_family;
  HylomorphyReport r;
  try {
    r = hylomorphy_check(spec);
  } catch (const InvalidArgument& err) {
    e.verdict = Verdict::skipped;
    e.evidence = Evidence::skipped;
    e.note = std::string("probe families do not fit the box: ") + err.what();
    return e;
  }
  e.samples = r.evaluations;
  e.parameters = {{"lambda0", r.lambda0},   {"best_ratio", r.best_ratio}, {"margin", r.margin},
                  {"amplitude", r.amplitude}, {"width", r.width},         {"omega", r.omega}};
  e.note = "lambda0 is estimated from vanishing and spreading probe families";
  e.verdict = r.verdict ? Verdict::pass : Verdict::fail;
  if (!r.verdict) {
    e.counterexample = "best gaussian amplitude " + fmt(r.amplitude) + " width " + fmt(r.width) + ": ratio " +
                       fmt(r.best_ratio) + " >= lambda0 - margin = " + fmt(r.lambda0 - r.margin);
  }
  return e;
}

}  // namespace

WidthSweep coercivity_width_sweep(const ModelSpec& spec, const PenaltyParams& params, double mass, int points) {
  if (points < 2) throw InvalidArgument("width sweep needs at least two points");
  WidthSweep out;
  const double lo = std::max(0.125, 1.5 * spec.grid.max_spacing());
  out.decreasing = true;
  for (int i = 0; i < points; ++i) {
    const double sigma = std::exp(std::log(lo) * i / (points - 1));
    out.widths.push_back(sigma);
    out.values.push_back(coercive_value(spec, sweep_state(spec, mass, sigma), params));
    if (i > 0 && !(out.values[i] < out.values[i - 1])) out.decreasing = false;
  }
  return out;
}

HypothesisCertificate audit(const ModelSpec& spec, const PenaltyParams& params, const AuditOptions& opts) {
  params.validate();
  HypothesisCertificate cert;
  cert.model = spec.tag;
  cert.params = params;
  cert.budget = opts.budget;
  cert.seed = opts.seed;

  if (opts.budget <= 0) {
    const std::vector<std::string> ids = {"EC-1", "EC-2", "EC-3i", "EC-3ii", "EC-3iii", "EC-4-disjoint"};
    auto skip = [&](std::string id) {
      HypothesisEntry e;
      e.id = std::move(id);
      e.note = "zero budget";
      cert.entries.push_back(std::move(e));
    };
    for (const auto& id : ids) skip(id);
    const WConditionReport rep = check_w_conditions(spec.w, spec.tag, spec.dim());
    for (const auto& v : rep.verdicts) skip(v.id.rfind("W-", 0) == 0 ? v.id : "W-" + v.id);
    skip("Nash");
    skip("hh");
    return cert;
  }

  const int b = opts.budget;
  const SweepTrend trend = width_trend(spec, params);
  cert.entries.push_back(check_ec1(spec));
  cert.entries.push_back(check_ec2(spec, std::min(50, b), opts.seed));
  cert.entries.push_back(check_ec3i(spec, params, b, opts.seed, trend));
  cert.entries.push_back(check_ec3ii(spec, params, std::clamp(b / 500, 1, 20), opts.seed, trend));
  cert.entries.push_back(check_ec3iii(spec, params, std::clamp(b / 500, 1, 20), opts.seed));
  cert.entries.push_back(check_ec4(spec, std::clamp(b / 500, 1, 20), opts.seed));
  for (auto& e : w_entries(spec, trend)) cert.entries.push_back(std::move(e));
  cert.entries.push_back(check_nash(spec, std::clamp(b / 10, 10, 1000), opts.seed, trend));
  cert.entries.push_back(check_hh(spec));
  return cert;
}

}  // namespace hylo
