// Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
// below. Exit status 1 when any criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hylo/checkers.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/minimizer.hpp"
#include "hylo/stability.hpp"
#include "support.hpp"

using namespace hylo;
using namespace hylo::test;

namespace {

// Criterion 1
constexpr double kSechKkt = 1e-6;
constexpr double kSechProfile = 1e-3;
constexpr double kSechSeconds = 60.0;
// Criterion 2
constexpr int kPliStates = 1000;
constexpr double kPliSlack = -1e-9;
constexpr double kBoundScan = 1e-6;
constexpr double kPliSeconds = 10.0;
// Criterion 3
constexpr double kLambda0Tol = 0.02;
constexpr double kLambda0Box = 0.01;
constexpr double kLambda0Seconds = 30.0;
// Criterion 4
constexpr double kDichotomySeconds = 60.0;
// Criterion 5
constexpr double kChargeDrift = 1e-11;
constexpr double kDriftRatio = 4.0;
constexpr double kDriftRatioTol = 0.25;
constexpr double kReversal = 1e-8;
// Criterion 6
constexpr double kKappa = 4.0;
constexpr double kVAbsTol = 1e-6;
constexpr double kOrbitFactor = 10.0;
constexpr double kDecay = 5.0;
constexpr double kStabilitySeconds = 300.0;
// Criterion 7
constexpr double kIndependence = 1e-3;
constexpr double kRestart = 1e-2;
constexpr double kContinuationSeconds = 300.0;
// Criterion 8
constexpr double kShiftInvariance = 1e-12;
constexpr double kSplitting = 1e-10;
constexpr double kFdTol = 1e-5;
constexpr double kFdEps = 1e-5;

class Criterion {
 public:
  explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(clock::now()) {}

  void at_most(const std::string& what, double value, double limit) { add(what, value, "<=", limit, value <= limit); }
  void at_least(const std::string& what, double value, double limit) { add(what, value, ">=", limit, value >= limit); }
  void equals(const std::string& what, long value, long expected) {
    details_.push_back(what + " = " + std::to_string(value) + " == " + std::to_string(expected) +
                       (value == expected ? "" : "  <-- violated"));
    pass_ = pass_ && value == expected;
  }
  void require(const std::string& what, bool ok) {
    details_.push_back(what + (ok ? " yes" : " NO"));
    pass_ = pass_ && ok;
  }
  void within_seconds(double limit) { at_most("seconds", elapsed(), limit); }
  double elapsed() const { return std::chrono::duration<double>(clock::now() - start_).count(); }

  bool report() const {
    std::printf("criterion %d %s %s\n", id_, pass_ ? "PASS" : "FAIL", title_.c_str());
    for (const auto& d : details_) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  using clock = std::chrono::steady_clock;
  void add(const std::string& what, double value, const char* op, double limit, bool ok) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s = %.6g %s %.3g%s", what.c_str(), value, op, limit, ok ? "" : "  <-- violated");
    details_.emplace_back(buf);
    pass_ = pass_ && ok;
  }
  int id_;
  std::string title_;
  clock::time_point start_;
  std::vector<std::string> details_;
  bool pass_ = true;
};

bool guarded(Criterion& c, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.require(std::string("completed without error (") + e.what() + ")", false);
  }
  return c.report();
}

FieldState sech_oracle(const Grid& g, double mu, double b) {
  ComplexField o(g.size());
  for (int i = 0; i < g.n(0); ++i) o[i] = std::sqrt(2.0 * mu / b) / std::cosh(std::sqrt(mu) * g.coordinate(0, i));
  return FieldState(ModelTag::NLS, g, std::move(o));
}

double rel_l2(const FieldState& a, const FieldState& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.data().size(); ++i) {
    num += std::norm(a.data()[i] - ref.data()[i]);
    den += std::norm(ref.data()[i]);
  }
  return std::sqrt(num / den);
}

FieldState random_suite_state(const ModelSpec& spec, SplitMix64& rng, int k) {
  const double band = std::array{0.05, 0.1, 0.25, 0.5}[k % 4];
  const double amp = std::exp(rng.uniform(std::log(1e-2), std::log(10.0)));
  return random_state(spec.tag, spec.grid, rng, band, amp);
}

double max_pairwise_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, rel_diff(a[i], b[i]));
  return w;
}

struct Shared {
  std::optional<MinimizeResult> soliton;
};

bool criterion1(Shared& shared) {
  Criterion c(1, "sech soliton recovery (NLS, m^2 = 1, N(s) = -s^4/4, L = 40, n = 512)");
  return guarded(c, [&] {
    const ModelSpec spec = focusing_nls(512, 40.0);
    PenaltyParams pp = choose_coercivity_params(spec).params;
    const double db = delta_bar(spec, pp, lambda0_estimate(spec).value);
    const auto deltas = default_delta_list(db);
    const ContinuationResult res = delta_continuation(spec, pp, {deltas[deltas.size() / 2]});
    const MinimizeResult& m = res.members.front().refined;
    const double mu = spec.w.m_sq - 2.0 * m.lambda_mult;
    const FieldState oracle = sech_oracle(spec.grid, mu, spec.w.b);
    const FieldState aligned = apply_alignment(m.state, align_orbit(oracle, m.state));
    c.require("penalized and constrained stages converged", res.members.front().penalized.converged && m.converged);
    c.at_most("kkt_residual", m.kkt_residual, kSechKkt);
    c.at_least("mu", mu, 0.0);
    c.at_most("relative L2 profile error", rel_l2(aligned, oracle), kSechProfile);
    c.within_seconds(kSechSeconds);
    shared.soliton = m;
  });
}

bool criterion2() {
  Criterion c(2, "penalty inequality J_delta >= (delta/2) Phi - M on 1000 random NLS states");
  return guarded(c, [&] {
    const ModelSpec spec = focusing_nls(512, 40.0);
    PenaltyParams pp = choose_coercivity_params(spec).params;
    double worst_slack = INFINITY, worst_scan = 0.0;
    for (double delta : {1e-3, 1e-2, 1e-1}) {
      pp.delta = delta;
      const double m = bound_m(pp);
      worst_scan = std::max(worst_scan, std::abs(m - bound_m_scan(pp)) / std::max(1.0, std::abs(m)));
      SplitMix64 rng = SplitMix64::stream(2024, "acceptance.pli");
      for (int k = 0; k < kPliStates; ++k) {
        const FieldState u = random_suite_state(spec, rng, k);
        worst_slack = std::min(worst_slack, j_delta(spec, u, pp) - (0.5 * delta * phi(spec, u, pp) - m));
      }
    }
    c.at_least("min slack", worst_slack, kPliSlack);
    c.at_most("|M closed form - dense scan| / max(1, M)", worst_scan, kBoundScan);
    c.within_seconds(kPliSeconds);
  });
}

bool criterion3() {
  Criterion c(3, "Lambda0 estimates (NLS -> 0.5, NWE standing pairs -> 1.0, box doubling)");
  return guarded(c, [&] {
    auto timed = [&](const ModelSpec& a, const ModelSpec& b, double expected, const std::string& label) {
      const auto t0 = std::chrono::steady_clock::now();
      const double la = lambda0_estimate(a).value;
      const double lb = lambda0_estimate(b).value;
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.at_most(label + " |Lambda0 - " + std::to_string(expected).substr(0, 4) + "|", std::abs(la - expected),
                kLambda0Tol);
      c.at_most(label + " relative change under L doubling", rel_diff(la, lb), kLambda0Box);
      c.at_most(label + " seconds", secs, kLambda0Seconds);
    };
    const WSpec nls_w = WSpec::single_power(1.0, 1.0, 4.0);
    timed(ModelSpec(ModelTag::NLS, Grid::line(512, 40.0), nls_w), ModelSpec(ModelTag::NLS, Grid::line(1024, 80.0), nls_w),
          0.5, "NLS");
    const WSpec nwe_w = WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0);
    timed(ModelSpec(ModelTag::NWE, Grid::line(512, 40.0), nwe_w), ModelSpec(ModelTag::NWE, Grid::line(1024, 80.0), nwe_w),
          1.0, "NWE");
  });
}

bool criterion4() {
  Criterion c(4, "hylomorphy dichotomy (focusing true, b = 0 false, p = 8 fails EC-3)");
  return guarded(c, [&] {
    const HylomorphyReport foc = hylomorphy_check(focusing_nls(512, 40.0));
    c.require("focusing p = 4 verdict true", foc.verdict);
    const ModelSpec quad(ModelTag::NLS, Grid::line(512, 40.0), WSpec::single_power(1.0, 0.0, 4.0));
    const HylomorphyReport q = hylomorphy_check(quad);
    c.require("b = 0 verdict false", !q.verdict);

    const ModelSpec super(ModelTag::NLS, Grid::line(512, 40.0), WSpec::single_power(1.0, 1.0, 8.0));
    const PenaltyParams pp = sampled_coercivity_params(super, 4.0);
    const HypothesisCertificate cert = audit(super, pp);
    const HypothesisEntry& e3 = cert.at("EC-3i");
    c.require("p = 8 EC-3i FAIL", e3.verdict == Verdict::fail);
    c.require("p = 8 EC-3i witness is the width sweep",
              e3.evidence == Evidence::probe_family && e3.counterexample.find("width") != std::string::npos);
    c.require("p = 8 gate fails", !cert.gate_pass());
    const WidthSweep sweep = coercivity_width_sweep(super, pp);
    c.require("width sweep strictly decreasing", sweep.decreasing);
    c.within_seconds(kDichotomySeconds);
  });
}

bool criterion5() {
  Criterion c(5, "conservation (C over 10^4 steps, E drift order 2, NWE/NBE reversibility)");
  return guarded(c, [&] {
    const ModelSpec spec = focusing_nls(512, 40.0);
    const FieldState u0 = from_real(ModelTag::NLS, spec.grid, gaussian_profile(spec.grid, 1.5, 1.0));
    EvolveOptions o;
    o.T = 10.0;
    o.dt = 1e-3;
    o.record_every = 100;
    const EvolutionTrace a = evolve(spec, u0, o);
    c.equals("steps", a.steps, 10000);
    const ConservationSummary ca = conservation_report(a);
    c.at_most("charge drift (relative)", ca.charge_drift, kChargeDrift);
    o.dt = 5e-4;
    o.record_every = 200;
    const ConservationSummary cb = conservation_report(evolve(spec, u0, o));
    const double ratio = ca.energy_drift / cb.energy_drift;
    c.at_most("|E drift ratio (dt / dt/2) - 4| / 4", std::abs(ratio - kDriftRatio) / kDriftRatio, kDriftRatioTol);

    auto reversal = [](const ModelSpec& s, const FieldState& w0) {
      EvolveOptions r;
      r.T = 1.0;
      r.dt = 1e-3;
      r.record_every = 1000;
      r.record_sharp = false;
      const EvolutionTrace f = evolve(s, w0, r);
      const EvolutionTrace b = evolve(s, time_reversed(*f.final_state), r);
      return x_norm(s, add_scaled(time_reversed(*b.final_state), -1.0, w0));
    };
    const ModelSpec nwe(ModelTag::NWE, Grid::line(512, 40.0), WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0));
    c.at_most("NWE reversal x_norm error",
              reversal(nwe, profile_state(nwe, gaussian_profile(nwe.grid, 1.0, 1.5), 0.8)), kReversal);
    const ModelSpec nbe(ModelTag::NBE, Grid::line(512, 80.0), WSpec::saturating(1.0, 0.5));
    c.at_most("NBE reversal x_norm error",
              reversal(nbe, profile_state(nbe, gaussian_profile(nbe.grid, 1.0, 3.0, probe_carrier(nbe)), 0.5)),
              kReversal);
  });
}

bool criterion6(const Shared& shared) {
  Criterion c(6, "stability lab (noise 1e-2 on the soliton over T = 50, defocusing control)");
  return guarded(c, [&] {
    if (!shared.soliton) throw std::runtime_error("no soliton from criterion 1");
    const ModelSpec spec = focusing_nls(512, 40.0);
    Perturbation p;
    p.kind = PerturbationKind::additive_noise;
    p.epsilon = 1e-2;
    p.seed = 1;
    StabilityOptions so;
    so.T = 50.0;
    so.dt = 1e-3;
    so.kappa = kKappa;
    so.abs_tol = kVAbsTol;
    const StabilityReport rep = run_stability(spec, *shared.soliton, {p}, so);
    const StabilityRow& row = rep.rows.front();
    c.at_most("max_t V - 4 V(0) - 1e-6", row.max_v - (kKappa * row.v0 + kVAbsTol), 0.0);
    c.at_most("max orbit distance / perturbation norm", row.max_orbit_distance / row.perturbation_norm, kOrbitFactor);

    const ModelSpec defocus(ModelTag::NLS, Grid::line(4096, 400.0), WSpec::single_power(1.0, -1.0, 4.0));
    EvolveOptions o;
    o.T = 50.0;
    o.dt = 5e-3;
    o.record_every = 200;
    const EvolutionTrace tr =
        evolve(defocus, from_real(ModelTag::NLS, defocus.grid, gaussian_profile(defocus.grid, 1.0, 1.0)), o);
    c.at_least("defocusing sharp-seminorm decay factor", tr.sharp.front() / tr.sharp.back(), kDecay);
    c.within_seconds(kStabilitySeconds);
  });
}

bool criterion7() {
  Criterion c(7, "five-point delta continuation (independence and restart agreement)");
  return guarded(c, [&] {
    const ModelSpec spec = focusing_nls(512, 40.0);
    const PenaltyParams pp = choose_coercivity_params(spec).params;
    const auto deltas = default_delta_list(delta_bar(spec, pp, lambda0_estimate(spec).value));
    const ContinuationResult res = delta_continuation(spec, pp, deltas);
    double min_pair = INFINITY, max_restart = 0.0;
    for (std::size_t i = 0; i < res.members.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) min_pair = std::min(min_pair, res.distances[i][j]);
      const MinimizeResult& m = res.members[i].refined;
      const MinimizeResult fresh = refine_constrained(spec, m.c_delta, charge_seed(spec, m.c_delta));
      if (!fresh.converged) throw std::runtime_error("restart did not converge");
      max_restart = std::max(max_restart, orbit_distance(m.state, fresh.state));
    }
    c.equals("members", static_cast<long>(res.members.size()), 5);
    c.at_least("min pairwise orbit distance", min_pair, kIndependence);
    c.at_most("max restart orbit distance", max_restart, kRestart);
    c.within_seconds(kContinuationSeconds);
  });
}

bool criterion8() {
  Criterion c(8, "invariance suite (lattice shifts, disjoint splitting, gradient checks)");
  return guarded(c, [&] {
    const std::vector<ModelSpec> specs = {
        ModelSpec(ModelTag::NLS, Grid::line(256, 40.0), WSpec::single_power(1.0, 1.0, 4.0)),
        ModelSpec(ModelTag::NLS, Grid({32, 32}, {12.0, 12.0}), WSpec::single_power(1.0, 1.0, 3.0)),
        ModelSpec(ModelTag::NWE, Grid::line(256, 40.0), WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0)),
        ModelSpec(ModelTag::NBE, Grid::line(256, 80.0), WSpec::saturating(1.0, 0.5))};
    double shift_worst = 0.0, split_worst = 0.0;
    int fd_fail = 0, fd_pairs = 0;
    for (const ModelSpec& spec : specs) {
      const PenaltyParams pp{0.02, 0.5, 2.0};
      SplitMix64 rng = SplitMix64::stream(8, std::string("acceptance.shift.") + std::string(to_string(spec.tag)));
      const FieldState ref = random_state(spec.tag, spec.grid, rng, 0.25, 1.0);
      const double e_ref = energy(spec, ref), c_ref = charge(spec, ref);
      for (int k = 0; k < 50; ++k) {
        const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, rng.uniform(0.1, 2.0));
        std::vector<long> z;
        for (int a = 0; a < spec.dim(); ++a) z.push_back(static_cast<long>(rng.next() % 4096) - 2048);
        const FieldState t = translate(u, LatticeShift(spec.grid, z));
        std::vector<double> before{energy(spec, u), charge(spec, u), lyapunov_v(spec, u, e_ref, c_ref)};
        std::vector<double> after{energy(spec, t), charge(spec, t), lyapunov_v(spec, t, e_ref, c_ref)};
        if (std::abs(before[1]) > 1e-6 * (1.0 + x_norm(spec, u))) {
          before.push_back(lambda_ratio(spec, u));
          after.push_back(lambda_ratio(spec, t));
          before.push_back(phi(spec, u, pp));
          after.push_back(phi(spec, t, pp));
          before.push_back(j_delta(spec, u, pp));
          after.push_back(j_delta(spec, t, pp));
        }
        shift_worst = std::max(shift_worst, max_pairwise_rel(before, after));
      }
      for (int k = 0; k < 100; ++k) {
        const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, rng.uniform(0.1, 1.5));
        const FieldState d = random_state(spec.tag, spec.grid, rng, 0.25, 1.0);
        auto fd = [&](double (*f)(const ModelSpec&, const FieldState&)) {
          return (f(spec, add_scaled(u, kFdEps, d)) - f(spec, add_scaled(u, -kFdEps, d))) / (2.0 * kFdEps);
        };
        const double ge = l2_inner(grad_energy(spec, u), d), gc = l2_inner(grad_charge(spec, u), d);
        fd_pairs += 2;
        if (std::abs(ge - fd(&energy)) > kFdTol * (1.0 + std::abs(ge))) ++fd_fail;
        if (std::abs(gc - fd(&charge)) > kFdTol * (1.0 + std::abs(gc))) ++fd_fail;
      }
      if (spec.dim() == 1) {
        const Grid& g = spec.grid;
        const double L = g.length(0);
        auto bump = [&](double center, double amp) {
          RealField u(g.size(), 0.0);
          for (int i = 0; i < g.n(0); ++i) {
            const double x = g.coordinate(0, i) - center;
            if (std::abs(x) <= 8.0) u[i] = amp * std::exp(-x * x / 2.0);
          }
          return profile_state(spec, u, 0.8);
        };
        for (const ModelSpec& s : {spec, ModelSpec(spec.tag, g, WSpec::single_power(1.0, 1.0, 4.0))}) {
          const FieldState u = bump(-L / 4.0, 0.9), w = bump(L / 4.0, 1.1);
          const FieldState sum = add_scaled(u, 1.0, w);
          split_worst = std::max({split_worst, rel_diff(energy(s, sum), energy(s, u) + energy(s, w)),
                                  rel_diff(charge(s, sum), charge(s, u) + charge(s, w))});
        }
      }
    }
    c.at_most("worst relative change of E, C, V, Lambda, Phi, J_delta under shifts", shift_worst, kShiftInvariance);
    c.at_most("worst relative splitting defect of E and C", split_worst, kSplitting);
    c.at_most("gradient checks failing (of " + std::to_string(fd_pairs) + ")", fd_fail, 0.0);
  });
}

}  // namespace

int main() {
  std::printf("hylo acceptance\n");
  Shared shared;
  bool all = true;
  all &= criterion1(shared);
  all &= criterion2();
  all &= criterion3();
  all &= criterion4();
  all &= criterion5();
  all &= criterion6(shared);
  all &= criterion7();
  all &= criterion8();
  std::printf("%s\n", all ? "all criteria PASS" : "some criteria FAIL");
  return all ? 0 : 1;
}
