#include <doctest.h>

#include <cmath>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/stability.hpp"
#include "support.hpp"

using namespace hylo;
using namespace hylo::test;

namespace {

const ModelSpec& spec() {
  static const ModelSpec s = focusing_nls();
  return s;
}

// Converged ground state of charge 4, computed once per process.
const MinimizeResult& soliton() {
  static const MinimizeResult r = [] {
    MinimizeResult m = refine_constrained(spec(), 4.0, charge_seed(spec(), 4.0));
    REQUIRE(m.converged);
    return m;
  }();
  return r;
}

Perturbation noise(double eps, std::uint64_t seed = 1) {
  Perturbation p;
  p.kind = PerturbationKind::additive_noise;
  p.epsilon = eps;
  p.seed = seed;
  return p;
}

StabilityOptions options(double T) {
  StabilityOptions o;
  o.T = T;
  o.dt = 1e-3;
  o.record_every = 100;
  return o;
}

}  // namespace

TEST_CASE("Lyapunov function") {
  const MinimizeResult& m = soliton();
  const double c_ref = charge(spec(), m.state);
  CHECK(lyapunov_v(spec(), m.state, m.e_delta, c_ref) <= 1e-18);
  const FieldState p = apply_perturbation(spec(), m.state, noise(0.05));
  const double v = lyapunov_v(spec(), p, m.e_delta, c_ref);
  CHECK(v > 0.0);
  const double vt = lyapunov_v(spec(), translate(p, LatticeShift(spec().grid, {123})), m.e_delta, c_ref);
  CHECK(rel_diff(v, vt) <= 1e-12);
  const double e = energy(spec(), p) - m.e_delta, c = charge(spec(), p) - c_ref;
  CHECK(rel_diff(v, e * e + c * c) <= 1e-15);
}

TEST_CASE("perturbation maps") {
  const FieldState& u = soliton().state;
  CHECK(max_abs_diff(apply_perturbation(spec(), u, noise(0.0)), u) == 0.0);
  Perturbation amp;
  amp.kind = PerturbationKind::amplitude_scale;
  CHECK(max_abs_diff(apply_perturbation(spec(), u, amp), u) == 0.0);
  amp.epsilon = 0.1;
  CHECK(max_abs_diff(apply_perturbation(spec(), u, amp), scaled(u, 1.1)) == 0.0);
  Perturbation sp;
  sp.kind = PerturbationKind::shift_and_phase;
  CHECK(max_abs_diff(apply_perturbation(spec(), u, sp), u) == 0.0);
  sp.shift = {7};
  sp.theta = 0.4;
  CHECK(orbit_distance(apply_perturbation(spec(), u, sp), u) <= 1e-12);
  const FieldState n = apply_perturbation(spec(), u, noise(1e-2, 9));
  CHECK(rel_diff(x_norm(spec(), add_scaled(n, -1.0, u)), 1e-2) <= 1e-12);
  CHECK(max_abs_diff(apply_perturbation(spec(), u, noise(1e-2, 9)), n) == 0.0);
  CHECK(perturbation_kind_from_string("shift_and_phase") == PerturbationKind::shift_and_phase);
  CHECK_THROWS_AS(perturbation_kind_from_string("kick"), InvalidArgument);
}

TEST_CASE("zero perturbation keeps V at the integrator drift") {
  Perturbation amp;
  amp.kind = PerturbationKind::amplitude_scale;
  const StabilityReport rep = run_stability(spec(), soliton(), {noise(0.0), amp}, options(10.0));
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].max_v <= 1e-10);
  CHECK(rep.rows[0].stable);
  CHECK(rep.rows[0].max_v == rep.rows[1].max_v);
  CHECK(rep.rows[0].trace.energy == rep.rows[1].trace.energy);
  CHECK(rep.rows[0].trace.orbit_dist == rep.rows[1].trace.orbit_dist);
}

TEST_CASE("noise on the soliton stays in its orbit") {
  StabilityOptions o = options(50.0);
  o.jobs = 2;
  const StabilityReport rep = run_stability(spec(), soliton(), {noise(1e-2, 1)}, o);
  const StabilityRow& row = rep.rows.at(0);
  CHECK(row.stable);
  CHECK(row.verdict == "stable");
  CHECK(row.max_v <= 4.0 * row.v0 + 1e-6);
  CHECK(row.max_orbit_distance <= 10.0 * row.perturbation_norm);
  CHECK(row.perturbation_norm == doctest::Approx(1e-2).epsilon(1e-10));

  // V moves only by the conservation drift of the flow.
  const ConservationSummary cs = conservation_report(row.trace);
  const double e0 = row.trace.energy.front(), c0 = row.trace.charge.front();
  const double drift = std::max(cs.energy_drift * std::max(1.0, std::abs(e0)), cs.charge_drift * std::max(1.0, std::abs(c0)));
  const double bound = (std::abs(2.0 * (e0 - rep.e_ref)) + std::abs(2.0 * (c0 - rep.c_ref))) * drift + 2.0 * drift * drift;
  for (double v : row.trace.v) CHECK(std::abs(v - row.v0) <= bound + 1e-18);
}

TEST_CASE("stability runs are deterministic and independent of the worker count") {
  StabilityOptions one = options(2.0);
  StabilityOptions two = one;
  two.jobs = 2;
  const std::vector<Perturbation> perts{noise(1e-2, 3), noise(2e-2, 4), noise(5e-3, 5)};
  const StabilityReport a = run_stability(spec(), soliton(), perts, one);
  const StabilityReport b = run_stability(spec(), soliton(), perts, two);
  for (std::size_t i = 0; i < perts.size(); ++i) {
    CHECK(a.rows[i].max_v == b.rows[i].max_v);
    CHECK(a.rows[i].trace.orbit_dist == b.rows[i].trace.orbit_dist);
  }
}

TEST_CASE("stability needs a converged minimizer") {
  MinimizeResult m(soliton().state);
  m.converged = false;
  CHECK_THROWS_AS(run_stability(spec(), m, {noise(1e-2)}, options(1.0)), InvalidArgument);
}

TEST_CASE("V separation scan") {
  const std::vector<double> radii{0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
  const auto k64 = v_separation_scan(spec(), soliton(), radii, 64, 1);
  const auto k128 = v_separation_scan(spec(), soliton(), radii, 128, 1);
  REQUIRE(k64.size() == radii.size());
  CHECK(k64[0].min_v <= 1e-18);
  for (std::size_t i = 1; i < k64.size(); ++i) {
    CHECK(k64[i].min_v >= k64[i - 1].min_v);
    CHECK(k64[i].min_v > 0.0);
    CHECK(std::abs(k128[i].min_v - k64[i].min_v) <= 0.5 * k64[i].min_v);
  }
}

TEST_CASE("quadratic potential: a Gaussian bump is not orbit stable") {
  const ModelSpec quad(ModelTag::NLS, Grid::line(512, 40.0), WSpec::single_power(1.0, 0.0, 4.0));
  MinimizeResult bump(from_real(ModelTag::NLS, quad.grid, gaussian_profile(quad.grid, 1.0, 1.0)));
  bump.converged = true;
  bump.e_delta = energy(quad, bump.state);
  bump.c_delta = charge(quad, bump.state);
  StabilityOptions o = options(10.0);
  const StabilityReport rep = run_stability(quad, bump, {noise(1e-2, 2)}, o);
  const StabilityRow& row = rep.rows.at(0);
  // V is conserved, but the state leaves the orbit of the bump by far more than the kick.
  CHECK(row.max_orbit_distance >= 10.0 * row.perturbation_norm);
  CHECK(row.max_orbit_distance >= 0.1 * x_norm(quad, bump.state));
}
