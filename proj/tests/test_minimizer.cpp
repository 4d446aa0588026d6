#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/minimizer.hpp"
#include "support.hpp"

using namespace hylo;
using namespace hylo::test;
using std::numbers::pi;

namespace {

// sqrt(2 mu / b) sech(sqrt(mu) x) solves u'' = mu u - b u^3.
FieldState sech_state(const Grid& g, double mu, double b = 1.0) {
  ComplexField o(g.size());
  for (int i = 0; i < g.n(0); ++i) o[i] = std::sqrt(2.0 * mu / b) / std::cosh(std::sqrt(mu) * g.coordinate(0, i));
  return FieldState(ModelTag::NLS, g, std::move(o));
}

double rel_l2_after_alignment(const FieldState& oracle, const FieldState& state) {
  const FieldState aligned = apply_alignment(state, align_orbit(oracle, state));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < oracle.data().size(); ++i) {
    num += std::norm(aligned.data()[i] - oracle.data()[i]);
    den += std::norm(oracle.data()[i]);
  }
  return std::sqrt(num / den);
}

bool log_non_increasing(const MinimizeResult& r) {
  for (std::size_t i = 1; i < r.log.size(); ++i) {
    if (r.log[i].value > r.log[i - 1].value) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("multiplier fit of proportional gradients") {
  const Grid g = Grid::line(64, 10.0);
  SplitMix64 rng(1);
  const FieldState gc = random_state(ModelTag::NLS, g, rng, 0.5, 1.0);
  const MultiplierFit f = multiplier_fit(scaled(gc, 0.37), gc);
  CHECK(f.lambda == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(f.residual <= 1e-14);
}

TEST_CASE("charge restoration scales one component") {
  const ModelSpec nls = focusing_nls(256, 30.0);
  const FieldState u = from_real(ModelTag::NLS, nls.grid, gaussian_profile(nls.grid, 1.0, 2.0));
  CHECK(rel_diff(charge(nls, restore_charge(nls, u, 3.0)), 3.0) <= 1e-14);
  CHECK_THROWS_AS(restore_charge(nls, u, -1.0), NumericalFailure);

  const ModelSpec nwe(ModelTag::NWE, Grid::line(256, 30.0), WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0));
  const FieldState w = profile_state(nwe, gaussian_profile(nwe.grid, 1.0, 2.0), 0.8);
  const FieldState r = restore_charge(nwe, w, -1.5);
  CHECK(rel_diff(charge(nwe, r), -1.5) <= 1e-14);
  CHECK(max_abs_diff(FieldState::from_components(ModelTag::NLS, nwe.grid, {r.component_copy(0)}),
                     FieldState::from_components(ModelTag::NLS, nwe.grid, {w.component_copy(0)})) == 0.0);
}

TEST_CASE("quadratic potential: the constrained minimizer is the constant field") {
  const double L = 10.0, m_sq = 1.0;
  const ModelSpec spec(ModelTag::NLS, Grid::line(64, L), WSpec::single_power(m_sq, 0.0, 4.0));
  RealField u(spec.grid.size());
  for (int i = 0; i < 64; ++i) u[i] = 1.0 + 0.3 * std::cos(2.0 * pi * spec.grid.coordinate(0, i) / L);
  const FieldState init = restore_charge(spec, from_real(ModelTag::NLS, spec.grid, u), 1.0);
  const MinimizeResult r = refine_constrained(spec, 1.0, init);
  REQUIRE(r.converged);
  double err = 0.0;
  for (const cplx& z : r.state.data()) err = std::max(err, std::abs(std::abs(z) - std::sqrt(1.0 / L)));
  CHECK(err <= 1e-8);
  CHECK(std::abs(r.e_delta - 0.5 * m_sq) <= 1e-8);
  // gradE = m^2 psi and gradC = 2 psi for the true L2 gradients.
  CHECK(std::abs(r.lambda_mult - m_sq / 2.0) <= 1e-8);
  CHECK(log_non_increasing(r));

  SUBCASE("a feasible stationary start takes no step") {
    const MinimizeResult again = refine_constrained(spec, 1.0, r.state);
    CHECK(again.converged);
    CHECK(again.iters == 0);
  }
}

TEST_CASE("refinement rejects a start far from the target charge") {
  const ModelSpec spec = focusing_nls(256, 30.0);
  const FieldState u = restore_charge(spec, from_real(ModelTag::NLS, spec.grid, gaussian_profile(spec.grid, 1.0, 1.0)), 1.0);
  CHECK_THROWS_AS(refine_constrained(spec, 2.0, u), InvalidArgument);
}

TEST_CASE("cubic focusing ground state is the sech soliton") {
  const ModelSpec spec = focusing_nls();
  // C(sqrt(2 mu) sech(sqrt(mu) x)) = 4 sqrt(mu), so C = 4 selects mu = 1.
  const MinimizeResult r = refine_constrained(spec, 4.0, charge_seed(spec, 4.0));
  REQUIRE(r.converged);
  CHECK(r.kkt_residual <= 1e-6);
  const double mu = spec.w.m_sq - 2.0 * r.lambda_mult;
  CHECK(std::abs(mu - 1.0) <= 1e-6);
  CHECK(rel_l2_after_alignment(sech_state(spec.grid, mu), r.state) <= 1e-3);
  CHECK(rel_diff(energy(spec, r.state), r.e_delta) <= 1e-12);
  CHECK(rel_diff(charge(spec, r.state), r.c_delta) <= 1e-12);
  CHECK(log_non_increasing(r));
}

TEST_CASE("penalized descent") {
  const ModelSpec spec = focusing_nls(256, 40.0);
  PenaltyParams pp = choose_coercivity_params(spec).params;
  const double db = delta_bar(spec, pp, lambda0_estimate(spec).value);
  REQUIRE(db > 0.0);
  pp.delta = 0.8 * db;
  const FieldState init = jdelta_seed(spec, pp);
  const MinimizeResult r = minimize_jdelta(spec, pp, init);
  REQUIRE(r.converged);
  CHECK(r.j_value <= j_delta(spec, init, pp));
  CHECK(log_non_increasing(r));
  CHECK(rel_diff(energy(spec, r.state), r.e_delta) <= 1e-12);
  CHECK(rel_diff(charge(spec, r.state), r.c_delta) <= 1e-12);
  CHECK(r.kkt_residual <= 10.0 * 1e-8 * (1.0 + x_norm(spec, r.state)));
  CHECK(r.j_value < lambda0_estimate(spec).value);

  SUBCASE("the minimizer is a fixed point") {
    const MinimizeResult again = minimize_jdelta(spec, pp, r.state);
    CHECK(again.converged);
    CHECK(again.iters == 0);
  }
  SUBCASE("translated start lands on the same orbit") {
    const FieldState moved = translate(init, LatticeShift(spec.grid, {41}));
    const MinimizeResult t = minimize_jdelta(spec, pp, moved);
    REQUIRE(t.converged);
    CHECK(orbit_distance(r.state, t.state) <= 1e-6);
  }
}

TEST_CASE("default delta list") {
  const auto d = default_delta_list(0.1);
  REQUIRE(d.size() == 5);
  CHECK(d.front() == doctest::Approx(0.09));
  CHECK(d.back() == doctest::Approx(0.055));
  for (std::size_t i = 1; i < d.size(); ++i) {
    CHECK(d[i] < d[i - 1]);
    CHECK(d[i] / d[i - 1] == doctest::Approx(d[1] / d[0]));
  }
}

TEST_CASE("delta continuation family") {
  const ModelSpec spec = focusing_nls();
  PenaltyParams pp = choose_coercivity_params(spec).params;
  const double db = delta_bar(spec, pp, lambda0_estimate(spec).value);
  const auto deltas = default_delta_list(db);
  const ContinuationResult res = delta_continuation(spec, pp, deltas);
  REQUIRE(res.members.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const MinimizeResult& m = res.members[i].refined;
    CHECK(m.converged);
    CHECK(m.kkt_residual <= 10.0 * 1e-8 * (1.0 + x_norm(spec, m.state)));
    CHECK(rel_diff(charge(spec, m.state), m.c_delta) <= 1e-12);
    if (i > 0) CHECK(m.c_delta > res.members[i - 1].refined.c_delta);
    for (std::size_t j = 0; j < i; ++j) CHECK(res.distances[i][j] >= 1e-3);
  }
  // Independent restart: minimize E at the member's charge from a fresh Gaussian.
  for (std::size_t i : {0u, 2u, 4u}) {
    const MinimizeResult& m = res.members[i].refined;
    const MinimizeResult fresh = refine_constrained(spec, m.c_delta, charge_seed(spec, m.c_delta));
    REQUIRE(fresh.converged);
    CHECK(orbit_distance(m.state, fresh.state) <= 1e-2);
  }
}

TEST_CASE("continuation rejects a non-decreasing list") {
  const ModelSpec spec = focusing_nls(256, 40.0);
  CHECK_THROWS_AS(delta_continuation(spec, PenaltyParams{0.01, 0.1, 3.0}, {0.01, 0.02}), InvalidArgument);
}
