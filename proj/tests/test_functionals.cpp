#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hylo/errors.hpp"
#include "hylo/functionals.hpp"
#include "hylo/grid_ops.hpp"
#include "support.hpp"

using namespace hylo;
using namespace hylo::test;

namespace {

// Random NLS states drawn over several bands and a wide amplitude range.
FieldState suite_state(const ModelSpec& spec, SplitMix64& rng, int k) {
  const double band = std::array{0.05, 0.1, 0.25, 0.5}[k % 4];
  const double amp = std::exp(rng.uniform(std::log(1e-2), std::log(10.0)));
  return random_state(spec.tag, spec.grid, rng, band, amp);
}

}  // namespace

TEST_CASE("Lambda of a Gaussian with a quadratic potential") {
  const double m_sq = 1.0, sigma = 2.0;
  const ModelSpec spec(ModelTag::NLS, Grid::line(512, 40.0), WSpec::single_power(m_sq, 0.0, 4.0));
  const FieldState u = from_real(ModelTag::NLS, spec.grid, gaussian_profile(spec.grid, 1.0, sigma));
  // |grad psi|^2 / |psi|^2 = 1 / (2 sigma^2) for a Gaussian of width sigma.
  CHECK(rel_diff(lambda_ratio(spec, u), m_sq / 2.0 + 1.0 / (4.0 * sigma * sigma)) <= 1e-10);
}

TEST_CASE("Lambda guards against vanishing charge") {
  const ModelSpec spec(ModelTag::NWE, Grid::line(64, 10.0), WSpec::single_power(1.0, 1.0, 4.0));
  const FieldState u = profile_state(spec, gaussian_profile(spec.grid, 1.0, 1.0), 0.0);
  CHECK_THROWS_AS(lambda_ratio(spec, u), NearZeroCharge);
  CHECK_THROWS_AS(j_delta(spec, u, PenaltyParams{}), NearZeroCharge);
}

TEST_CASE("Phi and J_delta by direct recomputation") {
  const ModelSpec spec = focusing_nls(256, 30.0);
  SplitMix64 rng(31);
  const PenaltyParams pp{0.05, 0.3, 3.0};
  for (int k = 0; k < 20; ++k) {
    const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, rng.uniform(0.1, 2.0));
    const double e = energy(spec, u), c = charge(spec, u);
    CHECK(std::abs((phi(spec, u, pp) - e) - 2.0 * pp.a * std::pow(std::abs(c), pp.s_exp)) <=
          1e-12 * (1.0 + std::abs(phi(spec, u, pp))));
    const double j = j_delta(spec, u, pp);
    CHECK(std::abs(j - lambda_ratio(spec, u) - pp.delta * phi(spec, u, pp)) <= 1e-12 * (1.0 + std::abs(j)));
    CHECK(phi(spec, u, PenaltyParams{0.05, 0.0, 3.0}) == e);
  }
  CHECK(phi(spec, FieldState::zero(spec.tag, spec.grid), pp) == 0.0);
}

TEST_CASE("bound M closed form") {
  CHECK(bound_m(PenaltyParams{1.0, 1.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bound_m(PenaltyParams{0.3, 0.0, 2.5}) == 0.0);
  CHECK(bound_m(PenaltyParams{0.3, 0.7, 1.0}) == doctest::Approx(0.7));
  SplitMix64 rng(44);
  for (int k = 0; k < 20; ++k) {
    const PenaltyParams pp{std::exp(rng.uniform(std::log(0.01), 0.0)), rng.uniform(0.1, 2.0), rng.uniform(1.1, 3.0)};
    const double closed = bound_m(pp);
    const double scan = bound_m_scan(pp);
    CAPTURE(pp.delta);
    CAPTURE(pp.s_exp);
    CHECK(std::abs(closed - scan) <= 1e-6 * std::max(1.0, std::abs(closed)));
  }
  CHECK_THROWS_AS(bound_m(PenaltyParams{0.0, 1.0, 2.0}), InvalidArgument);
}

TEST_CASE("Nash exponents and the empirical constant") {
  const NashExponents e = nash_exponents(1, 4.0);
  CHECK(e.q == doctest::Approx(1.0));
  CHECK(e.r == doctest::Approx(3.0));
  const NashExponents e3 = nash_exponents(3, 3.0);
  CHECK(e3.q == doctest::Approx(1.5));
  CHECK(e3.r == doctest::Approx(1.5));

  const Grid g = Grid::line(512, 40.0);
  SplitMix64 rng(2);
  const ComplexField psi = random_bandlimited(g, rng, 0.25, false);
  ComplexField psi7 = psi;
  for (cplx& z : psi7) z *= 7.0;
  CHECK(rel_diff(nash_ratio(g, psi7, 4.0), nash_ratio(g, psi, 4.0)) <= 1e-10);
  CHECK_THROWS_AS(nash_ratio(g, ComplexField(g.size(), cplx{1.0, 0.0}), 4.0), InvalidArgument);

  const NashCheck a = nash_check(g, 4.0, 1000, 7);
  const NashCheck b = nash_check(g, 4.0, 2000, 7 ^ 0x9e3779b97f4a7c15ULL);
  CHECK(std::isfinite(a.b_p));
  CHECK(a.b_p > 0.0);
  CHECK(std::abs(b.b_p - a.b_p) <= 0.1 * a.b_p);
  CHECK_THROWS_AS(nash_check(g, 6.0), InvalidArgument);
}

TEST_CASE("coercivity parameters") {
  SUBCASE("focusing cubic Schrodinger") {
    const ModelSpec spec = focusing_nls();
    const CoercivityChoice c = choose_coercivity_params(spec);
    // s = r / (2 - q) balances the Nash bound against the L2 power.
    CHECK(c.params.s_exp == doctest::Approx(3.0));
    CHECK(c.params.a == doctest::Approx(2.0 * c.a_young));
    CHECK(c.params.a > 0.0);
    CHECK_FALSE(c.sampled);
  }
  SUBCASE("no focusing term needs no penalty") {
    const ModelSpec spec(ModelTag::NLS, Grid::line(256, 40.0), WSpec::single_power(1.0, 0.0, 4.0));
    CHECK(choose_coercivity_params(spec).params.a == 0.0);
  }
  SUBCASE("supercritical power is rejected") {
    const ModelSpec spec(ModelTag::NLS, Grid::line(256, 40.0), WSpec::single_power(1.0, 1.0, 8.0));
    CHECK_THROWS_AS(choose_coercivity_params(spec), InvalidArgument);
  }
  SUBCASE("wave and beam models use the sampled rule") {
    const ModelSpec nwe(ModelTag::NWE, Grid::line(256, 40.0), WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0));
    const CoercivityChoice c = choose_coercivity_params(nwe);
    CHECK(c.sampled);
    CHECK(c.params.s_exp == 2.0);
    CHECK(c.params.a >= 0.0);
  }
}

TEST_CASE("penalized energy is bounded below on 10^4 random probes") {
  const ModelSpec spec = focusing_nls(256, 40.0);
  const PenaltyParams pp = choose_coercivity_params(spec).params;
  SplitMix64 rng = SplitMix64::stream(5, "coercivity-suite");
  double worst = INFINITY;
  for (int k = 0; k < 10000; ++k) {
    const FieldState u = suite_state(spec, rng, k);
    worst = std::min(worst, energy(spec, u) + pp.a * std::pow(charge(spec, u), pp.s_exp));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("J_delta >= (delta/2) Phi - M on 1000 random states") {
  const ModelSpec spec = focusing_nls();
  PenaltyParams pp = choose_coercivity_params(spec).params;
  for (double delta : {1e-3, 1e-2, 1e-1}) {
    pp.delta = delta;
    const double m = bound_m(pp);
    SplitMix64 rng = SplitMix64::stream(11, "pli-suite");
    double worst = INFINITY;
    for (int k = 0; k < 1000; ++k) {
      const FieldState u = suite_state(spec, rng, k);
      worst = std::min(worst, j_delta(spec, u, pp) - (0.5 * delta * phi(spec, u, pp) - m));
    }
    CAPTURE(delta);
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("derived functionals are invariant under lattice shifts") {
  const ModelSpec spec = focusing_nls(256, 30.0);
  const PenaltyParams pp{0.02, 0.5, 3.0};
  SplitMix64 rng(77);
  for (int k = 0; k < 20; ++k) {
    const FieldState u = random_state(spec.tag, spec.grid, rng, 0.25, rng.uniform(0.2, 2.0));
    const FieldState t = translate(u, LatticeShift(spec.grid, {static_cast<long>(rng.next() % 256)}));
    CHECK(rel_diff(lambda_ratio(spec, t), lambda_ratio(spec, u)) <= 1e-12);
    CHECK(rel_diff(phi(spec, t, pp), phi(spec, u, pp)) <= 1e-12);
    CHECK(rel_diff(j_delta(spec, t, pp), j_delta(spec, u, pp)) <= 1e-12);
  }
}

TEST_CASE("Lambda0 of the Schrodinger model is m^2/2 and box independent") {
  const Lambda0Estimate a = lambda0_estimate(focusing_nls(512, 40.0));
  const Lambda0Estimate b = lambda0_estimate(focusing_nls(1024, 80.0));
  CHECK(std::abs(a.value - 0.5) <= 0.02);
  CHECK(std::abs(b.value - a.value) <= 0.01 * a.value);
  CHECK(a.vanishing.ratios.size() == 8);
  CHECK(a.spreading.ratios.size() == 8);
}

TEST_CASE("Lambda0 of the wave model is m with standing pairs") {
  const WSpec w = WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0);
  const Lambda0Estimate a = lambda0_estimate(ModelSpec(ModelTag::NWE, Grid::line(512, 40.0), w));
  const Lambda0Estimate b = lambda0_estimate(ModelSpec(ModelTag::NWE, Grid::line(1024, 80.0), w));
  CHECK(std::abs(a.value - 1.0) <= 0.02);
  CHECK(std::abs(b.value - a.value) <= 0.01 * a.value);
}

TEST_CASE("best standing-pair frequency is the closed-form minimizer") {
  const ModelSpec spec(ModelTag::NWE, Grid::line(512, 40.0), WSpec::single_power(1.0, 0.0, 4.0));
  const RealField u = gaussian_profile(spec.grid, 0.5, 3.0);
  const ProbeValue pv = best_probe_ratio(spec, u);
  // E/|C| = (omega^2 A + B) / (2 omega A) is minimized at omega = sqrt(B / A).
  const FieldState s0 = profile_state(spec, u, 1.0);
  double a2 = 0.0;
  for (double x : u) a2 += x * x;
  a2 *= spec.grid.cell_volume();
  const double B = 2.0 * energy(spec, profile_state(spec, u, 0.0));
  CHECK(pv.omega == doctest::Approx(std::sqrt(B / a2)).epsilon(1e-10));
  CHECK(pv.ratio == doctest::Approx(lambda_ratio(spec, profile_state(spec, u, pv.omega))).epsilon(1e-12));
  CHECK(lambda_ratio(spec, s0) >= pv.ratio);
}

TEST_CASE("hylomorphy dichotomy") {
  SUBCASE("focusing cubic holds") {
    const ModelSpec spec = focusing_nls();
    const HylomorphyReport rep = hylomorphy_check(spec);
    CHECK(rep.verdict);
    CHECK(rep.best_ratio < rep.lambda0 - rep.margin);
    CHECK(rel_diff(lambda_ratio(spec, witness_state(spec, rep)), rep.best_ratio) <= 1e-12);
    CHECK(delta_bar(spec, choose_coercivity_params(spec).params, rep.lambda0) > 0.0);
  }
  SUBCASE("pure quadratic fails") {
    const ModelSpec spec(ModelTag::NLS, Grid::line(512, 40.0), WSpec::single_power(1.0, 0.0, 4.0));
    const HylomorphyReport rep = hylomorphy_check(spec);
    CHECK_FALSE(rep.verdict);
    CHECK(rep.best_ratio >= rep.lambda0 - rep.margin);
    CHECK(rep.best_ratio >= 0.5);
  }
}

TEST_CASE("polynomial extrapolation to zero") {
  const std::vector<double> x{0.5, 1.0, 2.0};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 + 3.0 * v + v * v);
  CHECK(extrapolate_to_zero(x, y) == doctest::Approx(2.0).epsilon(1e-13));
}
