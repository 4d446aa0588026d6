#include <doctest.h>

#include <cmath>
#include <vector>

#include "hylo/errors.hpp"
#include "hylo/nonlinearity.hpp"
#include "support.hpp"

using namespace hylo;

namespace {

std::vector<WSpec> sample_specs() {
  return {WSpec::single_power(1.0, 1.0, 4.0),  WSpec::single_power(0.5, 2.0, 3.0),
          WSpec::single_power(1.0, 0.0, 4.0),  WSpec::single_power(1.0, -1.0, 4.0),
          WSpec::single_power(2.0, 1.0, 8.0),  WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0),
          WSpec::double_power(1.0, 0.5, 3.0, 0.2, 5.5), WSpec::saturating(1.0, 0.5),
          WSpec::saturating(2.0, 3.0, 1.0)};
}

std::vector<double> s_grid() {
  std::vector<double> s;
  for (int i = 0; i <= 60; ++i) s.push_back(1e-3 * std::pow(10.0, 4.5 * i / 60.0));
  return s;
}

}  // namespace

TEST_CASE("values at the origin") {
  for (const WSpec& w : sample_specs()) {
    const WValues v = w_eval(w, 0.0);
    CHECK(v.w == 0.0);
    CHECK(v.dw == 0.0);
    CHECK(v.d2w == doctest::Approx(w.m_sq).epsilon(1e-15));
    CHECK(w_prime_over_s(w, 0.0) == doctest::Approx(w.m_sq));
  }
}

TEST_CASE("cubic focusing potential at s = 1") {
  const WValues v = w_eval(WSpec::single_power(1.0, 1.0, 4.0), 1.0);
  CHECK(v.w == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(v.dw) <= 1e-15);
  CHECK(v.d2w == doctest::Approx(1.0 - 3.0).epsilon(1e-15));
}

TEST_CASE("saturating potential levels off at m_bar") {
  const WSpec w = WSpec::saturating(1.0, 0.5);
  CHECK(std::abs(w_eval(w, 10.0).w - 0.5) <= 1e-8);
  for (double s : s_grid()) CHECK(w_eval(w, s).w <= 0.5);
}

TEST_CASE("analytic derivatives agree with central differences") {
  // W is even in s, so the left stencil point may cross the origin.
  const double h = 1e-5;
  for (const WSpec& w : sample_specs()) {
    for (int i = 0; i < 400; ++i) {
      const double s = 1e-6 * std::pow(1e9, i / 399.0);
      const WValues v = w_eval(w, s);
      const double fd1 = (w_eval(w, s + h).w - w_eval(w, std::abs(s - h)).w) / (2 * h);
      CAPTURE(s);
      CHECK(std::abs(v.dw - fd1) <= 1e-6 * (1.0 + std::abs(v.dw)));
      if (s > 1e-3 && s < 100.0) {
        const double fd2 = (w_eval(w, s + h).dw - w_eval(w, s - h).dw) / (2 * h);
        CHECK(std::abs(v.d2w - fd2) <= 1e-6 * (1.0 + std::abs(v.d2w)));
        CHECK(w_prime_over_s(w, s) == doctest::Approx(v.dw / s).epsilon(1e-12));
        CHECK(std::abs(n_eval(w, s) - (v.w - 0.5 * w.m_sq * s * s)) <= 1e-12 * (1.0 + std::abs(v.w)));
      }
    }
  }
}

TEST_CASE("derivative check at the stated step on moderate arguments") {
  const double h = 1e-5;
  for (const WSpec& w : sample_specs()) {
    for (double s = 0.01; s <= 3.0; s += 0.07) {
      const WValues v = w_eval(w, s);
      const double fd = (w_eval(w, s + h).w - w_eval(w, s - h).w) / (2 * h);
      CHECK(std::abs(v.dw - fd) <= 1e-6 * (1.0 + std::abs(v.dw)));
    }
  }
}

TEST_CASE("double power with c = 0 is the single power") {
  const WSpec a = WSpec::single_power(1.3, 0.7, 3.5);
  const WSpec b = WSpec::double_power(1.3, 0.7, 3.5, 0.0, 6.0);
  for (double s : s_grid()) {
    const WValues va = w_eval(a, s), vb = w_eval(b, s);
    CHECK(va.w == vb.w);
    CHECK(va.dw == vb.dw);
    CHECK(va.d2w == vb.d2w);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(w_eval(WSpec::single_power(1.0, 1.0, 4.0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(WSpec::single_power(1.0, 1.0, 2.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(WSpec::double_power(1.0, 1.0, 4.0, 1.0, 3.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(WSpec::saturating(1.0, -0.5).validate(), InvalidArgument);
  CHECK_THROWS_AS(WSpec::saturating(1.0, 0.5, 2.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(w_family_from_string("Cubic"), InvalidArgument);
  CHECK(w_family_from_string("DoublePower") == WFamily::DoublePower);
}

TEST_CASE("wave equation conditions for the cubic focusing potential") {
  const WConditionReport rep = check_w_conditions(WSpec::single_power(1.0, 1.0, 4.0), ModelTag::NWE);
  const ConditionVerdict& hy = rep.at("W-iii");
  CHECK(hy.pass);
  REQUIRE(hy.witness);
  CHECK(*hy.witness == 2.0);
  CHECK(hy.values.at("N(s0)") == doctest::Approx(-4.0));
  CHECK(rep.at("W-ii").pass);
  // Pure focusing power is negative for large s, so positivity fails.
  CHECK_FALSE(rep.at("W-i").pass);
  CHECK_THROWS_AS(rep.at("W-x"), InvalidArgument);
}

TEST_CASE("double power wave potential satisfies every condition") {
  const WConditionReport rep = check_w_conditions(WSpec::double_power(1.0, 1.0, 4.0, 1.0, 6.0), ModelTag::NWE);
  CHECK(rep.all_pass());
}

TEST_CASE("Schrodinger growth bound fails analytically above the critical power") {
  const WConditionReport sub = check_w_conditions(WSpec::single_power(1.0, 1.0, 4.0), ModelTag::NLS, 1);
  CHECK(sub.all_pass());
  const WConditionReport crit = check_w_conditions(WSpec::single_power(1.0, 1.0, 6.0), ModelTag::NLS, 1);
  CHECK_FALSE(crit.at("F0").pass);
  CHECK(crit.at("F0").evidence == Evidence::analytic);
  const WConditionReport sup2 = check_w_conditions(WSpec::single_power(1.0, 1.0, 4.0), ModelTag::NLS, 2);
  CHECK_FALSE(sup2.at("F0").pass);
  const WConditionReport quad = check_w_conditions(WSpec::single_power(1.0, 0.0, 4.0), ModelTag::NLS, 1);
  CHECK_FALSE(quad.at("hylomorphy").pass);
}

TEST_CASE("saturating beam potential: bounded with alpha = 0 and M = m_bar") {
  const WConditionReport rep = check_w_conditions(WSpec::saturating(1.0, 0.5), ModelTag::NBE);
  CHECK(rep.at("W-i").pass);
  CHECK(rep.at("W-ii").pass);
  const ConditionVerdict& hy = rep.at("W-iii");
  CHECK(hy.pass);
  CHECK(hy.values.at("alpha") == 0.0);
  CHECK(hy.values.at("M") == doctest::Approx(0.5));
}
