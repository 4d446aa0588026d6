#pragma once

// Potentials W(s) = m^2 s^2 / 2 + N(s) evaluated at s = |psi| (or |u|).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hylo/field_state.hpp"

namespace hylo {

enum class WFamily { SinglePower, DoublePower, Saturating };

std::string_view to_string(WFamily f);
WFamily w_family_from_string(std::string_view name);

// SinglePower: N(s) = -(b/p) s^p.
// DoublePower: N(s) = -(b/p) s^p + (c/q) s^q with q > p.
// Saturating:  W(s) = m_bar (1 - exp(-m^2 s^2 / (2 m_bar))); alpha is the
//              exponent claimed in the bound W(s) <= M s^alpha.
// b = 0 gives the purely quadratic potential and b < 0 a defocusing one.
struct WSpec {
  double m_sq = 1.0;
  WFamily family = WFamily::SinglePower;
  double b = 1.0;
  double p = 4.0;
  double c = 0.0;
  double q = 6.0;
  double m_bar = 0.5;
  double alpha = 0.0;

  static WSpec single_power(double m_sq, double b, double p);
  static WSpec double_power(double m_sq, double b, double p, double c, double q);
  static WSpec saturating(double m_sq, double m_bar, double alpha = 0.0);

  // Throws InvalidArgument on parameters outside the family's domain.
  void validate() const;
};

struct WValues {
  double w = 0.0;
  double dw = 0.0;
  double d2w = 0.0;
};

// Closed-form W, W', W'' at s >= 0. Throws InvalidArgument for s < 0.
WValues w_eval(const WSpec& spec, double s);
// W'(s)/s with its limit m^2 at s = 0.
double w_prime_over_s(const WSpec& spec, double s);
// N(s) = W(s) - m^2 s^2 / 2 and N'(s).
double n_eval(const WSpec& spec, double s);
double n_prime(const WSpec& spec, double s);

enum class Evidence { analytic, sampled, probe_family, skipped };
std::string_view to_string(Evidence e);

struct ConditionVerdict {
  std::string id;
  bool pass = false;
  Evidence evidence = Evidence::analytic;
  std::string detail;
  std::optional<double> witness;
  std::map<std::string, double> values;
};

struct WConditionReport {
  ModelTag theorem = ModelTag::NLS;
  int dim = 1;
  std::vector<ConditionVerdict> verdicts;
  double s_min = 1e-6;
  double s_max = 1e3;
  int samples = 400;

  bool all_pass() const;
  const ConditionVerdict& at(std::string_view id) const;  // throws InvalidArgument
};

struct WSampling {
  double s_min = 1e-6;
  double s_max = 1e3;
  int samples = 400;
};

// NLS: Fp, F0, hylomorphy. NWE: W-i..W-iiii. NBE: W-i..W-iii.
WConditionReport check_w_conditions(const WSpec& spec, ModelTag theorem, int dim = 1,
                                    const WSampling& sampling = {});

}  // namespace hylo
