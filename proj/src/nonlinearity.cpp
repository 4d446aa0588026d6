#include "hylo/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hylo/errors.hpp"

namespace hylo {

std::string_view to_string(WFamily f) {
  switch (f) {
    case WFamily::SinglePower: return "SinglePower";
    case WFamily::DoublePower: return "DoublePower";
    case WFamily::Saturating: return "Saturating";
  }
  return "?";
}

WFamily w_family_from_string(std::string_view name) {
  if (name == "SinglePower") return WFamily::SinglePower;
  if (name == "DoublePower") return WFamily::DoublePower;
  if (name == "Saturating") return WFamily::Saturating;
  throw InvalidArgument("unknown W family '" + std::string(name) + "'");
}

std::string_view to_string(Evidence e) {
  switch (e) {
    case Evidence::analytic: return "analytic";
    case Evidence::sampled: return "sampled";
    case Evidence::probe_family: return "probe-family";
    case Evidence::skipped: return "skipped";
  }
  return "?";
}

WSpec WSpec::single_power(double m_sq, double b, double p) {
  WSpec w;
  w.m_sq = m_sq;
  w.family = WFamily::SinglePower;
  w.b = b;
  w.p = p;
  w.validate();
  return w;
}

WSpec WSpec::double_power(double m_sq, double b, double p, double c, double q) {
  WSpec w;
  w.m_sq = m_sq;
  w.family = WFamily::DoublePower;
  w.b = b;
  w.p = p;
  w.c = c;
  w.q = q;
  w.validate();
  return w;
}

WSpec WSpec::saturating(double m_sq, double m_bar, double alpha) {
  WSpec w;
  w.m_sq = m_sq;
  w.family = WFamily::Saturating;
  w.m_bar = m_bar;
  w.alpha = alpha;
  w.b = 0.0;
  w.validate();
  return w;
}

void WSpec::validate() const {
  if (!std::isfinite(m_sq) || m_sq < 0.0) throw InvalidArgument("W: m_sq must be finite and >= 0");
  switch (family) {
    case WFamily::SinglePower:
    case WFamily::DoublePower:
      if (!std::isfinite(b)) throw InvalidArgument("W: b must be finite");
      if (!(p > 2.0) || !std::isfinite(p)) throw InvalidArgument("W: power p must be > 2");
      if (family == WFamily::DoublePower) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("W: c must be >= 0");
        if (!(q > p) || !std::isfinite(q)) throw InvalidArgument("W: second power must exceed p");
      }
      break;
    case WFamily::Saturating:
      if (!(m_bar > 0.0) || !std::isfinite(m_bar)) throw InvalidArgument("W: m_bar must be > 0");
      if (!(alpha >= 0.0 && alpha < 2.0)) throw InvalidArgument("W: alpha must lie in [0, 2)");
      if (!(m_sq > 0.0)) throw InvalidArgument("W: saturating family needs m_sq > 0");
      break;
  }
}

WValues w_eval(const WSpec& spec, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("w_eval: s must be >= 0");
  WValues r;
  if (spec.family == WFamily::Saturating) {
    const double kappa = spec.m_sq / (2.0 * spec.m_bar);
    const double e = std::exp(-kappa * s * s);
    r.w = spec.m_bar * (1.0 - e);
    r.dw = spec.m_sq * s * e;
    r.d2w = spec.m_sq * e * (1.0 - 2.0 * kappa * s * s);
    return r;
  }
  const double sp2 = std::pow(s, spec.p - 2.0);
  r.w = 0.5 * spec.m_sq * s * s - spec.b / spec.p * sp2 * s * s;
  r.dw = spec.m_sq * s - spec.b * sp2 * s;
  r.d2w = spec.m_sq - spec.b * (spec.p - 1.0) * sp2;
  if (spec.family == WFamily::DoublePower && spec.c != 0.0) {
    const double sq2 = std::pow(s, spec.q - 2.0);
    r.w += spec.c / spec.q * sq2 * s * s;
    r.dw += spec.c * sq2 * s;
    r.d2w += spec.c * (spec.q - 1.0) * sq2;
  }
  return r;
}

double w_prime_over_s(const WSpec& spec, double s) {
  if (spec.family == WFamily::Saturating) {
    return spec.m_sq * std::exp(-spec.m_sq / (2.0 * spec.m_bar) * s * s);
  }
  double r = spec.m_sq - spec.b * std::pow(s, spec.p - 2.0);
  if (spec.family == WFamily::DoublePower && spec.c != 0.0) r += spec.c * std::pow(s, spec.q - 2.0);
  return r;
}

double n_eval(const WSpec& spec, double s) { return w_eval(spec, s).w - 0.5 * spec.m_sq * s * s; }
double n_prime(const WSpec& spec, double s) { return w_eval(spec, s).dw - spec.m_sq * s; }

bool WConditionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

const ConditionVerdict& WConditionReport::at(std::string_view id) const {
  for (const auto& v : verdicts) {
    if (v.id == id) return v;
  }
  throw InvalidArgument("no verdict named '" + std::string(id) + "'");
}

namespace {

double critical_sobolev(int dim) {
  return dim <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * dim / (dim - 2.0);
}

std::vector<double> log_grid(const WSampling& s) {
  std::vector<double> out(s.samples);
  const double a = std::log(s.s_min), b = std::log(s.s_max);
  for (int i = 0; i < s.samples; ++i) out[i] = std::exp(a + (b - a) * i / (s.samples - 1));
  return out;
}

// Leading exponents (q <= p) of |N'(s)| <= c1 s^{q-1} + c2 s^{p-1}.
std::pair<double, double> growth_exponents(const WSpec& w) {
  switch (w.family) {
    case WFamily::SinglePower: return {w.p, w.p};
    case WFamily::DoublePower: return {w.p, w.c > 0.0 ? w.q : w.p};
    case WFamily::Saturating: return {4.0, 4.0};
  }
  return {0.0, 0.0};
}

ConditionVerdict hylomorphy_witness(const WSpec& w, const std::string& id) {
  ConditionVerdict v;
  v.id = id;
  v.evidence = Evidence::sampled;
  std::optional<double> first_negative_n;
  for (int k = -20; k <= 20; ++k) {
    const double s = std::ldexp(1.0, k);
    if (w_eval(w, s).w <= 0.0) {
      v.witness = s;
      break;
    }
    if (!first_negative_n && n_eval(w, s) < 0.0) first_negative_n = s;
  }
  if (!v.witness) v.witness = first_negative_n;
  v.pass = v.witness.has_value();
  if (v.pass) {
    v.values["s0"] = *v.witness;
    v.values["N(s0)"] = n_eval(w, *v.witness);
    v.detail = "N(s0) < 0 at the witness";
  } else {
    v.detail = "N(s) >= 0 at every power of two in [2^-20, 2^20]";
  }
  return v;
}

}  // namespace

WConditionReport check_w_conditions(const WSpec& spec, ModelTag theorem, int dim,
                                    const WSampling& sampling) {
  spec.validate();
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (theorem == ModelTag::NBE && dim != 1) throw InvalidArgument("NBE is one-dimensional");
  WConditionReport rep;
  rep.theorem = theorem;
  rep.dim = dim;
  rep.s_min = sampling.s_min;
  rep.s_max = sampling.s_max;
  rep.samples = sampling.samples;
  const auto grid = log_grid(sampling);
  const double crit = critical_sobolev(dim);
  const auto [gq, gp] = growth_exponents(spec);

  auto sampled_positivity = [&](const std::string& id, bool strict) {
    ConditionVerdict v;
    v.id = id;
    v.evidence = Evidence::sampled;
    v.pass = true;
    for (double s : grid) {
      const double w = w_eval(spec, s).w;
      if (strict ? !(w > 0.0) : !(w >= 0.0)) {
        v.pass = false;
        v.witness = s;
        v.values["W(s)"] = w;
        break;
      }
    }
    v.detail = v.pass ? "W >= 0 on every sample" : "negative W at the witness";
    return v;
  };

  if (theorem == ModelTag::NLS) {
    ConditionVerdict fp;
    fp.id = "Fp";
    fp.evidence = Evidence::analytic;
    fp.values["growth_q"] = gq;
    fp.values["growth_p"] = gp;
    fp.pass = gq > 2.0 && gp < crit;
    fp.detail = "2 < growth_q <= growth_p < 2*";
    rep.verdicts.push_back(fp);

    ConditionVerdict f0;
    f0.id = "F0";
    f0.evidence = Evidence::analytic;
    const double gamma_bound = 2.0 + 4.0 / dim;
    // Only a focusing leading power can pull N below -c1 s^2 - c2 s^gamma.
    double gamma = 2.0;
    if (spec.family != WFamily::Saturating && spec.b > 0.0 &&
        !(spec.family == WFamily::DoublePower && spec.c > 0.0)) {
      gamma = spec.p;
    }
    f0.values["gamma"] = gamma;
    f0.values["gamma_bound"] = gamma_bound;
    f0.pass = gamma < gamma_bound;
    f0.detail = f0.pass ? "gamma < 2 + 4/N" : "focusing power reaches 2 + 4/N";
    rep.verdicts.push_back(f0);

    rep.verdicts.push_back(hylomorphy_witness(spec, "hylomorphy"));
    return rep;
  }

  if (theorem == ModelTag::NWE) {
    rep.verdicts.push_back(sampled_positivity("W-i", false));

    ConditionVerdict nd;
    nd.id = "W-ii";
    nd.evidence = Evidence::analytic;
    nd.values["W''(0)"] = w_eval(spec, 0.0).d2w;
    nd.pass = nd.values["W''(0)"] > 0.0;
    nd.detail = "W''(0) = m^2 > 0";
    rep.verdicts.push_back(nd);

    rep.verdicts.push_back(hylomorphy_witness(spec, "W-iii"));

    ConditionVerdict gr;
    gr.id = "W-iiii";
    gr.evidence = Evidence::analytic;
    gr.values["growth_p"] = gp;
    gr.pass = gp > 2.0 && gp < crit;
    gr.detail = "N'(s) >= -c1 s - c2 s^{p-1} with 2 < p < 2*";
    rep.verdicts.push_back(gr);
    return rep;
  }

  // NBE
  {
    ConditionVerdict pos = sampled_positivity("W-i", true);
    if (pos.pass) {
      double floor = std::numeric_limits<double>::infinity();
      for (double s : grid) {
        if (s >= 1.0) floor = std::min(floor, w_eval(spec, s).w);
      }
      floor = std::min(floor, w_eval(spec, 1.0).w);
      pos.values["w_floor"] = floor;
      pos.pass = floor > 0.0;
      pos.detail = "W > 0 away from 0 and W >= w_floor for |s| >= 1";
    }
    rep.verdicts.push_back(pos);

    ConditionVerdict nd;
    nd.id = "W-ii";
    nd.evidence = Evidence::analytic;
    nd.values["W''(0)"] = w_eval(spec, 0.0).d2w;
    nd.pass = nd.values["W''(0)"] > 0.0;
    nd.detail = "W''(0) > 0";
    rep.verdicts.push_back(nd);

    ConditionVerdict hy;
    hy.id = "W-iii";
    hy.evidence = Evidence::analytic;
    switch (spec.family) {
      case WFamily::Saturating:
        hy.pass = true;
        hy.values["alpha"] = spec.alpha;
        hy.values["M"] = spec.alpha == 0.0 ? spec.m_bar : std::max(spec.m_bar, 0.5 * spec.m_sq);
        hy.detail = "W <= M s^alpha";
        break;
      case WFamily::SinglePower:
      case WFamily::DoublePower:
        if (spec.b > 0.0 && !(spec.family == WFamily::DoublePower && spec.c > 0.0)) {
          const double s_star = std::pow(spec.m_sq / spec.b, 1.0 / (spec.p - 2.0));
          hy.pass = true;
          hy.values["alpha"] = 0.0;
          hy.values["M"] = std::max(w_eval(spec, s_star).w, 0.0);
          hy.detail = "W bounded above by its interior maximum";
        } else {
          hy.pass = false;
          hy.witness = sampling.s_max;
          hy.detail = "W grows at least quadratically, no alpha < 2 bound";
        }
        break;
    }
    rep.verdicts.push_back(hy);
  }
  return rep;
}

}  // namespace hylo
