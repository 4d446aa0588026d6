#include "hylo/models.hpp"

#include <cmath>
#include <mutex>

#include "hylo/errors.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/kernels.hpp"
#include "hylo/spectral.hpp"

namespace hylo {

ModelSpec::ModelSpec(ModelTag tag_, Grid grid_, WSpec w_) : tag(tag_), grid(std::move(grid_)), w(w_) {
  w.validate();
  if (tag == ModelTag::NBE && grid.dim() != 1) throw InvalidArgument("NBE is defined in dimension 1 only");
}

namespace {

void require_model(const ModelSpec& spec, const FieldState& state) {
  if (spec.tag != state.model()) throw InvalidArgument("state model differs from spec");
  if (!(spec.grid == state.grid())) throw InvalidArgument("state grid differs from spec");
}

// Fourier multiplier of the quadratic part of the potential-free energy:
// |k|^2 for psi, k^4 for the beam displacement.
std::vector<double> stiffness(const ModelSpec& spec) {
  const auto ksq = spec.grid.k_squared();
  std::vector<double> m(ksq.begin(), ksq.end());
  if (spec.tag == ModelTag::NBE) {
    for (auto& v : m) v *= v;
  }
  return m;
}

double potential_sum(const WSpec& w, std::span<const cplx> psi) {
  double s = 0.0;
  for (const auto& z : psi) s += w_eval(w, std::abs(z)).w;
  return s;
}

ComplexField w_prime_field(const WSpec& w, std::span<const cplx> psi) {
  ComplexField out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = w_prime_over_s(w, std::abs(psi[i])) * psi[i];
  return out;
}

struct LinearPropagator {
  std::vector<int> shape;
  std::vector<double> lengths;
  ModelTag tag = ModelTag::NLS;
  double m_sq = 0.0;
  double dt = 0.0;
  ComplexField phase;          // NLS
  std::vector<double> cos_wt;  // NWE/NBE
  std::vector<double> sinc_wt; // sin(w dt)/w
  std::vector<double> wsin_wt; // w sin(w dt)
};

const LinearPropagator& propagator(const ModelSpec& spec, double dt) {
  thread_local LinearPropagator cache;
  const auto shape = spec.grid.shape();
  const auto lengths = spec.grid.lengths();
  if (cache.shape == shape && cache.lengths == lengths && cache.tag == spec.tag &&
      cache.m_sq == spec.w.m_sq && cache.dt == dt) {
    return cache;
  }
  LinearPropagator p;
  p.shape = shape;
  p.lengths = lengths;
  p.tag = spec.tag;
  p.m_sq = spec.w.m_sq;
  p.dt = dt;
  const auto ksq = spec.grid.k_squared();
  const std::size_t n = ksq.size();
  if (spec.tag == ModelTag::NLS) {
    p.phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.phase[i] = std::polar(1.0, -0.5 * ksq[i] * dt);
  } else {
    const auto stiff = stiffness(spec);
    p.cos_wt.resize(n);
    p.sinc_wt.resize(n);
    p.wsin_wt.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double omega = std::sqrt(stiff[i] + spec.w.m_sq);
      p.cos_wt[i] = std::cos(omega * dt);
      p.sinc_wt[i] = omega > 0.0 ? std::sin(omega * dt) / omega : dt;
      p.wsin_wt[i] = omega * std::sin(omega * dt);
    }
  }
  cache = std::move(p);
  return cache;
}

}  // namespace

double gradient_energy(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  const auto hat = spectral::forward(spec.grid, state.component(0));
  return 0.5 * spec.grid.cell_volume() * spectral::parseval_factor(spec.grid) *
         kernels::weighted_norm2(stiffness(spec), hat);
}

double potential_energy(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  return spec.grid.cell_volume() * potential_sum(spec.w, state.component(0));
}

double energy(const ModelSpec& spec, const FieldState& state) {
  double e = gradient_energy(spec, state) + potential_energy(spec, state);
  if (spec.tag != ModelTag::NLS) {
    const auto v = state.component(1);
    e += 0.5 * spec.grid.cell_volume() * kernels::dot(kernels::as_reals(v), kernels::as_reals(v));
  }
  return e;
}

double charge(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  const double dv = spec.grid.cell_volume();
  switch (spec.tag) {
    case ModelTag::NLS: {
      const auto psi = kernels::as_reals(state.component(0));
      return dv * kernels::dot(psi, psi);
    }
    case ModelTag::NWE: {
      // Im(phi conj(psi)) = phi_im psi_re - phi_re psi_im
      const auto psi = state.component(0);
      const auto phi = state.component(1);
      double s = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        s += phi[i].imag() * psi[i].real() - phi[i].real() * psi[i].imag();
      }
      return dv * s;
    }
    case ModelTag::NBE: {
      const auto ux = spectral::derivative(spec.grid, state.component(0), 0, 1);
      const auto v = state.component(1);
      double s = 0.0;
      for (std::size_t i = 0; i < ux.size(); ++i) s += v[i].real() * ux[i].real();
      return -dv * s;
    }
  }
  return 0.0;
}

FieldState grad_energy(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  const auto psi = state.component(0);
  ComplexField g = spectral::apply_multiplier(spec.grid, psi, stiffness(spec));
  const ComplexField wp = w_prime_field(spec.w, psi);
  kernels::axpy(1.0, kernels::as_reals(std::span<const cplx>(wp)), kernels::as_reals(std::span<cplx>(g)));
  if (spec.tag == ModelTag::NLS) return FieldState(spec.tag, spec.grid, std::move(g));
  return FieldState::from_components(spec.tag, spec.grid, {std::move(g), state.component_copy(1)});
}

FieldState grad_charge(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  switch (spec.tag) {
    case ModelTag::NLS: return scaled(state, 2.0);
    case ModelTag::NWE: {
      ComplexField gpsi = state.component_copy(1);
      ComplexField gphi = state.component_copy(0);
      for (auto& z : gpsi) z = cplx(z.imag(), -z.real());  // -i phi
      for (auto& z : gphi) z = cplx(-z.imag(), z.real());  // i psi
      return FieldState::from_components(spec.tag, spec.grid, {std::move(gpsi), std::move(gphi)});
    }
    case ModelTag::NBE: {
      ComplexField gu = spectral::derivative(spec.grid, state.component(1), 0, 1);
      ComplexField gv = spectral::derivative(spec.grid, state.component(0), 0, 1);
      for (auto& z : gv) z = -z;
      return FieldState::from_components(spec.tag, spec.grid, {std::move(gu), std::move(gv)});
    }
  }
  throw InvalidArgument("unknown model");
}

double x_norm(const ModelSpec& spec, const FieldState& state) {
  require_model(spec, state);
  return x_norm_of(state);
}

FieldState precondition(const ModelSpec& spec, const FieldState& gradient) {
  require_model(spec, gradient);
  ComplexField out;
  out.reserve(gradient.data().size());
  for (std::size_t c = 0; c < gradient.num_components(); ++c) {
    auto w = x_norm_weights(spec.tag, spec.grid, c);
    for (auto& v : w) v = 1.0 / v;
    const auto g = spectral::apply_multiplier(spec.grid, gradient.component(c), w);
    out.insert(out.end(), g.begin(), g.end());
  }
  return FieldState(spec.tag, spec.grid, std::move(out));
}

double max_w_curvature(const ModelSpec& spec, const FieldState& state) {
  double m = 0.0;
  for (const auto& z : state.component(0)) m = std::max(m, std::abs(w_eval(spec.w, std::abs(z)).d2w));
  return m;
}

FieldState evolve_step(const ModelSpec& spec, const FieldState& state, double dt) {
  require_model(spec, state);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  const Grid& grid = spec.grid;
  const auto& prop = propagator(spec, dt);

  if (spec.tag == ModelTag::NLS) {
    ComplexField psi = state.component_copy(0);
    auto half_rotation = [&](ComplexField& f) {
      for (auto& z : f) z *= std::polar(1.0, -0.25 * dt * w_prime_over_s(spec.w, std::abs(z)));
    };
    half_rotation(psi);
    spectral::forward_inplace(grid, psi);
    kernels::mul_complex(prop.phase, psi);
    spectral::inverse_inplace(grid, psi);
    half_rotation(psi);
    return FieldState(spec.tag, grid, std::move(psi));
  }

  if (dt * max_w_curvature(spec, state) > 0.5) {
    throw NumericalFailure("time step too large for the nonlinear force (dt * max|W''| > 0.5)");
  }
  ComplexField psi = state.component_copy(0);
  ComplexField phi = state.component_copy(1);
  auto kick = [&]() {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double f = w_prime_over_s(spec.w, std::abs(psi[i])) - spec.w.m_sq;
      phi[i] -= 0.5 * dt * f * psi[i];
    }
  };
  kick();
  spectral::forward_inplace(grid, psi);
  spectral::forward_inplace(grid, phi);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx p = psi[i], q = phi[i];
    psi[i] = prop.cos_wt[i] * p + prop.sinc_wt[i] * q;
    phi[i] = -prop.wsin_wt[i] * p + prop.cos_wt[i] * q;
  }
  spectral::inverse_inplace(grid, psi);
  spectral::inverse_inplace(grid, phi);
  kick();
  return FieldState::from_components(spec.tag, grid, {std::move(psi), std::move(phi)});
}

FieldState time_reversed(const FieldState& state) {
  ComplexField data(state.data().begin(), state.data().end());
  if (state.model() == ModelTag::NLS) {
    for (auto& z : data) z = std::conj(z);
  } else {
    const std::size_t n = state.points();
    for (std::size_t i = n; i < 2 * n; ++i) data[i] = -data[i];
  }
  return FieldState(state.model(), state.grid(), std::move(data));
}

RealField gaussian_profile(const Grid& grid, double amplitude, double sigma, double carrier) {
  if (!(sigma > 0.0)) throw InvalidArgument("Gaussian width must be positive");
  RealField u(grid.size());
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const auto ijk = grid.unravel(idx);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += std::pow(grid.coordinate(a, ijk[a]), 2);
    u[idx] = amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
    if (carrier != 0.0) u[idx] *= std::cos(carrier * grid.coordinate(0, ijk[0]));
  }
  return u;
}

FieldState profile_state(const ModelSpec& spec, const RealField& u, double omega_or_speed) {
  if (u.size() != spec.grid.size()) throw InvalidArgument("profile size mismatch");
  ComplexField psi(u.begin(), u.end());
  switch (spec.tag) {
    case ModelTag::NLS: return FieldState(spec.tag, spec.grid, std::move(psi));
    case ModelTag::NWE: {
      ComplexField phi(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) phi[i] = cplx(0.0, -omega_or_speed * u[i]);
      return FieldState::from_components(spec.tag, spec.grid, {std::move(psi), std::move(phi)});
    }
    case ModelTag::NBE: {
      ComplexField v = spectral::derivative(spec.grid, psi, 0, 1);
      for (auto& z : v) z *= -omega_or_speed;
      return FieldState::from_components(spec.tag, spec.grid, {std::move(psi), std::move(v)});
    }
  }
  throw InvalidArgument("unknown model");
}

}  // namespace hylo
