#include "hylo/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hylo/errors.hpp"
#include "hylo/kernels.hpp"
#include "hylo/spectral.hpp"

namespace hylo {
namespace {

// dst[j] += src[j + offset] (indices periodic), row by row so the innermost
// axis becomes two contiguous axpy segments.
void accumulate_shifted(const Grid& grid, std::span<const double> src,
                        const std::array<int, 3>& offset, std::span<double> dst) {
  const int last = grid.dim() - 1;
  const int n_last = grid.n(last);
  const int o_last = ((offset[last] % n_last) + n_last) % n_last;
  const std::size_t rows = grid.size() / static_cast<std::size_t>(n_last);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t dst_row = r * n_last;
    std::array<int, 3> idx = grid.unravel(dst_row);
    for (int a = 0; a < last; ++a) idx[a] = ((idx[a] + offset[a]) % grid.n(a) + grid.n(a)) % grid.n(a);
    idx[last] = 0;
    const std::size_t src_row = grid.ravel(idx);
    const auto head = static_cast<std::size_t>(n_last - o_last);
    kernels::axpy(1.0, src.subspan(src_row + o_last, head), dst.subspan(dst_row, head));
    if (o_last > 0) {
      kernels::axpy(1.0, src.subspan(src_row, o_last), dst.subspan(dst_row + head, o_last));
    }
  }
}

// Fourier factor of a continuous shift by s along `axis` for bin i. The
// Nyquist bin uses the symmetric (cosine) interpolant so real fields stay real.
cplx shift_factor(const Grid& grid, int axis, int i, double s, bool conjugate) {
  const double k = grid.wavenumber(axis, i);
  if (grid.is_nyquist(axis, i)) return {std::cos(k * s), 0.0};
  return std::polar(1.0, conjugate ? k * s : -k * s);
}

std::vector<std::vector<cplx>> axis_factors(const Grid& grid, const std::vector<double>& s,
                                            bool conjugate) {
  std::vector<std::vector<cplx>> f(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    f[a].resize(grid.n(a));
    for (int i = 0; i < grid.n(a); ++i) f[a][i] = shift_factor(grid, a, i, s[a], conjugate);
  }
  return f;
}

cplx factor_at(const Grid& grid, const std::vector<std::vector<cplx>>& f, std::size_t idx) {
  cplx m(1.0, 0.0);
  for (int a = 0; a < grid.dim(); ++a) {
    m *= f[a][(idx / grid.stride(a)) % grid.n(a)];
  }
  return m;
}

double golden_maximize(const auto& objective, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double integrate(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw InvalidArgument("integrate: field size mismatch");
  return grid.cell_volume() * kernels::sum(f);
}

double sharp_seminorm(const FieldState& state) {
  const Grid& grid = state.grid();
  if (state.model() == ModelTag::NBE) {
    double m = 0.0;
    for (const auto& z : state.component(0)) m = std::max(m, std::abs(z.real()));
    return m;
  }
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.length(a) <= 2.0) {
      throw InvalidArgument("sharp seminorm needs every box length > 2 (unit ball would wrap)");
    }
  }
  std::vector<double> density(grid.size());
  kernels::abs2(state.component(0), density);
  std::vector<double> mass(grid.size(), 0.0);

  std::array<int, 3> reach{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) reach[a] = static_cast<int>(std::floor(1.0 / grid.spacing(a)));
  std::array<int, 3> o{0, 0, 0};
  for (o[0] = -reach[0]; o[0] <= reach[0]; ++o[0]) {
    for (o[1] = -reach[1]; o[1] <= reach[1]; ++o[1]) {
      for (o[2] = -reach[2]; o[2] <= reach[2]; ++o[2]) {
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += std::pow(o[a] * grid.spacing(a), 2);
        if (r2 > 1.0 + 1e-12) continue;
        accumulate_shifted(grid, density, o, mass);
      }
    }
  }
  const double best = *std::max_element(mass.begin(), mass.end());
  return std::sqrt(std::max(0.0, best * grid.cell_volume()));
}

FieldState translate(const FieldState& state, const LatticeShift& shift) {
  const Grid& grid = state.grid();
  const auto& z = shift.z();
  ComplexField out(state.data().size());
  const std::size_t npts = grid.size();
  for (std::size_t c = 0; c < state.num_components(); ++c) {
    const auto src = state.component(c);
    for (std::size_t idx = 0; idx < npts; ++idx) {
      std::array<int, 3> ijk = grid.unravel(idx);
      for (int a = 0; a < grid.dim(); ++a) ijk[a] = (ijk[a] + z[a]) % grid.n(a);
      out[c * npts + grid.ravel(ijk)] = src[idx];
    }
  }
  return FieldState(state.model(), grid, std::move(out));
}

std::vector<double> x_norm_weights(ModelTag tag, const Grid& grid, std::size_t component) {
  std::vector<double> w(grid.size(), 1.0);
  if (component != 0) return w;
  const auto ksq = grid.k_squared();
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = tag == ModelTag::NBE ? 1.0 + ksq[i] * ksq[i] : 1.0 + ksq[i];
  }
  return w;
}

double x_inner(const FieldState& a, const FieldState& b) {
  require_same_grid(a, b);
  const Grid& grid = a.grid();
  double s = 0.0;
  for (std::size_t c = 0; c < a.num_components(); ++c) {
    const auto w = x_norm_weights(a.model(), grid, c);
    auto ah = spectral::forward(grid, a.component(c));
    auto bh = spectral::forward(grid, b.component(c));
    kernels::mul_real(w, ah);
    s += kernels::dot(kernels::as_reals(std::span<const cplx>(ah)),
                      kernels::as_reals(std::span<const cplx>(bh)));
  }
  return s * grid.cell_volume() * spectral::parseval_factor(grid);
}

double x_norm_of(const FieldState& state) {
  const Grid& grid = state.grid();
  double s = 0.0;
  for (std::size_t c = 0; c < state.num_components(); ++c) {
    const auto w = x_norm_weights(state.model(), grid, c);
    const auto h = spectral::forward(grid, state.component(c));
    s += kernels::weighted_norm2(w, h);
  }
  return std::sqrt(s * grid.cell_volume() * spectral::parseval_factor(grid));
}

FieldState translate_continuous(const FieldState& state, const std::vector<double>& shift) {
  const Grid& grid = state.grid();
  if (static_cast<int>(shift.size()) != grid.dim()) throw InvalidArgument("shift dimension mismatch");
  const auto f = axis_factors(grid, shift, false);
  ComplexField out;
  out.reserve(state.data().size());
  for (std::size_t c = 0; c < state.num_components(); ++c) {
    auto h = spectral::forward(grid, state.component(c));
    for (std::size_t idx = 0; idx < h.size(); ++idx) h[idx] *= factor_at(grid, f, idx);
    spectral::inverse_inplace(grid, h);
    out.insert(out.end(), h.begin(), h.end());
  }
  return FieldState(state.model(), grid, std::move(out));
}

OrbitAlignment align_orbit(const FieldState& a, const FieldState& b) {
  require_same_grid(a, b);
  const Grid& grid = a.grid();
  const bool complex_model = is_complex_model(a.model());
  const std::size_t npts = grid.size();
  const double norm_factor = grid.cell_volume() * spectral::parseval_factor(grid);

  // P_k = sum_c w_c(k) ahat_c(k) conj(bhat_c(k)).
  std::vector<ComplexField> ah(a.num_components()), bh(a.num_components());
  std::vector<std::vector<double>> weights(a.num_components());
  ComplexField cross(npts, cplx(0.0));
  for (std::size_t c = 0; c < a.num_components(); ++c) {
    weights[c] = x_norm_weights(a.model(), grid, c);
    ah[c] = spectral::forward(grid, a.component(c));
    bh[c] = spectral::forward(grid, b.component(c));
    for (std::size_t k = 0; k < npts; ++k) cross[k] += weights[c][k] * ah[c][k] * std::conj(bh[c][k]);
  }

  // Coarse: S(z) = N * IDFT(P)[z] for every grid shift z.
  ComplexField corr = spectral::inverse(grid, cross);
  auto score = [&](cplx v) { return complex_model ? std::abs(v) : v.real(); };
  std::size_t best = 0;
  for (std::size_t z = 1; z < npts; ++z) {
    if (score(corr[z]) > score(corr[best])) best = z;
  }
  const auto zi = grid.unravel(best);

  OrbitAlignment result;
  result.grid_shift.assign(grid.dim(), 0);
  for (int a_ = 0; a_ < grid.dim(); ++a_) {
    const int n = grid.n(a_);
    result.grid_shift[a_] = zi[a_] <= n / 2 ? zi[a_] : zi[a_] - n;
  }
  const double grid_phase = complex_model && std::abs(corr[best]) > 0.0 ? std::arg(corr[best]) : 0.0;
  const FieldState aligned = phase_rotated(translate(b, LatticeShift(grid, result.grid_shift)), grid_phase);
  const double d_grid = x_norm_of(add_scaled(a, -1.0, aligned));
  result.distance = d_grid;
  result.phase = grid_phase;
  result.shift.assign(grid.dim(), 0.0);
  for (int a_ = 0; a_ < grid.dim(); ++a_) result.shift[a_] = result.grid_shift[a_] * grid.spacing(a_);
  if (d_grid == 0.0 || std::abs(corr[best]) == 0.0) return result;

  // Fine: continuous shift within one cell of the best grid shift.
  std::vector<double> s = result.shift;
  auto correlation_at = [&](const std::vector<double>& shift) {
    const auto f = axis_factors(grid, shift, true);
    cplx acc(0.0);
    for (std::size_t k = 0; k < npts; ++k) acc += cross[k] * factor_at(grid, f, k);
    return acc;
  };
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int a_ = 0; a_ < grid.dim(); ++a_) {
      const double h = grid.spacing(a_);
      auto objective = [&](double x) {
        std::vector<double> trial = s;
        trial[a_] = x;
        return score(correlation_at(trial));
      };
      s[a_] = golden_maximize(objective, s[a_] - h, s[a_] + h, 1e-11 * h);
    }
  }
  const cplx sc = correlation_at(s);
  const double fine_phase = complex_model ? std::arg(sc) : 0.0;
  const auto f = axis_factors(grid, s, false);
  const cplx rot = std::polar(1.0, fine_phase);
  double d2 = 0.0;
  for (std::size_t c = 0; c < a.num_components(); ++c) {
    for (std::size_t k = 0; k < npts; ++k) {
      d2 += weights[c][k] * std::norm(ah[c][k] - rot * factor_at(grid, f, k) * bh[c][k]);
    }
  }
  const double d_fine = std::sqrt(std::max(0.0, d2 * norm_factor));
  if (d_fine < d_grid) {
    result.distance = d_fine;
    result.shift = s;
    result.phase = fine_phase;
  }
  return result;
}

double orbit_distance(const FieldState& a, const FieldState& b) { return align_orbit(a, b).distance; }

FieldState apply_alignment(const FieldState& b, const OrbitAlignment& al) {
  return phase_rotated(translate_continuous(b, al.shift), al.phase);
}

}  // namespace hylo
