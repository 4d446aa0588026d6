#include "hylo/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "hylo/errors.hpp"
#include "hylo/kernels.hpp"

namespace hylo::spectral {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(const std::vector<int>& shape) {
    n_ = 1;
    for (int s : shape) n_ *= static_cast<std::size_t>(s);
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf_ = fftw_alloc_complex(n_);
    if (buf_ == nullptr) throw NumericalFailure("FFTW buffer allocation failed");
    const int rank = static_cast<int>(shape.size());
    fwd_ = fftw_plan_dft(rank, shape.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(rank, shape.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (fwd_ == nullptr || bwd_ == nullptr) throw NumericalFailure("FFTW planning failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  void run(std::span<cplx> data, bool forward) {
    std::memcpy(buf_, data.data(), n_ * sizeof(cplx));
    fftw_execute(forward ? fwd_ : bwd_);
    std::memcpy(static_cast<void*>(data.data()), buf_, n_ * sizeof(cplx));
  }

 private:
  std::size_t n_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

Plan& plan_for(const Grid& grid) {
  thread_local std::map<std::vector<int>, std::unique_ptr<Plan>> cache;
  auto shape = grid.shape();
  auto it = cache.find(shape);
  if (it == cache.end()) it = cache.emplace(shape, std::make_unique<Plan>(shape)).first;
  return *it->second;
}

void check_size(const Grid& grid, std::size_t n) {
  if (n != grid.size()) throw InvalidArgument("field size does not match grid");
}

}  // namespace

void forward_inplace(const Grid& grid, std::span<cplx> f) {
  check_size(grid, f.size());
  plan_for(grid).run(f, true);
}

void inverse_inplace(const Grid& grid, std::span<cplx> fhat) {
  check_size(grid, fhat.size());
  plan_for(grid).run(fhat, false);
  kernels::scale(1.0 / static_cast<double>(grid.size()), kernels::as_reals(fhat));
}

ComplexField forward(const Grid& grid, std::span<const cplx> f) {
  ComplexField out(f.begin(), f.end());
  forward_inplace(grid, out);
  return out;
}

ComplexField inverse(const Grid& grid, std::span<const cplx> fhat) {
  ComplexField out(fhat.begin(), fhat.end());
  inverse_inplace(grid, out);
  return out;
}

ComplexField derivative(const Grid& grid, std::span<const cplx> f, int axis, int order) {
  if (order != 1 && order != 2 && order != 4) {
    throw InvalidArgument("spectral derivative order must be 1, 2 or 4");
  }
  if (axis < 0 || axis >= grid.dim()) throw InvalidArgument("derivative axis out of range");
  ComplexField fhat = forward(grid, f);
  const auto k = grid.wavenumbers(axis);
  for (std::size_t idx = 0; idx < fhat.size(); ++idx) {
    const int i = static_cast<int>((idx / grid.stride(axis)) % grid.n(axis));
    const double ka = k[i];
    switch (order) {
      case 1:
        fhat[idx] = grid.is_nyquist(axis, i) ? cplx(0.0) : cplx(-ka * fhat[idx].imag(), ka * fhat[idx].real());
        break;
      case 2: fhat[idx] *= -(ka * ka); break;
      case 4: fhat[idx] *= (ka * ka) * (ka * ka); break;
    }
  }
  inverse_inplace(grid, fhat);
  return fhat;
}

ComplexField laplacian(const Grid& grid, std::span<const cplx> f) {
  ComplexField fhat = forward(grid, f);
  std::vector<double> m(grid.k_squared().begin(), grid.k_squared().end());
  for (auto& v : m) v = -v;
  kernels::mul_real(m, fhat);
  inverse_inplace(grid, fhat);
  return fhat;
}

ComplexField apply_multiplier(const Grid& grid, std::span<const cplx> f,
                              std::span<const double> multiplier) {
  ComplexField fhat = forward(grid, f);
  kernels::mul_real(multiplier, fhat);
  inverse_inplace(grid, fhat);
  return fhat;
}

}  // namespace hylo::spectral
