// Reference kernels. Compiled with -ffp-contract=off so the compiler cannot
// fuse multiply-adds; the vector backends reproduce these operation by
// operation for the elementwise kernels.

#include "hylo/kernels.hpp"

namespace hylo::kernels::scalar {
namespace {

double sum_impl(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_norm2_impl(const double* w, const cplx* z, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = zr[2 * i];
    const double im = zr[2 * i + 1];
    s += w[i] * (re * re + im * im);
  }
  return s;
}

void axpy_impl(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale_impl(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = alpha * x[i];
}

void mul_real_impl(const double* m, cplx* z, std::size_t n) {
  double* zr = reinterpret_cast<double*>(z);
  for (std::size_t i = 0; i < n; ++i) {
    zr[2 * i] = zr[2 * i] * m[i];
    zr[2 * i + 1] = zr[2 * i + 1] * m[i];
  }
}

void mul_complex_impl(const cplx* a, cplx* z, std::size_t n) {
  const double* ar = reinterpret_cast<const double*>(a);
  double* zr = reinterpret_cast<double*>(z);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = zr[2 * i], xi = zr[2 * i + 1];
    const double yr = ar[2 * i], yi = ar[2 * i + 1];
    zr[2 * i] = xr * yr - xi * yi;
    zr[2 * i + 1] = xi * yr + xr * yi;
  }
}

void abs2_impl(const cplx* z, double* out, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = zr[2 * i], im = zr[2 * i + 1];
    out[i] = re * re + im * im;
  }
}

constexpr KernelTable kTable{sum_impl,  dot_impl,      weighted_norm2_impl,
                             axpy_impl, scale_impl,    mul_real_impl,
                             mul_complex_impl, abs2_impl};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace hylo::kernels::scalar
