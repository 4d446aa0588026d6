// NEON kernels (aarch64 only; Advanced SIMD is mandatory there).

#include "hylo/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace hylo::kernels::neon {
namespace {

double sum_impl(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vld1q_f64(x + i));
    a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(a + i), vld1q_f64(b + i));
    a1 = vfmaq_f64(a1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_norm2_impl(const double* w, const cplx* z, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  double s = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vld1q_f64(zr + 2 * i);
    const float64x2_t q = vld1q_f64(zr + 2 * i + 2);
    const float64x2_t m = vpaddq_f64(vmulq_f64(p, p), vmulq_f64(q, q));
    s += vaddvq_f64(vmulq_f64(vld1q_f64(w + i), m));
  }
  for (; i < n; ++i) {
    const double re = zr[2 * i], im = zr[2 * i + 1];
    s += w[i] * (re * re + im * im);
  }
  return s;
}

void axpy_impl(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(av, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale_impl(double alpha, double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = alpha * x[i];
}

void mul_real_impl(const double* m, cplx* z, std::size_t n) {
  double* zr = reinterpret_cast<double*>(z);
  for (std::size_t i = 0; i < n; ++i) {
    vst1q_f64(zr + 2 * i, vmulq_f64(vld1q_f64(zr + 2 * i), vdupq_n_f64(m[i])));
  }
}

void mul_complex_impl(const cplx* a, cplx* z, std::size_t n) {
  const double* ar = reinterpret_cast<const double*>(a);
  double* zr = reinterpret_cast<double*>(z);
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t x = vld1q_f64(zr + 2 * i);
    const float64x2_t y = vld1q_f64(ar + 2 * i);
    const float64x2_t t1 = vmulq_f64(x, vdupq_laneq_f64(y, 0));
    const float64x2_t t2 = vmulq_f64(vextq_f64(x, x, 1), vdupq_laneq_f64(y, 1));
    vst1q_f64(zr + 2 * i, vaddq_f64(t1, vmulq_f64(t2, sign)));
  }
}

void abs2_impl(const cplx* z, double* out, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vld1q_f64(zr + 2 * i);
    const float64x2_t q = vld1q_f64(zr + 2 * i + 2);
    vst1q_f64(out + i, vpaddq_f64(vmulq_f64(p, p), vmulq_f64(q, q)));
  }
  for (; i < n; ++i) {
    const double re = zr[2 * i], im = zr[2 * i + 1];
    out[i] = re * re + im * im;
  }
}

constexpr KernelTable kTable{sum_impl,  dot_impl,      weighted_norm2_impl,
                             axpy_impl, scale_impl,    mul_real_impl,
                             mul_complex_impl, abs2_impl};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace hylo::kernels::neon
#endif
