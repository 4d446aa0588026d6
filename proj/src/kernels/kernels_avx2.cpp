// AVX2 kernels. This translation unit is compiled with -mavx2 -mfma and is
// only entered after the dispatcher has confirmed CPU support.

#include "hylo/kernels.hpp"

#include <immintrin.h>

namespace hylo::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_impl(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                         a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

// |z_k|^2 for four consecutive complex samples, in order.
inline __m256d abs2_4(const double* zr) {
  const __m256d p = _mm256_loadu_pd(zr);
  const __m256d q = _mm256_loadu_pd(zr + 4);
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(p, p), _mm256_mul_pd(q, q));
  return _mm256_permute4x64_pd(h, 0xD8);
}

double weighted_norm2_impl(const double* w, const cplx* z, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), abs2_4(zr + 2 * i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double re = zr[2 * i], im = zr[2 * i + 1];
    s += w[i] * (re * re + im * im);
  }
  return s;
}

void axpy_impl(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale_impl(double alpha, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = alpha * x[i];
}

void mul_real_impl(const double* m, cplx* z, std::size_t n) {
  double* zr = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mv = _mm256_loadu_pd(m + i);
    const __m256d lo = _mm256_permute4x64_pd(mv, 0x50);
    const __m256d hi = _mm256_permute4x64_pd(mv, 0xFA);
    _mm256_storeu_pd(zr + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(zr + 2 * i), lo));
    _mm256_storeu_pd(zr + 2 * i + 4,
                     _mm256_mul_pd(_mm256_loadu_pd(zr + 2 * i + 4), hi));
  }
  for (; i < n; ++i) {
    zr[2 * i] = zr[2 * i] * m[i];
    zr[2 * i + 1] = zr[2 * i + 1] * m[i];
  }
}

void mul_complex_impl(const cplx* a, cplx* z, std::size_t n) {
  const double* ar = reinterpret_cast<const double*>(a);
  double* zr = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(zr + 2 * i);
    const __m256d y = _mm256_loadu_pd(ar + 2 * i);
    const __m256d yr = _mm256_movedup_pd(y);
    const __m256d yi = _mm256_permute_pd(y, 0xF);
    const __m256d t1 = _mm256_mul_pd(x, yr);
    const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(x, 0x5), yi);
    _mm256_storeu_pd(zr + 2 * i, _mm256_addsub_pd(t1, t2));
  }
  for (; i < n; ++i) {
    const double xr = zr[2 * i], xi = zr[2 * i + 1];
    const double yr = ar[2 * i], yi = ar[2 * i + 1];
    zr[2 * i] = xr * yr - xi * yi;
    zr[2 * i + 1] = xi * yr + xr * yi;
  }
}

void abs2_impl(const cplx* z, double* out, std::size_t n) {
  const double* zr = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, abs2_4(zr + 2 * i));
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

}  // namespace hylo::kernels::avx2
