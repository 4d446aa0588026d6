#pragma once

// Data-parallel inner loops shared by every functional and integrator.
//
// Each kernel has a scalar reference implementation (namespace `scalar`) and
// vectorized variants (AVX2 on x86-64, NEON on aarch64). The public entry
// points dispatch through a table chosen once at startup from CPUID and the
// HYLO_SIMD environment variable ("scalar", "avx2", "neon").
//
// Elementwise kernels are bitwise identical across backends: the vector code
// performs the same sequence of IEEE operations per element (no fused
// multiply-add). Reductions are only equal up to reassociation.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace hylo::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();
// Throws std::invalid_argument when the CPU cannot run `b`.
void set_backend(Backend b);

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
// sum_i w_i * |z_i|^2
double weighted_norm2(std::span<const double> w, std::span<const cplx> z);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
// z_i *= m_i (real multiplier per complex sample)
void mul_real(std::span<const double> m, std::span<cplx> z);
// z_i *= a_i
void mul_complex(std::span<const cplx> a, std::span<cplx> z);
// out_i = |z_i|^2
void abs2(std::span<const cplx> z, std::span<double> out);

// Complex spans viewed as interleaved doubles.
inline std::span<const double> as_reals(std::span<const cplx> z) {
  return {reinterpret_cast<const double*>(z.data()), 2 * z.size()};
}
inline std::span<double> as_reals(std::span<cplx> z) {
  return {reinterpret_cast<double*>(z.data()), 2 * z.size()};
}

struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_norm2)(const double*, const cplx*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*mul_real)(const double*, cplx*, std::size_t);
  void (*mul_complex)(const cplx*, cplx*, std::size_t);
  void (*abs2)(const cplx*, double*, std::size_t);
};

namespace scalar {
const KernelTable& table();
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(__aarch64__)
namespace neon {
const KernelTable& table();
}
#endif

// Table for an explicit backend (equivalence tests compare these directly).
const KernelTable& table_for(Backend b);

}  // namespace hylo::kernels
