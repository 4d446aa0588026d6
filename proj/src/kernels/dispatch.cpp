#include "hylo/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hylo::kernels {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  Backend best = Backend::scalar;
  if (backend_supported(Backend::avx2)) best = Backend::avx2;
  if (backend_supported(Backend::neon)) best = Backend::neon;
  if (const char* env = std::getenv("HYLO_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
    if (want == "neon" && backend_supported(Backend::neon)) return Backend::neon;
  }
  return best;
}

struct State {
  std::atomic<Backend> backend;
  std::atomic<const KernelTable*> table;
  State() {
    const Backend b = detect();
    backend.store(b);
    table.store(&table_for(b));
  }
};

State& state() {
  static State s;
  return s;
}

const KernelTable& active() { return *state().table.load(std::memory_order_relaxed); }

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Backend b) {
  switch (b) {
    case Backend::scalar: return scalar::table();
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
      if (cpu_has_avx2()) return avx2::table();
      break;
#endif
#if defined(__aarch64__)
    case Backend::neon: return neon::table();
#endif
    default: break;
  }
  throw std::invalid_argument("SIMD backend not supported on this CPU: " +
                              std::string(backend_name(b)));
}

Backend active_backend() { return state().backend.load(); }

void set_backend(Backend b) {
  const KernelTable& t = table_for(b);
  state().backend.store(b);
  state().table.store(&t);
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double weighted_norm2(std::span<const double> w, std::span<const cplx> z) {
  check_sizes(w.size(), z.size());
  return active().weighted_norm2(w.data(), z.data(), z.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

void mul_real(std::span<const double> m, std::span<cplx> z) {
  check_sizes(m.size(), z.size());
  active().mul_real(m.data(), z.data(), z.size());
}

void mul_complex(std::span<const cplx> a, std::span<cplx> z) {
  check_sizes(a.size(), z.size());
  active().mul_complex(a.data(), z.data(), z.size());
}

void abs2(std::span<const cplx> z, std::span<double> out) {
  check_sizes(z.size(), out.size());
  active().abs2(z.data(), out.data(), z.size());
}

}  // namespace hylo::kernels
