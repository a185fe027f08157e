#pragma once

// Dense inner loops used by the Gram/regression code and the simulator.
//
// Every kernel has a portable scalar reference in `jod::kernels::scalar` and,
// where the target supports it, a vectorized variant (AVX2+FMA on x86-64,
// NEON on AArch64). `active()` picks one table at first use based on the
// running CPU; set JOD_KERNEL=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace jod::kernels {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // x -= shift
  void (*shift)(double* x, double shift, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift(double* x, double shift, std::size_t n);
const KernelTable& table();
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define JOD_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift(double* x, double shift, std::size_t n);
const KernelTable& table();
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define JOD_HAVE_NEON_KERNELS 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift(double* x, double shift, std::size_t n);
const KernelTable& table();
}  // namespace neon
#endif

// True when the running CPU can execute the vectorized table.
bool vector_supported();

// Table selected for this process; fixed after the first call.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline void shift(std::span<double> x, double s) { active().shift(x.data(), s, x.size()); }

}  // namespace jod::kernels
