#include "jod/kernels.hpp"

namespace jod::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void shift(double* x, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] -= s;
}

const KernelTable& table() {
  static const KernelTable t{"scalar", &dot, &axpy, &sum, &shift};
  return t;
}

}  // namespace jod::kernels::scalar
