#include "jod/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "jod/kernels.hpp"

namespace jod::linalg {

FactorStatus cholesky(std::span<double> a, int n, double relative_pivot_tol) {
  const auto un = static_cast<std::size_t>(n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < un; ++i) max_diag = std::max(max_diag, a[i * un + i]);
  const double floor = relative_pivot_tol * max_diag;
  if (!(max_diag > 0.0) && n > 0) return FactorStatus::singular;
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < un; ++j) {
    double* row_j = a.data() + j * un;
    const double pivot = row_j[j] - k.dot(row_j, row_j, j);
    if (!(pivot > floor)) return FactorStatus::singular;
    const double ljj = std::sqrt(pivot);
    row_j[j] = ljj;
    for (std::size_t i = j + 1; i < un; ++i) {
      double* row_i = a.data() + i * un;
      row_i[j] = (row_i[j] - k.dot(row_i, row_j, j)) / ljj;
    }
  }
  return FactorStatus::ok;
}

void forward_substitute(std::span<const double> l, int n, std::span<double> b) {
  const auto un = static_cast<std::size_t>(n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < un; ++i) {
    const double* row = l.data() + i * un;
    b[i] = (b[i] - k.dot(row, b.data(), i)) / row[i];
  }
}

void back_substitute(std::span<const double> l, int n, std::span<double> y) {
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t ii = un; ii-- > 0;) {
    double acc = y[ii];
    for (std::size_t j = ii + 1; j < un; ++j) acc -= l[j * un + ii] * y[j];
    y[ii] = acc / l[ii * un + ii];
  }
}

std::vector<double> cholesky_solve(std::span<const double> l, int n, std::span<const double> b) {
  std::vector<double> x(b.begin(), b.end());
  forward_substitute(l, n, x);
  back_substitute(l, n, x);
  return x;
}

}  // namespace jod::linalg
