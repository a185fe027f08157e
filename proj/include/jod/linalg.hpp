#pragma once

// Small dense SPD helpers shared by the scoring and oracle code. Matrices are
// row-major n x n in a flat vector.

#include <cstddef>
#include <span>
#include <vector>

namespace jod::linalg {

enum class FactorStatus { ok, singular };

// In-place lower Cholesky factor of the SPD matrix `a`. Fails with `singular`
// when a pivot falls below `relative_pivot_tol * max diagonal`. The strict
// upper triangle is left untouched.
FactorStatus cholesky(std::span<double> a, int n, double relative_pivot_tol);

// Solves L y = b in place for the lower factor produced by `cholesky`.
void forward_substitute(std::span<const double> l, int n, std::span<double> b);
// Solves L^T x = y in place.
void back_substitute(std::span<const double> l, int n, std::span<double> y);

// Solves A x = b given the Cholesky factor of A.
std::vector<double> cholesky_solve(std::span<const double> l, int n, std::span<const double> b);

}  // namespace jod::linalg
