#pragma once

#include <array>

namespace bsq {

/// Symmetric 3x3 matrix stored densely (row-major).
struct Sym3 {
  std::array<std::array<double, 3>, 3> a{};

  double operator()(int i, int j) const { return a[i][j]; }
  double& operator()(int i, int j) { return a[i][j]; }

  double max_abs_entry() const;
  double determinant() const;
  /// Largest |a_ij - a_ji|.
  double asymmetry() const;
};

/// Eigenvalues in ascending order.
///
/// Closed form via the trigonometric solution of the characteristic cubic;
/// falls back to cyclic Jacobi rotations near repeated roots, where the
/// closed form loses accuracy.
std::array<double, 3> eigenvalues(const Sym3& m);

/// Cyclic Jacobi eigenvalues (ascending). Slower, used as a cross-check.
std::array<double, 3> eigenvalues_jacobi(const Sym3& m);

}  // namespace bsq
