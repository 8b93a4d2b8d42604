#pragma once

#include <cstddef>
#include <vector>

namespace rlab {

struct SymmetricEigen {
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // row k is the unit eigenvector for values[k]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix (row-major,
/// dim × dim). Iterates sweeps until the off-diagonal Frobenius norm falls
/// below rel_tol · ‖A‖_F; throws ConvergenceError after max_sweeps.
SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t dim, double rel_tol = 1e-15,
                            std::size_t max_sweeps = 100);

/// Matrices up to this dimension go through jacobi_eigen; larger ones use
/// Householder tridiagonalization with implicit QR (Eigen).
inline constexpr std::size_t kJacobiLimit = 256;

/// Dense symmetric eigendecomposition with the same layout as jacobi_eigen.
/// `sweeps` is 0 on the tridiagonal path.
SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t dim);

}  // namespace rlab
