#include "rlab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double* row = a.data() + i * dim;
    for (std::size_t j = i + 1; j < dim; ++j) s += row[j] * row[j];
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t dim, double rel_tol,
                            std::size_t max_sweeps) {
  if (a.size() != dim * dim) throw std::invalid_argument("matrix size does not match dimension");

  // vt holds Vᵀ so that each rotation touches two contiguous rows.
  std::vector<double> vt(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) vt[i * dim + i] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double target = rel_tol * std::max(frob, 1.0);

  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * dim + j]; };

  std::size_t sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a, dim) <= target) break;
    for (std::size_t p = 0; p + 1 < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Once the rotation would not change the diagonal in floating
        // point, the entry is annihilated directly.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          at(p, q) = 0.0;
          at(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double* rp = a.data() + p * dim;
        double* rq = a.data() + q * dim;
        for (std::size_t k = 0; k < dim; ++k) {
          const double akp = rp[k];
          const double akq = rq[k];
          rp[k] = c * akp - s * akq;
          rq[k] = s * akp + c * akq;
        }
        rp[p] = app - t * apq;
        rq[q] = aqq + t * apq;
        rp[q] = 0.0;
        rq[p] = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          if (k == p || k == q) continue;
          a[k * dim + p] = rp[k];
          a[k * dim + q] = rq[k];
        }

        double* vp = vt.data() + p * dim;
        double* vq = vt.data() + q * dim;
        for (std::size_t k = 0; k < dim; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_diagonal_norm(a, dim) > target) {
    throw ConvergenceError("Jacobi eigensolver did not converge within the sweep cap");
  }

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return at(i, i) > at(j, j); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.reserve(dim);
  out.vectors.resize(dim * dim);
  for (std::size_t k = 0; k < dim; ++k) {
    out.values.push_back(at(order[k], order[k]));
    std::copy_n(vt.begin() + static_cast<std::ptrdiff_t>(order[k] * dim), dim,
                out.vectors.begin() + static_cast<std::ptrdiff_t>(k * dim));
  }
  return out;
}

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t dim) {
  if (dim <= kJacobiLimit) return jacobi_eigen(std::move(a), dim);
  if (a.size() != dim * dim) throw std::invalid_argument("matrix size does not match dimension");
  const auto d = static_cast<Eigen::Index>(dim);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), d, d);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw ConvergenceError("tridiagonal QR did not converge");

  // Eigen returns ascending values with eigenvectors in columns.
  SymmetricEigen out;
  out.values.resize(dim);
  out.vectors.resize(dim * dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const auto src = static_cast<Eigen::Index>(dim - 1 - k);
    out.values[k] = solver.eigenvalues()[src];
    for (std::size_t i = 0; i < dim; ++i) {
      out.vectors[k * dim + i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
    }
  }
  return out;
}

}  // namespace rlab
