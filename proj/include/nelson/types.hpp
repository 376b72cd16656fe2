#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nelson {

using Index = std::int64_t;
using Real = double;
using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using VectorX = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;
using MatrixX = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;

// Operators are real symmetric throughout: all couplings are real, so the
// assembled matrices carry real entries and hermiticity reduces to symmetry.
using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;
using Triplet = Eigen::Triplet<double>;

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_symmetric(const SpMat& a, double tol = 1e-12) {
  SpMat d = SpMat(a.transpose()) - a;
  double scale = a.coeffs().size() ? a.coeffs().cwiseAbs().maxCoeff() : 1.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it)
      if (std::abs(it.value()) > tol * std::max(1.0, scale)) return false;
  return true;
}

inline double operator_inf_norm(const SpMat& a) {
  VectorX row_sums = VectorX::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  return a.rows() ? row_sums.maxCoeff() : 0.0;
}

}  // namespace nelson
