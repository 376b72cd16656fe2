#pragma once

#include <memory>
#include <optional>

#include "nelson/schedule.hpp"
#include "nelson/types.hpp"

namespace nelson {

struct SpectralOptions {
  Index dense_crossover = 2000;  // full eigendecomposition at or below this
  double ground_tol = 1e-9;      // residual target for eigenpairs
  double resolve_tol = 1e-10;    // relative residual target for shifted solves
  int max_lanczos = 500;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  double degenerate_gap = 1e-12;  // below this the step is considered degenerate
};

struct SpectralResult {
  double E0 = 0.0;
  double E1 = 0.0;
  double gap = 0.0;
  VectorX ground;
  double residual = 0.0;
  bool dense_path = true;
  int iterations = 0;
};

// Solver facade bound to one hermitian operator. The dense path keeps a full
// eigendecomposition and reuses it for every resolvent application; the
// iterative path runs Lanczos with full reorthogonalization and solves
// shifted systems by Krylov iteration with a sparse-LU fallback.
class SpectralEngine {
 public:
  explicit SpectralEngine(SpMat op, SpectralOptions opts = {});

  const SpMat& op() const { return op_; }
  Index dim() const { return op_.rows(); }
  bool dense_path() const { return dense_; }

  SpectralResult ground_state() const;

  // Solves (op - z) x = v to relative residual resolve_tol.
  VectorXc resolve(Complex z, const VectorXc& v) const;

  // -(1/2 pi i) contour integral of the resolvent applied to v. Conjugate
  // node pairs are combined, so the result is exactly real.
  VectorX contour_project(const Contour& contour, const VectorX& v) const;

  // Exact on the dense path; on the iterative path a solve-based estimate.
  double distance_to_spectrum(Complex z) const;

  // Largest singular value of R^{1/2} slice_op R^{1/2} with R the resolvent
  // at z and the principal square root taken in the eigenbasis. Dense path
  // only; this is a validation diagnostic, not a production step.
  double neumann_contraction(const SpMat& slice_op, Complex z) const;

  // Dense path only: the full spectrum (ascending).
  const VectorX& eigenvalues() const;
  const MatrixX& eigenvectors() const;

 private:
  void ensure_dense_factorization() const;
  VectorXc resolve_dense(Complex z, const VectorXc& v) const;
  VectorXc resolve_iterative(Complex z, const VectorXc& v) const;

  SpMat op_;
  SpectralOptions opts_;
  bool dense_;
  mutable std::optional<Eigen::SelfAdjointEigenSolver<MatrixX>> eig_;
};

// Free-function forms of the spec surface.
SpectralResult ground_state(const SpMat& op, SpectralOptions opts = {});
VectorXc resolve(const SpMat& op, Complex z, const VectorXc& v,
                 SpectralOptions opts = {});
VectorX contour_project(const SpMat& op, const Contour& contour,
                        const VectorX& v, SpectralOptions opts = {});
double neumann_contraction(const SpMat& op_prev, const SpMat& slice_op,
                           Complex z, SpectralOptions opts = {});

}  // namespace nelson
