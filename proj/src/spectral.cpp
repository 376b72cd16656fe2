#include "nelson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <functional>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace nelson {

SpectralEngine::SpectralEngine(SpMat op, SpectralOptions opts)
    : op_(std::move(op)), opts_(opts) {
  if (op_.rows() != op_.cols()) throw DomainError("SpectralEngine: square operator required");
  dense_ = op_.rows() <= opts_.dense_crossover;
}

void SpectralEngine::ensure_dense_factorization() const {
  if (eig_) return;
  MatrixX dense = MatrixX(op_);
  eig_.emplace();
  eig_->compute(dense);
  if (eig_->info() != Eigen::Success)
    throw SolverError("dense eigendecomposition failed");
}

const VectorX& SpectralEngine::eigenvalues() const {
  if (!dense_) throw SolverError("eigenvalues: dense path only");
  ensure_dense_factorization();
  return eig_->eigenvalues();
}

const MatrixX& SpectralEngine::eigenvectors() const {
  if (!dense_) throw SolverError("eigenvectors: dense path only");
  ensure_dense_factorization();
  return eig_->eigenvectors();
}

namespace {

// Lanczos with full reorthogonalization on a caller-supplied apply. The two
// wanted Ritz pairs are the extremal ones of the applied operator; residuals
// are measured in the original operator through `residual_of`.
struct LanczosOutcome {
  double lambda0 = 0.0, lambda1 = 0.0;
  VectorX ritz0;
  double residual = 0.0;
  int iterations = 0;
  bool have_second = false;
};

LanczosOutcome lanczos_extremal(
    Index n, const std::function<VectorX(const VectorX&)>& apply,
    bool largest, const std::function<double(double)>& to_eigenvalue,
    const std::function<double(const VectorX&, double)>& residual_of,
    int max_iter, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorX v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  v.normalize();

  int m = static_cast<int>(std::min<Index>(max_iter, n));
  std::vector<VectorX> basis;
  basis.reserve(m);
  std::vector<double> alpha, beta;
  LanczosOutcome out;

  VectorX w;
  for (int j = 0; j < m; ++j) {
    basis.push_back(v);
    w = apply(v);
    double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    // two-pass reorthogonalization
    for (int pass = 0; pass < 2; ++pass)
      for (const VectorX& q : basis) w -= q.dot(w) * q;
    double b = w.norm();

    bool last = (j + 1 == m) || (b < 1e-14 && j + 1 >= 2);
    if (last || (j + 1) % 10 == 0) {
      int k = j + 1;
      MatrixX t = MatrixX::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<MatrixX> te(t);
      int i0 = largest ? k - 1 : 0;
      int i1 = largest ? k - 2 : 1;
      out.lambda0 = to_eigenvalue(te.eigenvalues()[i0]);
      out.have_second = k > 1;
      out.lambda1 = k > 1 ? to_eigenvalue(te.eigenvalues()[i1]) : out.lambda0;
      VectorX s0 = te.eigenvectors().col(i0);
      VectorX x = VectorX::Zero(n);
      for (int i = 0; i < k; ++i) x += s0[i] * basis[i];
      x.normalize();
      out.ritz0 = x;
      out.residual = residual_of(x, out.lambda0);
      out.iterations = k;
      double res1 = 0.0;
      if (k > 1) {
        VectorX s1 = te.eigenvectors().col(i1);
        VectorX x1 = VectorX::Zero(n);
        for (int i = 0; i < k; ++i) x1 += s1[i] * basis[i];
        x1.normalize();
        res1 = residual_of(x1, out.lambda1);
      }
      if ((out.residual <= tol && res1 <= std::max(tol, 1e3 * tol)) || last)
        return out;
    }
    beta.push_back(b);
    if (b < 1e-14) {
      // happy breakdown: restart in the orthogonal complement
      VectorX r(n);
      for (Index i = 0; i < n; ++i) r[i] = dist(rng);
      for (int pass = 0; pass < 2; ++pass)
        for (const VectorX& q : basis) r -= q.dot(r) * q;
      double nr = r.norm();
      if (nr < 1e-14) return out;  // exhausted the space
      v = r / nr;
      beta.back() = 0.0;
    } else {
      v = w / b;
    }
  }
  return out;
}

// Lower bound on the spectrum from Gershgorin discs.
double gershgorin_floor(const SpMat& op) {
  VectorX diag = VectorX::Zero(op.rows());
  VectorX offdiag = VectorX::Zero(op.rows());
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it) {
      if (it.row() == it.col())
        diag[it.row()] = it.value();
      else
        offdiag[it.row()] += std::abs(it.value());
    }
  return (diag - offdiag).minCoeff();
}

// Two lowest eigenpairs: plain Lanczos first (matvecs are cheap), and when
// the spectral spread starves it, a shift-invert restart on the factorized
// (op - sigma)^{-1} with sigma below the Gershgorin floor.
LanczosOutcome lanczos_smallest(const SpMat& op, int max_iter, double tol,
                                std::uint64_t seed) {
  auto residual_of = [&](const VectorX& x, double lambda) {
    return (op * x - lambda * x).norm();
  };
  LanczosOutcome plain = lanczos_extremal(
      op.rows(), [&](const VectorX& x) { return VectorX(op * x); },
      /*largest=*/false, [](double theta) { return theta; }, residual_of,
      max_iter, tol, seed);
  if (plain.residual <= tol) return plain;

  double sigma = gershgorin_floor(op);
  double scale = std::max(1.0, std::abs(sigma));
  sigma -= 1e-3 * scale;
  SpMat shifted = op;
  SpMat id(op.rows(), op.cols());
  id.setIdentity();
  shifted -= sigma * id;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) return plain;
  return lanczos_extremal(
      op.rows(), [&](const VectorX& x) { return VectorX(lu.solve(x)); },
      /*largest=*/true, [&](double theta) { return sigma + 1.0 / theta; },
      residual_of, max_iter, tol, seed);
}

}  // namespace

SpectralResult SpectralEngine::ground_state() const {
  SpectralResult r;
  r.dense_path = dense_;
  const double inf = std::numeric_limits<double>::infinity();
  if (dim() == 1) {
    r.E0 = op_.coeff(0, 0);
    r.E1 = inf;
    r.gap = inf;
    r.ground = VectorX::Ones(1);
    r.residual = 0.0;
    return r;
  }
  if (dense_) {
    ensure_dense_factorization();
    r.E0 = eig_->eigenvalues()[0];
    r.E1 = eig_->eigenvalues()[1];
    r.gap = r.E1 - r.E0;
    r.ground = eig_->eigenvectors().col(0);
    r.residual = (op_ * r.ground - r.E0 * r.ground).norm();
    return r;
  }
  LanczosOutcome out =
      lanczos_smallest(op_, opts_.max_lanczos, opts_.ground_tol, opts_.seed);
  if (out.residual > opts_.ground_tol)
    throw SolverError("ground_state: Lanczos did not converge, best residual " +
                      std::to_string(out.residual));
  r.E0 = out.lambda0;
  r.E1 = out.have_second ? out.lambda1 : inf;
  r.gap = r.E1 - r.E0;
  r.ground = out.ritz0;
  r.residual = out.residual;
  r.iterations = out.iterations;
  return r;
}

VectorXc SpectralEngine::resolve_dense(Complex z, const VectorXc& v) const {
  ensure_dense_factorization();
  const VectorX& lam = eig_->eigenvalues();
  const MatrixX& u = eig_->eigenvectors();
  double d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < lam.size(); ++i) d = std::min(d, std::abs(lam[i] - z));
  double scale = std::max(std::abs(lam[0]), std::abs(lam[lam.size() - 1]));
  if (d <= 1e-14 * std::max(1.0, scale))
    throw SolverError("resolve: shift within " + std::to_string(d) +
                      " of the spectrum");
  VectorXc y = u.transpose() * v;
  for (Index i = 0; i < y.size(); ++i) y[i] /= (lam[i] - z);
  return u * y;
}

VectorXc SpectralEngine::resolve_iterative(Complex z, const VectorXc& v) const {
  SpMatC shifted = op_.cast<Complex>();
  SpMatC id(dim(), dim());
  id.setIdentity();
  shifted -= z * id;
  Eigen::BiCGSTAB<SpMatC> solver;
  solver.setTolerance(opts_.resolve_tol * 0.1);
  solver.setMaxIterations(20000);
  solver.compute(shifted);
  VectorXc x = solver.solve(v);
  double rel = (shifted * x - v).norm() / std::max(v.norm(), 1e-300);
  if (rel > opts_.resolve_tol) {
    Eigen::SparseLU<SpMatC> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
      throw SolverError("resolve: shifted solve failed (near-singular shift?)");
    x = lu.solve(v);
    rel = (shifted * x - v).norm() / std::max(v.norm(), 1e-300);
    if (rel > opts_.resolve_tol)
      throw SolverError("resolve: residual " + std::to_string(rel) +
                        " above tolerance; distance estimate " +
                        std::to_string(v.norm() / std::max(x.norm(), 1e-300)));
  }
  return x;
}

VectorXc SpectralEngine::resolve(Complex z, const VectorXc& v) const {
  return dense_ ? resolve_dense(z, v) : resolve_iterative(z, v);
}

VectorX SpectralEngine::contour_project(const Contour& contour,
                                        const VectorX& v) const {
  const int nq = contour.n_quad;
  if (nq < 4) throw DomainError("contour_project: too few quadrature nodes");
  auto zs = contour.nodes();
  // -(1/2 pi i) sum_j R(z_j) v * dz_j with dz_j = i r e^{i th_j} (2 pi / N)
  // reduces to -(r/N) sum_j e^{i th_j} R(z_j) v. Conjugate node pairs give
  // conjugate solves for real data, so only half the nodes are solved.
  const double two_pi = 6.28318530717958647692;
  VectorXc acc = VectorXc::Zero(dim());
  VectorXc vc = v.cast<Complex>();
  bool conj_symmetric = std::abs(contour.shift.imag()) == 0.0 &&
                        std::abs(contour.center.imag()) == 0.0;
  for (int j = 0; j < nq; ++j) {
    int mate = (nq - j) % nq;
    Complex phase = std::exp(Complex(0.0, two_pi * j / nq));
    if (conj_symmetric && mate < j) continue;  // reuse the conjugate below
    VectorXc x = resolve(zs[j], vc);
    if (conj_symmetric && mate != j) {
      acc += phase * x + std::conj(phase) * x.conjugate();
    } else {
      acc += phase * x;
    }
  }
  acc *= -(contour.radius / nq);
  double imag_norm = acc.imag().norm();
  double real_norm = acc.real().norm();
  if (imag_norm > 1e-10 * std::max(1.0, real_norm) + 1e-12)
    throw SolverError("contour_project: non-real projection, |Im| = " +
                      std::to_string(imag_norm));
  return acc.real();
}

double SpectralEngine::distance_to_spectrum(Complex z) const {
  if (dense_) {
    ensure_dense_factorization();
    const VectorX& lam = eig_->eigenvalues();
    double d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < lam.size(); ++i) d = std::min(d, std::abs(lam[i] - z));
    return d;
  }
  VectorXc v = VectorXc::Zero(dim());
  std::mt19937_64 rng(opts_.seed ^ 0x5bd1e995u);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Index i = 0; i < dim(); ++i) v[i] = Complex(dist(rng), 0.0);
  v /= v.norm();
  VectorXc x = resolve(z, v);
  return 1.0 / std::max(x.norm(), 1e-300);
}

double SpectralEngine::neumann_contraction(const SpMat& slice_op,
                                           Complex z) const {
  if (!dense_)
    throw SolverError("neumann_contraction: dense path only");
  if (slice_op.rows() != dim())
    throw DomainError("neumann_contraction: dimension mismatch");
  if (slice_op.nonZeros() == 0) return 0.0;
  ensure_dense_factorization();
  const VectorX& lam = eig_->eigenvalues();
  const MatrixX& u = eig_->eigenvectors();
  double d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < lam.size(); ++i) d = std::min(d, std::abs(lam[i] - z));
  if (d <= 1e-12)
    throw SolverError("neumann_contraction: shift too close to the spectrum");
  VectorXc dinv(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    dinv[i] = 1.0 / std::sqrt(Complex(lam[i]) - z);  // principal branch
  MatrixX w = u.transpose() * (slice_op * u);
  // sigma_max of D W D by power iteration on (DWD)^* (DWD)
  VectorXc x = VectorXc::Ones(dim());
  x /= x.norm();
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    VectorXc y = dinv.asDiagonal() * (w * (dinv.asDiagonal() * x)).eval();
    VectorXc xn = dinv.conjugate().asDiagonal() *
                  (w.transpose() * (dinv.conjugate().asDiagonal() * y)).eval();
    double nx = xn.norm();
    if (nx == 0.0) return 0.0;
    xn /= nx;
    double s = std::sqrt(nx);
    bool converged = std::abs(s - sigma) <= 1e-10 * std::max(1.0, s) && it > 3;
    sigma = s;
    x = xn;
    if (converged) break;
  }
  return sigma;
}

SpectralResult ground_state(const SpMat& op, SpectralOptions opts) {
  return SpectralEngine(op, opts).ground_state();
}

VectorXc resolve(const SpMat& op, Complex z, const VectorXc& v,
                 SpectralOptions opts) {
  return SpectralEngine(op, opts).resolve(z, v);
}

VectorX contour_project(const SpMat& op, const Contour& contour,
                        const VectorX& v, SpectralOptions opts) {
  return SpectralEngine(op, opts).contour_project(contour, v);
}

double neumann_contraction(const SpMat& op_prev, const SpMat& slice_op,
                           Complex z, SpectralOptions opts) {
  return SpectralEngine(op_prev, opts).neumann_contraction(slice_op, z);
}

}  // namespace nelson
