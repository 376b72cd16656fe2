#pragma once

#include <array>
#include <vector>

#include "nelson/hamiltonian.hpp"
#include "nelson/spectral.hpp"

namespace nelson {

// Soft-boson displacement coefficients alpha_m(Q, k) on the IR shells with
// tau_m < |k| <= kappa:  alpha = -g rho(k) / (omega (1 - khat.Q)).
struct DressingCoefficients {
  Vec3 Q = Vec3::Zero();
  int m = 0;
  double g = 0.0;
  std::vector<double> value;  // per grid mode, zero off support
};

DressingCoefficients alpha_coeffs(const ModeGrid& grid, const Vec3& Q, int m,
                                  double g);

struct DressingConstants {
  Vec3 C_k = Vec3::Zero();   // sum w k alpha^2
  double C_omega = 0.0;      // sum w omega alpha^2
  double C_rho = 0.0;        // 2 g sum w rho alpha
  double C_Pm = 0.0;         // P^2/2 - (P-Q)^2/2 - Q.C_k + C_omega + C_rho
};

DressingConstants dressing_constants(const ModeGrid& grid,
                                     const DressingCoefficients& coeffs,
                                     double g, const Vec3& P);

// Skew generator sum sqrt(w) alpha (b - b^dag) of the displacement.
SpMat displacement_generator(const FockBasis& basis,
                             const DressingCoefficients& coeffs);

// Dense W = exp(generator); exactly orthogonal on the truncation.
MatrixX bogolyubov_W(const FockBasis& basis,
                     const DressingCoefficients& coeffs);

// exp(s*G) v by scaled Taylor products; used on the sweep path where the
// dense exponential is not needed.
VectorX apply_exp(const SpMat& G, const VectorX& v, double s = 1.0);
VectorX apply_bogolyubov(const FockBasis& basis,
                         const DressingCoefficients& coeffs, const VectorX& v,
                         bool adjoint = false);

// Rotated Hamiltonian with both routes: direct conjugation W H' W^T and the
// structured normal-ordered right-hand side
//   1/2 Gamma^2 + Hf - Q.Pf + C_Pm + R,   Gamma = Pi - (P - Q - C_k),
// rebuilt independently from components. Their difference measures the
// truncation defect of the conjugation identities. For the current variant
// Q is the step's gradient; for the tilde variant it is the previous one.
struct DressedHamiltonian {
  MatrixX direct;
  MatrixX structured;
  double identity_residual = 0.0;       // Frobenius norm of the difference
  double identity_residual_low = 0.0;   // restricted to occupation <= N_max-2
  DressingConstants constants;
  std::array<SpMat, 3> A;
  SpMat L;
  std::array<SpMat, 3> Pi;
  std::array<SpMat, 3> Gamma;  // identity-centered: Pi - (P - Q - C_k)
  SpMat R;
  Vec3 Q = Vec3::Zero();
  Vec3 P = Vec3::Zero();
};

DressedHamiltonian assemble_dressed(const SpMat& h_prime,
                                    const FockBasis& basis,
                                    const GrossData& gross,
                                    const DressingCoefficients& coeffs,
                                    const Vec3& P, int ir_m);

// Pi = Pf + A + B + B^dag and the phi-centered Gamma = Pi - <Pi>_phi;
// also reports the deviation of <Pi>_phi from P - Q - C_k.
struct GammaOps {
  std::array<SpMat, 3> Pi;
  std::array<SpMat, 3> Gamma;
  Vec3 pi_expectation = Vec3::Zero();
  double exp_pi_residual = 0.0;
  double gamma_expectation = 0.0;  // max_i |<phi, Gamma_i phi>| / |phi|^2
};

GammaOps gamma_ops(const FockBasis& basis, const GrossData& gross,
                   const DressingCoefficients& coeffs, const Vec3& P,
                   const VectorX& phi);

struct DressedState {
  int m = 0;
  VectorX phi;
  VectorX phi_tilde;
  VectorX eta;
  double norm = 0.0;             // |phi| = |eta|
  double diff_tilde_prev = 0.0;  // |phi_tilde - phi_prev|
  double diff_phi_tilde = 0.0;   // |phi - phi_tilde|
  double diff_phi_prev = 0.0;    // |phi - phi_prev|
  double gamma_expectation = 0.0;
  double exp_pi_residual = 0.0;
  double gamma_sandwich = std::numeric_limits<double>::quiet_NaN();
  double gamma_sandwich_bound = std::numeric_limits<double>::quiet_NaN();
  double c_shift = 0.0;  // C~_{P,m} - C_{P,m-1} used for the shifted contour
  DressingConstants constants;
  std::vector<std::string> violations;
  bool ok = true;
};

struct DressedStepContext {
  const ModeGrid* grid = nullptr;
  const CutoffSchedule* schedule = nullptr;
  const FockBasis* basis = nullptr;        // basis at (n, m)
  const FockBasis* basis_prev = nullptr;   // basis at (n, m-1)
  const SpectralEngine* engine = nullptr;  // H'|n_m on basis
  const GrossData* gross = nullptr;        // on basis
  double e_prev = 0.0;                     // E'|n_{m-1}
  Vec3 grad_prev = Vec3::Zero();           // gradient at (n, m-1)
  Vec3 grad_cur = Vec3::Zero();            // gradient at (n, m)
  double g = 0.0;
  int m = 0;
  bool compute_sandwich = true;
};

// phi_tilde = Q~' phi_prev via the conjugated contour projection,
// phi = W_m(grad_cur) W_m(grad_prev)^dag phi_tilde, eta = W_m(grad_cur)^dag phi.
DressedState dressed_step(const DressedState& prev,
                          const DressedStepContext& ctx);

DressedState initial_dressed_state(const VectorX& psi_uv);

// Norm of the sandwiched k.Gamma resolvent at shift f_{P,m-1}(k) =
// k^2/2 + |k|(1 - gradE.khat); dense diagnostic.
double contraction_diagnostic(const SpectralEngine& h_prime_engine,
                              const FockBasis& basis, const GrossData& gross,
                              const DressingCoefficients& coeffs_prev,
                              const Vec3& P, const Vec3& grad_prev,
                              const Vec3& k_mode, Complex z);

double f_shift(const Vec3& grad_prev, const Vec3& k);

}  // namespace nelson
