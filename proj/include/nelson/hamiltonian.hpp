#pragma once

#include <array>

#include "nelson/fock.hpp"
#include "nelson/grid.hpp"
#include "nelson/schedule.hpp"
#include "nelson/types.hpp"

namespace nelson {

enum class HamiltonianVariant { Bare, Free, Gross };

struct FiberHamiltonian {
  SpMat op;
  Vec3 P = Vec3::Zero();
  int uv_n = 0;
  int ir_m = 0;
  HamiltonianVariant variant = HamiltonianVariant::Free;
  double g = 0.0;
  double kappa = 0.0;
  double vself_value = 0.0;  // continuum counterterm already removed from op
};

// Dressing data of the high-frequency Bogolyubov rotation: coefficients
// beta(k) = -g rho(k) / (k^2/2 + omega), the skew generator T, the vector
// annihilator B and the commutator collection S.
struct GrossData {
  SpMat T;                 // sum sqrt(w) beta (b - b^dag), UV support
  std::array<SpMat, 3> B;  // sum sqrt(w) k beta b, per component
  SpMat S;                 // -1/2 ([B,P-Pf] + [P-Pf,B^dag] + [B,B^dag])
  double v_self = 0.0;
  double v_self_discrete = 0.0;  // grid-sum version, reported for diagnostics
};

double gross_beta(const Mode& mode, double g);

// 1/2 (P - Pf)^2 + Hf on the basis (diagonal).
SpMat free_hamiltonian(const FockBasis& basis, const Vec3& P);

FiberHamiltonian assemble_free(const ModeGrid& grid, const FockBasis& basis,
                               const Vec3& P, const CutoffSchedule& schedule);

// Bare fiber Hamiltonian: free part plus the linear coupling g rho over all
// active shells (UV 1..uv_n and IR 1..ir_m).
FiberHamiltonian assemble_bare(const ModeGrid& grid, const FockBasis& basis,
                               const Vec3& P, double g, int uv_n, int ir_m,
                               const CutoffSchedule& schedule);

GrossData assemble_gross_data(const ModeGrid& grid, const FockBasis& basis,
                              double g, int uv_n,
                              const CutoffSchedule& schedule);

// High-frequency rotated Hamiltonian in normal-ordered form:
//   1/2 (P-Pf)^2 + Hf + 1/2 (B^2 + B*^2) + B*.B - (P-Pf).B - B*.(P-Pf)
// plus the linear coupling on the active IR shells. The counterterm is
// already subtracted, so ground-state energies are the renormalized E'.
FiberHamiltonian assemble_gross(const ModeGrid& grid, const FockBasis& basis,
                                const Vec3& P, double g, int uv_n, int ir_m,
                                const CutoffSchedule& schedule);

// Interaction slice [sigma_{n-1}, sigma_n) in normal-ordered form; equals
// assemble_gross(n) - assemble_gross(n-1) on a common basis, exactly.
SpMat uv_slice_op(const ModeGrid& grid, const FockBasis& basis, const Vec3& P,
                  double g, int n, const CutoffSchedule& schedule);

// Interaction slice (tau_m, tau_{m-1}]: the linear coupling on IR shell m.
SpMat ir_slice_op(const ModeGrid& grid, const FockBasis& basis, double g,
                  int m);

FiberHamiltonian shift_momentum(const FiberHamiltonian& h, const ModeGrid& grid,
                                const FockBasis& basis, const Vec3& k,
                                const CutoffSchedule& schedule);

}  // namespace nelson
