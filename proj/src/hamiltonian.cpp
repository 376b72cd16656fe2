#include "nelson/hamiltonian.hpp"

#include <cmath>

namespace nelson {

namespace {

bool uv_active(const ShellId& s, int n) {
  return s.kind == ShellId::UV && s.index <= n;
}
bool ir_active(const ShellId& s, int m) {
  return s.kind == ShellId::IR && s.index <= m;
}

std::array<SpMat, 3> momentum_residual(const FockBasis& basis, const Vec3& P) {
  FreeFieldOps f = free_field_ops(basis);
  SpMat id = identity_op(basis.dim());
  std::array<SpMat, 3> r;
  for (int a = 0; a < 3; ++a) r[a] = P[a] * id - f.pf[a];
  return r;
}

std::array<SpMat, 3> gross_B_ops(const FockBasis& basis, double g, int uv_n) {
  std::array<SpMat, 3> b;
  for (int a = 0; a < 3; ++a)
    b[a] = field_annihilator(
        basis, [&](const Mode& m) { return m.k[a] * gross_beta(m, g); },
        [&](const ShellId& s) { return uv_active(s, uv_n); });
  return b;
}

}  // namespace

double gross_beta(const Mode& mode, double g) {
  double w = mode.omega();
  return -g * form_factor(w) / (0.5 * w * w + w);
}

SpMat free_hamiltonian(const FockBasis& basis, const Vec3& P) {
  FreeFieldOps f = free_field_ops(basis);
  auto pmpf = momentum_residual(basis, P);
  SpMat h = f.hf;
  for (int a = 0; a < 3; ++a) h += SpMat(0.5 * pmpf[a] * pmpf[a]);
  return h;
}

FiberHamiltonian assemble_free(const ModeGrid& grid, const FockBasis& basis,
                               const Vec3& P, const CutoffSchedule& schedule) {
  (void)grid;
  FiberHamiltonian h;
  h.op = free_hamiltonian(basis, P);
  h.P = P;
  h.variant = HamiltonianVariant::Free;
  h.g = 0.0;
  h.kappa = schedule.params().kappa;
  return h;
}

FiberHamiltonian assemble_bare(const ModeGrid& grid, const FockBasis& basis,
                               const Vec3& P, double g, int uv_n, int ir_m,
                               const CutoffSchedule& schedule) {
  if (uv_n > grid.n_uv || ir_m > grid.m_ir)
    throw DomainError("assemble_bare: cutoffs beyond grid coverage");
  FiberHamiltonian h;
  h.op = free_hamiltonian(basis, P);
  h.op += g * field_op(
                  basis, [](const Mode& m) { return form_factor(m.omega()); },
                  [&](const ShellId& s) {
                    return uv_active(s, uv_n) || ir_active(s, ir_m);
                  });
  h.P = P;
  h.uv_n = uv_n;
  h.ir_m = ir_m;
  h.variant = HamiltonianVariant::Bare;
  h.g = g;
  h.kappa = schedule.params().kappa;
  h.vself_value =
      uv_n > 0 ? vself(schedule.sigma(uv_n), schedule.params().kappa, g) : 0.0;
  return h;
}

GrossData assemble_gross_data(const ModeGrid& grid, const FockBasis& basis,
                              double g, int uv_n,
                              const CutoffSchedule& schedule) {
  GrossData d;
  auto in_uv = [&](const ShellId& s) { return uv_active(s, uv_n); };
  SpMat t_annih = field_annihilator(
      basis, [&](const Mode& m) { return gross_beta(m, g); }, in_uv);
  d.T = t_annih - SpMat(t_annih.transpose());
  d.B = gross_B_ops(basis, g, uv_n);
  d.v_self =
      uv_n > 0 ? vself(schedule.sigma(uv_n), schedule.params().kappa, g) : 0.0;
  d.v_self_discrete = 0.0;
  for (int i = 0; i < basis.mode_count(); ++i) {
    const Mode& m = basis.mode(i);
    if (!in_uv(m.shell)) continue;
    double w = m.omega();
    d.v_self_discrete -=
        g * g * form_factor(w) * form_factor(w) * m.w / (0.5 * w * w + w);
  }
  // The P*Id part drops out of the commutators, so S carries no explicit P.
  auto pmpf = momentum_residual(basis, Vec3::Zero());
  SpMat s(basis.dim(), basis.dim());
  for (int a = 0; a < 3; ++a) {
    SpMat bdag = SpMat(d.B[a].transpose());
    s += SpMat(d.B[a] * pmpf[a]) - SpMat(pmpf[a] * d.B[a]);
    s += SpMat(pmpf[a] * bdag) - SpMat(bdag * pmpf[a]);
    s += SpMat(d.B[a] * bdag) - SpMat(bdag * d.B[a]);
  }
  d.S = -0.5 * s;
  return d;
}

FiberHamiltonian assemble_gross(const ModeGrid& grid, const FockBasis& basis,
                                const Vec3& P, double g, int uv_n, int ir_m,
                                const CutoffSchedule& schedule) {
  if (uv_n > grid.n_uv || ir_m > grid.m_ir)
    throw DomainError("assemble_gross: cutoffs beyond grid coverage");
  FiberHamiltonian h;
  h.op = free_hamiltonian(basis, P);
  auto b_ops = gross_B_ops(basis, g, uv_n);
  auto pmpf = momentum_residual(basis, P);
  for (int a = 0; a < 3; ++a) {
    SpMat b = b_ops[a];
    SpMat bdag = SpMat(b.transpose());
    h.op += SpMat(0.5 * (SpMat(b * b) + SpMat(bdag * bdag)));
    h.op += SpMat(bdag * b);
    h.op -= SpMat(pmpf[a] * b) + SpMat(bdag * pmpf[a]);
  }
  h.op += g * field_op(
                  basis, [](const Mode& m) { return form_factor(m.omega()); },
                  [&](const ShellId& s) { return ir_active(s, ir_m); });
  h.P = P;
  h.uv_n = uv_n;
  h.ir_m = ir_m;
  h.variant = HamiltonianVariant::Gross;
  h.g = g;
  h.kappa = schedule.params().kappa;
  h.vself_value =
      uv_n > 0 ? vself(schedule.sigma(uv_n), schedule.params().kappa, g) : 0.0;
  return h;
}

SpMat uv_slice_op(const ModeGrid& grid, const FockBasis& basis, const Vec3& P,
                  double g, int n, const CutoffSchedule& schedule) {
  (void)grid;
  if (n < 1) throw DomainError("uv_slice_op: n >= 1 required");
  auto in_slice = [&](const ShellId& s) {
    return s.kind == ShellId::UV && s.index == n;
  };
  auto in_older = [&](const ShellId& s) { return uv_active(s, n - 1); };
  auto beta_k = [&](int a) {
    return [a, g](const Mode& m) { return m.k[a] * gross_beta(m, g); };
  };
  auto pmpf = momentum_residual(basis, P);
  (void)schedule;
  SpMat acc(basis.dim(), basis.dim());
  for (int a = 0; a < 3; ++a) {
    SpMat b_new = field_annihilator(basis, beta_k(a), in_slice);
    SpMat b_old = field_annihilator(basis, beta_k(a), in_older);
    SpMat b_new_dag = SpMat(b_new.transpose());
    SpMat b_old_dag = SpMat(b_old.transpose());
    acc += SpMat(0.5 * (SpMat(b_new * b_new) + SpMat(b_new_dag * b_new_dag)));
    acc += SpMat(b_old * b_new) + SpMat(b_new_dag * b_old_dag);
    acc -= SpMat(pmpf[a] * b_new) + SpMat(b_new_dag * pmpf[a]);
    acc += SpMat(b_new_dag * b_new);
    acc += SpMat(b_old_dag * b_new) + SpMat(b_new_dag * b_old);
  }
  return acc;
}

SpMat ir_slice_op(const ModeGrid& grid, const FockBasis& basis, double g,
                  int m) {
  (void)grid;
  if (m < 1) throw DomainError("ir_slice_op: m >= 1 required");
  return g * field_op(
                 basis, [](const Mode& mo) { return form_factor(mo.omega()); },
                 [&](const ShellId& s) {
                   return s.kind == ShellId::IR && s.index == m;
                 });
}

FiberHamiltonian shift_momentum(const FiberHamiltonian& h, const ModeGrid& grid,
                                const FockBasis& basis, const Vec3& k,
                                const CutoffSchedule& schedule) {
  Vec3 p_new = h.P - k;
  switch (h.variant) {
    case HamiltonianVariant::Free:
      return assemble_free(grid, basis, p_new, schedule);
    case HamiltonianVariant::Bare:
      return assemble_bare(grid, basis, p_new, h.g, h.uv_n, h.ir_m, schedule);
    case HamiltonianVariant::Gross:
      return assemble_gross(grid, basis, p_new, h.g, h.uv_n, h.ir_m, schedule);
  }
  throw DomainError("shift_momentum: unknown variant");
}

}  // namespace nelson
