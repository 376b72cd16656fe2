#include "nelson/multiscale.hpp"

#include <cmath>

namespace nelson {

SweepDriver::SweepDriver(const ModeGrid& grid, const CutoffSchedule& schedule,
                         SweepOptions opts)
    : grid_(&grid), schedule_(&schedule), opts_(std::move(opts)) {}

FockBasis SweepDriver::make_basis(int n, int m) const {
  return enumerate_basis(*grid_, grid_->active_modes(n, m),
                         opts_.n_max_occupation, opts_.per_mode_cap,
                         opts_.basis_hard_limit);
}

GroundStateRecord SweepDriver::initial_record() const {
  GroundStateRecord r;
  r.kind = "seed";
  r.n = 0;
  r.m = 0;
  r.P = schedule_->params().P;
  r.g = schedule_->params().g;
  r.E_prime = 0.5 * r.P.squaredNorm();
  r.grad_E = r.P;
  r.gap = std::numeric_limits<double>::infinity();
  FockBasis b = make_basis(0, 0);
  r.state = VectorX::Zero(b.dim());
  r.state[0] = 1.0;
  r.norm = 1.0;
  r.overlap_vacuum = 1.0;
  return r;
}

Vec3 grad_E(const VectorX& state, const Vec3& P, const FockBasis& basis,
            double g, int uv_n) {
  double n2 = state.squaredNorm();
  if (!(n2 > 0.0)) throw DomainError("grad_E: zero state");
  FreeFieldOps f = free_field_ops(basis);
  Vec3 expect = Vec3::Zero();
  for (int a = 0; a < 3; ++a) {
    SpMat b = field_annihilator(
        basis, [&](const Mode& m) { return m.k[a] * gross_beta(m, g); },
        [&](const ShellId& s) { return s.kind == ShellId::UV && s.index <= uv_n; });
    // <Pf + B + B^dag>: the state is real, so <B + B^dag> = 2 <state, B state>.
    expect[a] =
        (state.dot(f.pf[a] * state) + 2.0 * state.dot(b * state)) / n2;
  }
  return P - expect;
}

VectorX gross_backtransform(const VectorX& state, const GrossData& gross) {
  return apply_exp(gross.T, state, -1.0);
}

GroundStateRecord SweepDriver::step(const GroundStateRecord& prev, int n, int m,
                                    bool uv_kind, SweepTrace& trace) const {
  const ModelParams& pars = schedule_->params();
  GroundStateRecord rec;
  rec.kind = uv_kind ? "uv" : "ir";
  rec.n = n;
  rec.m = m;
  rec.P = pars.P;
  rec.g = pars.g;

  FockBasis basis = make_basis(n, m);
  FockBasis basis_prev = make_basis(prev.n, prev.m);
  VectorX prev_emb = basis.embed(basis_prev, prev.state);

  FiberHamiltonian h =
      assemble_gross(*grid_, basis, pars.P, pars.g, n, m, *schedule_);
  SpectralEngine engine(h.op, opts_.spectral);

  // Contour family: Gamma_n for UV steps at m = 0, Delta-type otherwise.
  // Adding a UV slice at an active IR level must respect the smaller IR gap,
  // so the joint extension also uses the current IR radius.
  Contour contour = (uv_kind && m == 0)
                        ? schedule_->contour_uv(n, prev.E_prime)
                        : schedule_->contour_ir(m, prev.E_prime);
  rec.contour = contour;
  rec.has_contour = true;

  rec.state = engine.contour_project(contour, prev_emb);
  rec.norm = rec.state.norm();

  SpectralResult gs = engine.ground_state();
  rec.E_prime = gs.E0;
  rec.gap = gs.gap;
  rec.solver_residual = gs.residual;
  rec.dense_path = gs.dense_path;
  if (gs.gap < opts_.spectral.degenerate_gap)
    throw SolverError("multiscale step: degenerate ground state (gap " +
                      std::to_string(gs.gap) + ")");

  rec.grad_E = grad_E(rec.state, pars.P, basis, pars.g, n);
  rec.overlap_vacuum = rec.norm > 0 ? std::abs(rec.state[0]) / rec.norm : 0.0;
  double diff = (rec.state - prev_emb).norm();
  if (uv_kind)
    rec.diff_prev_uv = diff;
  else
    rec.diff_prev_ir = diff;

  // Monitored bounds; violations flag the trace but the sweep continues.
  if (uv_kind && m == 0) {
    double xi = schedule_->gap_bound_uv(n);
    if (!(rec.gap >= xi)) rec.violations.push_back("gap_below_xi_n");
    if (!(rec.gap >= pars.kappa / 16.0))
      rec.violations.push_back("gap_below_kappa_16");
  } else {
    double bound = pars.zeta * schedule_->tau(m);
    if (!(rec.gap >= bound)) rec.violations.push_back("gap_below_zeta_tau_m");
  }
  if (!(rec.E_prime <= prev.E_prime + opts_.energy_monotone_tol))
    rec.violations.push_back("energy_not_monotone");
  if (!(rec.E_prime <= 0.5 * pars.P.squaredNorm() + opts_.energy_monotone_tol))
    rec.violations.push_back("energy_above_free_value");
  if (!(rec.norm <= 1.0 + 1e-10))
    rec.violations.push_back("chain_norm_above_one");
  if (std::abs(rec.grad_E.norm()) > 0.75 + 1e-12)
    rec.violations.push_back("gradient_above_three_quarters");

  if (opts_.record_neumann && engine.dense_path()) {
    SpMat slice = uv_kind ? uv_slice_op(*grid_, basis, pars.P, pars.g, n,
                                        *schedule_)
                          : ir_slice_op(*grid_, basis, pars.g, m);
    SpMat h_prev_op = assemble_gross(*grid_, basis, pars.P, pars.g,
                                     uv_kind ? n - 1 : n, uv_kind ? m : m - 1,
                                     *schedule_)
                          .op;
    SpectralEngine prev_engine(h_prev_op, opts_.spectral);
    Complex z = contour.center + contour.shift + Complex(0.0, contour.radius);
    rec.neumann_value = prev_engine.neumann_contraction(slice, z);
    if (!(rec.neumann_value < 1.0))
      rec.violations.push_back("neumann_sandwich_not_contracting");
  }

  for (const std::string& v : rec.violations)
    trace.failures.push_back(rec.kind + "(" + std::to_string(n) + "," +
                             std::to_string(m) + "): " + v);
  if (!rec.violations.empty()) trace.passed = false;

  if (opts_.observer) {
    StepArtifacts art{&basis, &h.op, &contour, &prev_emb, &rec, &engine};
    opts_.observer(art);
  }

  if (rec.norm < opts_.norm_floor)
    throw SolverError("step (n=" + std::to_string(n) + ", m=" +
                      std::to_string(m) + "): projection norm " +
                      std::to_string(rec.norm) + " below floor " +
                      std::to_string(opts_.norm_floor) +
                      " (left the perturbative regime)");
  return rec;
}

namespace {

GroundStateRecord run_step_guarded(const SweepDriver& driver,
                                   const GroundStateRecord& prev, int n, int m,
                                   bool uv_kind, SweepTrace& trace, bool& ok) {
  try {
    ok = true;
    return driver.step(prev, n, m, uv_kind, trace);
  } catch (const SolverError& e) {
    ok = false;
    trace.aborted = true;
    trace.abort_reason = e.what();
    trace.passed = false;
    return prev;
  }
}

}  // namespace

SweepTrace uv_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                    int n_max, const SweepOptions& opts) {
  SweepDriver driver(grid, schedule, opts);
  SweepTrace trace;
  trace.records.push_back(driver.initial_record());
  for (int n = 1; n <= n_max; ++n) {
    bool ok = false;
    GroundStateRecord rec =
        run_step_guarded(driver, trace.records.back(), n, 0, true, trace, ok);
    if (!ok) break;
    trace.records.push_back(std::move(rec));
  }
  apply_envelope_checks(trace, schedule);
  return trace;
}

SweepTrace ir_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                    const GroundStateRecord& uv_record, int m_max,
                    const SweepOptions& opts) {
  SweepDriver driver(grid, schedule, opts);
  SweepTrace trace;
  trace.records.push_back(uv_record);
  for (int m = 1; m <= m_max; ++m) {
    bool ok = false;
    GroundStateRecord rec = run_step_guarded(
        driver, trace.records.back(), uv_record.n, m, false, trace, ok);
    if (!ok) break;
    trace.records.push_back(std::move(rec));
  }
  apply_envelope_checks(trace, schedule);
  return trace;
}

SweepTrace dressed_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                         const GroundStateRecord& uv_record, int m_max,
                         const SweepOptions& opts) {
  SweepDriver driver(grid, schedule, opts);
  SweepTrace trace;
  trace.records.push_back(uv_record);
  trace.dressed.push_back(initial_dressed_state(uv_record.state));
  const ModelParams& pars = schedule.params();
  for (int m = 1; m <= m_max; ++m) {
    const GroundStateRecord& prev = trace.records.back();
    bool ok = false;
    GroundStateRecord rec =
        run_step_guarded(driver, prev, uv_record.n, m, false, trace, ok);
    if (!ok) break;

    FockBasis basis = driver.make_basis(uv_record.n, m);
    FockBasis basis_prev = driver.make_basis(prev.n, prev.m);
    FiberHamiltonian h = assemble_gross(grid, basis, pars.P, pars.g,
                                        uv_record.n, m, schedule);
    SpectralEngine engine(h.op, opts.spectral);
    GrossData gross =
        assemble_gross_data(grid, basis, pars.g, uv_record.n, schedule);

    DressedStepContext ctx;
    ctx.grid = &grid;
    ctx.schedule = &schedule;
    ctx.basis = &basis;
    ctx.basis_prev = &basis_prev;
    ctx.engine = &engine;
    ctx.gross = &gross;
    ctx.e_prev = prev.E_prime;
    ctx.grad_prev = prev.grad_E;
    ctx.grad_cur = rec.grad_E;
    ctx.g = pars.g;
    ctx.m = m;
    ctx.compute_sandwich = opts.dressed_sandwich;

    DressedState ds = dressed_step(trace.dressed.back(), ctx);
    for (const std::string& v : ds.violations) {
      trace.failures.push_back("dressed(m=" + std::to_string(m) + "): " + v);
      trace.passed = false;
    }
    trace.records.push_back(std::move(rec));
    trace.dressed.push_back(std::move(ds));
    if (!trace.dressed.back().ok) {
      trace.aborted = true;
      trace.abort_reason = "dressed norm below 1/2";
      break;
    }
  }
  apply_envelope_checks(trace, schedule);
  return trace;
}

SweepTrace joint_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                       int alpha_prime, int m_max, const SweepOptions& opts) {
  SweepDriver driver(grid, schedule, opts);
  SweepTrace trace;
  if (alpha_prime < schedule.alpha_min()) {
    trace.failures.push_back("alpha_prime " + std::to_string(alpha_prime) +
                             " below alpha_min " +
                             std::to_string(schedule.alpha_min()) +
                             "; convergence guarantees do not apply");
    trace.passed = false;
  }
  const ModelParams& pars = schedule.params();

  // phi at (n, m) through a fixed-n dressing chain seeded by the UV state.
  auto dressed_at = [&](int n, int m, const std::vector<GroundStateRecord>& uv,
                        std::vector<GroundStateRecord>* ir_records_out)
      -> DressedState {
    DressedState ds = initial_dressed_state(uv[n].state);
    SweepTrace scratch;
    GroundStateRecord prev = uv[n];
    for (int mm = 1; mm <= m; ++mm) {
      GroundStateRecord rec = driver.step(prev, n, mm, false, scratch);
      FockBasis basis = driver.make_basis(n, mm);
      FockBasis basis_prev = driver.make_basis(n, mm - 1);
      FiberHamiltonian h =
          assemble_gross(grid, basis, pars.P, pars.g, n, mm, schedule);
      SpectralEngine engine(h.op, opts.spectral);
      GrossData gross = assemble_gross_data(grid, basis, pars.g, n, schedule);
      DressedStepContext ctx{&grid,     &schedule, &basis, &basis_prev,
                             &engine,   &gross,    prev.E_prime,
                             prev.grad_E, rec.grad_E, pars.g, mm,
                             false};
      ds = dressed_step(ds, ctx);
      prev = rec;
      if (ir_records_out) ir_records_out->push_back(prev);
    }
    return ds;
  };

  // Base UV chain Psi'|n_0 up to n(m_max).
  std::vector<GroundStateRecord> uv_chain;
  uv_chain.push_back(driver.initial_record());

  // phi at level m-1 lives at (n(m-1), m-1); the m=1 comparison point is
  // the vacuum at (0, 0).
  DressedState phi_prev_level = initial_dressed_state(uv_chain.front().state);
  int n_prev_level = 0;

  trace.records.push_back(uv_chain.front());
  try {
    for (int m = 1; m <= m_max; ++m) {
      int n_target = alpha_prime * m;
      while (static_cast<int>(uv_chain.size()) - 1 < n_target) {
        int n_next = static_cast<int>(uv_chain.size());
        GroundStateRecord rec =
            driver.step(uv_chain.back(), n_next, 0, true, trace);
        rec.kind = "joint-uv";
        trace.records.push_back(rec);
        uv_chain.push_back(std::move(rec));
      }

      // IR landing record at (n(m), m), reached through the fixed-n chain.
      std::vector<GroundStateRecord> ir_records;
      DressedState phi_nm = dressed_at(n_target, m, uv_chain, &ir_records);
      DressedState phi_nm_minus = dressed_at(n_target - 1, m, uv_chain, nullptr);

      GroundStateRecord rec = ir_records.back();
      rec.kind = "joint-ir";

      FockBasis basis_big = driver.make_basis(n_target, m);
      FockBasis basis_small = driver.make_basis(n_target - 1, m);
      rec.eta_diff =
          (phi_nm.eta - basis_big.embed(basis_small, phi_nm_minus.eta)).norm();

      // gradient difference across the last UV slice at fixed m
      FiberHamiltonian h_small = assemble_gross(grid, basis_small, pars.P,
                                                pars.g, n_target - 1, m,
                                                schedule);
      SpectralResult gs_small =
          SpectralEngine(h_small.op, opts.spectral).ground_state();
      Vec3 grad_n_minus = grad_E(gs_small.ground, pars.P, basis_small,
                                 pars.g, n_target - 1);
      rec.grad_diff_uv = (rec.grad_E - grad_n_minus).norm();

      FockBasis basis_prev_level = driver.make_basis(n_prev_level, m - 1);
      rec.phi_diff =
          (phi_nm.phi - basis_big.embed(basis_prev_level, phi_prev_level.phi))
              .norm();

      for (const std::string& v : rec.violations) {
        trace.failures.push_back("joint-ir(" + std::to_string(n_target) + "," +
                                 std::to_string(m) + "): " + v);
        trace.passed = false;
      }
      trace.records.push_back(rec);
      trace.dressed.push_back(phi_nm);
      phi_prev_level = phi_nm;
      n_prev_level = n_target;
    }
  } catch (const SolverError& e) {
    trace.aborted = true;
    trace.abort_reason = e.what();
    trace.passed = false;
  }
  apply_envelope_checks(trace, schedule);
  return trace;
}

RateFit fit_envelope(const std::string& law, const std::vector<double>& values,
                     const std::vector<double>& envelope, double band) {
  RateFit fit;
  fit.law = law;
  if (values.size() != envelope.size())
    throw DomainError("fit_envelope: size mismatch");
  std::vector<double> logs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1e-13 && envelope[i] > 0.0)
      logs.push_back(std::log(values[i] / envelope[i]));
  }
  fit.points = static_cast<int>(logs.size());
  if (fit.points < 2) {
    fit.pass = true;  // vacuous: nothing measurable to fit
    fit.prefactor = 0.0;
    return fit;
  }
  double mean = 0.0;
  for (double l : logs) mean += l;
  mean /= fit.points;
  fit.prefactor = std::exp(mean);
  double worst = 0.0;
  for (double l : logs) worst = std::max(worst, std::abs(l - mean));
  fit.max_log_deviation = worst;
  fit.pass = worst <= std::log(band);
  return fit;
}

void apply_envelope_checks(SweepTrace& trace, const CutoffSchedule& schedule) {
  const ModelParams& pars = schedule.params();
  double beta = pars.beta, gamma = pars.gamma;

  std::vector<double> uv_diff, uv_env, de_uv, dgrad_uv;
  std::vector<double> de_ir, de_ir_env;
  std::vector<double> tilde_diff, tilde_env, phi_diff, phi_env;
  std::vector<double> joint_eta, joint_grad, joint_env1, joint_phi, joint_phi_env;

  const GroundStateRecord* prev = nullptr;
  for (const auto& rec : trace.records) {
    if (prev) {
      if (rec.kind == "uv" || rec.kind == "joint-uv") {
        double env = (beta - 1.0) * rec.n / std::pow(beta, rec.n);
        uv_diff.push_back(rec.diff_prev_uv);
        uv_env.push_back(std::sqrt(env));
        de_uv.push_back(std::abs(rec.E_prime - prev->E_prime));
        dgrad_uv.push_back((rec.grad_E - prev->grad_E).norm());
      } else if (rec.kind == "ir") {
        de_ir.push_back(std::abs(rec.E_prime - prev->E_prime));
        de_ir_env.push_back(std::pow(gamma, rec.m - 1));
      }
    }
    prev = &rec;
  }
  for (const auto& ds : trace.dressed) {
    if (ds.m < 1) continue;
    double env = std::pow(gamma, 0.25 * ds.m);
    tilde_diff.push_back(ds.diff_tilde_prev);
    tilde_env.push_back(env);
    phi_diff.push_back(ds.diff_phi_tilde);
    phi_env.push_back(ds.m * env);
  }
  double K = schedule.rate_constant_K();
  for (const auto& rec : trace.records) {
    if (rec.kind != "joint-ir") continue;
    double env = std::pow(K, 3.0 * rec.m + 1.0) *
                 std::sqrt(rec.n / (std::pow(beta, rec.n) * std::pow(gamma, rec.m)));
    if (std::isfinite(rec.eta_diff)) {
      joint_eta.push_back(rec.eta_diff);
      joint_env1.push_back(env);
      joint_grad.push_back(rec.grad_diff_uv);
    }
    if (std::isfinite(rec.phi_diff)) {
      joint_phi.push_back(rec.phi_diff);
      joint_phi_env.push_back(rec.m * env);
    }
  }

  auto push = [&](RateFit f) {
    if (!f.pass) {
      trace.passed = false;
      trace.failures.push_back("envelope band violated: " + f.law);
    }
    trace.fits.push_back(std::move(f));
  };
  if (!uv_diff.empty()) {
    push(fit_envelope("uv-state-diff ~ sqrt((beta-1) n / beta^n)", uv_diff, uv_env));
    push(fit_envelope("uv-energy-shift ~ (beta-1) n / beta^n", de_uv,
                      [&] {
                        std::vector<double> e;
                        for (double v : uv_env) e.push_back(v * v);
                        return e;
                      }()));
    push(fit_envelope("uv-gradient-shift ~ (beta-1) n / beta^n", dgrad_uv,
                      [&] {
                        std::vector<double> e;
                        for (double v : uv_env) e.push_back(v * v);
                        return e;
                      }()));
  }
  if (!de_ir.empty())
    push(fit_envelope("ir-energy-shift ~ gamma^(m-1)", de_ir, de_ir_env));
  if (!tilde_diff.empty()) {
    push(fit_envelope("dressed-tilde-diff ~ gamma^(m/4)", tilde_diff, tilde_env));
    push(fit_envelope("dressed-phi-diff ~ m gamma^(m/4)", phi_diff, phi_env));
  }
  if (!joint_eta.empty()) {
    push(fit_envelope("joint-eta-diff ~ K^(3m+1) sqrt(n/(beta^n gamma^m))",
                      joint_eta, joint_env1));
    push(fit_envelope("joint-grad-diff ~ K^(3m+1) sqrt(n/(beta^n gamma^m))",
                      joint_grad, joint_env1));
  }
  if (!joint_phi.empty())
    push(fit_envelope("joint-phi-diff ~ m K^(3m+1) sqrt(n/(beta^n gamma^m))",
                      joint_phi, joint_phi_env));
}

}  // namespace nelson
