// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Desk-scale instances; every tolerance is pinned in code.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "nelson/io.hpp"
#include "nelson/multiscale.hpp"
#include "nelson/quadrature.hpp"
#include "nelson/runner.hpp"
#include "nelson/verify.hpp"

using namespace nelson;

namespace {

int g_failures = 0;

void emit(int id, const std::string& title, bool pass,
          const std::string& note = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id,
              title.c_str(), note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ModelParams reference_params(double g = 0.05, Vec3 P = Vec3(0.2, 0.0, 0.0)) {
  ModelParams p;
  p.g = g;
  p.kappa = 1.5;
  p.beta = 1.2;
  p.gamma = 0.25;
  p.zeta = 0.05;
  p.theta = 0.0625;
  p.P = P;
  return p;
}

SweepOptions desk_options() {
  SweepOptions o;
  o.n_max_occupation = 2;
  o.record_neumann = false;  // exercised in the unit suite; skipped for speed
  return o;
}

// ---------------------------------------------------------------- criterion 1
void criterion_schedule() {
  bool pass = true;
  std::string note;
  for (double beta : {1.1, 1.5, 1.9}) {
    ModelParams p = reference_params();
    p.beta = beta;
    CutoffSchedule s(p);
    double x = 1.0 / beta;
    double pref = (beta - 1.0) * (beta - 1.0) / (2.0 * beta);
    auto tail = [&](int n) {
      double xn = std::pow(x, n + 1);
      return pref * xn * ((n + 1) / (1.0 - x) + x / ((1.0 - x) * (1.0 - x)));
    };
    // the closed form certifies the 200-term partial sum to rounding
    double partial200 = 0.0;
    for (int j = 1; j <= 200; ++j) partial200 += s.gap_decrement(j);
    pass = pass && std::abs(partial200 + tail(200) - 0.5) < 1e-12;
    // convergence to 1/2, with the term count demanded by the analytic tail
    int terms = 200;
    while (tail(terms) > 1e-11) terms += 100;
    double partial = partial200;
    for (int j = 201; j <= terms; ++j) partial += s.gap_decrement(j);
    pass = pass && std::abs(partial - 0.5) < 1e-10;
    if (beta == 1.1)
      note = "literal 200-term/1e-10 reading is analytically unattainable at "
             "beta=1.1 (closed-form tail " + fmt(tail(200)) +
             "); asserted at the oracle-determined depth " +
             std::to_string(terms);
    for (int n = 1; n <= 10000; ++n) {
      double xi = s.gap_bound_uv(n);
      if (!(xi >= p.kappa / 16.0 - 1e-14 && xi <= p.kappa / 8.0 + 1e-14)) {
        pass = false;
        break;
      }
    }
  }
  emit(1, "gap-bound sequence identities", pass, note);
}

// ---------------------------------------------------------------- criterion 2
void criterion_free_theory() {
  ModelParams p = reference_params(0.0);
  CutoffSchedule sched(p);
  ModeGrid grid = build_mode_grid(sched, 5, 3, 1, AngularSet::Axes6);
  SweepOptions opts = desk_options();
  SweepTrace uv = uv_sweep(grid, sched, 5, opts);
  SweepTrace ir = ir_sweep(grid, sched, uv.records.back(), 3, opts);
  bool pass = uv.passed && ir.passed;
  double e_free = 0.5 * p.P.squaredNorm();
  auto check_rec = [&](const GroundStateRecord& rec) {
    pass = pass && std::abs(rec.E_prime - e_free) <= 1e-12;
    pass = pass && (rec.grad_E - p.P).norm() <= 1e-10;
    pass = pass && rec.diff_prev_uv <= 1e-12 && rec.diff_prev_ir <= 1e-12;
    pass = pass && std::abs(rec.state[0]) >= rec.norm * (1.0 - 1e-12);
  };
  for (const auto& r : uv.records) check_rec(r);
  for (const auto& r : ir.records) check_rec(r);
  emit(2, "free-theory exactness (E'=P^2/2, state=vacuum, gradient=P)", pass);
}

// ---------------------------------------------------------------- criterion 3
void criterion_vself() {
  const double pi = 3.14159265358979323846;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> kap(1.0 + 1e-6, 2.0 - 1e-6);
  std::uniform_real_distribution<double> lam(2.0 + 1e-6, 1000.0);
  bool pass = true;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    double k = kap(rng), l = lam(rng), g = 0.7;
    double closed = vself(l, k, g);
    auto f = [&](double r) { return 1.0 / (0.5 * r + 1.0); };
    QuadratureResult q =
        integrate_adaptive(f, k, l, 1e-14 * std::abs(closed) + 1e-15);
    double quad = -(g * g / (4.0 * pi * pi)) * q.value;
    double rel = std::abs(closed - quad) / std::abs(closed);
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-10;
  }
  emit(3, "counterterm closed form vs adaptive quadrature", pass,
       "worst relative deviation " + fmt(worst));
}

// ------------------------------------------------- criteria 4, 5, 6, 11 data
struct ReferenceRun {
  ModelParams params;
  CutoffSchedule schedule;
  ModeGrid grid;
  SweepOptions opts;
  SweepTrace uv;
  SweepTrace ir;  // dressed chain included
  bool projector_pass = true;
  double projector_worst = 0.0;
  int steps_observed = 0;

  ReferenceRun()
      : params(reference_params()),
        schedule(params),
        grid(build_mode_grid(schedule, 5, 4, 1, AngularSet::Axes6)),
        opts(desk_options()) {
    std::mt19937_64 rng(2026);
    opts.observer = [&, rng](const StepArtifacts& art) mutable {
      if (!art.engine->dense_path()) return;
      SpectralResult gs = art.engine->ground_state();
      std::normal_distribution<double> dist(0.0, 1.0);
      for (int t = 0; t < 50; ++t) {
        VectorX v(art.basis->dim());
        for (Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
        VectorX qv = art.engine->contour_project(*art.contour, v);
        double err = (qv - gs.ground * gs.ground.dot(v)).norm();
        projector_worst = std::max(projector_worst, err);
        projector_pass = projector_pass && err <= 1e-8;
      }
      ++steps_observed;
    };
    uv = uv_sweep(grid, schedule, 5, opts);
    ir = dressed_sweep(grid, schedule, uv.records.back(), 3, opts);
    opts.observer = nullptr;
  }
};

void criterion_projector(const ReferenceRun& ref) {
  bool pass = ref.projector_pass && ref.steps_observed == 8;
  emit(4, "contour projector vs dense eigenprojector on the reference sweep",
       pass,
       "worst |Q_contour v - Q_eig v| = " + fmt(ref.projector_worst) +
           " over " + std::to_string(ref.steps_observed) + " steps x 50 vectors");
}

void criterion_gaps(const ReferenceRun& ref) {
  bool pass = true;
  for (const auto& rec : ref.uv.records) {
    if (rec.kind == "seed") continue;
    pass = pass && rec.gap >= ref.schedule.gap_bound_uv(rec.n);
    pass = pass && rec.gap >= ref.params.kappa / 16.0;
  }
  for (const auto& rec : ref.ir.records) {
    if (rec.m == 0) continue;
    pass = pass && rec.gap >= ref.params.zeta * ref.schedule.tau(rec.m);
  }
  emit(5, "spectral gaps dominate the scheduled bounds", pass);
}

void criterion_window(const ReferenceRun& ref) {
  AprioriConstants apc = derive_apriori_constants(
      appendix_constants(ref.params.kappa), ref.params.kappa);
  bool pass = true;
  double prev = 1e300;
  double upper = 0.5 * ref.params.P.squaredNorm();
  auto scan = [&](const SweepTrace& t) {
    for (const auto& rec : t.records) {
      if (rec.kind == "seed" && prev == 1e300) {
        prev = rec.E_prime;
        continue;
      }
      if (rec.kind == "seed") continue;
      pass = pass && rec.E_prime <= prev + 1e-9;
      pass = pass && rec.E_prime <= upper + 1e-9;
      pass = pass && rec.E_prime >= -std::abs(ref.params.g) * apc.c_b - 1e-9;
      prev = rec.E_prime;
    }
  };
  scan(ref.uv);
  scan(ref.ir);
  emit(6, "energy monotone in both cutoffs and inside the window", pass,
       "c_b = " + fmt(apc.c_b));
}

// ---------------------------------------------------------------- criterion 7
std::vector<GroundStateRecord> small_grid_records(double g) {
  std::vector<GroundStateRecord> finals;
  for (double px : {0.0, 0.05, 0.1, 0.15, 0.2}) {
    ModelParams p = reference_params(g, Vec3(px, 0.0, 0.0));
    CutoffSchedule sched(p);
    ModeGrid grid = build_mode_grid(sched, 2, 1, 1, AngularSet::Axes6);
    SweepOptions opts = desk_options();
    SweepTrace uv = uv_sweep(grid, sched, 2, opts);
    SweepTrace ir = ir_sweep(grid, sched, uv.records.back(), 1, opts);
    finals.push_back(ir.records.back());
  }
  return finals;
}

void criterion_gross() {
  bool pass = true;
  for (double g : {0.02, 0.05}) {
    auto finals = small_grid_records(g);
    VerificationReport rep = check_gross(finals, 1e-9);
    pass = pass && rep.checks.size() == 4 && rep.all_pass();
  }
  emit(7, "ground energy is minimal at P = 0 across the momentum grid", pass);
}

// ---------------------------------------------------------------- criterion 8
void criterion_gradient(const ReferenceRun& ref) {
  bool pass = true;
  double worst = 0.0;
  int tested = 0;
  const double h = 1e-4;

  auto test_record = [&](const GroundStateRecord& rec, const ModeGrid& grid,
                         const CutoffSchedule& sched, int nmax_occ) {
    FockBasis basis =
        enumerate_basis(grid, grid.active_modes(rec.n, rec.m), nmax_occ);
    Vec3 fd;
    for (int a = 0; a < 3; ++a) {
      Vec3 dp = Vec3::Zero();
      dp[a] = h;
      double ep = ground_state(assemble_gross(grid, basis, rec.P + dp, rec.g,
                                              rec.n, rec.m, sched)
                                   .op)
                      .E0;
      double em = ground_state(assemble_gross(grid, basis, rec.P - dp, rec.g,
                                              rec.n, rec.m, sched)
                                   .op)
                      .E0;
      fd[a] = (ep - em) / (2.0 * h);
    }
    double rel = (rec.grad_E - fd).norm() / std::max(1.0, fd.norm());
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-4;
    pass = pass && rec.grad_E.norm() <= 0.75;
    ++tested;
  };

  // eight records from small-grid runs, two from the reference chain
  for (double g : {0.02, 0.05}) {
    auto finals = small_grid_records(g);
    for (std::size_t i = 1; i < finals.size(); ++i) {
      ModelParams p = reference_params(g, finals[i].P);
      CutoffSchedule sched(p);
      ModeGrid grid = build_mode_grid(sched, 2, 1, 1, AngularSet::Axes6);
      test_record(finals[i], grid, sched, 2);
    }
  }
  test_record(ref.uv.records.back(), ref.grid, ref.schedule, 2);
  test_record(ref.ir.records.back(), ref.grid, ref.schedule, 2);
  emit(8, "Hellmann-Feynman gradient vs finite differences", pass,
       std::to_string(tested) + " records, worst relative error " + fmt(worst));
}

// ---------------------------------------------------------------- criterion 9
void criterion_froehlich(const ReferenceRun& ref) {
  const GroundStateRecord& rec = ref.ir.records.back();
  FockBasis basis =
      enumerate_basis(ref.grid, ref.grid.active_modes(rec.n, rec.m),
                      ref.opts.n_max_occupation);
  FroehlichReport fr =
      check_froehlich(rec.state, rec.E_prime, ref.grid, basis, ref.schedule,
                      rec.n, rec.m, rec.grad_E, 1e-6);
  double worst = 0.0;
  int skipped = 0;
  for (const auto& m : fr.modes) {
    worst = std::max(worst, m.residual / rec.state.norm());
    if (m.skipped) ++skipped;
  }
  bool pass = fr.report.all_pass() && skipped == 0;

  // exactness on a single-mode dense instance
  ModeGrid toy;
  toy.modes.push_back(Mode{Vec3(0.8, 0.0, 0.0), 1.0, ShellId{ShellId::IR, 1}});
  toy.m_ir = 1;
  ModelParams pt = reference_params(0.02, Vec3(0.1, 0.0, 0.0));
  CutoffSchedule sched_t(pt);
  FockBasis bt = enumerate_basis(toy, 10);
  SpectralResult gs =
      ground_state(assemble_gross(toy, bt, pt.P, pt.g, 0, 1, sched_t).op);
  Vec3 grad = grad_E(gs.ground, pt.P, bt, pt.g, 0);
  FroehlichReport toy_fr =
      check_froehlich(gs.ground, gs.E0, toy, bt, sched_t, 0, 1, grad, 1e-10);
  pass = pass && toy_fr.report.all_pass();
  emit(9, "pull-through identity per mode on the final reference record", pass,
       "worst residual/|Psi| = " + fmt(worst) + ", toy residual " +
           fmt(toy_fr.modes.at(0).residual));
}

// --------------------------------------------------------------- criterion 10
void criterion_dressing() {
  bool pass = true;
  std::string note;

  // strong coupling so the truncation defect of the rotation identities sits
  // far above rounding; every identity here is basis-level algebra
  ModelParams p = reference_params(0.8);
  p.beta = 1.9;
  CutoffSchedule sched(p);
  ModeGrid grid = build_mode_grid(sched, 1, 1, 1, AngularSet::Axes6);
  Vec3 q(0.11, -0.02, 0.04);

  double prev = 1e300;
  for (int nmax : {2, 3, 4}) {
    FockBasis b = enumerate_basis(grid, nmax);
    GrossData gross = assemble_gross_data(grid, b, p.g, 1, sched);
    SpMat h_prime = assemble_gross(grid, b, p.P, p.g, 1, 1, sched).op;
    auto coeffs = alpha_coeffs(grid, q, 1, p.g);

    MatrixX w = bogolyubov_W(b, coeffs);
    double unit =
        (w * w.transpose() - MatrixX::Identity(b.dim(), b.dim())).norm();
    pass = pass && unit <= 1e-10;

    DressedHamiltonian d = assemble_dressed(h_prime, b, gross, coeffs, p.P, 1);
    SpMat cancel = d.L;
    for (int a = 0; a < 3; ++a) cancel -= q[a] * d.A[a];
    cancel += ir_slice_op(grid, b, p.g, 1);
    pass = pass && operator_inf_norm(cancel) <= 1e-10;

    // residual of the normal-ordered identity on fixed low-occupation probes
    MatrixX resid = d.direct - d.structured;
    std::vector<std::uint8_t> occ(b.mode_count(), 0);
    double r = resid.col(b.rank(occ)).norm();
    for (int i = 0; i < b.mode_count(); ++i) {
      std::fill(occ.begin(), occ.end(), 0);
      occ[i] = 1;
      r = std::max(r, resid.col(b.rank(occ)).norm());
    }
    if (!(r < prev)) pass = false;
    if (nmax == 4) note = "identity residual sequence ends at " + fmt(r);
    prev = r;
  }

  // phi-centered expectation and the gamma-difference identity at the
  // physical coupling, on a two-scale instance
  {
    ModelParams pr = reference_params();
    CutoffSchedule sr(pr);
    ModeGrid gr = build_mode_grid(sr, 1, 2, 1, AngularSet::Axes6);
    SweepOptions opts = desk_options();
    SweepTrace uv = uv_sweep(gr, sr, 1, opts);
    SweepTrace dr = dressed_sweep(gr, sr, uv.records.back(), 2, opts);
    pass = pass && dr.dressed.size() == 3;
    for (const auto& ds : dr.dressed)
      if (ds.m >= 1) pass = pass && ds.gamma_expectation <= 1e-8;

    // identity-centered gamma difference: exact operator arithmetic
    FockBasis b = enumerate_basis(gr, gr.active_modes(1, 2), 2);
    GrossData gross = assemble_gross_data(gr, b, pr.g, 1, sr);
    SpMat id = identity_op(b.dim());
    Vec3 grad_prev = dr.records[1].grad_E;
    Vec3 grad_cur = dr.records[2].grad_E;
    auto ct = alpha_coeffs(gr, grad_prev, 2, pr.g);
    auto cp = alpha_coeffs(gr, grad_prev, 1, pr.g);
    DressingConstants kt = dressing_constants(gr, ct, pr.g, pr.P);
    DressingConstants kp = dressing_constants(gr, cp, pr.g, pr.P);
    DressedHamiltonian dt = assemble_dressed(
        assemble_gross(gr, b, pr.P, pr.g, 1, 2, sr).op, b, gross, ct, pr.P, 2);
    DressedHamiltonian dp = assemble_dressed(
        assemble_gross(gr, b, pr.P, pr.g, 1, 1, sr).op, b, gross, cp, pr.P, 1);
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
      SpMat gamma_t = dt.Pi[a] - (pr.P[a] - grad_cur[a] - kt.C_k[a]) * id;
      SpMat gamma_p = dp.Pi[a] - (pr.P[a] - grad_prev[a] - kp.C_k[a]) * id;
      SpMat rhs = dt.A[a] - dp.A[a] +
                  (grad_cur[a] - grad_prev[a] + kt.C_k[a] - kp.C_k[a]) * id;
      worst = std::max(worst, operator_inf_norm(gamma_t - gamma_p - rhs));
    }
    pass = pass && worst <= 1e-9;
  }
  emit(10, "dressing layer identities (unitarity, cancellation, residuals)",
       pass, note);
}

// --------------------------------------------------------------- criterion 11
void criterion_rates(const ReferenceRun& ref) {
  SweepTrace uv = ref.uv;
  SweepTrace ir = ref.ir;
  VerificationReport uv_rep = check_rate_envelopes(uv, ref.schedule);
  VerificationReport ir_rep = check_rate_envelopes(ir, ref.schedule);

  bool pass = true;
  std::ostringstream note;
  auto scan = [&](const VerificationReport& rep) {
    for (const auto& c : rep.checks) {
      if (!c.pass) {
        pass = false;
        note << "band violated for [" << c.name << "], max log-dev "
             << fmt(c.measured) << " > " << fmt(c.bound) << "; ";
      }
    }
  };
  scan(uv_rep);
  scan(ir_rep);

  // negative control: a deliberately mis-scaled envelope must fail
  std::vector<double> vals, bad_env;
  for (int n = 1; n <= 10; ++n) {
    double e = std::sqrt(0.9 * n / std::pow(1.9, n));
    vals.push_back(0.5 * e);
    bad_env.push_back(std::sqrt(0.9 * n / std::pow(1.9, 0.5 * n)));
  }
  bool control_fails = !fit_envelope("mis-scaled", vals, bad_env).pass;
  pass = pass && control_fails;
  if (!control_fails) note << "negative control failed to fail; ";
  if (note.str().find("band violated") != std::string::npos)
    note << "measured diffs decay faster than the worst-case envelopes: the "
            "proved upper bounds hold with margin, tight tracking does not";
  emit(11, "fitted-prefactor scaling bands on the reference sweep", pass,
       note.str());
}

// --------------------------------------------------------------- criterion 12
void criterion_catastrophe(const ReferenceRun& ref) {
  SweepOptions opts = desk_options();
  SweepTrace uv = uv_sweep(ref.grid, ref.schedule, 5, opts);
  SweepTrace dr =
      dressed_sweep(ref.grid, ref.schedule, uv.records.back(), 4, opts);
  bool pass = dr.records.size() == 5 && dr.dressed.size() == 5;
  double prev_overlap = 1.0001;
  for (const auto& rec : dr.records) {
    if (rec.m == 0) {
      prev_overlap = rec.overlap_vacuum + 1e-15;
      continue;
    }
    if (!(rec.overlap_vacuum < prev_overlap)) pass = false;
    prev_overlap = rec.overlap_vacuum;
  }
  // |phi_m - phi_{m-1}| from the dressed chain, strictly decreasing
  SweepDriver driver(ref.grid, ref.schedule, opts);
  std::vector<double> phi_diffs;
  for (std::size_t i = 1; i < dr.dressed.size() && pass; ++i) {
    const DressedState& cur = dr.dressed[i];
    const DressedState& prv = dr.dressed[i - 1];
    FockBasis big = driver.make_basis(5, cur.m);
    FockBasis small = driver.make_basis(5, prv.m);
    phi_diffs.push_back((cur.phi - big.embed(small, prv.phi)).norm());
  }
  std::string seq;
  for (std::size_t i = 0; i < phi_diffs.size(); ++i) {
    if (i) {
      if (!(phi_diffs[i] < phi_diffs[i - 1])) pass = false;
      seq += " ";
    }
    seq += fmt(phi_diffs[i]);
  }
  emit(12, "infrared catastrophe vs dressed convergence over m <= 4", pass,
       "phi step diffs: " + seq);
}

// --------------------------------------------------------------- criterion 13
void criterion_determinism() {
  ExperimentConfig config;
  config.model = reference_params();
  config.n_max = 2;
  config.m_max = 1;
  config.n_max_occupation = 2;
  config.run_dressed = true;
  config.record_neumann = true;
  config.seed = 99;
  namespace fs = std::filesystem;
  std::ostringstream sink;
  auto run_to = [&](const std::string& dir) {
    fs::remove_all(dir);
    config.out_dir = dir;
    cmd_run(config, sink);
    std::ifstream in(dir + "/records.jsonl", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  std::string a = run_to("/tmp/nelson_acc_run_a");
  std::string b = run_to("/tmp/nelson_acc_run_b");
  bool pass = !a.empty() && a == b;
  emit(13, "byte-identical records across reruns", pass,
       std::to_string(a.size()) + " bytes");
}

}  // namespace

int main() {
  std::printf(
      "acceptance suite: desk-scale checks of the multiscale construction\n");
  criterion_schedule();
  criterion_free_theory();
  criterion_vself();
  ReferenceRun ref;
  criterion_projector(ref);
  criterion_gaps(ref);
  criterion_window(ref);
  criterion_gross();
  criterion_gradient(ref);
  criterion_froehlich(ref);
  criterion_dressing();
  criterion_rates(ref);
  criterion_catastrophe(ref);
  criterion_determinism();
  if (g_failures > 0)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures == 0 ? 0 : 1;
}
