#include <doctest.h>

#include <cmath>

#include "nelson/multiscale.hpp"
#include "oracles.hpp"

using namespace nelson;

namespace {

struct Lab {
  ModelParams params;
  CutoffSchedule schedule;
  ModeGrid grid;
  SweepOptions opts;

  Lab(double g, int n_uv, int m_ir, double beta = 1.2, double gamma = 0.25,
      Vec3 P = Vec3(0.2, 0.0, 0.0), double K = 5.0,
      std::optional<double> alpha_bar = std::nullopt)
      : params([&] {
          ModelParams p;
          p.g = g;
          p.kappa = 1.5;
          p.beta = beta;
          p.gamma = gamma;
          p.zeta = 0.05;
          p.P = P;
          return p;
        }()),
        schedule(params, K, alpha_bar),
        grid(build_mode_grid(schedule, n_uv, m_ir, 1, AngularSet::Axes6)) {
    opts.n_max_occupation = 2;
  }
};

}  // namespace

TEST_CASE("free theory sweep is exact") {
  Lab lab(0.0, 3, 2);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 3, lab.opts);
  REQUIRE(uv.records.size() == 4);
  double e_free = 0.5 * lab.params.P.squaredNorm();
  for (const auto& rec : uv.records) {
    CHECK(std::abs(rec.E_prime - e_free) <= 1e-12);
    CHECK((rec.grad_E - lab.params.P).norm() <= 1e-10);
    CHECK(rec.diff_prev_uv <= 1e-12);
    CHECK(std::abs(rec.norm - 1.0) <= 1e-12);
    CHECK(rec.overlap_vacuum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(uv.passed);

  SweepTrace ir = ir_sweep(lab.grid, lab.schedule, uv.records.back(), 2,
                           lab.opts);
  for (const auto& rec : ir.records) {
    CHECK(std::abs(rec.E_prime - e_free) <= 1e-12);
    CHECK(rec.diff_prev_ir <= 1e-12);
  }
  CHECK(ir.passed);
}

TEST_CASE("single slice keeps the scheduled gap") {
  Lab lab(0.05, 1, 0);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 1, lab.opts);
  REQUIRE(uv.records.size() == 2);
  const GroundStateRecord& rec = uv.records.back();
  CHECK(rec.gap >= lab.schedule.gap_bound_uv(1));

  // dense oracle: gap from the full spectrum of the assembled operator
  FockBasis basis = enumerate_basis(lab.grid, lab.grid.active_modes(1, 0), 2);
  SpMat h = assemble_gross(lab.grid, basis, lab.params.P, lab.params.g, 1, 0,
                           lab.schedule)
                .op;
  Eigen::SelfAdjointEigenSolver<MatrixX> eig{MatrixX(h)};
  CHECK(rec.E_prime == doctest::Approx(eig.eigenvalues()[0]).epsilon(1e-12));
  CHECK(rec.gap ==
        doctest::Approx(eig.eigenvalues()[1] - eig.eigenvalues()[0])
            .epsilon(1e-10));
}

TEST_CASE("interacting sweep bookkeeping") {
  Lab lab(0.05, 4, 2);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 4, lab.opts);
  REQUIRE(uv.records.size() == 5);
  // the structural bounds all hold; the fitted scaling bands may not (the
  // measured diffs decay faster than the proof's worst-case envelopes), so
  // only band verdicts are allowed among the failures
  for (const auto& f : uv.failures)
    CHECK(f.find("envelope band") != std::string::npos);
  double prev_norm = 1.0;
  double prev_e = 1e300;
  for (const auto& rec : uv.records) {
    CHECK(rec.norm <= prev_norm + 1e-12);
    CHECK(rec.norm >= lab.opts.norm_floor);
    CHECK(rec.E_prime <= prev_e + 1e-9);
    CHECK(rec.grad_E.norm() <= 0.75);
    prev_norm = rec.norm;
    prev_e = rec.E_prime;
    if (rec.kind != "seed") {
      CHECK(rec.gap >= lab.schedule.gap_bound_uv(rec.n));
      CHECK(std::isfinite(rec.neumann_value));
      CHECK(rec.neumann_value < 1.0);
    }
  }

  SweepTrace ir = ir_sweep(lab.grid, lab.schedule, uv.records.back(), 2,
                           lab.opts);
  for (const auto& f : ir.failures)
    CHECK(f.find("envelope band") != std::string::npos);
  double prev_overlap = 1.0001;
  for (const auto& rec : ir.records) {
    if (rec.m == 0) {
      prev_overlap = rec.overlap_vacuum + 1e-15;
      continue;
    }
    CHECK(rec.gap >= lab.params.zeta * lab.schedule.tau(rec.m));
    CHECK(rec.E_prime <= 0.5 * lab.params.P.squaredNorm() + 1e-9);
    // infrared catastrophe trend: vacuum overlap decreases
    CHECK(rec.overlap_vacuum < prev_overlap);
    prev_overlap = rec.overlap_vacuum;
  }
}

TEST_CASE("ir gap bound at small coupling on a tiny grid") {
  Lab lab(0.01, 1, 1);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 1, lab.opts);
  SweepTrace ir = ir_sweep(lab.grid, lab.schedule, uv.records.back(), 1,
                           lab.opts);
  REQUIRE(ir.records.size() == 2);
  double bound = lab.params.zeta * lab.schedule.tau(1);
  CHECK(ir.records.back().gap >= bound);

  // dense oracle on the same operator
  FockBasis basis = enumerate_basis(lab.grid, lab.grid.active_modes(1, 1), 2);
  SpMat h = assemble_gross(lab.grid, basis, lab.params.P, lab.params.g, 1, 1,
                           lab.schedule)
                .op;
  Eigen::SelfAdjointEigenSolver<MatrixX> eig{MatrixX(h)};
  CHECK(eig.eigenvalues()[1] - eig.eigenvalues()[0] >= bound);
}

TEST_CASE("gradient against central finite differences") {
  Lab lab(0.05, 2, 1);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 2, lab.opts);
  SweepTrace ir = ir_sweep(lab.grid, lab.schedule, uv.records.back(), 1,
                           lab.opts);
  const GroundStateRecord& rec = ir.records.back();

  FockBasis basis = enumerate_basis(lab.grid, lab.grid.active_modes(2, 1), 2);
  const double h = 1e-4;
  Vec3 fd;
  for (int a = 0; a < 3; ++a) {
    Vec3 dp = Vec3::Zero();
    dp[a] = h;
    double ep = ground_state(assemble_gross(lab.grid, basis,
                                            lab.params.P + dp, lab.params.g, 2,
                                            1, lab.schedule)
                                 .op)
                    .E0;
    double em = ground_state(assemble_gross(lab.grid, basis,
                                            lab.params.P - dp, lab.params.g, 2,
                                            1, lab.schedule)
                                 .op)
                    .E0;
    fd[a] = (ep - em) / (2.0 * h);
  }
  CHECK((rec.grad_E - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));

  CHECK_THROWS_AS(grad_E(VectorX::Zero(basis.dim()), lab.params.P, basis,
                         lab.params.g, 2),
                  DomainError);
}

TEST_CASE("rotation back to the bare frame") {
  Lab lab(0.05, 2, 0);
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 2, lab.opts);
  const GroundStateRecord& rec = uv.records.back();
  FockBasis basis = enumerate_basis(lab.grid, lab.grid.active_modes(2, 0), 2);
  GrossData gross =
      assemble_gross_data(lab.grid, basis, lab.params.g, 2, lab.schedule);

  VectorX back = gross_backtransform(rec.state, gross);
  CHECK(std::abs(back.norm() - rec.state.norm()) <= 1e-12 * rec.state.norm());

  // g = 0 is the identity
  GrossData gross0 =
      assemble_gross_data(lab.grid, basis, 0.0, 2, lab.schedule);
  VectorX same = gross_backtransform(rec.state, gross0);
  CHECK((same - rec.state).norm() <= 1e-14);

  // at the physical coupling the rotated state reproduces the bare energy
  // to rounding: <back, H_bare back> - V_self_disc = E'
  {
    FiberHamiltonian bare = assemble_bare(lab.grid, basis, lab.params.P,
                                          lab.params.g, 2, 0, lab.schedule);
    double e_bare = back.dot(bare.op * back) / back.squaredNorm();
    CHECK(std::abs(e_bare - gross.v_self_discrete - rec.E_prime) <= 1e-10);
  }

  // the truncation defect of the conjugation only becomes visible at strong
  // coupling; there the residual shrinks as the occupation cap grows
  double prev_err = 1e300;
  const double g_strong = 3.0;
  for (int nmax : {2, 3, 4}) {
    FockBasis b = enumerate_basis(lab.grid, lab.grid.active_modes(2, 0), nmax);
    GrossData gd = assemble_gross_data(lab.grid, b, g_strong, 2, lab.schedule);
    FiberHamiltonian bare = assemble_bare(lab.grid, b, lab.params.P, g_strong,
                                          2, 0, lab.schedule);
    SpectralResult gs = ground_state(
        assemble_gross(lab.grid, b, lab.params.P, g_strong, 2, 0, lab.schedule)
            .op);
    VectorX psi = gross_backtransform(gs.ground, gd);
    double e_bare = psi.dot(bare.op * psi) / psi.squaredNorm();
    double err = std::abs(e_bare - gd.v_self_discrete - gs.E0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 1e-3);
}

TEST_CASE("norm floor aborts the sweep") {
  Lab lab(0.05, 3, 0);
  lab.opts.norm_floor = 1.0 - 1e-9;  // even tiny projection losses trip it
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 3, lab.opts);
  CHECK(uv.aborted);
  CHECK_FALSE(uv.passed);
  CHECK(uv.abort_reason.find("below floor") != std::string::npos);
}

TEST_CASE("joint sweep honors the scaling and records the diffs") {
  Lab lab(0.05, 4, 2, 1.9, 0.45, Vec3(0.1, 0.0, 0.0), 5.0, 1.0);
  // alpha_bar forced tiny: alpha_min is then dominated by the first term,
  // and the sub-minimal alpha_prime below must be flagged, not fatal
  SweepTrace joint = joint_sweep(lab.grid, lab.schedule, 2, 2, lab.opts);
  CHECK_FALSE(joint.passed);  // alpha_prime < alpha_min is recorded
  bool flagged = false;
  for (const auto& f : joint.failures)
    if (f.find("alpha_min") != std::string::npos) flagged = true;
  CHECK(flagged);

  std::vector<int> landing_n;
  for (const auto& rec : joint.records)
    if (rec.kind == "joint-ir") {
      landing_n.push_back(rec.n);
      CHECK(std::isfinite(rec.phi_diff));
      CHECK(std::isfinite(rec.eta_diff));
      CHECK(std::isfinite(rec.grad_diff_uv));
      CHECK(rec.n == 2 * rec.m);
    }
  CHECK(landing_n == std::vector<int>{2, 4});
  CHECK_FALSE(joint.aborted);

  // g = 0: trivial trace with vanishing diffs
  Lab free(0.0, 2, 1, 1.9, 0.45, Vec3(0.1, 0.0, 0.0), 5.0, 1.0);
  SweepTrace trivial = joint_sweep(free.grid, free.schedule, 2, 1, free.opts);
  for (const auto& rec : trivial.records)
    if (rec.kind == "joint-ir") {
      CHECK(rec.phi_diff <= 1e-10);
      CHECK(rec.eta_diff <= 1e-10);
    }
}

TEST_CASE("envelope fits") {
  // synthetic data following the law exactly passes
  const double beta = 1.9;
  std::vector<double> env, vals;
  for (int n = 1; n <= 10; ++n) {
    double e = std::sqrt(0.9 * n / std::pow(beta, n));
    env.push_back(e);
    vals.push_back(0.37 * e);
  }
  RateFit good = fit_envelope("exact-law", vals, env);
  CHECK(good.pass);
  CHECK(good.prefactor == doctest::Approx(0.37).epsilon(1e-12));

  // deliberately mis-scaled envelope (beta^n -> beta^{n/2}) fails
  std::vector<double> bad_env;
  for (int n = 1; n <= 10; ++n)
    bad_env.push_back(std::sqrt(0.9 * n / std::pow(beta, 0.5 * n)));
  RateFit bad = fit_envelope("mis-scaled", vals, bad_env);
  CHECK_FALSE(bad.pass);

  // all-zero diffs pass vacuously
  RateFit vac = fit_envelope("vacuous", {0.0, 0.0, 0.0}, {1.0, 0.5, 0.25});
  CHECK(vac.pass);
  CHECK(vac.points == 0);
}

TEST_CASE("deeper truncation runs through the Krylov path") {
  Lab lab(0.05, 3, 2);
  lab.opts.n_max_occupation = 3;
  lab.opts.record_neumann = false;  // dense-only diagnostic
  SweepTrace uv = uv_sweep(lab.grid, lab.schedule, 3, lab.opts);
  SweepTrace ir = ir_sweep(lab.grid, lab.schedule, uv.records.back(), 2,
                           lab.opts);
  REQUIRE(ir.records.size() == 3);
  bool used_iterative = false;
  double prev_e = 1e300;
  for (const auto& rec : ir.records) {
    used_iterative = used_iterative || !rec.dense_path;
    CHECK(rec.E_prime <= prev_e + 1e-9);
    prev_e = rec.E_prime;
    if (rec.m >= 1) CHECK(rec.gap >= lab.params.zeta * lab.schedule.tau(rec.m));
    CHECK(rec.norm >= lab.opts.norm_floor);
  }
  CHECK(used_iterative);

  // cross-path consistency at the (3,1) step: dense and Krylov engines agree
  FockBasis basis = enumerate_basis(lab.grid, lab.grid.active_modes(3, 1), 3);
  SpMat h = assemble_gross(lab.grid, basis, lab.params.P, lab.params.g, 3, 1,
                           lab.schedule)
                .op;
  SpectralOptions dense_opts;
  dense_opts.dense_crossover = 4000;
  SpectralOptions iter_opts;
  iter_opts.dense_crossover = 1000;
  SpectralResult rd = ground_state(h, dense_opts);
  SpectralResult ri = ground_state(h, iter_opts);
  CHECK(rd.dense_path);
  CHECK_FALSE(ri.dense_path);
  CHECK(std::abs(rd.E0 - ri.E0) <= 1e-9);
  CHECK(std::abs(std::abs(rd.ground.dot(ri.ground)) - 1.0) <= 1e-8);
}

TEST_CASE("joint scaling: dressed increments stay summable over m <= 4") {
  // alpha_bar pinned to 1 so the admissibility flag reflects only the first
  // term; the sweep itself runs at alpha' = 2 to stay desk-sized
  Lab lab(0.05, 8, 4, 1.9, 0.45, Vec3(0.1, 0.0, 0.0), 5.0, 1.0);
  lab.opts.record_neumann = false;
  SweepTrace joint = joint_sweep(lab.grid, lab.schedule, 2, 4, lab.opts);
  REQUIRE_FALSE(joint.aborted);

  std::vector<double> phi_diffs;
  for (const auto& rec : joint.records)
    if (rec.kind == "joint-ir") {
      CHECK(rec.n == 2 * rec.m);
      REQUIRE(std::isfinite(rec.phi_diff));
      phi_diffs.push_back(rec.phi_diff);
    }
  REQUIRE(phi_diffs.size() == 4);
  // decreasing increments from the second scale on (the m = 1 step carries
  // the one-off rotation from the undressed seed)
  for (std::size_t i = 2; i < phi_diffs.size(); ++i)
    CHECK(phi_diffs[i] < phi_diffs[i - 1]);
  double partial = 0.0;
  for (double d : phi_diffs) partial += d;
  CHECK(partial < 1.0);
}
