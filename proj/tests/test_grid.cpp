#include <doctest.h>

#include <cmath>

#include "nelson/grid.hpp"

using namespace nelson;

namespace {

CutoffSchedule make_schedule(double beta = 1.5, double gamma = 0.25) {
  ModelParams p;
  p.kappa = 1.5;
  p.beta = beta;
  p.gamma = gamma;
  return CutoffSchedule(p);
}

}  // namespace

TEST_CASE("mode counts and shells") {
  CutoffSchedule s = make_schedule();
  ModeGrid g = build_mode_grid(s, 2, 1, 1, AngularSet::Axes6);
  CHECK(g.modes.size() == 18);
  CHECK(g.shell_modes({ShellId::UV, 1}).size() == 6);
  CHECK(g.shell_modes({ShellId::UV, 2}).size() == 6);
  CHECK(g.shell_modes({ShellId::IR, 1}).size() == 6);
  CHECK(g.active_modes(1, 0).size() == 6);
  CHECK(g.active_modes(2, 1).size() == 18);

  ModeGrid g2 = build_mode_grid(s, 1, 0, 2, AngularSet::Cube8Axes6);
  CHECK(g2.modes.size() == 2 * 14);
}

TEST_CASE("mode momenta lie inside their labeled shells") {
  CutoffSchedule s = make_schedule();
  ModeGrid g = build_mode_grid(s, 3, 2, 2, AngularSet::Axes6);
  for (const Mode& m : g.modes) {
    double r = m.omega();
    if (m.shell.kind == ShellId::UV) {
      CHECK(r >= s.sigma(m.shell.index - 1));
      CHECK(r < s.sigma(m.shell.index));
    } else {
      CHECK(r > s.tau(m.shell.index));
      CHECK(r <= s.tau(m.shell.index - 1));
    }
  }
}

TEST_CASE("weights partition the shell volume exactly") {
  CutoffSchedule s = make_schedule();
  ModeGrid g = build_mode_grid(s, 2, 2, 3, AngularSet::Cube8Axes6);
  const double pi = 3.14159265358979323846;
  // hand value for [sigma_0, sigma_1) = [1.5, 2.25)
  double vol_uv1 = 4.0 * pi / 3.0 * (std::pow(2.25, 3) - std::pow(1.5, 3));
  CHECK(vol_uv1 == doctest::Approx(33.58).epsilon(1e-3));
  CHECK(g.shell_volume_sum({ShellId::UV, 1}) ==
        doctest::Approx(vol_uv1).epsilon(1e-12));
  for (int n = 1; n <= 2; ++n) {
    double vol = 4.0 * pi / 3.0 *
                 (std::pow(s.sigma(n), 3) - std::pow(s.sigma(n - 1), 3));
    CHECK(g.shell_volume_sum({ShellId::UV, n}) ==
          doctest::Approx(vol).epsilon(1e-12));
  }
  for (int m = 1; m <= 2; ++m) {
    double vol = 4.0 * pi / 3.0 *
                 (std::pow(s.tau(m - 1), 3) - std::pow(s.tau(m), 3));
    CHECK(g.shell_volume_sum({ShellId::IR, m}) ==
          doctest::Approx(vol).epsilon(1e-12));
  }
}

TEST_CASE("direction set is closed under k -> -k with equal weights") {
  CutoffSchedule s = make_schedule();
  for (AngularSet a : {AngularSet::Axes6, AngularSet::Cube8Axes6}) {
    ModeGrid g = build_mode_grid(s, 1, 1, 2, a);
    for (const Mode& m : g.modes) {
      bool found = false;
      for (const Mode& other : g.modes) {
        if ((other.k + m.k).norm() < 1e-14 && other.w == m.w &&
            other.shell == m.shell) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("degenerate shells are rejected by name") {
  CutoffSchedule s = make_schedule();
  CHECK_THROWS_AS(build_mode_grid(s, 1, 1, 0, AngularSet::Axes6), DomainError);
}
