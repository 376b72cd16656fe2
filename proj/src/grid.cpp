#include "nelson/grid.hpp"

#include <cmath>

namespace nelson {

std::string ShellId::label() const {
  return (kind == UV ? "uv" : "ir") + std::to_string(index);
}

double form_factor(double omega) {
  const double two_pi = 6.28318530717958647692;
  return 1.0 / (std::pow(two_pi, 1.5) * std::sqrt(2.0 * omega));
}

AngularSet angular_set_from_string(const std::string& s) {
  if (s == "axes6") return AngularSet::Axes6;
  if (s == "cube8+axes6") return AngularSet::Cube8Axes6;
  throw DomainError("unknown angular set: " + s);
}

std::string to_string(AngularSet s) {
  return s == AngularSet::Axes6 ? "axes6" : "cube8+axes6";
}

std::vector<Vec3> angular_directions(AngularSet s) {
  std::vector<Vec3> dirs = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                            {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  if (s == AngularSet::Cube8Axes6) {
    double c = 1.0 / std::sqrt(3.0);
    for (double sx : {1.0, -1.0})
      for (double sy : {1.0, -1.0})
        for (double sz : {1.0, -1.0}) dirs.push_back(Vec3(sx * c, sy * c, sz * c));
  }
  return dirs;
}

std::vector<int> ModeGrid::shell_modes(ShellId shell) const {
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(modes.size()); ++i)
    if (modes[i].shell == shell) ids.push_back(i);
  return ids;
}

std::vector<int> ModeGrid::active_modes(int n, int m) const {
  if (n > n_uv || m > m_ir)
    throw DomainError("active_modes: cutoffs beyond grid coverage");
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
    const ShellId& s = modes[i].shell;
    if ((s.kind == ShellId::UV && s.index <= n) ||
        (s.kind == ShellId::IR && s.index <= m))
      ids.push_back(i);
  }
  return ids;
}

double ModeGrid::shell_volume_sum(ShellId shell) const {
  double sum = 0.0;
  for (const Mode& mode : modes)
    if (mode.shell == shell) sum += mode.w;
  return sum;
}

namespace {

// One shell [lo, hi): radial_per_slice equal-volume sub-shells, node at the
// volume midpoint of each, sub-shell volume split evenly over the angular
// directions.
void emit_shell(std::vector<Mode>& out, ShellId shell, double lo, double hi,
                int radial, const std::vector<Vec3>& dirs) {
  const double pi = 3.14159265358979323846;
  if (!(hi > lo) || !(lo >= 0.0))
    throw DomainError("build_mode_grid: empty shell " + shell.label());
  double vol = 4.0 * pi / 3.0 * (hi * hi * hi - lo * lo * lo);
  for (int i = 0; i < radial; ++i) {
    double cube_mid =
        lo * lo * lo + (i + 0.5) / radial * (hi * hi * hi - lo * lo * lo);
    double r = std::cbrt(cube_mid);
    double w = vol / radial / static_cast<double>(dirs.size());
    for (const Vec3& d : dirs) out.push_back(Mode{r * d, w, shell});
  }
}

}  // namespace

ModeGrid build_mode_grid(const CutoffSchedule& schedule, int n_uv, int m_ir,
                         int radial_per_slice, AngularSet angular) {
  if (radial_per_slice < 1)
    throw DomainError("build_mode_grid: radial_per_slice >= 1 required");
  if (n_uv < 0 || m_ir < 0)
    throw DomainError("build_mode_grid: negative shell counts");
  ModeGrid grid;
  grid.n_uv = n_uv;
  grid.m_ir = m_ir;
  grid.radial_per_slice = radial_per_slice;
  grid.angular = angular;
  auto dirs = angular_directions(angular);
  for (int n = 1; n <= n_uv; ++n)
    emit_shell(grid.modes, ShellId{ShellId::UV, n}, schedule.sigma(n - 1),
               schedule.sigma(n), radial_per_slice, dirs);
  for (int m = 1; m <= m_ir; ++m)
    emit_shell(grid.modes, ShellId{ShellId::IR, m}, schedule.tau(m),
               schedule.tau(m - 1), radial_per_slice, dirs);
  return grid;
}

}  // namespace nelson
