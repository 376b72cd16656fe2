#pragma once

#include <string>
#include <vector>

#include "nelson/schedule.hpp"
#include "nelson/types.hpp"

namespace nelson {

// Shell labels: UV slice n covers [sigma_{n-1}, sigma_n), IR slice m covers
// (tau_m, tau_{m-1}]. Both indices start at 1; the joint range covered by a
// grid is (tau_{m_ir}, sigma_{n_uv}).
struct ShellId {
  enum Kind { UV, IR } kind = UV;
  int index = 1;

  bool operator==(const ShellId&) const = default;
  std::string label() const;
};

struct Mode {
  Vec3 k = Vec3::Zero();
  double w = 0.0;  // quadrature weight (momentum-space volume)
  ShellId shell;

  double omega() const { return k.norm(); }
};

// Form factor rho(k) = (2 pi)^{-3/2} (2 omega)^{-1/2}.
double form_factor(double omega);

enum class AngularSet { Axes6, Cube8Axes6 };
AngularSet angular_set_from_string(const std::string& s);
std::string to_string(AngularSet s);
std::vector<Vec3> angular_directions(AngularSet s);

// Momentum-space discretization respecting the shell structure. Mode
// ordering is fixed: UV shells ascending, then IR shells ascending; within a
// shell, radial sub-shells ascending, then the angular set order. The
// active-mode sets for cutoff pairs (n, m) are nested prefixes of the two
// blocks, which makes state embedding across sweep steps a scatter.
struct ModeGrid {
  std::vector<Mode> modes;
  int n_uv = 0;
  int m_ir = 0;
  int radial_per_slice = 1;
  AngularSet angular = AngularSet::Axes6;

  std::vector<int> shell_modes(ShellId shell) const;
  // Indices of all modes active at cutoffs (n, m), ascending.
  std::vector<int> active_modes(int n, int m) const;
  double shell_volume_sum(ShellId shell) const;
};

ModeGrid build_mode_grid(const CutoffSchedule& schedule, int n_uv, int m_ir,
                         int radial_per_slice, AngularSet angular);

}  // namespace nelson
