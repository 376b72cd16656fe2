#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nelson/dressing.hpp"
#include "nelson/hamiltonian.hpp"
#include "nelson/spectral.hpp"

namespace nelson {

// One multiscale step's output. States are stored unnormalized along the
// projection chain; normalization happens only at observables.
struct GroundStateRecord {
  std::string kind = "uv";  // uv | ir | joint-uv | joint-ir | seed
  int n = 0;
  int m = 0;
  Vec3 P = Vec3::Zero();
  double g = 0.0;
  double E_prime = 0.0;
  Vec3 grad_E = Vec3::Zero();
  double gap = 0.0;
  VectorX state;  // chain state on the (n, m) active basis
  double norm = 0.0;
  double diff_prev_uv = 0.0;
  double diff_prev_ir = 0.0;
  double neumann_value = std::numeric_limits<double>::quiet_NaN();
  double overlap_vacuum = 0.0;
  double solver_residual = 0.0;
  bool dense_path = true;
  Contour contour;
  bool has_contour = false;
  std::vector<std::string> violations;

  // joint-sweep extras (NaN when not applicable)
  double phi_diff = std::numeric_limits<double>::quiet_NaN();
  double eta_diff = std::numeric_limits<double>::quiet_NaN();
  double grad_diff_uv = std::numeric_limits<double>::quiet_NaN();
};

struct RateFit {
  std::string law;
  double prefactor = 0.0;
  double max_log_deviation = 0.0;
  int points = 0;
  bool pass = true;
};

struct SweepTrace {
  std::vector<GroundStateRecord> records;
  std::vector<DressedState> dressed;  // filled by dressed/joint sweeps
  std::vector<RateFit> fits;
  bool passed = true;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> failures;
};

struct StepArtifacts {
  const FockBasis* basis = nullptr;
  const SpMat* op = nullptr;
  const Contour* contour = nullptr;
  const VectorX* prev_embedded = nullptr;
  const GroundStateRecord* record = nullptr;
  SpectralEngine* engine = nullptr;
};

struct SweepOptions {
  int n_max_occupation = 2;
  std::optional<int> per_mode_cap;
  Index basis_hard_limit = 200000;
  SpectralOptions spectral;
  double norm_floor = 0.1;
  double energy_monotone_tol = 1e-9;
  bool record_neumann = true;
  bool dressed_sandwich = true;
  std::function<void(const StepArtifacts&)> observer;
};

// Stepping machinery shared by the sweeps: per-step active bases, state
// embedding, contour projection, eigensolve and the monitored bounds.
class SweepDriver {
 public:
  SweepDriver(const ModeGrid& grid, const CutoffSchedule& schedule,
              SweepOptions opts);

  const ModeGrid& grid() const { return *grid_; }
  const CutoffSchedule& schedule() const { return *schedule_; }
  const SweepOptions& options() const { return opts_; }

  FockBasis make_basis(int n, int m) const;
  GroundStateRecord initial_record() const;

  // One projection step from `prev` (living at prev.n, prev.m) to (n, m).
  // uv_kind selects the contour family and the envelope bookkeeping.
  GroundStateRecord step(const GroundStateRecord& prev, int n, int m,
                         bool uv_kind, SweepTrace& trace) const;

 private:
  const ModeGrid* grid_;
  const CutoffSchedule* schedule_;
  SweepOptions opts_;
};

Vec3 grad_E(const VectorX& state, const Vec3& P, const FockBasis& basis,
            double g, int uv_n);

// e^{-T} applied to the state; exactly norm-preserving on the truncation.
VectorX gross_backtransform(const VectorX& state, const GrossData& gross);

SweepTrace uv_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                    int n_max, const SweepOptions& opts);

SweepTrace ir_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                    const GroundStateRecord& uv_record, int m_max,
                    const SweepOptions& opts);

// Runs the phi/eta dressing chain on top of the Psi' chain at fixed n.
SweepTrace dressed_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                         const GroundStateRecord& uv_record, int m_max,
                         const SweepOptions& opts);

// Simultaneous removal with n(m) = alpha_prime * m: per m, UV extension
// steps at fixed m-1, one IR step, and dressed states at n(m) and n(m)-1 for
// the eta/phi difference bookkeeping.
SweepTrace joint_sweep(const ModeGrid& grid, const CutoffSchedule& schedule,
                       int alpha_prime, int m_max, const SweepOptions& opts);

// Least-squares prefactor fit of diffs against an envelope; the band is
// +-50% in log space. Fewer than two usable points passes vacuously.
RateFit fit_envelope(const std::string& law, const std::vector<double>& values,
                     const std::vector<double>& envelope,
                     double band = 1.5);

// The monitored scaling laws of a trace; appends to trace.fits and flags
// the trace on band violations.
void apply_envelope_checks(SweepTrace& trace, const CutoffSchedule& schedule);

}  // namespace nelson
