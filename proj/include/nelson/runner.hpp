#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nelson/config.hpp"
#include "nelson/multiscale.hpp"
#include "nelson/verify.hpp"

namespace nelson {

// Exit codes: 0 ok, 1 check/sweep failure, 2 invalid input.
int cmd_plan(const ExperimentConfig& config, std::ostream& out);
int cmd_run(const ExperimentConfig& config, std::ostream& out);
int cmd_verify(const std::string& artifact_dir,
               const std::vector<std::string>& suites, std::ostream& out);
int cmd_report(const std::string& artifact_dir, std::ostream& out);

// Sweeps for one (P, g) point; shared by cmd_run and the test suites.
struct PointResult {
  Vec3 P;
  double g = 0.0;
  SweepTrace uv;
  SweepTrace ir;      // dressed chain records live here when enabled
  SweepTrace joint;
  bool ran_ir = false;
  bool ran_joint = false;
  bool failed = false;
};

PointResult run_point(const ExperimentConfig& config, const Vec3& P, double g);

SweepOptions sweep_options_from(const ExperimentConfig& config);

}  // namespace nelson
