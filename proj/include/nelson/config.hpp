#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nelson/grid.hpp"
#include "nelson/schedule.hpp"

namespace nelson {

// One experiment: model parameters, schedule depths, grid and solver knobs,
// the (P, g) grid, and output options. Defaults double as documentation;
// `nelson_lab plan` prints the resolved config.
struct ExperimentConfig {
  ModelParams model;

  // schedule
  double rate_constant_K = 5.0;
  std::optional<double> alpha_bar;
  int n_max = 3;
  int m_max = 2;
  int alpha_prime = 0;  // 0: use schedule.alpha_min() when the joint sweep runs

  // grid
  int radial_per_slice = 1;
  AngularSet angular = AngularSet::Axes6;
  int n_max_occupation = 2;
  std::optional<int> per_mode_cap;
  Index basis_hard_limit = 200000;

  // solver
  Index dense_crossover = 2000;
  double ground_tol = 1e-9;
  double resolve_tol = 1e-10;
  int contour_nodes = 64;
  double norm_floor = 0.1;
  double froehlich_tol = 1e-6;

  // sweeps and suites
  bool run_uv = true;
  bool run_ir = true;
  bool run_dressed = true;
  bool run_joint = false;
  bool record_neumann = true;
  bool dressed_sandwich = true;
  std::vector<std::string> suites = {"gaps",  "rates",     "window",
                                     "gross", "lipschitz", "froehlich",
                                     "apriori"};

  // experiment grid
  std::vector<Vec3> p_grid;       // empty: just model.P
  std::vector<double> g_list;     // empty: just model.g

  // output
  std::string out_dir = "out";
  bool save_vectors = true;
  std::uint64_t seed = 1;
  int threads = 1;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

// Accepts JSON or a key-value text format with dotted keys
// ("model.g = 0.05"); '#' starts a comment. Values are parsed as JSON
// fragments, so arrays work in both encodings.
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical JSON encoding; carried on every output row.
std::string config_hash(const ExperimentConfig& c);

}  // namespace nelson
