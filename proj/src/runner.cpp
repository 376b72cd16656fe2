#include "nelson/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "nelson/io.hpp"

namespace nelson {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CutoffSchedule make_schedule(const ExperimentConfig& c, const Vec3& P,
                             double g) {
  ModelParams pars = c.model;
  pars.P = P;
  pars.g = g;
  return CutoffSchedule(pars, c.rate_constant_K, c.alpha_bar, c.contour_nodes);
}

std::vector<std::pair<Vec3, double>> experiment_points(
    const ExperimentConfig& c) {
  std::vector<Vec3> ps = c.p_grid.empty() ? std::vector<Vec3>{c.model.P}
                                          : c.p_grid;
  std::vector<double> gs =
      c.g_list.empty() ? std::vector<double>{c.model.g} : c.g_list;
  std::vector<std::pair<Vec3, double>> pts;
  for (double g : gs)
    for (const Vec3& p : ps) pts.emplace_back(p, g);
  return pts;
}

}  // namespace

SweepOptions sweep_options_from(const ExperimentConfig& config) {
  SweepOptions o;
  o.n_max_occupation = config.n_max_occupation;
  o.per_mode_cap = config.per_mode_cap;
  o.basis_hard_limit = config.basis_hard_limit;
  o.spectral.dense_crossover = config.dense_crossover;
  o.spectral.ground_tol = config.ground_tol;
  o.spectral.resolve_tol = config.resolve_tol;
  o.spectral.seed = config.seed;
  o.norm_floor = config.norm_floor;
  o.record_neumann = config.record_neumann;
  o.dressed_sandwich = config.dressed_sandwich;
  return o;
}

PointResult run_point(const ExperimentConfig& config, const Vec3& P, double g) {
  PointResult res;
  res.P = P;
  res.g = g;
  CutoffSchedule schedule = make_schedule(config, P, g);
  ModeGrid grid = build_mode_grid(schedule, config.n_max, config.m_max,
                                  config.radial_per_slice, config.angular);
  SweepOptions opts = sweep_options_from(config);

  res.uv = uv_sweep(grid, schedule, config.n_max, opts);
  res.failed = !res.uv.passed || res.uv.aborted;
  if ((config.run_ir || config.run_dressed) && !res.uv.records.empty() &&
      !res.uv.aborted && config.m_max > 0) {
    const GroundStateRecord& seed = res.uv.records.back();
    res.ir = config.run_dressed
                 ? dressed_sweep(grid, schedule, seed, config.m_max, opts)
                 : ir_sweep(grid, schedule, seed, config.m_max, opts);
    res.ran_ir = true;
    res.failed = res.failed || !res.ir.passed || res.ir.aborted;
  }
  if (config.run_joint) {
    int alpha_prime =
        config.alpha_prime > 0 ? config.alpha_prime : schedule.alpha_min();
    int n_need = alpha_prime * config.m_max;
    if (n_need > config.n_max) {
      res.joint.passed = false;
      res.joint.aborted = true;
      res.joint.abort_reason =
          "joint sweep needs n_max >= alpha_prime * m_max = " +
          std::to_string(n_need);
    } else {
      res.joint = joint_sweep(grid, schedule, alpha_prime, config.m_max, opts);
    }
    res.ran_joint = true;
    res.failed = res.failed || !res.joint.passed || res.joint.aborted;
  }
  return res;
}

int cmd_plan(const ExperimentConfig& config, std::ostream& out) {
  auto points = experiment_points(config);
  json table = json::array();
  bool fatal = false;
  json reports = json::array();
  for (const auto& [P, g] : points) {
    CutoffSchedule schedule = make_schedule(config, P, g);
    ConstraintReport rep = validate_params(schedule.params());
    json checks = json::array();
    for (const auto& c : rep.checks) {
      checks.push_back({{"name", c.name},
                        {"lhs", c.lhs},
                        {"rhs", c.rhs},
                        {"pass", c.pass},
                        {"fatal", c.fatal},
                        {"detail", c.detail}});
      if (!c.pass) {
        out << (c.fatal ? "FATAL " : "warn  ") << c.name << ": " << c.lhs
            << " vs " << c.rhs << "  (" << c.detail << ")\n";
      }
    }
    fatal = fatal || rep.fatal_violation;
    reports.push_back({{"P", {P.x(), P.y(), P.z()}},
                       {"g", g},
                       {"checks", checks},
                       {"fatal_violation", rep.fatal_violation}});
  }

  CutoffSchedule schedule = make_schedule(
      config, points.front().first, points.front().second);
  out << "schedule (kappa=" << config.model.kappa << ", beta="
      << config.model.beta << ", gamma=" << config.model.gamma << ")\n";
  out << "  n   sigma_n        xi_n\n";
  for (int n = 0; n <= config.n_max; ++n) {
    out << "  " << n << "  " << schedule.sigma(n) << "  "
        << schedule.gap_bound_uv(n) << "\n";
    table.push_back({{"kind", "uv"},
                     {"index", n},
                     {"sigma", schedule.sigma(n)},
                     {"xi", schedule.gap_bound_uv(n)}});
  }
  out << "  m   tau_m          zeta*tau_m\n";
  for (int m = 0; m <= config.m_max; ++m) {
    out << "  " << m << "  " << schedule.tau(m) << "  "
        << config.model.zeta * schedule.tau(m) << "\n";
    table.push_back({{"kind", "ir"},
                     {"index", m},
                     {"tau", schedule.tau(m)},
                     {"zeta_tau", config.model.zeta * schedule.tau(m)}});
  }
  out << "  alpha = " << schedule.alpha()
      << ", alpha_min = " << schedule.alpha_min() << "\n";

  fs::create_directories(config.out_dir);
  std::ofstream jf(config.out_dir + "/plan.json");
  jf << json{{"config", config_to_json(config)},
             {"config_hash", config_hash(config)},
             {"constraints", reports},
             {"schedule", table},
             {"alpha", schedule.alpha()},
             {"alpha_min", schedule.alpha_min()}}
            .dump(2)
     << "\n";
  out << (fatal ? "constraint check: FAILED\n" : "constraint check: ok\n");
  return fatal ? 2 : 0;
}

namespace {

struct EmittedPoint {
  std::vector<json> records;
  std::vector<std::pair<std::string, VectorX>> vectors;
  json summary;
  bool failed = false;
};

EmittedPoint emit_point(const ExperimentConfig& config, const Vec3& P, double g,
                        int point_index, const std::string& hash) {
  EmittedPoint ep;
  PointResult pr = run_point(config, P, g);
  ep.failed = pr.failed;

  auto emit_trace = [&](const SweepTrace& trace, const std::string& tag) {
    int k = 0;
    for (const auto& rec : trace.records) {
      std::optional<std::string> vec_file;
      if (config.save_vectors && rec.state.size() > 0) {
        std::string name = "vectors/p" + std::to_string(point_index) + "_" +
                           tag + "_" + std::to_string(k) + ".nmv";
        vec_file = name;
        ep.vectors.emplace_back(name, rec.state);
      }
      json j = record_to_json(rec, hash, vec_file);
      j["point"] = point_index;
      j["trace"] = tag;
      ep.records.push_back(std::move(j));
      ++k;
    }
    for (const auto& ds : trace.dressed) {
      if (ds.m == 0) continue;
      json j = dressed_to_json(ds, hash);
      j["point"] = point_index;
      j["trace"] = tag;
      ep.records.push_back(std::move(j));
    }
  };
  emit_trace(pr.uv, "uv");
  if (pr.ran_ir) emit_trace(pr.ir, "ir");
  if (pr.ran_joint) emit_trace(pr.joint, "joint");

  const GroundStateRecord& last =
      pr.ran_ir && !pr.ir.records.empty() ? pr.ir.records.back()
                                          : pr.uv.records.back();
  json failures = json::array();
  auto add_failures = [&](const SweepTrace& t, const std::string& tag) {
    for (const auto& f : t.failures) failures.push_back(tag + ": " + f);
    if (t.aborted) failures.push_back(tag + " aborted: " + t.abort_reason);
  };
  add_failures(pr.uv, "uv");
  if (pr.ran_ir) add_failures(pr.ir, "ir");
  if (pr.ran_joint) add_failures(pr.joint, "joint");

  ep.summary = json{{"point", point_index},
                    {"P", {P.x(), P.y(), P.z()}},
                    {"g", g},
                    {"E_prime", last.E_prime},
                    {"grad_E", {last.grad_E.x(), last.grad_E.y(), last.grad_E.z()}},
                    {"gap", std::isfinite(last.gap) ? json(last.gap) : json(nullptr)},
                    {"norm", last.norm},
                    {"n", last.n},
                    {"m", last.m},
                    {"failed", ep.failed},
                    {"failures", failures}};
  return ep;
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& out) {
  auto points = experiment_points(config);
  // reject invalid configs before any work
  for (const auto& [P, g] : points) {
    CutoffSchedule schedule = make_schedule(config, P, g);
    ConstraintReport rep = validate_params(schedule.params());
    if (rep.fatal_violation) {
      out << "invalid configuration:\n";
      for (const auto& c : rep.checks)
        if (!c.pass && c.fatal)
          out << "  " << c.name << ": " << c.lhs << " vs " << c.rhs << "\n";
      return 2;
    }
  }

  std::string hash = config_hash(config);
  fs::create_directories(config.out_dir);
  fs::create_directories(config.out_dir + "/vectors");
  {
    std::ofstream cf(config.out_dir + "/config.json");
    cf << config_to_json(config).dump(2) << "\n";
  }

  int nthreads = std::max(1, config.threads);
  std::vector<EmittedPoint> results(points.size());
  if (nthreads == 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      results[i] =
          emit_point(config, points[i].first, points[i].second,
                     static_cast<int>(i), hash);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= points.size()) return;
        results[i] = emit_point(config, points[i].first, points[i].second,
                                static_cast<int>(i), hash);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(nthreads, points.size()); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  bool any_failed = false;
  std::ofstream records(config.out_dir + "/records.jsonl", std::ios::binary);
  std::ofstream csv(config.out_dir + "/mass_shell.csv", std::ios::binary);
  csv << "P_x,P_y,P_z,g,n,m,E_prime,gradE_x,gradE_y,gradE_z,gap,norm,"
         "config_hash\n";
  json summaries = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    EmittedPoint& ep = results[i];
    any_failed = any_failed || ep.failed;
    for (const auto& r : ep.records) records << r.dump() << "\n";
    for (const auto& [name, v] : ep.vectors)
      write_nmv(config.out_dir + "/" + name, v);
    const json& s = ep.summary;
    csv << fmt(s["P"][0].get<double>()) << "," << fmt(s["P"][1].get<double>())
        << "," << fmt(s["P"][2].get<double>()) << ","
        << fmt(s["g"].get<double>()) << "," << s["n"] << "," << s["m"] << ","
        << fmt(s["E_prime"].get<double>()) << ","
        << fmt(s["grad_E"][0].get<double>()) << ","
        << fmt(s["grad_E"][1].get<double>()) << ","
        << fmt(s["grad_E"][2].get<double>()) << ","
        << (s["gap"].is_null() ? "inf" : fmt(s["gap"].get<double>())) << ","
        << fmt(s["norm"].get<double>()) << "," << hash << "\n";
    summaries.push_back(std::move(ep.summary));
  }
  {
    std::ofstream rf(config.out_dir + "/report.json");
    rf << json{{"config_hash", hash},
               {"points", summaries},
               {"failed", any_failed}}
              .dump(2)
       << "\n";
  }
  out << "wrote " << config.out_dir << "/records.jsonl ("
      << points.size() << " points)\n";
  return any_failed ? 1 : 0;
}

namespace {

struct Artifact {
  ExperimentConfig config;
  std::string hash;
  // records grouped by (point, trace)
  std::map<std::pair<int, std::string>, std::vector<json>> traces;
};

Artifact load_artifact(const std::string& dir) {
  Artifact a;
  std::ifstream cf(dir + "/config.json");
  if (!cf) throw DomainError("missing " + dir + "/config.json");
  a.config = config_from_json(json::parse(cf));
  a.hash = config_hash(a.config);
  std::ifstream rf(dir + "/records.jsonl");
  if (!rf) throw DomainError("missing " + dir + "/records.jsonl");
  std::string line;
  while (std::getline(rf, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    a.traces[{j.at("point").get<int>(), j.at("trace").get<std::string>()}]
        .push_back(std::move(j));
  }
  if (a.traces.empty()) throw DomainError("no records in " + dir);
  return a;
}

SweepTrace trace_from_json(const std::vector<json>& rows) {
  SweepTrace t;
  for (const auto& j : rows) {
    if (j.at("kind").get<std::string>() == "dressed")
      t.dressed.push_back(dressed_from_json(j));
    else
      t.records.push_back(record_from_json(j));
  }
  return t;
}

}  // namespace

int cmd_verify(const std::string& artifact_dir,
               const std::vector<std::string>& suites, std::ostream& out) {
  Artifact art;
  try {
    art = load_artifact(artifact_dir);
  } catch (const std::exception& e) {
    out << "verify: " << e.what() << "\n";
    return 2;
  }
  const ExperimentConfig& config = art.config;
  auto points = experiment_points(config);
  auto enabled = [&](const std::string& s) {
    const auto& list = suites.empty() ? config.suites : suites;
    for (const auto& x : list)
      if (x == s) return true;
    return false;
  };

  std::vector<VerificationReport> reports;
  bool all_pass = true;

  AppendixConstants ac = appendix_constants(config.model.kappa);
  AprioriConstants apc = derive_apriori_constants(ac, config.model.kappa);

  // final record per point (deepest cutoffs)
  std::vector<GroundStateRecord> finals;
  std::vector<SweepTrace> uv_traces, ir_traces;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it_ir = art.traces.find({static_cast<int>(i), "ir"});
    auto it_uv = art.traces.find({static_cast<int>(i), "uv"});
    if (it_uv == art.traces.end()) {
      out << "verify: missing uv trace for point " << i << "\n";
      return 2;
    }
    uv_traces.push_back(trace_from_json(it_uv->second));
    if (it_ir != art.traces.end()) {
      ir_traces.push_back(trace_from_json(it_ir->second));
      finals.push_back(ir_traces.back().records.back());
    } else {
      ir_traces.emplace_back();
      finals.push_back(uv_traces.back().records.back());
    }
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [P, g] = points[i];
    CutoffSchedule schedule = make_schedule(config, P, g);
    if (enabled("gaps")) {
      reports.push_back(check_gaps(uv_traces[i], schedule));
      if (!ir_traces[i].records.empty())
        reports.push_back(check_gaps(ir_traces[i], schedule));
    }
    if (enabled("rates")) {
      reports.push_back(check_rate_envelopes(uv_traces[i], schedule));
      if (!ir_traces[i].records.empty())
        reports.push_back(check_rate_envelopes(ir_traces[i], schedule));
    }
    if (enabled("window"))
      reports.push_back(check_energy_window(finals[i], apc.c_b));
    if (enabled("froehlich")) {
      const GroundStateRecord& rec = finals[i];
      // rebuild the operator context and load the state
      auto key = std::make_pair(static_cast<int>(i),
                                ir_traces[i].records.empty() ? std::string("uv")
                                                             : std::string("ir"));
      const auto& rows = art.traces.at(key);
      const json& last_row = *std::find_if(
          rows.rbegin(), rows.rend(),
          [](const json& j) { return j.at("kind") != "dressed"; });
      if (!last_row.contains("vector_file")) {
        out << "verify: froehlich suite needs saved vectors\n";
        return 2;
      }
      VectorX psi =
          read_nmv(artifact_dir + "/" +
                   last_row.at("vector_file").get<std::string>());
      ModeGrid grid = build_mode_grid(schedule, config.n_max, config.m_max,
                                      config.radial_per_slice, config.angular);
      SweepOptions so = sweep_options_from(config);
      FockBasis basis =
          enumerate_basis(grid, grid.active_modes(rec.n, rec.m),
                          so.n_max_occupation, so.per_mode_cap,
                          so.basis_hard_limit);
      FroehlichReport fr = check_froehlich(psi, rec.E_prime, grid, basis,
                                           schedule, rec.n, rec.m, rec.grad_E,
                                           config.froehlich_tol, so.spectral);
      reports.push_back(fr.report);
    }
    if (enabled("apriori")) {
      const GroundStateRecord& rec = finals[i];
      auto key = std::make_pair(static_cast<int>(i),
                                ir_traces[i].records.empty() ? std::string("uv")
                                                             : std::string("ir"));
      const auto& rows = art.traces.at(key);
      const json& last_row = *std::find_if(
          rows.rbegin(), rows.rend(),
          [](const json& j) { return j.at("kind") != "dressed"; });
      if (last_row.contains("vector_file")) {
        VectorX psi = read_nmv(artifact_dir + "/" +
                               last_row.at("vector_file").get<std::string>());
        ModeGrid grid = build_mode_grid(schedule, config.n_max, config.m_max,
                                        config.radial_per_slice, config.angular);
        SweepOptions so = sweep_options_from(config);
        FockBasis basis =
            enumerate_basis(grid, grid.active_modes(rec.n, rec.m),
                            so.n_max_occupation, so.per_mode_cap,
                            so.basis_hard_limit);
        SpMat h_prime = assemble_gross(grid, basis, P, g, rec.n, rec.m,
                                       schedule)
                            .op;
        SpMat h_free = free_hamiltonian(basis, P);
        reports.push_back(check_apriori(psi, h_prime, h_free, g, apc));
      }
    }
  }
  if (enabled("gross")) reports.push_back(check_gross(finals));
  if (enabled("lipschitz")) {
    VerificationReport rep;
    rep.suite = "dispersion-lipschitz";
    for (std::size_t i = 0; i < finals.size(); ++i)
      for (std::size_t j = 0; j < finals.size(); ++j) {
        if (i == j) continue;
        if (finals[i].g != finals[j].g || finals[i].n != finals[j].n ||
            finals[i].m != finals[j].m)
          continue;
        Vec3 k = finals[i].P - finals[j].P;
        auto sub = check_lipschitz(finals[i], finals[j], k);
        for (auto& c : sub.checks) {
          c.name += "(pair " + std::to_string(i) + "," + std::to_string(j) + ")";
          rep.add(std::move(c));
        }
      }
    reports.push_back(std::move(rep));
  }

  for (const auto& r : reports) {
    all_pass = all_pass && r.all_pass();
    for (const auto& c : r.checks)
      if (!c.pass)
        out << "FAIL " << r.suite << "/" << c.name << ": measured "
            << c.measured << " vs bound " << c.bound << "\n";
  }
  // write machine-readable outputs
  {
    json all = json::array();
    for (const auto& r : reports) {
      json checks = json::array();
      for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"reference", c.reference},
                          {"measured", c.measured},
                          {"bound", c.bound},
                          {"pass", c.pass},
                          {"tol", c.tol},
                          {"detail", c.detail}});
      all.push_back(
          {{"suite", r.suite}, {"pass", r.all_pass()}, {"checks", checks}});
    }
    std::ofstream vf(artifact_dir + "/verification.json");
    vf << json{{"config_hash", art.hash}, {"pass", all_pass},
               {"suites", all}}
              .dump(2)
       << "\n";
    write_report_csv(reports, artifact_dir + "/verification.csv");
  }
  out << (all_pass ? "verification: all checks passed\n"
                   : "verification: FAILURES present\n");
  return all_pass ? 0 : 1;
}

int cmd_report(const std::string& artifact_dir, std::ostream& out) {
  Artifact art;
  try {
    art = load_artifact(artifact_dir);
  } catch (const std::exception& e) {
    out << "report: " << e.what() << "\n";
    return 2;
  }
  const ExperimentConfig& config = art.config;
  auto points = experiment_points(config);

  // E(P) mass-shell curve per g (from the deepest record of each point)
  {
    std::ofstream f(artifact_dir + "/mass_shell_curve.csv");
    f << "g,P_x,P_y,P_z,Pnorm,E_prime\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::string tr = art.traces.count({static_cast<int>(i), "ir"}) ? "ir" : "uv";
      const auto& rows = art.traces.at({static_cast<int>(i), tr});
      for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if ((*it).at("kind") == "dressed") continue;
        GroundStateRecord rec = record_from_json(*it);
        f << fmt(rec.g) << "," << fmt(rec.P.x()) << "," << fmt(rec.P.y()) << ","
          << fmt(rec.P.z()) << "," << fmt(rec.P.norm()) << ","
          << fmt(rec.E_prime) << "\n";
        break;
      }
    }
  }
  // gap vs n with the xi_n overlay
  {
    std::ofstream f(artifact_dir + "/gap_vs_n.csv");
    f << "point,n,gap,xi_n\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto it = art.traces.find({static_cast<int>(i), "uv"});
      if (it == art.traces.end()) continue;
      CutoffSchedule schedule =
          make_schedule(config, points[i].first, points[i].second);
      for (const auto& row : it->second) {
        if (row.at("kind") == "dressed") continue;
        GroundStateRecord rec = record_from_json(row);
        if (rec.kind == "seed") continue;
        f << i << "," << rec.n << "," << fmt(rec.gap) << ","
          << fmt(schedule.gap_bound_uv(rec.n)) << "\n";
      }
    }
  }
  // infrared catastrophe: vacuum overlap and dressed diffs vs m
  bool catastrophe_monotone = true;
  {
    std::ofstream f(artifact_dir + "/ir_catastrophe.csv");
    f << "point,m,overlap_vacuum,phi_step_diff\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto it = art.traces.find({static_cast<int>(i), "ir"});
      if (it == art.traces.end()) continue;
      std::map<int, double> overlap, phi_diff;
      for (const auto& row : it->second) {
        if (row.at("kind") == "dressed") {
          DressedState ds = dressed_from_json(row);
          phi_diff[ds.m] = ds.diff_phi_prev;
        } else {
          GroundStateRecord rec = record_from_json(row);
          if (rec.m >= 1) overlap[rec.m] = rec.overlap_vacuum;
        }
      }
      double prev = 2.0;
      for (const auto& [m, ov] : overlap) {
        double pd = phi_diff.count(m) ? phi_diff[m]
                                      : std::numeric_limits<double>::quiet_NaN();
        f << i << "," << m << "," << fmt(ov) << ","
          << (std::isnan(pd) ? "nan" : fmt(pd)) << "\n";
        if (points[i].second != 0.0 && ov >= prev) catastrophe_monotone = false;
        prev = ov;
      }
    }
  }
  // fitted rates
  {
    std::ofstream f(artifact_dir + "/rates.csv");
    f << "point,trace,law,prefactor,max_log_deviation,points,pass\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      CutoffSchedule schedule =
          make_schedule(config, points[i].first, points[i].second);
      for (const std::string tr : {"uv", "ir", "joint"}) {
        auto it = art.traces.find({static_cast<int>(i), tr});
        if (it == art.traces.end()) continue;
        SweepTrace t = trace_from_json(it->second);
        apply_envelope_checks(t, schedule);
        for (const auto& fit : t.fits)
          f << i << "," << tr << "," << fit.law << "," << fmt(fit.prefactor)
            << "," << fmt(fit.max_log_deviation) << "," << fit.points << ","
            << (fit.pass ? 1 : 0) << "\n";
      }
    }
  }
  out << "wrote mass_shell_curve.csv, gap_vs_n.csv, ir_catastrophe.csv, "
         "rates.csv\n";
  if (!catastrophe_monotone)
    out << "note: vacuum overlap not strictly decreasing on some point\n";
  return 0;
}

}  // namespace nelson
