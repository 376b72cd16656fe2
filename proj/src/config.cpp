#include "nelson/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nelson {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw DomainError("config: expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("model")) {
    const json& m = j.at("model");
    maybe(m, "g", c.model.g);
    maybe(m, "kappa", c.model.kappa);
    maybe(m, "beta", c.model.beta);
    maybe(m, "gamma", c.model.gamma);
    maybe(m, "zeta", c.model.zeta);
    maybe(m, "theta", c.model.theta);
    if (m.contains("P")) c.model.P = vec3_from(m.at("P"));
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    maybe(s, "K", c.rate_constant_K);
    if (s.contains("alpha_bar") && !s.at("alpha_bar").is_null())
      c.alpha_bar = s.at("alpha_bar").get<double>();
    maybe(s, "n_max", c.n_max);
    maybe(s, "m_max", c.m_max);
    maybe(s, "alpha_prime", c.alpha_prime);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    maybe(g, "radial_per_slice", c.radial_per_slice);
    if (g.contains("angular"))
      c.angular = angular_set_from_string(g.at("angular").get<std::string>());
    maybe(g, "n_max_occupation", c.n_max_occupation);
    if (g.contains("per_mode_cap") && !g.at("per_mode_cap").is_null())
      c.per_mode_cap = g.at("per_mode_cap").get<int>();
    maybe(g, "basis_hard_limit", c.basis_hard_limit);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    maybe(s, "dense_crossover", c.dense_crossover);
    maybe(s, "ground_tol", c.ground_tol);
    maybe(s, "resolve_tol", c.resolve_tol);
    maybe(s, "contour_nodes", c.contour_nodes);
    maybe(s, "norm_floor", c.norm_floor);
    maybe(s, "froehlich_tol", c.froehlich_tol);
  }
  if (j.contains("run")) {
    const json& r = j.at("run");
    maybe(r, "uv", c.run_uv);
    maybe(r, "ir", c.run_ir);
    maybe(r, "dressed", c.run_dressed);
    maybe(r, "joint", c.run_joint);
    maybe(r, "record_neumann", c.record_neumann);
    maybe(r, "dressed_sandwich", c.dressed_sandwich);
    maybe(r, "suites", c.suites);
    if (r.contains("p_grid")) {
      c.p_grid.clear();
      for (const auto& p : r.at("p_grid")) c.p_grid.push_back(vec3_from(p));
    }
    maybe(r, "g_list", c.g_list);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    maybe(o, "dir", c.out_dir);
    maybe(o, "save_vectors", c.save_vectors);
    maybe(o, "seed", c.seed);
    maybe(o, "threads", c.threads);
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json p_grid = json::array();
  for (const Vec3& p : c.p_grid) p_grid.push_back({p.x(), p.y(), p.z()});
  return json{
      {"model",
       {{"g", c.model.g},
        {"kappa", c.model.kappa},
        {"beta", c.model.beta},
        {"gamma", c.model.gamma},
        {"zeta", c.model.zeta},
        {"theta", c.model.theta},
        {"P", {c.model.P.x(), c.model.P.y(), c.model.P.z()}}}},
      {"schedule",
       {{"K", c.rate_constant_K},
        {"alpha_bar", c.alpha_bar ? json(*c.alpha_bar) : json(nullptr)},
        {"n_max", c.n_max},
        {"m_max", c.m_max},
        {"alpha_prime", c.alpha_prime}}},
      {"grid",
       {{"radial_per_slice", c.radial_per_slice},
        {"angular", to_string(c.angular)},
        {"n_max_occupation", c.n_max_occupation},
        {"per_mode_cap", c.per_mode_cap ? json(*c.per_mode_cap) : json(nullptr)},
        {"basis_hard_limit", c.basis_hard_limit}}},
      {"solver",
       {{"dense_crossover", c.dense_crossover},
        {"ground_tol", c.ground_tol},
        {"resolve_tol", c.resolve_tol},
        {"contour_nodes", c.contour_nodes},
        {"norm_floor", c.norm_floor},
        {"froehlich_tol", c.froehlich_tol}}},
      {"run",
       {{"uv", c.run_uv},
        {"ir", c.run_ir},
        {"dressed", c.run_dressed},
        {"joint", c.run_joint},
        {"record_neumann", c.record_neumann},
        {"dressed_sandwich", c.dressed_sandwich},
        {"suites", c.suites},
        {"p_grid", p_grid},
        {"g_list", c.g_list}}},
      {"output",
       {{"dir", c.out_dir},
        {"save_vectors", c.save_vectors},
        {"seed", c.seed},
        {"threads", c.threads}}}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("load_config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return config_from_json(json::parse(text));

  // key-value format: dotted keys, one per line, values as JSON fragments
  json j = json::object();
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw DomainError("load_config: malformed line " +
                          std::to_string(lineno));
      continue;
    }
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError("load_config: empty key at line " +
                                       std::to_string(lineno));
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::exception&) {
      parsed = value;  // bare string
    }
    json* cursor = &j;
    std::size_t pos = 0;
    while (true) {
      std::size_t dot = key.find('.', pos);
      std::string part = key.substr(pos, dot - pos);
      if (dot == std::string::npos) {
        (*cursor)[part] = parsed;
        break;
      }
      cursor = &((*cursor)[part]);
      pos = dot + 1;
    }
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) {
  // identifies the experiment: destination and worker count excluded, the
  // seed kept (it enters the numerics)
  json j = config_to_json(c);
  j.erase("output");
  j["seed"] = c.seed;
  std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace nelson
