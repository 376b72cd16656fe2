#include "nelson/io.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace nelson {

namespace {

using nlohmann::json;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_payload(std::ostream& out, const double* data, std::size_t count) {
  // serialize doubles explicitly little-endian
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], 8);
    put_u64(out, bits);
  }
}

void write_nmv_impl(const std::string& path, const double* data,
                    std::uint64_t dim, std::uint8_t kind,
                    std::size_t doubles_count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("write_nmv: cannot open " + path);
  const unsigned char magic[4] = {0x4E, 0x4D, 0x53, 0x56};
  out.write(reinterpret_cast<const char*>(magic), 4);
  put_u32(out, 1);
  put_u64(out, dim);
  out.put(static_cast<char>(kind));
  write_payload(out, data, doubles_count);
}

double nan_or(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null())
    return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

void write_nmv(const std::string& path, const VectorX& v) {
  write_nmv_impl(path, v.data(), static_cast<std::uint64_t>(v.size()), 0,
                 static_cast<std::size_t>(v.size()));
}

void write_nmv(const std::string& path, const VectorXc& v) {
  write_nmv_impl(path, reinterpret_cast<const double*>(v.data()),
                 static_cast<std::uint64_t>(v.size()), 1,
                 static_cast<std::size_t>(2 * v.size()));
}

VectorX read_nmv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("read_nmv: cannot open " + path);
  unsigned char magic[4];
  in.read(reinterpret_cast<char*>(magic), 4);
  if (!(magic[0] == 0x4E && magic[1] == 0x4D && magic[2] == 0x53 &&
        magic[3] == 0x56))
    throw DomainError("read_nmv: bad magic in " + path);
  std::uint32_t version = get_u32(in);
  if (version != 1) throw DomainError("read_nmv: unsupported version");
  std::uint64_t dim = get_u64(in);
  int kind = in.get();
  if (kind != 0) throw DomainError("read_nmv: only real64 payloads supported");
  VectorX v(static_cast<Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i) {
    std::uint64_t bits = get_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    v[static_cast<Index>(i)] = d;
  }
  if (!in) throw DomainError("read_nmv: truncated file " + path);
  return v;
}

nlohmann::json grid_to_json(const ModeGrid& grid) {
  json modes = json::array();
  for (const Mode& m : grid.modes)
    modes.push_back({m.k.x(), m.k.y(), m.k.z(), m.w, m.shell.label()});
  return json{{"n_uv", grid.n_uv},
              {"m_ir", grid.m_ir},
              {"radial_per_slice", grid.radial_per_slice},
              {"angular", to_string(grid.angular)},
              {"modes", modes}};
}

nlohmann::json basis_to_json(const FockBasis& basis) {
  return json{{"mode_ids", basis.mode_ids()},
              {"n_max", basis.n_max()},
              {"per_mode_cap", basis.per_mode_cap()},
              {"dim", basis.dim()}};
}

nlohmann::json record_to_json(const GroundStateRecord& rec,
                              const std::string& config_hash,
                              const std::optional<std::string>& vector_file) {
  json j{{"schema", "gsr/1"},
         {"kind", rec.kind},
         {"n", rec.n},
         {"m", rec.m},
         {"P", {rec.P.x(), rec.P.y(), rec.P.z()}},
         {"g", rec.g},
         {"E_prime", rec.E_prime},
         {"grad_E", {rec.grad_E.x(), rec.grad_E.y(), rec.grad_E.z()}},
         {"gap", std::isfinite(rec.gap) ? json(rec.gap) : json(nullptr)},
         {"norm", rec.norm},
         {"diff_prev_uv", rec.diff_prev_uv},
         {"diff_prev_ir", rec.diff_prev_ir},
         {"neumann", num_or_null(rec.neumann_value)},
         {"overlap_vacuum", rec.overlap_vacuum},
         {"solver_residual", rec.solver_residual},
         {"dense_path", rec.dense_path},
         {"violations", rec.violations},
         {"phi_diff", num_or_null(rec.phi_diff)},
         {"eta_diff", num_or_null(rec.eta_diff)},
         {"grad_diff_uv", num_or_null(rec.grad_diff_uv)},
         {"config_hash", config_hash}};
  if (rec.has_contour) {
    j["contour"] = json{{"center_re", rec.contour.center.real()},
                        {"center_im", rec.contour.center.imag()},
                        {"radius", rec.contour.radius},
                        {"shift_re", rec.contour.shift.real()},
                        {"shift_im", rec.contour.shift.imag()},
                        {"nodes", rec.contour.n_quad}};
  }
  if (vector_file) j["vector_file"] = *vector_file;
  return j;
}

GroundStateRecord record_from_json(const nlohmann::json& j) {
  GroundStateRecord rec;
  rec.kind = j.at("kind").get<std::string>();
  rec.n = j.at("n").get<int>();
  rec.m = j.at("m").get<int>();
  auto p = j.at("P");
  rec.P = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  rec.g = j.at("g").get<double>();
  rec.E_prime = j.at("E_prime").get<double>();
  auto ge = j.at("grad_E");
  rec.grad_E = Vec3(ge[0].get<double>(), ge[1].get<double>(), ge[2].get<double>());
  rec.gap = j.at("gap").is_null() ? std::numeric_limits<double>::infinity()
                                  : j.at("gap").get<double>();
  rec.norm = j.at("norm").get<double>();
  rec.diff_prev_uv = j.at("diff_prev_uv").get<double>();
  rec.diff_prev_ir = j.at("diff_prev_ir").get<double>();
  rec.neumann_value = nan_or(j, "neumann");
  rec.overlap_vacuum = j.at("overlap_vacuum").get<double>();
  rec.solver_residual = j.at("solver_residual").get<double>();
  rec.dense_path = j.at("dense_path").get<bool>();
  rec.violations = j.at("violations").get<std::vector<std::string>>();
  rec.phi_diff = nan_or(j, "phi_diff");
  rec.eta_diff = nan_or(j, "eta_diff");
  rec.grad_diff_uv = nan_or(j, "grad_diff_uv");
  if (j.contains("contour")) {
    const auto& c = j.at("contour");
    rec.contour.center = Complex(c.at("center_re").get<double>(),
                                 c.at("center_im").get<double>());
    rec.contour.radius = c.at("radius").get<double>();
    rec.contour.shift = Complex(c.at("shift_re").get<double>(),
                                c.at("shift_im").get<double>());
    rec.contour.n_quad = c.at("nodes").get<int>();
    rec.has_contour = true;
  }
  return rec;
}

nlohmann::json dressed_to_json(const DressedState& ds,
                               const std::string& config_hash) {
  return json{{"schema", "gsr/1"},
              {"kind", "dressed"},
              {"m", ds.m},
              {"norm", ds.norm},
              {"diff_tilde_prev", ds.diff_tilde_prev},
              {"diff_phi_tilde", ds.diff_phi_tilde},
              {"diff_phi_prev", ds.diff_phi_prev},
              {"gamma_expectation", ds.gamma_expectation},
              {"exp_pi_residual", ds.exp_pi_residual},
              {"gamma_sandwich", num_or_null(ds.gamma_sandwich)},
              {"gamma_sandwich_bound", num_or_null(ds.gamma_sandwich_bound)},
              {"c_shift", ds.c_shift},
              {"violations", ds.violations},
              {"config_hash", config_hash}};
}

DressedState dressed_from_json(const nlohmann::json& j) {
  DressedState ds;
  ds.m = j.at("m").get<int>();
  ds.norm = j.at("norm").get<double>();
  ds.diff_tilde_prev = j.at("diff_tilde_prev").get<double>();
  ds.diff_phi_tilde = j.at("diff_phi_tilde").get<double>();
  ds.diff_phi_prev = j.value("diff_phi_prev", 0.0);
  ds.gamma_expectation = j.at("gamma_expectation").get<double>();
  ds.exp_pi_residual = j.at("exp_pi_residual").get<double>();
  ds.gamma_sandwich = nan_or(j, "gamma_sandwich");
  ds.gamma_sandwich_bound = nan_or(j, "gamma_sandwich_bound");
  ds.c_shift = j.at("c_shift").get<double>();
  ds.violations = j.at("violations").get<std::vector<std::string>>();
  ds.ok = true;
  return ds;
}

}  // namespace nelson
