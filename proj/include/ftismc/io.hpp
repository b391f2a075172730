#pragma once

// Artifact writers: trajectory CSV, run summary, bound report, RMSE table.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftismc/analysis.hpp"
#include "ftismc/config.hpp"
#include "ftismc/log.hpp"
#include "ftismc/simulation.hpp"

namespace ftismc {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader =
    "t,q_1,q_2,qd_1,qd_2,x_1,x_2,xdot_1,xdot_2,xd_1,xd_2,xr_1,xr_2,xrdot_1,xrdot_2,e_1,e_2,"
    "fc_1,fc_2,tau_c_1,tau_c_2,fe_1,fe_2,s_1,s_2,sigma_1,sigma_2,u0_1,u0_2,us_1,us_2,det_j,psi_inf";

namespace io_detail {

inline void put(std::string& line, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  line.append(buf, static_cast<std::size_t>(n));
}

inline void put(std::string& line, const Vec2& v) {
  put(line, v[0]);
  line += ',';
  put(line, v[1]);
}

inline std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline nlohmann::json vec(const Vec2& v) { return nlohmann::json::array({v[0], v[1]}); }

inline nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace io_detail

inline void write_csv(std::ostream& out, const std::vector<LogRow>& log) {
  using io_detail::put;
  out << kCsvHeader << '\n';
  std::string line;
  for (const auto& r : log) {
    line.clear();
    put(line, r.t);
    for (const Vec2* v : {&r.q, &r.qd, &r.x, &r.xdot, &r.xd, &r.xr, &r.xrdot, &r.e, &r.fc, &r.tau_c,
                          &r.fe, &r.s, &r.sigma, &r.u0, &r.us}) {
      line += ',';
      put(line, *v);
    }
    line += ',';
    put(line, r.det_j);
    line += ',';
    put(line, r.psi_inf);
    out << line << '\n';
  }
}

inline void write_csv(const std::filesystem::path& path, const std::vector<LogRow>& log) {
  auto out = io_detail::open(path);
  write_csv(out, log);
}

inline nlohmann::json summary_json(const RunSummary& s, const SimConfig& cfg) {
  using io_detail::opt;
  using io_detail::vec;
  nlohmann::json j;
  j["controller"] = to_string(cfg.controller.kind);
  j["status"] = to_string(s.status);
  j["message"] = s.message;
  j["t_end"] = s.t_end;
  j["steps"] = s.steps;
  j["rmse"] = vec(s.rmse);
  j["rmse_post_transient"] = vec(s.rmse_post);
  j["transient"] = cfg.transient;
  j["max_abs_e_post_transient"] = s.max_abs_e_post;
  j["settling_time"] = opt(s.settling_time);
  j["settle_threshold"] = cfg.settle_threshold;
  j["max_psi"] = s.max_psi;
  j["rho"] = cfg.controller.comp.rho;
  j["rho_ok"] = s.rho_ok;
  j["chattering_index"] = s.chattering_index;
  j["max_ref_offset"] = s.max_ref_offset;
  j["reference_equals_desired"] = s.max_ref_offset == 0.0;
  j["max_abs_sigma"] = s.max_abs_sigma;
  j["sigma0"] = s.sigma0;
  nlohmann::json eff = nlohmann::json::object();
  for (const auto& [k, v] : ConfigSchema::instance().dump(cfg)) eff[k] = v;
  j["effective_config"] = eff;
  return j;
}

inline nlohmann::json bounds_json(const BoundReport& b) {
  nlohmann::json j;
  j["T_s1"] = b.t_s1;
  j["T_r1"] = b.t_r1;
  j["T_s2"] = b.t_s2;
  j["T_r2"] = b.t_r2;
  j["T_n"] = b.t_n;
  j["total_thm1"] = b.total_thm1;
  j["total_thm2"] = b.total_thm2;
  j["total_thm2_note"] = "T_s2 + T_r2 + T_n + epsilon(tau) unquantified";
  j["empirical_settling_time"] = io_detail::opt(b.empirical);
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = io_detail::open(path);
  out << j.dump(2) << '\n';
}

/// One column of the comparison table; nullopt marks a failed run.
struct TableColumn {
  std::string name;
  std::optional<Vec2> value;
};

/// Controllers as columns, joints as rows; failed runs print "failed".
inline void write_table(std::ostream& out, const std::vector<TableColumn>& cols) {
  out << "joint";
  for (const auto& c : cols) out << ',' << c.name;
  out << '\n';
  for (int axis = 0; axis < 2; ++axis) {
    out << (axis + 1);
    for (const auto& c : cols) {
      out << ',';
      if (c.value) {
        std::string cell;
        io_detail::put(cell, (*c.value)[axis]);
        out << cell;
      } else {
        out << "failed";
      }
    }
    out << '\n';
  }
}

inline void write_table(const std::filesystem::path& path, const std::vector<TableColumn>& cols) {
  auto out = io_detail::open(path);
  write_table(out, cols);
}

}  // namespace ftismc
