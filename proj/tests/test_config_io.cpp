#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "ftismc/config.hpp"
#include "ftismc/io.hpp"

using namespace ftismc;

namespace {

SimConfig parse(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  apply_ini(cfg, in);
  return cfg;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Config, ParsesSectionsAndFractions) {
  const SimConfig cfg = parse(
      "[simulation]\ncontroller = ismc_ctc\ndt = 2e-4\nq0 = 0.1, 2.0\nzoh = true\n"
      "[controller]\nalpha = 3/4\nrho = 12\n"
      "[admittance]\nkk = 50\n"
      "[force]\namplitude = 0.5, 1.5\n");
  EXPECT_EQ(cfg.controller.kind, ControllerKind::ismc_ctc);
  EXPECT_DOUBLE_EQ(cfg.dt, 2e-4);
  EXPECT_EQ(cfg.q0, Vec2(0.1, 2.0));
  EXPECT_TRUE(cfg.zoh);
  EXPECT_DOUBLE_EQ(cfg.controller.ft.alpha, 0.75);
  EXPECT_DOUBLE_EQ(cfg.controller.comp.rho, 12.0);
  EXPECT_EQ(cfg.admittance.kk, Vec2(50.0, 50.0));
  EXPECT_EQ(cfg.force.amplitude, Vec2(0.5, 1.5));
  EXPECT_EQ(cfg.duration, SimConfig{}.duration);
}

TEST(Config, RoundTripsThroughIni) {
  SimConfig cfg;
  cfg.controller.kind = ControllerKind::bsp;
  cfg.controller.ns.m = 5.0 / 7.0;
  cfg.dt = 1.0 / 3.0 * 1e-3;
  cfg.x0_offset = {0.1, -0.7};
  cfg.plant = PlantKind::task_space;
  cfg.controller.ftismc_surface = SurfaceKind::fixed_time;
  const SimConfig back = parse(to_ini(cfg));
  EXPECT_EQ(ConfigSchema::instance().dump(back), ConfigSchema::instance().dump(cfg));
  EXPECT_EQ(back.dt, cfg.dt);
  EXPECT_EQ(back.controller.ns.m, cfg.controller.ns.m);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse("[simulation]\ndtt = 1\n"), ConfigError);
  EXPECT_THROW(parse("[nowhere]\ndt = 1\n"), ConfigError);
  EXPECT_THROW(parse("dt = 1\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\ndt = fast\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\ncontroller = lqr\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\nq0 = 1\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\nzoh = maybe\n"), ConfigError);
  EXPECT_THROW(parse("[controller]\nalpha = 1/0\n"), ConfigError);
}

TEST(Config, ErrorNamesTheKey) {
  try {
    parse("[simulation]\ndt = fast\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("simulation.dt"), std::string::npos) << e.what();
  }
}

TEST(Config, OverridesResolveBareKeys) {
  SimConfig cfg;
  apply_overrides(cfg, {"dt=5e-4", "controller.k3 = 7", "simulation.controller=pid"});
  EXPECT_DOUBLE_EQ(cfg.dt, 5e-4);
  EXPECT_DOUBLE_EQ(cfg.controller.comp.k3, 7.0);
  EXPECT_EQ(cfg.controller.kind, ControllerKind::pid);
  EXPECT_THROW(apply_overrides(cfg, {"dt"}), ConfigError);
  EXPECT_THROW(apply_overrides(cfg, {"=3"}), ConfigError);
  EXPECT_THROW(apply_overrides(cfg, {"nope=3"}), ConfigError);
}

TEST(Config, AmbiguousBareKeysAreRejected) {
  std::map<std::string, int> count;
  for (const auto& [full, _] : ConfigSchema::instance().entries()) ++count[full.substr(full.find('.') + 1)];
  for (const auto& [bare, n] : count) {
    if (n > 1) {
      EXPECT_THROW(ConfigSchema::instance().resolve(bare), ConfigError) << bare;
    } else {
      EXPECT_NO_THROW(ConfigSchema::instance().resolve(bare)) << bare;
    }
  }
}

TEST(Config, ShippedConfigsLoadAndValidate) {
  for (const char* name : {"benchmark.ini", "zero_uncertainty.ini", "task_space_offset.ini"}) {
    const std::string path = std::string(FTISMC_SOURCE_DIR) + "/configs/" + name;
    SimConfig cfg;
    ASSERT_NO_THROW(cfg = load_config(path)) << path;
    EXPECT_NO_THROW(cfg.validate()) << path;
  }
  const SimConfig bench = load_config(std::string(FTISMC_SOURCE_DIR) + "/configs/benchmark.ini");
  EXPECT_EQ(ConfigSchema::instance().dump(bench), ConfigSchema::instance().dump(SimConfig{}));
  EXPECT_THROW(load_config("/nonexistent/x.ini"), ConfigError);
}

TEST(Csv, HeaderAndFullPrecision) {
  LogRow r;
  r.t = 0.1;
  for (Vec2* v : {&r.q, &r.qd, &r.x, &r.xdot, &r.xd, &r.xr, &r.xrdot, &r.e, &r.fc, &r.tau_c, &r.fe, &r.s,
                  &r.sigma, &r.u0, &r.us})
    *v = Vec2(1.0 / 3.0, -2.0 / 3.0);
  r.det_j = 0.09;
  r.psi_inf = 0.0;
  std::ostringstream out;
  write_csv(out, {r});
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, kCsvHeader);
  const auto h = split(header), cells = split(row);
  ASSERT_EQ(h.size(), 33u);
  ASSERT_EQ(cells.size(), h.size());
  EXPECT_EQ(std::strtod(cells[1].c_str(), nullptr), 1.0 / 3.0);
  EXPECT_EQ(std::strtod(cells[2].c_str(), nullptr), -2.0 / 3.0);
  EXPECT_EQ(std::strtod(cells[0].c_str(), nullptr), 0.1);
  EXPECT_EQ(cells[31], "0.089999999999999997");
}

TEST(Json, SummaryEchoesEffectiveConfig) {
  SimConfig cfg;
  cfg.controller.kind = ControllerKind::ctc;
  cfg.dt = 2e-4;
  RunSummary s;
  s.rmse = {0.1, 0.2};
  s.settling_time = std::nullopt;
  const auto j = summary_json(s, cfg);
  EXPECT_EQ(j["controller"], "ctc");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["rmse"][1], 0.2);
  EXPECT_TRUE(j["settling_time"].is_null());
  EXPECT_EQ(j["reference_equals_desired"], true);
  EXPECT_EQ(std::stod(j["effective_config"]["simulation.dt"].get<std::string>()), 2e-4);
  EXPECT_EQ(j["effective_config"]["simulation.controller"], "ctc");
  EXPECT_EQ(j["effective_config"].size(), ConfigSchema::instance().entries().size());
}

TEST(Json, BoundsCarryUnquantifiedNote) {
  BoundReport b;
  b.t_s2 = 0.205;
  b.empirical = 0.1;
  const auto j = bounds_json(b);
  EXPECT_EQ(j["T_s2"], 0.205);
  EXPECT_EQ(j["empirical_settling_time"], 0.1);
  EXPECT_NE(j["total_thm2_note"].get<std::string>().find("unquantified"), std::string::npos);
}

TEST(Table, FailedRunsMarked) {
  std::ostringstream out;
  write_table(out, {{"pid", Vec2(0.5, 0.25)}, {"ismc_pid", std::nullopt}});
  EXPECT_EQ(out.str(), "joint,pid,ismc_pid\n1,0.5,failed\n2,0.25,failed\n");
}

TEST(Files, WriteCreatesDirectoriesAndReportsErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "ftismc_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_json(dir / "a.json", nlohmann::json{{"k", 1}});
  EXPECT_TRUE(std::filesystem::exists(dir / "a.json"));
  std::filesystem::remove_all(dir.parent_path());
  EXPECT_THROW(write_json("/proc/ftismc_denied/x.json", nlohmann::json{}), std::exception);
}
