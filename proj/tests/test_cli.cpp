// End-to-end checks of the command-line tool: exit codes, written artifacts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ftismc_cli_" + name);
  fs::remove_all(d);
  return d;
}

Result cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path log = dir.parent_path() / (dir.filename().string() + ".stdout");
  const std::string cmd = std::string(FTISMC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string config(const std::string& name) { return std::string(FTISMC_CONFIG_DIR) + "/" + name; }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

bool empty_dir(const fs::path& d) { return !fs::exists(d) || fs::is_empty(d); }

}  // namespace

TEST(Cli, InvalidStepIsUsageErrorWithoutOutput) {
  const fs::path d = scratch("dt0");
  const Result r = cli("run --config " + config("benchmark.ini") + " --set dt=0 --out " + (d / "o").string(), d);
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("dt"), std::string::npos) << r.out;
  EXPECT_TRUE(empty_dir(d / "o"));
}

TEST(Cli, MissingConfigIsUsageError) {
  const fs::path d = scratch("noconf");
  EXPECT_EQ(cli("run --out " + (d / "o").string(), d).code, 2);
  EXPECT_EQ(cli("run --config /nonexistent.ini --out " + (d / "o").string(), d).code, 2);
  EXPECT_TRUE(empty_dir(d / "o"));
}

TEST(Cli, InvalidExponentIsUsageError) {
  const fs::path d = scratch("beta");
  const Result r = cli("run --config " + config("benchmark.ini") + " --set controller.beta=0.5 --out " +
                           (d / "o").string(),
                       d);
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_TRUE(empty_dir(d / "o"));
}

TEST(Cli, UnknownKeyAndSubcommandAreUsageErrors) {
  const fs::path d = scratch("unknown");
  EXPECT_EQ(cli("run --config " + config("benchmark.ini") + " --set bogus=1 --out " + (d / "o").string(), d).code, 2);
  EXPECT_EQ(cli("simulate", d).code, 2);
  EXPECT_EQ(cli("run --config " + config("benchmark.ini") + " --controller lqr", d).code, 2);
}

TEST(Cli, RunWritesCsvAndSummary) {
  const fs::path d = scratch("run");
  const fs::path o = d / "o";
  const Result r = cli("run --config " + config("benchmark.ini") +
                           " --controller pid --set duration=1 --out " + o.string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.out;
  ASSERT_TRUE(fs::exists(o / "pid.csv"));
  ASSERT_TRUE(fs::exists(o / "pid_summary.json"));
  std::ifstream csv(o / "pid.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("t,q_1,q_2", 0), 0u);
  const auto j = read_json(o / "pid_summary.json");
  EXPECT_EQ(j["controller"], "pid");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["effective_config"]["simulation.duration"], "1");
  // Every listed artifact exists and is non-empty.
  std::istringstream lines(r.out);
  int listed = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("wrote ", 0) != 0) continue;
    const fs::path p = line.substr(6);
    EXPECT_TRUE(fs::exists(p) && fs::file_size(p) > 0) << p;
    ++listed;
  }
  EXPECT_EQ(listed, 2);
}

TEST(Cli, ZeroForceScenarioKeepsReferenceOnDesired) {
  const fs::path d = scratch("zero");
  const fs::path o = d / "o";
  const Result r = cli("run --config " + config("zero_uncertainty.ini") + " --set duration=12 --out " + o.string(), d);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = read_json(o / "ftismc_bsp_summary.json");
  EXPECT_EQ(j["reference_equals_desired"], true);
  EXPECT_EQ(j["max_ref_offset"], 0.0);
  EXPECT_EQ(j["max_psi"], 0.0);
}

TEST(Cli, BoundsReport) {
  const fs::path d = scratch("bounds");
  const fs::path o = d / "o";
  const Result r = cli("bounds --out " + o.string(), d);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = read_json(o / "bounds.json");
  EXPECT_NEAR(j["T_s1"].get<double>(), 0.205, 5e-4);
  EXPECT_NE(j["total_thm2_note"].get<std::string>().find("unquantified"), std::string::npos);
  EXPECT_NE(r.out.find("unquantified"), std::string::npos);
  EXPECT_TRUE(j["empirical_settling_time"].is_null());
}

TEST(Cli, TaskSpaceRunSettles) {
  const fs::path d = scratch("task");
  const fs::path o = d / "o";
  const Result r = cli("run --config " + config("task_space_offset.ini") + " --out " + o.string(), d);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = read_json(o / "ftismc_bsp_summary.json");
  ASSERT_FALSE(j["settling_time"].is_null());
  EXPECT_LT(j["settling_time"].get<double>(), 1.0);
}

TEST(Cli, RunIsDeterministic) {
  const fs::path d = scratch("det");
  const std::string base = "run --config " + config("benchmark.ini") + " --set duration=0.5 --out ";
  ASSERT_EQ(cli(base + (d / "a").string(), d).code, 0);
  ASSERT_EQ(cli(base + (d / "b").string(), d).code, 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(d / "a" / "ftismc_bsp.csv"), slurp(d / "b" / "ftismc_bsp.csv"));
}
