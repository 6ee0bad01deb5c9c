#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace fs = std::filesystem;
using namespace germrec;
using germrec::cli::Json;

namespace {

const fs::path kConfigs = fs::path(GERMREC_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("germrec_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& command, const fs::path& config, const fs::path& out) {
  const std::string cmd = std::string("\"") + GERMREC_CLI + "\" " + command + " --config \"" + config.string() +
                          "\" --out \"" + out.string() + "\" >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(Cli, ShippedConfigsSucceed) {
  const std::map<std::string, std::string> commands{{"besov_dirac", "besov"},
                                                    {"coherence_taylor", "coherence"},
                                                    {"reconstruct_taylor", "reconstruct"},
                                                    {"tweak_check", "tweak-check"},
                                                    {"young_weierstrass", "young"}};
  for (const auto& [stem, cmd] : commands) {
    const fs::path out = scratch(stem);
    EXPECT_EQ(run(cmd, kConfigs / (stem + ".json"), out), 0) << stem;
    const Json summary = Json::parse(slurp(out / "summary.json"));
    EXPECT_EQ(summary["config"]["command"], cmd);
    EXPECT_TRUE(summary.contains("results"));
  }
}

TEST(Cli, CsvHeaders) {
  const fs::path out = scratch("headers");
  ASSERT_EQ(run("coherence", kConfigs / "coherence_taylor.json", out), 0);
  EXPECT_EQ(first_line(out / "f_table.csv"), "n,h,f_value");
  EXPECT_EQ(first_line(out / "g_table.csv"), "n,g_value");
  EXPECT_EQ(first_line(out / "m_sequences.csv"), "n,m1,m2,m3,m4,tail2,tail3");

  const fs::path rec = scratch("headers_rec");
  ASSERT_EQ(run("reconstruct", kConfigs / "reconstruct_taylor.json", rec), 0);
  EXPECT_EQ(first_line(rec / "series.csv"), "k,abs_u1,abs_u2");
  EXPECT_EQ(first_line(rec / "pairings.csv"), "index,value,oracle,abs_err,rel_err");

  const fs::path tw = scratch("headers_tw");
  ASSERT_EQ(run("tweak-check", kConfigs / "tweak_check.json", tw), 0);
  EXPECT_EQ(first_line(tw / "checks.csv"), "check_name,value,tolerance,pass");
}

TEST(Cli, SummaryEmbedsResolvedConfig) {
  const fs::path out = scratch("summary");
  ASSERT_EQ(run("reconstruct", kConfigs / "reconstruct_taylor.json", out), 0);
  const Json s = Json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(s["config"]["grid"]["J"], 12);
  EXPECT_EQ(s["config"]["reconstruction"]["n_max"], 8);
  EXPECT_EQ(s["results"]["pass"], true);
  // The embedded config reloads to the same experiment.
  const fs::path again = scratch("summary_reload");
  const fs::path cfg = write_config(again, s["config"].dump());
  ASSERT_EQ(run("reconstruct", cfg, again / "out"), 0);
  EXPECT_EQ(slurp(out / "pairings.csv"), slurp(again / "out" / "pairings.csv"));
}

TEST(Cli, Deterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("coherence", kConfigs / "coherence_taylor.json", a), 0);
  ASSERT_EQ(run("coherence", kConfigs / "coherence_taylor.json", b), 0);
  for (const char* f : {"f_table.csv", "g_table.csv", "m_sequences.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  const fs::path big = write_config(dir, R"({"command": "tweak-check", "grid": {"L": 8, "J": 12},
      "mollifier": {"r": 2, "scales": [0.5]}})");
  EXPECT_EQ(run("tweak-check", big, dir / "o1"), cli::kExitPrecondition);

  std::ofstream(dir / "overflow.json") << R"({"command": "reconstruct", "grid": {"L": 8, "J": 12},
      "norm": {"alpha": 0, "beta": 2.5, "gamma": 2.5, "n_max": 8, "window": [6.5, 7.8]},
      "reconstruction": {"n_max": 8},
      "germ": {"kind": "TAYLOR", "beta": 2.5, "signal": {"kind": "TRIG", "frequency": 2.0}}})";
  EXPECT_EQ(run("reconstruct", dir / "overflow.json", dir / "o2"), cli::kExitSupport);

  std::ofstream(dir / "bad_key.json") << R"({"command": "besov", "grid": {"L": 8, "J": 12, "K": 1}})";
  EXPECT_EQ(run("besov", dir / "bad_key.json", dir / "o3"), cli::kExitPrecondition);

  std::ofstream(dir / "mismatch.json") << R"({"command": "besov"})";
  EXPECT_EQ(run("young", dir / "mismatch.json", dir / "o4"), cli::kExitPrecondition);

  // Failed tolerance checks: the Taylor pairing cannot meet a zero tolerance.
  std::ofstream(dir / "strict.json") << R"({"command": "reconstruct", "grid": {"L": 8, "J": 12},
      "norm": {"alpha": 0, "beta": 2.5, "gamma": 2.5, "n_max": 8},
      "reconstruction": {"n_max": 8},
      "germ": {"kind": "TAYLOR", "beta": 2.5, "signal": {"kind": "TRIG", "frequency": 2.0}},
      "tolerance": 0})";
  EXPECT_EQ(run("reconstruct", dir / "strict.json", dir / "o5"), cli::kExitCheckFailed);

  // No config reachable from the CLI germ kinds diverges; the mapping is checked directly.
  EXPECT_EQ(cli::exit_code_for(ErrorCode::NotConvergent), cli::kExitConvergence);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::SupportOverflow), cli::kExitSupport);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::ScaleTooLarge), cli::kExitPrecondition);
}
