#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef CONVEXCORR_CLI_PATH
#error "CONVEXCORR_CLI_PATH must be defined"
#endif

const char* kCli = CONVEXCORR_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run(const std::string& args) {
  std::string cmd = std::string(kCli) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path temp_root() {
  fs::path root = fs::temp_directory_path() / "convexcorr_cli_test";
  fs::create_directories(root);
  return root;
}

const char* kGdemoConfig = R"({
  "instance": {
    "phi": {"name": "piecewise_gdemo", "params": []},
    "X1": [0],
    "L": [[1.0]],
    "norm": "L2"
  },
  "solve": {"tau": [1.0], "lambda": [6.0]},
  "curve": {"tau_min": 0.3, "tau_max": 2.7, "count": 9},
  "verify": {
    "box": {"lo": [-1.0], "hi": [5.0], "step": 0.001},
    "taus": [1.0],
    "offgraph_pairs": [[1.0, 2.0]],
    "roundtrip_samples": 6
  },
  "seed": 0
})";

}  // namespace

TEST(Cli, SolveWritesRecordsAndExitsZero) {
  fs::path root = temp_root();
  fs::path cfg = root / "gdemo.json";
  write(cfg, kGdemoConfig);
  fs::path out = root / "solve_out";
  fs::remove_all(out);
  ASSERT_EQ(run("solve --config " + cfg.string() + " --out " + out.string()), 0);
  std::string report = slurp(out / "solve_report.json");
  EXPECT_NE(report.find("\"lambda_of_dual\": 6.0"), std::string::npos);
  EXPECT_NE(report.find("\"regime\": \"interior\""), std::string::npos);
  EXPECT_NE(report.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(report.find("\"version\""), std::string::npos);
}

TEST(Cli, MalformedNormTagExitsTwoWithoutOutput) {
  fs::path root = temp_root();
  fs::path cfg = root / "bad_norm.json";
  std::string bad = kGdemoConfig;
  bad.replace(bad.find("\"L2\""), 4, "\"L7\"");
  write(cfg, bad);
  fs::path out = root / "bad_norm_out";
  fs::remove_all(out);
  ASSERT_EQ(run("solve --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out / "solve_report.json"));
}

TEST(Cli, SingleSampleCurveExitsTwo) {
  fs::path root = temp_root();
  fs::path cfg = root / "single.json";
  std::string single = kGdemoConfig;
  single.replace(single.find("\"count\": 9"), 10, "\"count\": 1");
  write(cfg, single);
  ASSERT_EQ(run("curve --config " + cfg.string() + " --out " + (root / "single_out").string()), 2);
}

TEST(Cli, CurveOutputsAreByteIdenticalAcrossRuns) {
  fs::path root = temp_root();
  fs::path cfg = root / "gdemo.json";
  write(cfg, kGdemoConfig);
  fs::path out_a = root / "curve_a";
  fs::path out_b = root / "curve_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  ASSERT_EQ(run("curve --config " + cfg.string() + " --out " + out_a.string() + " --workers 4"), 0);
  ASSERT_EQ(run("curve --config " + cfg.string() + " --out " + out_b.string() + " --workers 1"), 0);
  EXPECT_EQ(slurp(out_a / "curve.csv"), slurp(out_b / "curve.csv"));
  EXPECT_EQ(slurp(out_a / "curve_summary.json"), slurp(out_b / "curve_summary.json"));
  // the CSV carries 17-significant-digit floats
  EXPECT_NE(slurp(out_a / "curve.csv").find("0.29999999999999999"), std::string::npos);
}

TEST(Cli, VerifyPassesOnGdemoAndFailsOnCorruptedPairing) {
  fs::path root = temp_root();
  fs::path cfg = root / "gdemo.json";
  write(cfg, kGdemoConfig);
  ASSERT_EQ(run("verify --config " + cfg.string() + " --out " + (root / "verify_ok").string()), 0);

  std::string corrupted = kGdemoConfig;
  corrupted.replace(corrupted.find("\"taus\": [1.0]"), 13, "\"pairs\": [[1.0, 2.0]]");
  fs::path bad_cfg = root / "corrupted.json";
  write(bad_cfg, corrupted);
  ASSERT_EQ(run("verify --config " + bad_cfg.string() + " --out " +
                (root / "verify_bad").string()),
            4);
}

TEST(Cli, CoercivityCompositeIdentityPair) {
  fs::path root = temp_root();
  fs::path cfg = root / "composite.json";
  write(cfg, R"({
    "coercivity": {
      "mode": "composite",
      "H": [[1.0, 0.0], [0.0, 1.0]],
      "K": [[1.0, 0.0], [0.0, 1.0]],
      "phi": {"name": "sqnorm", "params": [2]},
      "psi": {"name": "sqnorm", "params": [2]}
    }
  })");
  fs::path out = root / "composite_out";
  ASSERT_EQ(run("coercivity --config " + cfg.string() + " --out " + out.string()), 0);
  EXPECT_NE(slurp(out / "coercivity.json").find("\"coercive\": true"), std::string::npos);
}

TEST(Cli, MissingConfigFileExitsTwo) {
  ASSERT_EQ(run("solve --config /nonexistent/nope.json --out /tmp"), 2);
}

TEST(Cli, TwoDimensionalVerifyWithTranslationInvariantDirection) {
  fs::path root = temp_root();
  fs::path cfg = root / "quad2d.json";
  write(cfg, R"({
    "instance": {
      "phi": {"name": "quadratic", "params": [1, 1.0, 4.0]},
      "X1": [0],
      "X2": [1],
      "L": [[1.0, 0.0], [0.0, 1.0]],
      "norm": "L2"
    },
    "verify": {
      "box": {"lo": [-1.0, -1.0], "hi": [5.0, 1.0], "step": 0.01},
      "taus": [1.0],
      "roundtrip_samples": 5
    },
    "seed": 0
  })");
  fs::path out = root / "quad2d_out";
  ASSERT_EQ(run("verify --config " + cfg.string() + " --out " + out.string()), 0);
  std::string report = slurp(out / "verify.json");
  EXPECT_NE(report.find("\"all_pass\": true"), std::string::npos);
  EXPECT_NE(report.find("\"c\": 4.0"), std::string::npos);
}
