#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uhom/commands.hpp"
#include "uhom/config.hpp"
#include "uhom/digest.hpp"
#include "uhom/errors.hpp"

using namespace uhom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uhom_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

int run_cli(const std::string& command, const std::string& sub, const fs::path& out,
            std::optional<std::string> config = std::nullopt, int threads = 1,
            std::optional<std::uint64_t> seed = std::nullopt, std::string* err_text = nullptr) {
  RunOptions o;
  o.command = command;
  o.sub = sub;
  o.out_dir = out.string();
  o.config_path = std::move(config);
  o.threads = threads;
  o.seed = seed;
  std::ostringstream so, se;
  const int rc = run(o, so, se);
  if (err_text) *err_text = se.str();
  return rc;
}

std::string output_digest(const fs::path& dir, const std::string& name) { return sha256_file((dir / name).string()); }

}  // namespace

TEST(Config, OverlayKeepsDefaultsAndReplacesKindObjects) {
  const Json user = Json::parse(R"({"solver": {"restarts": 2}, "integrand": {"form": "constant_in_y", "N": 1, "d": 1,
      "potential": {"kind": "power", "p": 3.0}, "growth": {"B": {"kind": "power", "p": 3.0}, "M": 1.0, "a_bound": 0.0}}})");
  const Json c = effective_config("hom.solve", user);
  EXPECT_EQ(c["solver"]["restarts"], 2);
  EXPECT_EQ(c["solver"]["max_iters"], 5000);
  EXPECT_EQ(c["integrand"]["potential"]["p"], 3.0);
  EXPECT_EQ(c["resolution"], 64);
}

TEST(Config, ErrorsNameTheJsonPath) {
  const Json bad = Json::parse(R"({"solver": {"max_iters": "many"}})");
  const Json c = effective_config("hom.solve", bad);
  try {
    ladder_from_json(c, 0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/solver/max_iters"), std::string::npos) << e.what();
  }
  EXPECT_THROW(effective_config("hom.solve", Json::parse(R"({"schema_version": 9})")), ConfigError);
  EXPECT_THROW(effective_config("hom.solve", Json::parse(R"({"task": "young.check"})")), ConfigError);
  EXPECT_THROW(default_config("hom.nope"), ConfigError);
}

TEST(Config, YoungRoundTrip) {
  const YoungFunction B = YoungFunction::power(2.5, 0.5);
  const YoungFunction C = young_from_json(young_to_json(B), "/young");
  EXPECT_EQ(C.value(1.7), B.value(1.7));
}

TEST(Cli, YoungCheckExitCodes) {
  const fs::path d = scratch("young");
  EXPECT_EQ(run_cli("young", "check", d / "p2"), kExitOk);
  const Json rep = read_json(d / "p2" / "young_check.json");
  EXPECT_TRUE(rep["delta2"]["passed"].get<bool>());
  EXPECT_TRUE(rep["nabla2"]["passed"].get<bool>());

  const std::string exp = write_file(d / "exp.json", R"({"young": {"kind": "exp_minus_linear"}})");
  EXPECT_EQ(run_cli("young", "check", d / "exp", exp), kExitCertificate);
  EXPECT_FALSE(read_json(d / "exp" / "young_check.json")["delta2"]["passed"].get<bool>());

  const std::string bad = write_file(d / "bad.json", "{not json");
  EXPECT_EQ(run_cli("young", "check", d / "bad", bad), kExitConfig);

  std::string err;
  EXPECT_EQ(run_cli("young", "check", d / "missing", (d / "absent.json").string(), 1, std::nullopt, &err), kExitConfig);
  EXPECT_NE(err.find("absent.json"), std::string::npos);
}

TEST(Cli, UnknownSuiteListsSuites) {
  std::string err;
  EXPECT_EQ(run_cli("verify", "bogus", scratch("suite"), std::nullopt, 1, std::nullopt, &err), kExitConfig);
  EXPECT_NE(err.find("two-scale"), std::string::npos);
}

TEST(Cli, HomTableTwoPhaseAndManifest) {
  const fs::path d = scratch("hom");
  const std::string cfg = write_file(d / "cfg.json", R"({"xi_grid": {"lo": [-2], "hi": [2], "step": 1}, "resolution": 32})");
  ASSERT_EQ(run_cli("hom", "table", d / "a", cfg, 1, 11), kExitOk);
  const Json table = read_json(d / "a" / "hom_table.json");
  for (const Json& e : table["entries"]) {
    const double xi = e["xi"][0].get<double>();
    EXPECT_NEAR(e["f_hom"].get<double>(), 1.6 * xi * xi, 1e-6 * (1 + xi * xi));
  }
  const Json m = read_json(d / "a" / "manifest.json");
  EXPECT_EQ(m["seed"], 11);
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config_hash"], sha256_hex(canonical_dump(m["effective_config"])));
  for (const Json& f : m["outputs"]) {
    EXPECT_EQ(f["sha256"], output_digest(d / "a", f["path"].get<std::string>()));
  }

  // The manifest reproduces the run, also at another thread count.
  ASSERT_EQ(run_cli("hom", "table", d / "b", (d / "a" / "manifest.json").string(), 3), kExitOk);
  EXPECT_EQ(output_digest(d / "a", "hom_table.csv"), output_digest(d / "b", "hom_table.csv"));
  EXPECT_EQ(output_digest(d / "a", "hom_table.json"), output_digest(d / "b", "hom_table.json"));
}

TEST(Cli, GrowthRefusalExitsThree) {
  const fs::path d = scratch("growth");
  const std::string cfg = write_file(d / "dw.json", R"({"integrand": {"form": "separable", "N": 1, "d": 1,
      "coefficient": {"kind": "constant", "value": 1.0}, "potential": {"kind": "double_well"},
      "growth": {"B": {"kind": "power", "p": 2.0}, "M": 4.0, "a_bound": 1.0}}})");
  EXPECT_EQ(run_cli("hom", "solve", d / "o", cfg), kExitGrowth);
  const Json g = read_json(d / "o" / "growth_report.json");
  EXPECT_FALSE(g["lower_ok"].get<bool>());
  EXPECT_FALSE(fs::exists(d / "o" / "hom_table.csv"));
}

TEST(Cli, AllSolvesFailedExitsFour) {
  // |xi|^300 overflows at xi = 1000 although the growth samples (|xi| <= 10) are finite.
  const fs::path d = scratch("fail");
  const std::string cfg = write_file(d / "big.json", R"({"xi": [1000.0], "t_ladder": [1], "resolution": 8,
      "integrand": {"form": "constant_in_y", "N": 1, "d": 1, "potential": {"kind": "power", "p": 300.0},
      "growth": {"B": {"kind": "power", "p": 300.0}, "M": 1.0, "a_bound": 0.0}}})");
  EXPECT_EQ(run_cli("hom", "solve", d / "o", cfg), kExitNoSolve);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = UHOM_CLI_PATH;
  const fs::path d = scratch("bin");
  auto sh = [&](const std::string& args) {
    const int st = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  EXPECT_EQ(sh("young check --out " + (d / "a").string()), 0);
  EXPECT_EQ(sh("young frobnicate --out " + (d / "b").string()), 1);
  EXPECT_EQ(sh("hom table --format xml"), 1);
  EXPECT_EQ(sh("young norm --threads 2 --seed 5 --format csv --out " + (d / "c").string()), 0);
}
