// End-to-end runs of the toda binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("toda_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome toda(const std::string& args) {
    const auto err_path = dir_ / "stderr.txt";
    const std::string cmd = std::string(TODA_CLI_PATH) + " " + args + " 2> " + err_path.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(err_path);
    std::getline(is, r.err, '\0');
    return r;
  }

  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  static json read_json(const std::string& path) {
    std::ifstream is(path);
    return json::parse(is);
  }

  fs::path dir_;
};

double moment(const json& summary, int k, const char* field = "mean") {
  return summary.at("moments").at(k - 1).at(field).get<double>();
}

}  // namespace

TEST_F(Cli, SampleIsReproducibleAcrossWorkerCounts) {
  ASSERT_EQ(toda("sample --set n=1000 --set replicas=10 --seed 7 --workers 1 --out " + out("a")).code, 0);
  ASSERT_EQ(toda("sample --set n=1000 --set replicas=10 --seed 7 --workers 4 --out " + out("b")).code, 0);
  const auto a = read_json(out("a/manifest.json")), b = read_json(out("b/manifest.json"));
  EXPECT_EQ(a.at("status"), "complete");
  EXPECT_EQ(a.at("outputs"), b.at("outputs"));
  EXPECT_EQ(a.at("outputs").size(), 2u);
  EXPECT_EQ(a.at("master_seed"), 7);
  EXPECT_EQ(b.at("workers"), 4);
  EXPECT_EQ(a.at("config").at("n"), 1000);

  const auto summary = read_json(out("a/summary.json"));
  EXPECT_NEAR(moment(summary, 2), 3.0, 3.0 * moment(summary, 2, "stderr"));

  std::ifstream csv(out("a/eigenvalues.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "replica,lambda");
}

TEST_F(Cli, ConfigFileWithOverrides) {
  {
    std::ofstream cfg(out("cfg.json"));
    cfg << R"({"source": "profile", "n": 500, "profile": [1, 2], "replicas": 4, "seed": 3})";
  }
  ASSERT_EQ(toda("sample --config " + out("cfg.json") + " --set replicas=6 --out " + out("p")).code, 0);
  const auto manifest = read_json(out("p/manifest.json"));
  EXPECT_EQ(manifest.at("config").at("replicas"), 6);
  EXPECT_EQ(manifest.at("config").at("source"), "profile");
  const auto summary = read_json(out("p/summary.json"));
  EXPECT_NEAR(summary.at("exact_second_moment").get<double>(), 4.0 + 1.0 / 500.0, 1e-12);
}

TEST_F(Cli, BetaSourceAtNTwoMatchesExactTrace) {
  ASSERT_EQ(toda("sample --set source=beta --set n=2 --set pressure=1 --set replicas=100000 --out " + out("b")).code, 0);
  const auto summary = read_json(out("b/summary.json"));
  // Tr M^2 = 2 (1/N) Tr M^2; exact mean 2 + 2P/N.
  EXPECT_NEAR(2.0 * moment(summary, 2), 3.0, 3.0 * 2.0 * moment(summary, 2, "stderr"));
}

TEST_F(Cli, SolveOutputs) {
  ASSERT_EQ(toda("solve --set pressure=1 --out " + out("s")).code, 0);
  const auto sol = read_json(out("s/solution.json"));
  EXPECT_NEAR(sol.at("moments").at(1).get<double>(), 2.0, 1e-3);
  EXPECT_LE(sol.at("residual").get<double>(), sol.at("tol").get<double>());
  EXPECT_TRUE(sol.at("converged").get<bool>());

  ASSERT_EQ(toda("solve --set pressure=0 --set grid.points=400 --out " + out("g")).code, 0);
  std::ifstream csv(out("g/density.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,rho");
  double worst = 0.0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma)), rho = std::stod(line.substr(comma + 1));
    worst = std::max(worst, std::abs(rho - std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST_F(Cli, DosOutputsAndConstantProfile) {
  ASSERT_EQ(toda("dos --set pressure=1.3 --set grid.points=600 --set grid.half_width=9 --out " + out("d")).code, 0);
  ASSERT_EQ(toda("dos --set pressure=1.3 --set 'profile=[1.3]' --set nodes=5 --set grid.points=600 "
                 "--set grid.half_width=9 --out " + out("m")).code,
            0);
  const auto d = read_json(out("d/dos.json")), m = read_json(out("m/dos.json"));
  EXPECT_NEAR(d.at("mass").get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(d.at("moments").at(1).get<double>(), 1.0 + 2.0 * 1.3, 2e-3);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(d.at("moments").at(k).get<double>(), m.at("moments").at(k).get<double>(), 1e-8);
  }
}

TEST_F(Cli, CompareSelfAndSamples) {
  ASSERT_EQ(toda("dos --set pressure=1 --out " + out("d")).code, 0);
  ASSERT_EQ(toda("compare --set eigenvalues=" + out("d/nu.csv") + " --set density=" + out("d/nu.csv") + " --out " +
                 out("self"))
                .code,
            0);
  const auto self = read_json(out("self/comparison.json"));
  for (const char* key : {"bl_bv_distance", "ks_distance", "log_energy_distance"}) {
    EXPECT_LE(self.at(key).get<double>(), 1e-10) << key;
  }

  ASSERT_EQ(toda("sample --set n=2000 --set replicas=50 --seed 1 --out " + out("t")).code, 0);
  ASSERT_EQ(toda("compare --set eigenvalues=" + out("t/eigenvalues.csv") + " --set density=" + out("d/nu.csv") +
                 " --out " + out("c"))
                .code,
            0);
  const auto c = read_json(out("c/comparison.json"));
  EXPECT_LE(c.at("bl_bv_distance").get<double>(), 0.02);
  EXPECT_EQ(c.at("moments").size(), 4u);
  std::ifstream overlay(out("c/overlay.csv"));
  std::string header;
  std::getline(overlay, header);
  EXPECT_EQ(header, "x,theory,histogram");

  ASSERT_EQ(toda("solve --set pressure=1 --out " + out("mu")).code, 0);
  ASSERT_EQ(toda("sample --set source=beta --set n=2000 --set replicas=5 --seed 2 --out " + out("beta")).code, 0);
  ASSERT_EQ(toda("compare --set eigenvalues=" + out("beta/eigenvalues.csv") + " --set density=" +
                 out("mu/density.csv") + " --out " + out("cb"))
                .code,
            0);
  EXPECT_LE(read_json(out("cb/comparison.json")).at("bl_bv_distance").get<double>(), 0.02);
}

TEST_F(Cli, CompareRejectsMismatchedDomains) {
  ASSERT_EQ(toda("solve --set pressure=0.01 --set grid.points=200 --out " + out("small")).code, 0);
  ASSERT_EQ(toda("sample --set n=500 --set replicas=2 --set pressure=20 --out " + out("wide")).code, 0);
  const auto r = toda("compare --set eigenvalues=" + out("wide/eigenvalues.csv") + " --set density=" +
                      out("small/density.csv") + " --out " + out("c"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err).at("error"), "domain");
  EXPECT_FALSE(fs::exists(out("c/comparison.json")));
}

TEST_F(Cli, ErrorsAreSingleLineJsonWithExitCodes) {
  auto r = toda("solve --set pressure=-1 --out " + out("x"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err).at("error"), "invalid_input");
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_FALSE(fs::exists(out("x")));

  r = toda("solve --set solver.max_iter=3 --out " + out("nc"));
  EXPECT_EQ(r.code, 2);
  const auto err = json::parse(r.err);
  EXPECT_EQ(err.at("error"), "not_converged");
  EXPECT_GT(err.at("residual").get<double>(), 0.0);
  const auto manifest = read_json(out("nc/manifest.json"));
  EXPECT_EQ(manifest.at("status"), "failed");
  EXPECT_FALSE(fs::exists(out("nc/density.csv")));
  EXPECT_FALSE(fs::exists(out("nc/solution.json")));

  EXPECT_EQ(toda("solve --config " + out("missing.json")).code, 1);
  EXPECT_EQ(toda("solve --set frobnicate=1").code, 1);
  EXPECT_EQ(toda("").code, 1);
}

TEST_F(Cli, ChecksBundle) {
  ASSERT_EQ(toda("checks --set 'checks=[\"free_energy\",\"beta_mixture\",\"nu_density\",\"lipschitz\"]' "
                 "--set grid.points=800 --out " + out("zero"))
                .code,
            0);
  const auto zero = read_json(out("zero/checks.json"));
  ASSERT_EQ(zero.at("checks").size(), 4u);
  const auto& fe = zero.at("checks").at(0);
  EXPECT_EQ(fe.at("lhs").get<double>(), 0.0);
  EXPECT_EQ(fe.at("rhs").get<double>(), 0.0);
  EXPECT_TRUE(zero.at("all_pass").get<bool>()) << zero.dump(2);

  ASSERT_EQ(toda("checks --set 'checks=[\"free_energy\"]' --set potential.kind=polynomial "
                 "--set 'potential.coefficients=[0,0,0,0,0.1]' --set free_energy.n=60 --set free_energy.replicas=3 "
                 "--set free_energy.mcmc.sweeps=800 --set grid.points=800 --seed 4 --out " + out("quartic"))
                .code,
            0);
  const auto q = read_json(out("quartic/checks.json")).at("checks").at(0);
  EXPECT_LE(std::abs(q.at("lhs").get<double>() - q.at("rhs").get<double>()),
            std::max(3.0 * q.at("lhs_stderr").get<double>(), 0.02));
}
