#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "ssd/bench.hpp"
#include "ssd/cli.hpp"
#include "ssd/matrix_io.hpp"

namespace ssd::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ssd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  int call(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
    std::ostringstream out, err;
    const int code = run(args, out, err, env);
    out_ = out.str();
    err_ = err.str();
    return code;
  }

  nlohmann::json manifest(const std::string& name) const {
    return nlohmann::json::parse(io::read_file(dir_ / name));
  }

  fs::path dir_;
  std::string out_, err_;
};

TEST(Settings, Precedence) {
  const std::string ini = "m = 10\nkappa = 4\n[design]\nm = 12\nlambda = 0.5\n[sweep]\nm = 99\n";
  const Settings s = resolve_settings("design", ini, {{"SSD_LAMBDA", "0.75"}, {"SSD_KAPPA", "5"}},
                                      {{"kappa", "6"}});
  EXPECT_EQ(s.at("m").value, "12");
  EXPECT_EQ(s.at("m").source, Source::kConfig);
  EXPECT_EQ(s.at("lambda").value, "0.75");
  EXPECT_EQ(s.at("lambda").source, Source::kEnv);
  EXPECT_EQ(s.at("kappa").value, "6");
  EXPECT_EQ(s.at("kappa").source, Source::kCommandLine);
  EXPECT_EQ(s.at("n").value, "60");
  EXPECT_EQ(s.at("n").source, Source::kDefault);
}

TEST(Settings, ValueForms) {
  const std::string ini =
      "[sweep]\nsystems = [\"randn\", 'sparse']  # two of them\nseed = 7\naxis = \"lambda\"\n";
  const Settings s = resolve_settings("sweep", ini, {}, {});
  EXPECT_EQ(s.at("systems").value, "randn,sparse");
  EXPECT_EQ(s.at("seeds").value, "7");
  EXPECT_EQ(s.at("axis").value, "lambda");
}

TEST(Settings, UnknownKeys) {
  EXPECT_THROW(resolve_settings("design", "[design]\nbogus = 1\n", {}, {}), Error);
  EXPECT_THROW(resolve_settings("design", "bogus = 1\n", {}, {}), Error);
  // A key another subcommand understands may sit at the top level.
  EXPECT_NO_THROW(resolve_settings("design", "axis = snr\n", {}, {}));
  EXPECT_NO_THROW(resolve_settings("design", "", {{"SSD_UNRELATED", "x"}}, {}));
  EXPECT_THROW(resolve_settings("design", "", {}, {{"axis", "snr"}}), Error);
  EXPECT_THROW(resolve_settings("design", "[design\nm = 1\n", {}, {}), Error);
}

TEST(Settings, DesignConfig) {
  const Settings s = resolve_settings("design", "xi = welch\nstep_rule = constant\neta = 0.01\n", {}, {});
  const DesignConfig c = design_config_from(s);
  EXPECT_TRUE(c.xi.use_welch);
  EXPECT_EQ(std::get<ConstantStep>(c.step_rule).eta, 0.01);
  EXPECT_THROW(design_config_from(resolve_settings("design", "m = ten\n", {}, {})), Error);
}

TEST(Trace, CsvLayout) {
  const std::vector<TraceRecord> trace = {{1, 2.5, 3.0, 0.5, 0.25, 0.125, 2}};
  EXPECT_EQ(trace_to_csv(trace), "iter,f,d_phi,d_g,eta,halvings\n1,2.5,0.5,0.25,0.125,2\n");
}

TEST_F(CliTest, DesignReferenceConfig) {
  write("ref.ini", "[design]\nm = 25\nn = 60\nl = 80\nlambda = 0.25\nkappa = 20\nxi = welch\n"
                    "max_iters = 1000\n");
  ASSERT_EQ(call({"design", "--config", path("ref.ini"), "--out", path("phi.csv"), "--seed", "3"}), 0)
      << err_;
  const std::string trace = io::read_file(path("phi.trace.csv"));
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 1001);
  const DenseMatrix phi = io::read_matrix(path("phi.csv"));
  EXPECT_EQ(phi.rows(), 25);
  EXPECT_TRUE(SparseSensingMatrix::is_member(phi, 20));
  const auto m = manifest("phi.csv.manifest.json");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["config"]["seed"], "3");
  EXPECT_EQ(m["sources"]["seed"], "command_line");
  const auto& defaults = m["defaults_applied"];
  EXPECT_NE(std::find(defaults.begin(), defaults.end(), "gamma"), defaults.end());
  EXPECT_EQ(std::find(defaults.begin(), defaults.end(), "xi"), defaults.end());

  ASSERT_EQ(call({"diagnose", path("phi.trace.csv")}), 0) << err_;
  EXPECT_NE(out_.find("final_surrogate"), std::string::npos);
}

TEST_F(CliTest, DesignIsReproducible) {
  write("c.ini", "[design]\nm = 6\nn = 12\nl = 16\nkappa = 5\nmax_iters = 40\n");
  ASSERT_EQ(call({"design", "--config", path("c.ini"), "--out", path("a.ssmx")}), 0);
  ASSERT_EQ(call({"design", "--config", path("c.ini"), "--out", path("b.ssmx"),
                  "--trace", path("b.trace.csv"), "--threads", "4"}), 0);
  EXPECT_EQ(io::read_file(path("a.ssmx")), io::read_file(path("b.ssmx")));
  EXPECT_EQ(io::read_file(path("a.trace.csv")), io::read_file(path("b.trace.csv")));
  EXPECT_EQ(io::read_file(path("a.ssmx")).substr(0, 4), "SSMX");
}

TEST_F(CliTest, DesignMatchesSweepSystem) {
  write("c.ini", "m = 6\nn = 12\nl = 16\nkappa = 5\nmax_iters = 40\n");
  ASSERT_EQ(call({"design", "--config", path("c.ini"), "--xi", "welch", "--seed", "4", "--out",
                  path("phi.csv")}), 0);
  const DenseMatrix phi = io::read_matrix(path("phi.csv"));
  // Feed the designed matrix back as an external system; the report rows
  // for "sparse-etf" and the external copy must coincide.
  ASSERT_EQ(call({"benchmark", "--config", path("c.ini"), "--seed", "4", "--k", "2", "--j", "50",
                  "--systems", "sparse-etf,file:" + path("phi.csv"), "--out", path("r.csv")}), 0)
      << err_;
  const std::string csv = io::read_file(path("r.csv"));
  std::istringstream in(csv);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  EXPECT_EQ(a.substr(a.find(',')), b.substr(b.find(',')));
}

TEST_F(CliTest, InvalidGammaExitsTwo) {
  write("c.ini", "[design]\ngamma = 1.5\n");
  EXPECT_EQ(call({"design", "--config", path("c.ini"), "--out", path("phi.csv")}), kExitConfig);
  EXPECT_NE(err_.find("gamma"), std::string::npos);
  const auto m = manifest("phi.csv.manifest.json");
  EXPECT_EQ(m["status"], "config_error");
  EXPECT_EQ(m["exit_code"], 2);
  EXPECT_FALSE(fs::exists(path("phi.csv")));
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(call({"design", "--config", path("missing.ini"), "--out", path("p.csv")}), kExitConfig);
  EXPECT_EQ(call({"design", "--unknown-flag", "1", "--out", path("p.csv")}), kExitConfig);
  EXPECT_EQ(call({"design", "--out", path("p.csv"), "--m"}), kExitConfig);
  EXPECT_EQ(call({"frobnicate"}), kExitConfig);
  EXPECT_EQ(call({"design", "--out", path("p.csv"), "--step-rule", "sometimes"}), kExitConfig);
  EXPECT_NE(err_.find("step_rule"), std::string::npos);
}

TEST_F(CliTest, EnvironmentOverride) {
  ASSERT_EQ(call({"design", "--m", "4", "--n", "8", "--l", "10", "--kappa", "3", "--out",
                  path("p.csv")}, {{"SSD_MAX_ITERS", "7"}}), 0);
  const std::string trace = io::read_file(path("p.trace.csv"));
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 8);
  EXPECT_EQ(manifest("p.csv.manifest.json")["sources"]["max_iters"], "env");
}

TEST_F(CliTest, DivergenceExitsThree) {
  EXPECT_EQ(call({"design", "--m", "4", "--n", "8", "--l", "10", "--kappa", "3", "--step_rule",
                  "constant", "--eta", "1e6", "--out", path("p.csv")}), kExitDivergence);
  EXPECT_EQ(manifest("p.csv.manifest.json")["status"], "numeric_divergence");
}

TEST_F(CliTest, DiagnoseFindsInjectedIncrease) {
  write("t.csv", "iter,f,d_phi,d_g,eta,halvings\n1,10,0.1,0,1,0\n2,9,0.1,0,1,0\n3,9.5,0.1,0,1,0\n"
                 "4,9,0.1,0,1,0\n");
  EXPECT_EQ(call({"diagnose", path("t.csv")}), kExitDiagnostic);
  EXPECT_NE(err_.find("iteration 3"), std::string::npos);
  EXPECT_EQ(manifest("t.csv.diagnose.manifest.json")["results"]["first_violation"], 3);
}

TEST_F(CliTest, DiagnoseFindsInsufficientDecrease) {
  // Decrease 0.001 against gamma / (2 eta) d_phi^2 = 0.9 / 2 * 1 = 0.45.
  write("t.csv", "iter,f,d_phi,d_g,eta,halvings\n1,10,1,0,1,0\n2,9.999,1,0,1,0\n");
  EXPECT_EQ(call({"diagnose", path("t.csv")}), kExitDiagnostic);
  EXPECT_NE(out_.find("sufficient_decrease FAIL"), std::string::npos);
  EXPECT_EQ(call({"diagnose", path("t.csv"), "--gamma", "0"}), 0);
}

TEST_F(CliTest, DiagnoseEdgeCases) {
  write("empty.csv", "iter,f,d_phi,d_g,eta,halvings\n");
  EXPECT_EQ(call({"diagnose", path("empty.csv"), "--out", path("d.txt")}), 0);
  EXPECT_NE(err_.find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("d.txt")));
  write("bad.csv", "iter,f,d_phi,d_g,eta,halvings\n1,abc,0,0,1,0\n");
  EXPECT_EQ(call({"diagnose", path("bad.csv")}), kExitConfig);
  write("short.csv", "iter,f,d_phi\n");
  EXPECT_EQ(call({"diagnose", path("short.csv")}), kExitConfig);
  EXPECT_EQ(call({"diagnose", path("absent.csv")}), kExitConfig);
}

TEST_F(CliTest, BenchmarkSingleRowAndDeterminism) {
  write("b.ini", "[benchmark]\nm = 8\nn = 16\nl = 20\nk = 2\nj = 100\nkappa = 6\nmax_iters = 50\n"
                 "systems = [sparse]\nsnr = 15\n");
  ASSERT_EQ(call({"benchmark", "--config", path("b.ini"), "--out", path("a.csv")}), 0) << err_;
  ASSERT_EQ(call({"benchmark", "--config", path("b.ini"), "--out", path("b.csv")}), 0);
  const std::string a = io::read_file(path("a.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 2);
  EXPECT_EQ(a, io::read_file(path("b.csv")));
  EXPECT_EQ(manifest("a.csv.manifest.json")["results"]["rows"], 1);
}

TEST_F(CliTest, SweepRowsPerSystemAndValue) {
  write("s.ini", "[sweep]\nj = 100\nmax_iters = 20\naxis = snr\nvalues = 15, 20\n");
  ASSERT_EQ(call({"sweep", "--config", path("s.ini"), "--out", path("s.csv")}), 0) << err_;
  const std::string csv = io::read_file(path("s.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2);
  const auto m = manifest("s.csv.manifest.json");
  EXPECT_EQ(m["results"]["experiment"]["support_sampler"], "uniform without replacement");
}

TEST_F(CliTest, SweepRejectsUnknownSystemAndAxis) {
  EXPECT_EQ(call({"sweep", "--systems", "nope", "--out", path("s.csv")}), kExitConfig);
  EXPECT_NE(err_.find("nope"), std::string::npos);
  EXPECT_EQ(call({"sweep", "--axis", "sigma", "--out", path("s.csv")}), kExitConfig);
}

}  // namespace
}  // namespace ssd::cli
