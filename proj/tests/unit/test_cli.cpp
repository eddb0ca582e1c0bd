#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <json.hpp>

#include "ness/currents.hpp"
#include "ness_chain/commands.hpp"
#include "ness_chain/report_io.hpp"
#include "ness_chain/run_config.hpp"

namespace ness::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json default_doc() {
  std::ifstream in(NESS_CHAIN_DEFAULT_CONFIG);
  return json::parse(in);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ness_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const json& doc, const std::string& name = "cfg.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  static int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
    const std::string cmd = std::string(NESS_CHAIN_BINARY) + " " + args + " > " + stdout_file.string() +
                            " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST(RunConfig, DefaultFileParses) {
  const RunConfig c = load_config(NESS_CHAIN_DEFAULT_CONFIG);
  EXPECT_EQ(c.model.n_sites, 2);
  EXPECT_EQ(c.nonlinearity.kind, NonlinearityKind::KleinGordon);
  EXPECT_DOUBLE_EQ(c.resolved_cutoff(), 50.0 * std::sqrt(120.0));
  const BathSet b = c.baths();
  EXPECT_DOUBLE_EQ(b.betas[0], 0.01);
  EXPECT_DOUBLE_EQ(b.betas[1], 500.0);
}

TEST(RunConfig, LinearTemperatureProfile) {
  json doc = default_doc();
  doc["n_sites"] = 4;
  doc["T_H"] = 7.0;
  doc["T_C"] = 1.0;
  const std::vector<double> t = parse_config(doc).site_temperatures();
  ASSERT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t[0], 7.0);
  EXPECT_DOUBLE_EQ(t[1], 5.0);
  EXPECT_DOUBLE_EQ(t[2], 3.0);
  EXPECT_DOUBLE_EQ(t[3], 1.0);
}

TEST(RunConfig, RejectsBadInput) {
  json doc = default_doc();
  doc["T_C"] = -1.0;
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = default_doc();
  doc["colour"] = "blue";
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = default_doc();
  doc["gamma"] = "fast";
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = default_doc();
  doc["sweep"] = json::array({{{"var", "lambda2"}, {"from", 2.0}, {"to", 2.0}, {"steps", 3}}});
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc["sweep"] = json::array({{{"var", "colour"}, {"from", 1.0}, {"to", 2.0}, {"steps", 3}}});
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(RunConfig, SweepGridHitsEndpointsExactly) {
  const SweepAxis ax{"lambda2", 0.1, 0.7, 3};
  const std::vector<double> v = ax.values();
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.front(), 0.1);
  EXPECT_EQ(v.back(), 0.7);
}

TEST(ReportIo, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
}

TEST_F(CliTest, CurrentsJsonRoundTrip) {
  const fs::path cfg = write_config(default_doc());
  const fs::path out = dir_ / "report.json";
  ASSERT_EQ(run("currents --config " + cfg.string() + " --out " + out.string()), 0);
  const json rep = json::parse(slurp(out));

  EXPECT_EQ(rep["provenance"]["config"], default_doc());
  EXPECT_TRUE(rep["zeroth_order"]["p_xi"]["cutoff_dependent"].get<bool>());
  EXPECT_TRUE(rep["zeroth_order"]["p_gamma"]["cutoff_dependent"].get<bool>());
  EXPECT_FALSE(rep["zeroth_order"]["p_inter"]["cutoff_dependent"].get<bool>());

  const RunConfig c = load_config(cfg.string());
  const CurrentReport direct = ness_report(c.model, c.baths(), c.nonlinearity, c.quadrature());
  EXPECT_EQ(rep["ratio"]["value"].get<double>(), direct.ratio);
  EXPECT_EQ(rep["ratio"]["into"].get<int>(), 2);
  EXPECT_EQ(rep["ratio"]["from"].get<int>(), 1);
  EXPECT_EQ(rep["perturbative_validity"].get<bool>(), true);
}

TEST_F(CliTest, CsvReportHasLongFormHeader) {
  const fs::path cfg = write_config(default_doc());
  const fs::path out = dir_ / "report.csv";
  ASSERT_EQ(run("currents --format csv --config " + cfg.string(), out), 0);
  const std::string body = slurp(out);
  EXPECT_EQ(body.substr(0, body.find('\n')), "quantity,order,site,source,value,cutoff_dependent");
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossThreadsAndRuns) {
  json doc = default_doc();
  doc["sweep"] = json::array({{{"var", "lambda2"}, {"from", 1.0}, {"to", 10.0}, {"steps", 3}},
                              {{"var", "strength"}, {"from", 0.0}, {"to", 0.02}, {"steps", 2}}});
  const RunConfig c = parse_config(doc);
  int failed = -1;
  const std::string serial = sweep_csv(c, 1, &failed);
  EXPECT_EQ(failed, 0);
  EXPECT_EQ(serial, sweep_csv(c, 4));
  EXPECT_EQ(std::count(serial.begin(), serial.end(), '\n'), 1 + 4 * 3);

  const fs::path cfg = write_config(doc);
  const fs::path a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + a.string()), 0);
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a), serial);
}

TEST_F(CliTest, SweepFromCommandLine) {
  const fs::path cfg = write_config(default_doc());
  const fs::path out = dir_ / "s.csv";
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --var gamma --from 1 --to 2 --steps 1 --out " +
                out.string()),
            0);
  const std::string body = slurp(out);
  EXPECT_EQ(body.rfind("gamma,cutoff,p_inter0", 0), 0u);
  EXPECT_EQ(run("sweep --config " + cfg.string() + " --var gamma --from 2 --to 1 --steps 4"), 2);
  EXPECT_EQ(run("sweep --config " + cfg.string() + " --var gamma --from 1"), 2);
}

TEST_F(CliTest, NegativeTemperatureIsAConfigErrorWithNoOutput) {
  json doc = default_doc();
  doc["T_C"] = -0.5;
  const fs::path cfg = write_config(doc);
  const fs::path out = dir_ / "never.json";
  EXPECT_EQ(run("currents --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, MalformedAndMissingConfigs) {
  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << "{ \"n_sites\": 2, ";
  EXPECT_EQ(run("currents --config " + bad.string()), 2);
  EXPECT_EQ(run("currents --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("bogus"), 2);
}

TEST_F(CliTest, ZeroStrengthGivesZeroCorrection) {
  json doc = default_doc();
  doc["strength"] = 0.0;
  doc["nonlinearity"] = "beta";
  const fs::path cfg = write_config(doc);
  const fs::path out = dir_ / "r.json";
  ASSERT_EQ(run("currents --config " + cfg.string() + " --out " + out.string()), 0);
  const json rep = json::parse(slurp(out));
  EXPECT_EQ(rep["ratio"]["value"].get<double>(), 0.0);
  for (const auto& f : rep["first_order"]["p_inter2"]) EXPECT_EQ(f["value"].get<double>(), 0.0);
}

TEST_F(CliTest, VerifyPassesAndDetectsBrokenPropagator) {
  json doc = default_doc();
  EXPECT_EQ(run("verify --config " + write_config(doc).string()), 0);
  // a chain that is not mirror symmetric breaks the propagator identities
  doc["frequency_matrix_override"] = json::array({json::array({100.0, -10.0}), json::array({-10.0, 140.0})});
  EXPECT_EQ(run("verify --config " + write_config(doc, "broken.json").string()), 4);
  const std::vector<IdentityCheck> checks = run_identity_suite(parse_config(doc));
  const auto mirror = std::find_if(checks.begin(), checks.end(),
                                   [](const IdentityCheck& c) { return c.name == "propagator.mirror"; });
  ASSERT_NE(mirror, checks.end());
  EXPECT_FALSE(mirror->pass);
}

TEST_F(CliTest, OverdampedChain) {
  json doc = default_doc();
  doc["omega_r"] = 1.0;
  doc["gamma"] = 20.0;
  doc["lambda2"] = 0.5;
  doc["T_H"] = 3.0;
  doc["T_C"] = 1.0;
  const RunConfig c = parse_config(doc);
  const CurrentReport rep = ness_report(c.model, c.baths(), c.nonlinearity, c.quadrature());
  ASSERT_TRUE(rep.converged());
  EXPECT_GT(rep.zeroth.p_inter(1, 0), 0.0);
  for (double r : rep.balance_residual_first) EXPECT_LT(r, 1e-5 * rep.zeroth.p_inter(1, 0));
  EXPECT_EQ(run("verify --config " + write_config(doc).string()), 0);
}

}  // namespace
}  // namespace ness::cli
