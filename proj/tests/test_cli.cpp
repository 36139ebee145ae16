#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "pfwcl/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pfwcl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = pfwcl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) { return std::string(PFWCL_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pfwcl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<double> csv_numbers(const std::string& line) {
    std::vector<double> v;
    std::istringstream is(line);
    for (std::string cell; std::getline(is, cell, ',');) v.push_back(std::stod(cell));
    return v;
}

}  // namespace

TEST(Cli, ValidatePointMass) {
    const auto r = run_cli({"validate", "--config", config_path("point_mass.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 3u);
    EXPECT_EQ(ls[0].rfind("# config: ", 0), 0u);
    EXPECT_EQ(ls[1], "dimension,m_plus1,m_minus1,m_minus2,m_minus3,ir_regular,delta_m,m_eff,a2_ok");
    EXPECT_EQ(csv_numbers(ls[2])[7], 4.0);
}

TEST(Cli, CutoffScanBracket) {
    const auto r = run_cli({"cutoff-scan", "--lambda", "1e2,1e4,1e6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 5u);
    EXPECT_EQ(ls[1], "lambda,kappa,calE,E_over_lambda_1p5,I1,I2");
    const double ratio = csv_numbers(ls.back())[3];
    EXPECT_GE(ratio, 1.44720);
    EXPECT_LE(ratio, 2.50663);
}

TEST(Cli, AssumptionFailureExitsTwo) {
    const auto r = run_cli({"energy", "--config", config_path("bad_infrared.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Assumption a2"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
    const auto v = run_cli({"validate", "--config", config_path("bad_infrared.json")});
    EXPECT_EQ(v.code, 2);  // subcommand conflicts with the file
    const auto w = run_cli({"--config", config_path("bad_infrared.json"), "--output", "-"});
    EXPECT_EQ(w.code, 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const auto unknown = scratch("unknown.json");
    std::ofstream(unknown) << R"({"subcommand":"fock","params":{"ntot":4,"colour":1}})";
    EXPECT_EQ(run_cli({"--config", unknown.string()}).code, 2);
    std::ofstream(unknown) << R"({"subcommand":"fock","extra":true})";
    EXPECT_EQ(run_cli({"--config", unknown.string()}).code, 2);
    EXPECT_EQ(run_cli({"fock", "--ntot", "four"}).code, 2);
    EXPECT_EQ(run_cli({"fock", "--modes", "1:2"}).code, 2);
    EXPECT_EQ(run_cli({"fock", "--ntot", "2.5"}).code, 2);
    EXPECT_EQ(run_cli({"wiener-hopf", "--T-ladder", "20,10"}).code, 2);
    EXPECT_EQ(run_cli({"energy", "--format", "xml"}).code, 2);
    EXPECT_EQ(run_cli({"--config", "/nonexistent/file.json"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, NumericalFailureExitsThreeAndNamesOperation) {
    const auto cfg = scratch("degenerate.json");
    std::ofstream(cfg) << R"({"subcommand":"energy","measure":{"profile":{"type":"gaussian","sigma":1e-200}}})";
    const auto r = run_cli({"--config", cfg.string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("numerical failure in moment"), std::string::npos) << r.err;
    const auto c = run_cli({"cutoff-scan", "--lambda", "1,1e300"});
    EXPECT_EQ(c.code, 3);
    EXPECT_NE(c.err.find("cutoff_energy_3d"), std::string::npos);
    // the row before the failing one was already flushed
    EXPECT_EQ(lines(c.out).size(), 3u);
}

TEST(Cli, DeterministicAndReproducibleFromEcho) {
    const std::vector<std::string> args{"fock", "--ntot", "12", "--kappa-list", "1,2", "--p-list", "0,0.2", "--T", "1"};
    const auto a = run_cli(args);
    auto with_jobs = args;
    with_jobs.insert(with_jobs.begin(), {"--jobs", "3"});
    const auto b = run_cli(with_jobs);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);

    const std::string header = lines(a.out)[0];
    const auto echoed = scratch("echo.json");
    std::ofstream(echoed) << header.substr(std::string("# config: ").size());
    const auto c = run_cli({"--config", echoed.string()});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.out, a.out);
}

TEST(Cli, FlagsOverrideConfigFile) {
    const auto r = run_cli({"fock", "--config", config_path("two_mode_wcl.json"), "--ntot", "6", "--kappa-list", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cfg = json::parse(lines(r.out)[0].substr(10));
    EXPECT_EQ(cfg["params"]["ntot"], 6);
    EXPECT_EQ(cfg["params"]["kappa-list"], json::array({3.0}));
    EXPECT_EQ(cfg["params"]["T"], 1.0);
    EXPECT_EQ(lines(r.out).size(), 3u);
}

TEST(Cli, JsonMirrorAndOutputFile) {
    const auto path = scratch("wh.json");
    const auto r = run_cli({"wiener-hopf", "--T-ladder", "2,4", "--format", "json", "--output", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    const auto doc = json::parse(in);
    EXPECT_EQ(doc["config"]["subcommand"], "wiener-hopf");
    ASSERT_EQ(doc["rows"].size(), 2u);
    EXPECT_EQ(doc["columns"][0], "T");
    EXPECT_EQ(doc["rows"][1]["T"], 4.0);
    EXPECT_EQ(doc["rows"][1]["n"], 160.0);
    EXPECT_TRUE(doc["rows"][0].contains("vacuum_rate"));
}

TEST(Cli, EnergyColumnsAndNotApplicableCells) {
    const auto r = run_cli({"--config", config_path("gaussian_energy.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    EXPECT_EQ(ls[1], "lambda,kappa,p,calE,log_spectral,E_over_lambda_1p5,dispersion");
    EXPECT_EQ(ls.size(), 2u + 9u);
    EXPECT_EQ(ls[2].substr(0, 4), "nan,");
}

TEST(Cli, HermiteReport) {
    const auto r = run_cli({"hermite-check", "--seed", "42"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["passed"].get<bool>());
    EXPECT_EQ(doc["checks"].size(), 5u);
    EXPECT_EQ(doc["config"]["seed"], 42);
}
