#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ftj/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = FTJ_CLI_PATH;
const fs::path kConfigs = FTJ_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ftj_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int runCli(const std::string& args, const fs::path& log) {
    std::string cmd = kCli + " " + args + " > " + (log / "stdout.txt").string() + " 2> " + (log / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> readReport(const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        EXPECT_EQ(kv.count(line.substr(0, eq)), 0u) << "duplicate key " << line;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

double num(const std::map<std::string, std::string>& kv, const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) {
        ADD_FAILURE() << "missing " << k;
        return std::nan("");
    }
    return std::stod(it->second);
}

void writeFile(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST(Cli, Example41Report) {
    fs::path d = scratch("ex41");
    ASSERT_EQ(runCli("run --config " + (kConfigs / "example41.cfg").string() + " --out " + d.string(), d), 0);
    auto kv = readReport(d / "report.txt");
    EXPECT_NEAR(num(kv, "F_entropy"), 0.18, 1e-6);
    EXPECT_NEAR(num(kv, "F_constructed"), 0.12, 1e-6);
    EXPECT_NEAR(num(kv, "J_entropy"), num(kv, "J_constructed"), num(kv, "eps_J"));
    EXPECT_EQ(kv["admissible"], "true");
    for (const auto& [k, v] : kv) {
        if (k.rfind("claim_", 0) == 0) {
            EXPECT_EQ(v, "pass") << k;
        }
    }
    for (const char* f : {"fronts.csv", "trace_left.csv", "trace_right.csv", "control.csv"})
        EXPECT_TRUE(fs::exists(d / f)) << f;
    EXPECT_EQ(slurp(d / "fronts.csv").substr(0, 10), "road,front");
    EXPECT_EQ(slurp(d / "control.csv").substr(0, 19), "t_break,gamma,k1,k2");
}

TEST(Cli, Example42Times) {
    fs::path d = scratch("ex42");
    ASSERT_EQ(runCli("run --config " + (kConfigs / "example42.cfg").string() + " --out " + d.string(), d), 0);
    auto kv = readReport(d / "report.txt");
    EXPECT_NEAR(num(kv, "t1"), 1.25, 1e-6);
    EXPECT_NEAR(num(kv, "t2"), 2.5, 1e-6);
    EXPECT_NEAR(num(kv, "t3"), 6.875, 1e-6);
    EXPECT_NEAR(num(kv, "t4"), 5.0 / 3.0, 1e-6);
    EXPECT_NEAR(num(kv, "t6"), 7.6190476, 1e-6);
    EXPECT_NEAR(num(kv, "F_entropy"), 0.11, 1e-6);
    EXPECT_NEAR(num(kv, "F_constructed"), 0.09, 1e-6);
}

TEST(Cli, FractalReport) {
    fs::path d = scratch("fractal");
    ASSERT_EQ(runCli("run --config " + (kConfigs / "fractal.cfg").string() + " --out " + d.string(), d), 0);
    auto kv = readReport(d / "report.txt");
    EXPECT_NEAR(num(kv, "tv_flux_trace"), 4.125, 1e-9);
}

TEST(Cli, RerunsAreByteIdentical) {
    fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    for (const fs::path& d : {a, b})
        ASSERT_EQ(runCli("run --config " + (kConfigs / "example42.cfg").string() + " --out " + d.string(), d), 0);
    for (const char* f : {"report.txt", "fronts.csv", "trace_left.csv", "trace_right.csv", "control.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, MissingHorizonIsConfigError) {
    fs::path d = scratch("missing_T");
    writeFile(d / "bad.cfg", "[run]\nscenario = example41\ndelta = 1e-3\n");
    EXPECT_EQ(runCli("run --config " + (d / "bad.cfg").string() + " --out " + d.string(), d), 3);
    std::string err = slurp(d / "stderr.txt");
    EXPECT_NE(err.find("T"), std::string::npos) << err;
    EXPECT_NE(err.find("ConfigParseError"), std::string::npos) << err;
}

TEST(Cli, BadValuesAreConfigErrors) {
    fs::path d = scratch("bad_values");
    writeFile(d / "a.cfg", "[run]\nscenario = example41\nT = abc\n");
    EXPECT_EQ(runCli("run --config " + (d / "a.cfg").string() + " --out " + d.string(), d), 3);
    writeFile(d / "b.cfg", "[run]\nscenario = nowhere\nT = 1\n");
    EXPECT_EQ(runCli("run --config " + (d / "b.cfg").string() + " --out " + d.string(), d), 3);
    EXPECT_EQ(runCli("run --config " + (d / "absent.cfg").string(), d), 3);
}

TEST(Cli, ViolatedScenarioConstraintIsInputError) {
    fs::path d = scratch("violated");
    writeFile(d / "c.cfg", "[run]\nscenario = example41\nT = 3\n[scenario]\nf_b = 0.15\n");
    EXPECT_EQ(runCli("run --config " + (d / "c.cfg").string() + " --out " + d.string(), d), 3);
}

TEST(Cli, Suites) {
    fs::path d = scratch("suites");
    EXPECT_EQ(runCli("suite --suite bogus", d), 3);
    EXPECT_EQ(runCli("suite --suite bvbound --seed 1 --count 100 --out " + d.string(), d), 0);
    EXPECT_TRUE(fs::exists(d / "suite_bvbound.csv"));
    EXPECT_EQ(runCli("suite --suite maximality --seed 7 --count 100", d), 0);
    EXPECT_NE(slurp(d / "stdout.txt").find("100/100"), std::string::npos);
}

TEST(Cli, SearchOnConstantFamily) {
    fs::path d = scratch("search41");
    ASSERT_EQ(runCli("search --config " + (kConfigs / "search41.cfg").string() + " --out " + d.string(), d), 0);
    auto kv = readReport(d / "report.txt");
    EXPECT_NEAR(num(kv, "F_best"), 0.12, 0.005);
    EXPECT_EQ(kv["tangential_shock"], "true");
    EXPECT_TRUE(fs::exists(d / "search_trace.csv"));
    EXPECT_TRUE(fs::exists(d / "best_control.csv"));
}

TEST(Cli, SearchOnMonotoneDatum) {
    fs::path d = scratch("search_monotone");
    ASSERT_EQ(runCli("search --config " + (kConfigs / "search_monotone.cfg").string() + " --out " + d.string(), d), 0);
    auto kv = readReport(d / "report.txt");
    EXPECT_NEAR(num(kv, "F_best"), num(kv, "F_entropy"), 4e-3);
}

TEST(Cli, EmptyLevelGridIsConfigError) {
    fs::path d = scratch("empty_grid");
    writeFile(d / "g.cfg",
              "[run]\nscenario = example41\nT = 3\n[search]\nlevel_min = 0.3\nlevel_max = 0.2\n");
    EXPECT_EQ(runCli("search --config " + (d / "g.cfg").string() + " --out " + d.string(), d), 3);
    EXPECT_NE(slurp(d / "stderr.txt").find("level grid is empty"), std::string::npos);
}

TEST(Cli, NumberFormatting) {
    EXPECT_EQ(ftj::cli::fmt12(0.12), "0.120000000000");
    EXPECT_EQ(ftj::cli::csv12(0.125), "0.125");
}
