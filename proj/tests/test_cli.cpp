#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kEpsilon0 = 8.8541878128e-12;

int decode(int status) {
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_raw(const std::string& cmd) {
    return decode(std::system(cmd.c_str()));
}

int run(const std::string& args) {
    return run_raw(std::string(ACASIMIR_BIN) + " " + args);
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("acasimir_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<double> fields_of(const std::string& line) {
    std::vector<double> out;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
    return out;
}

json manifest_of(const fs::path& dir) {
    return json::parse(slurp(dir / "manifest.json"));
}

TEST(Invocation, HelpSucceeds) {
    EXPECT_EQ(run("--help > /dev/null 2>&1"), 0);
    EXPECT_EQ(run("pressure-sweep --help > /dev/null 2>&1"), 0);
    EXPECT_EQ(run("bifurcation --help > /dev/null 2>&1"), 0);
}

TEST(Invocation, BadCommandLinesExitWithConfigCode) {
    EXPECT_EQ(run("> /dev/null 2>&1"), 2);                        // missing subcommand
    EXPECT_EQ(run("frobnicate > /dev/null 2>&1"), 2);             // unknown subcommand
    EXPECT_EQ(run("pressure-sweep --bogus 1 > /dev/null 2>&1"), 2);
    EXPECT_EQ(run("pressure-sweep --um --nm > /dev/null 2>&1"), 2);
    EXPECT_EQ(run("pressure-sweep --mega --giga > /dev/null 2>&1"), 2);
}

TEST(Invocation, InvalidConfigValuesExitWithConfigCode) {
    const auto dir = fresh_dir("badcfg");
    EXPECT_EQ(run("pressure-sweep --r 1.5 --out " + dir.string() + " > /dev/null 2>&1"), 2);
    EXPECT_EQ(run("pressure-sweep --n_points 1 --out " + dir.string() + " > /dev/null 2>&1"), 2);
    EXPECT_EQ(run("pressure-sweep --config /no/such/file.conf --out " + dir.string() +
                  " > /dev/null 2>&1"),
              2);
}

TEST(Invocation, ExhaustedBudgetExitsWithNumericalCode) {
    const auto dir = fresh_dir("budget");
    EXPECT_EQ(run("pressure-sweep --max_evals 500 --n_points 3 --out " + dir.string() +
                  " > /dev/null 2>&1"),
              3);
}

TEST(Invocation, UnwritableOutputExitsWithIoCode) {
    const auto dir = fresh_dir("iofail");
    const fs::path blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run("pressure-sweep --n_points 2 --out " + (blocker / "sub").string() +
                  " > /dev/null 2>&1"),
              4);
}

TEST(SweepOutput, CsvShapeFormatAndManifest) {
    const auto dir = fresh_dir("sweep");
    ASSERT_EQ(run("pressure-sweep --L_min 1e-5 --L_max 2e-5 --n_points 7 --out " + dir.string() +
                  " > /dev/null 2>&1"),
              0);
    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    ASSERT_EQ(lines.size(), 8u);
    EXPECT_EQ(lines[0], "L_m,P_Pa,P_ideal_Pa");
    const std::regex cell("-?[0-9]\\.[0-9]{16}e[+-][0-9]{2,3}");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields_of(lines[i]);
        ASSERT_EQ(f.size(), 3u) << lines[i];
        std::istringstream ss(lines[i]);
        std::string raw;
        while (std::getline(ss, raw, ','))
            EXPECT_TRUE(std::regex_match(raw, cell)) << raw;
        EXPECT_NEAR(f[2], -std::numbers::pi * 1e-4 / (4.0 * f[0]), 1e-12 * std::abs(f[2]));
    }
    EXPECT_EQ(fields_of(lines[1])[0], 1e-5);
    EXPECT_EQ(fields_of(lines[7])[0], 2e-5);

    const json m = manifest_of(dir);
    EXPECT_EQ(m["tool"]["name"], "acasimir");
    EXPECT_EQ(m["command"], "pressure-sweep");
    EXPECT_EQ(m["config"]["band"]["omega1"].get<double>(), 9e7);
    EXPECT_EQ(m["config"]["sweep"]["n_points"].get<long>(), 7);
    EXPECT_GT(m["quadrature"]["evaluations"].get<std::uint64_t>(), 0u);
    EXPECT_GT(m["quadrature"]["max_error_bound"].get<double>(), 0.0);
    ASSERT_EQ(m["sign_report"].size(), 3u);
    for (const auto& entry : m["sign_report"]) {
        EXPECT_TRUE(entry.contains("n"));
        EXPECT_TRUE(entry.contains("L_predicted_m"));
        EXPECT_TRUE(entry.contains("pressure_Pa"));
        EXPECT_TRUE(entry.contains("sign"));
        EXPECT_TRUE(entry.contains("matches_repulsive_label"));
    }
    // one zero crossing sits inside [10, 20] um for the default band
    ASSERT_EQ(m["sign_changes_m"].size(), 1u);
    const double zero = m["sign_changes_m"][0].get<double>();
    EXPECT_GT(zero, 1.28e-5);
    EXPECT_LT(zero, 1.35e-5);
    EXPECT_TRUE(m.contains("timings_ms"));
}

TEST(SweepOutput, LogSpacingCoversSameEndpoints) {
    const auto dir = fresh_dir("logsweep");
    ASSERT_EQ(run("pressure-sweep --L_min 1e-5 --L_max 4e-5 --n_points 5 --spacing log --out " +
                  dir.string() + " > /dev/null 2>&1"),
              0);
    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(fields_of(lines[1])[0], 1e-5);
    EXPECT_EQ(fields_of(lines[5])[0], 4e-5);
    // interior points follow the geometric progression
    EXPECT_NEAR(fields_of(lines[3])[0], 2e-5, 1e-12 * 2e-5);
}

TEST(CompareOutput, ElectrostaticColumnsObeyExactScalings) {
    const auto dir = fresh_dir("compare");
    ASSERT_EQ(run("compare-electrostatic --L_min 1e-5 --L_max 4e-5 --n_points 5 --voltages 3,6"
                  " --out " +
                  dir.string() + " > /dev/null 2>&1"),
              0);
    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "L_m,P0_Pa,P_es_V1_Pa,P_es_V2_Pa");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields_of(lines[i]);
        ASSERT_EQ(f.size(), 4u);
        const double L = f[0];
        EXPECT_NEAR(f[1], -std::numbers::pi * 1e-4 / (4.0 * L), 1e-12 * std::abs(f[1]));
        EXPECT_NEAR(f[2], kEpsilon0 * 9.0 / (2.0 * L * L), 1e-12 * f[2]);
        EXPECT_NEAR(f[3], 4.0 * f[2], 1e-12 * f[3]);
    }
}

TEST(CompareOutput, VoltageListDrivesIndexedColumns) {
    const auto dir = fresh_dir("voltlist");
    ASSERT_EQ(run("compare-electrostatic --n_points 2 --voltages 2,5,10 --out " + dir.string() +
                  " > /dev/null 2>&1"),
              0);
    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    EXPECT_EQ(lines[0], "L_m,P0_Pa,P_es_V1_Pa,P_es_V2_Pa,P_es_V3_Pa");
    const auto f = fields_of(lines[1]);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_NEAR(f[3] / f[2], 6.25, 1e-12);
    EXPECT_NEAR(f[4] / f[2], 25.0, 1e-12);
}

TEST(Determinism, RerunsProduceByteIdenticalCsv) {
    const auto a = fresh_dir("rerun_a");
    const auto b = fresh_dir("rerun_b");
    const std::string args = "pressure-sweep --L_max 4e-5 --n_points 10 --out ";
    ASSERT_EQ(run(args + a.string() + " > /dev/null 2>&1"), 0);
    ASSERT_EQ(run(args + b.string() + " > /dev/null 2>&1"), 0);
    const std::string csv_a = slurp(a / "sweep.csv");
    EXPECT_FALSE(csv_a.empty());
    EXPECT_EQ(csv_a, slurp(b / "sweep.csv"));
}

TEST(Determinism, WorkerCountDoesNotChangeCsv) {
    const auto a = fresh_dir("threads_a");
    const auto b = fresh_dir("threads_b");
    const std::string tail = " pressure-sweep --L_max 4e-5 --n_points 10 --out ";
    ASSERT_EQ(run_raw("ACASIMIR_THREADS=1 " + std::string(ACASIMIR_BIN) + tail + a.string() +
                      " > /dev/null 2>&1"),
              0);
    ASSERT_EQ(run_raw("ACASIMIR_THREADS=4 " + std::string(ACASIMIR_BIN) + tail + b.string() +
                      " > /dev/null 2>&1"),
              0);
    EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

TEST(Determinism, GarbageThreadOverrideIsRejected) {
    const auto dir = fresh_dir("threads_bad");
    EXPECT_EQ(run_raw("ACASIMIR_THREADS=junk " + std::string(ACASIMIR_BIN) +
                      " pressure-sweep --n_points 2 --out " + dir.string() + " > /dev/null 2>&1"),
              2);
    EXPECT_EQ(run_raw("ACASIMIR_THREADS=-3 " + std::string(ACASIMIR_BIN) +
                      " pressure-sweep --n_points 2 --out " + dir.string() + " > /dev/null 2>&1"),
              2);
}

TEST(Config, FileValuesApplyAndFlagsOverride) {
    const auto dir = fresh_dir("cfgfile");
    const fs::path cfg = dir / "run.conf";
    std::ofstream(cfg) << "# sweep window\n"
                       << "L_min = 12e-6\n"
                       << "L_max = 18e-6\n"
                       << "n_points = 4\n"
                       << "r = 0.5\n";
    ASSERT_EQ(run("pressure-sweep --config " + cfg.string() + " --out " + (dir / "a").string() +
                  " > /dev/null 2>&1"),
              0);
    const json ma = manifest_of(dir / "a");
    EXPECT_EQ(ma["config"]["sweep"]["L_min"].get<double>(), 12e-6);
    EXPECT_EQ(ma["config"]["sweep"]["n_points"].get<long>(), 4);
    EXPECT_EQ(ma["config"]["environment"]["r1"].get<double>(), 0.5);
    EXPECT_EQ(ma["config"]["environment"]["r2"].get<double>(), 0.5);
    EXPECT_EQ(lines_of(slurp(dir / "a" / "sweep.csv")).size(), 5u);

    ASSERT_EQ(run("pressure-sweep --config " + cfg.string() + " --n_points 3 --r2 0.7 --out " +
                  (dir / "b").string() + " > /dev/null 2>&1"),
              0);
    const json mb = manifest_of(dir / "b");
    EXPECT_EQ(mb["config"]["sweep"]["n_points"].get<long>(), 3);
    EXPECT_EQ(mb["config"]["environment"]["r1"].get<double>(), 0.5);
    EXPECT_EQ(mb["config"]["environment"]["r2"].get<double>(), 0.7);
}

TEST(Config, UnknownKeysAndBadNumbersAreRejected) {
    const auto dir = fresh_dir("cfgbad");
    const fs::path unknown = dir / "unknown.conf";
    std::ofstream(unknown) << "frobnication_level = 9\n";
    EXPECT_EQ(run("pressure-sweep --config " + unknown.string() + " --out " +
                  (dir / "x").string() + " > /dev/null 2>&1"),
              2);
    const fs::path bad = dir / "bad.conf";
    std::ofstream(bad) << "L_min = twelve\n";
    EXPECT_EQ(run("pressure-sweep --config " + bad.string() + " --out " + (dir / "y").string() +
                  " > /dev/null 2>&1"),
              2);
}

TEST(Config, DomainModeReachesTheKernel) {
    const auto dir = fresh_dir("annulus");
    const fs::path cfg = dir / "run.conf";
    std::ofstream(cfg) << "domain_mode = annulus\n"
                       << "L_min = 17e-6\n"
                       << "L_max = 17.5e-6\n"
                       << "n_points = 2\n";
    ASSERT_EQ(run("pressure-sweep --config " + cfg.string() + " --out " + (dir / "o").string() +
                  " > /dev/null 2>&1"),
              0);
    const auto row = fields_of(lines_of(slurp(dir / "o" / "sweep.csv"))[2]);
    EXPECT_NEAR(row[1], 2.26649816700136564e-02, 1e-6 * row[1]);
    EXPECT_EQ(manifest_of(dir / "o")["config"]["domain_mode"], "annulus");
}

TEST(Config, UnitFlagsScaleOnlyFlagValues) {
    const auto dir = fresh_dir("units");
    ASSERT_EQ(run("pressure-sweep --L_min 10 --L_max 20 --um --n_points 2 --out " +
                  (dir / "um").string() + " > /dev/null 2>&1"),
              0);
    const json um = manifest_of(dir / "um");
    EXPECT_NEAR(um["config"]["sweep"]["L_min"].get<double>(), 1e-5, 1e-12 * 1e-5);
    EXPECT_NEAR(um["config"]["sweep"]["L_max"].get<double>(), 2e-5, 1e-12 * 2e-5);

    ASSERT_EQ(run("pressure-sweep --L_min 10000 --L_max 20000 --nm --n_points 2 --out " +
                  (dir / "nm").string() + " > /dev/null 2>&1"),
              0);
    const json nm = manifest_of(dir / "nm");
    EXPECT_NEAR(nm["config"]["sweep"]["L_min"].get<double>(), 1e-5, 1e-12 * 1e-5);

    ASSERT_EQ(run("pressure-sweep --omega1 90 --omega2 100 --mega --n_points 2 --out " +
                  (dir / "mega").string() + " > /dev/null 2>&1"),
              0);
    const json mega = manifest_of(dir / "mega");
    EXPECT_NEAR(mega["config"]["band"]["omega1"].get<double>(), 9e7, 1e-12 * 9e7);
    EXPECT_NEAR(mega["config"]["band"]["omega2"].get<double>(), 1e8, 1e-12 * 1e8);

    // config-file lengths stay SI even when a unit flag is active elsewhere
    const fs::path cfg = dir / "si.conf";
    std::ofstream(cfg) << "L_min = 15e-6\n";
    ASSERT_EQ(run("pressure-sweep --config " + cfg.string() + " --L_max 30 --um --n_points 2"
                  " --out " +
                  (dir / "mixed").string() + " > /dev/null 2>&1"),
              0);
    const json mixed = manifest_of(dir / "mixed");
    EXPECT_EQ(mixed["config"]["sweep"]["L_min"].get<double>(), 15e-6);
    EXPECT_NEAR(mixed["config"]["sweep"]["L_max"].get<double>(), 3e-5, 1e-12 * 3e-5);
}

TEST(Bifurcation, CsvColumnsFollowTheLoadList) {
    const auto dir = fresh_dir("bif");
    ASSERT_EQ(run("bifurcation --n_points 30 --lambda2_values 0.25,0 --out " + dir.string() +
                  " > /dev/null 2>&1"),
              0);
    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    ASSERT_EQ(lines.size(), 31u);
    EXPECT_EQ(lines[0], "L_tilde,lambda1_0.25,lambda1_0");
    const auto first = fields_of(lines[1]);
    const auto last = fields_of(lines[30]);
    EXPECT_EQ(first[0], 0.01);
    EXPECT_EQ(last[0], 1.0);
    EXPECT_EQ(last[2], 0.0);  // bare cubic vanishes at full gap
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields_of(lines[i]);
        const double t = f[0];
        EXPECT_NEAR(f[2], t * t * (1.0 - t), 1e-12) << "t = " << t;
    }
    const json m = manifest_of(dir);
    ASSERT_EQ(m["curves"].size(), 2u);
    EXPECT_EQ(m["curves"][1]["lambda2"].get<double>(), 0.0);
    EXPECT_EQ(m["curves"][1]["L_tilde_star"].get<double>(), 2.0 / 3.0);
    EXPECT_TRUE(m["curves"][1]["argmax_at_two_thirds"].get<bool>());
    EXPECT_TRUE(m["curves"][0].contains("lambda1_star"));
}

TEST(PullIn, ReportAndManifestCarryBothVoltageRoutes) {
    const auto dir = fresh_dir("pullin");
    const fs::path log = dir / "stdout.txt";
    ASSERT_EQ(run("pull-in --out " + dir.string() + " > " + log.string() + " 2>/dev/null"), 0);
    const std::string text = slurp(log);
    EXPECT_NE(text.find("V_in = 850.1892748786779 V"), std::string::npos);
    EXPECT_NE(text.find("lambda2 = "), std::string::npos);
    EXPECT_NE(text.find("f(L_in/D) = "), std::string::npos);
    EXPECT_NE(text.find("V_star = "), std::string::npos);
    EXPECT_NE(text.find("V_star_closed = "), std::string::npos);
    EXPECT_NE(text.find("argmax_shifted = "), std::string::npos);

    const json m = manifest_of(dir);
    const auto& p = m["pull_in"];
    EXPECT_NEAR(p["V_in"].get<double>(), 8.50189274878677907e+02, 1e-12 * 850.0);
    EXPECT_NEAR(p["V_star"].get<double>(), p["V_star_closed"].get<double>(),
                1e-3 * p["V_star"].get<double>());
    EXPECT_TRUE(p.contains("lambda2"));
    EXPECT_TRUE(p.contains("f_at_L_in"));
    EXPECT_TRUE(p.contains("argmax_shifted"));
    // no CSV table for a scalar report
    EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

TEST(DesignBandwidth, ReportsBandAndPlacementCheck) {
    const auto dir = fresh_dir("design");
    const fs::path log = dir / "stdout.txt";
    ASSERT_EQ(run("design-bandwidth --L_target 40e-6 --out " + dir.string() + " > " +
                  log.string() + " 2>/dev/null"),
              0);
    const std::string text = slurp(log);
    EXPECT_NE(text.find("omega1 = 26703537.55551324 rad/s"), std::string::npos);
    EXPECT_NE(text.find("nearest_extremum = "), std::string::npos);
    EXPECT_NE(text.find("placement_rel_error = "), std::string::npos);

    const json m = manifest_of(dir);
    EXPECT_NEAR(m["design"]["omega1"].get<double>(), 2.67035375555132404e+07, 1e-10 * 2.67e7);
    EXPECT_LT(m["design"]["placement_rel_error"].get<double>(), 0.05);

    const auto lines = lines_of(slurp(dir / "sweep.csv"));
    EXPECT_EQ(lines[0], "L_m,P_Pa,P_ideal_Pa");
    EXPECT_EQ(fields_of(lines[1])[0], 0.5 * 4e-5);
    EXPECT_EQ(fields_of(lines.back())[0], 1.5 * 4e-5);
}

}  // namespace
