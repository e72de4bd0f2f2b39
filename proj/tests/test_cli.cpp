#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using qcap::testing::run_command;
using qcap::testing::slurp;

namespace {

const std::string kCli = QCAP_CLI_PATH;

std::string cli(const std::string& args) { return "env -u QCAP_CONFIG " + kCli + " " + args; }

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("qcap_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST(Cli, FiniteWellLevels)
{
    const auto r = run_command(cli("levels --well finite --a 5 --depth 10 --mstar 0.1"));
    ASSERT_EQ(r.exit_code, 0);
    const json j = json::parse(r.output);
    EXPECT_EQ(j["energies_eV"].size(), 9u);
    EXPECT_NEAR(j["energies_eV"][0].get<double>(), -9.8706260, 1e-6);
}

TEST(Cli, InfiniteWellLevels)
{
    const auto r = run_command(cli("levels --well infinite --a 5 --count 3 --mstar 0.1"));
    ASSERT_EQ(r.exit_code, 0);
    const json j = json::parse(r.output);
    ASSERT_EQ(j["energies_eV"].size(), 3u);
    EXPECT_NEAR(j["energies_eV"][0].get<double>(), 0.150412, 1e-6);
    EXPECT_NEAR(j["energies_eV"][1].get<double>(), 0.601648, 1e-6);
    EXPECT_NEAR(j["energies_eV"][2].get<double>(), 1.353709, 1e-6);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run_command(cli("levels --well finite --a -1 2>/dev/null")).exit_code, 1);
    EXPECT_EQ(run_command(cli("levels --well square 2>/dev/null")).exit_code, 1);
    EXPECT_EQ(run_command(cli("2>/dev/null")).exit_code, 1);
    EXPECT_EQ(run_command(cli("cq --figure 7 2>/dev/null")).exit_code, 1);
    EXPECT_EQ(run_command(cli("levels --figure 1 --profile x.json 2>/dev/null")).exit_code, 1);
}

TEST(Cli, IoErrors)
{
    EXPECT_EQ(run_command(cli("levels --profile /nonexistent/p.json 2>/dev/null")).exit_code, 3);
    EXPECT_EQ(run_command(cli("levels --well finite --out /nonexistent/dir/o.json 2>/dev/null")).exit_code, 3);
    const fs::path dir = scratch("io");
    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_EQ(run_command(cli("levels --profile " + (dir / "broken.json").string() + " 2>/dev/null")).exit_code, 3);
}

TEST(Cli, InvalidProfileNamesField)
{
    const fs::path dir = scratch("field");
    std::ofstream(dir / "bad.json")
        << R"({"material": {"m_star": 0.1}, "profile": {"left": 0, "right": 0, "segments": [{"kind": "constant", "width": 2}]}})";
    const auto r = run_command(cli("levels --profile " + (dir / "bad.json").string() + " 2>&1"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("profile.segments[0].level"), std::string::npos) << r.output;
}

TEST(Cli, ProfileFileMatchesFlags)
{
    const fs::path dir = scratch("profile");
    std::ofstream(dir / "well.json")
        << R"({"material": {"m_star": 0.1}, "profile": {"left": 0, "right": 0, "segments": [{"kind": "constant", "width": 5, "level": -10}]}})";
    const auto from_file = run_command(cli("levels --profile " + (dir / "well.json").string() + " --format csv"));
    const auto from_flags = run_command(cli("levels --well finite --a 5 --depth 10 --format csv"));
    ASSERT_EQ(from_file.exit_code, 0);
    ASSERT_EQ(from_flags.exit_code, 0);
    // same levels to the printed precision (12 decimals, well below 1e-9 eV)
    auto energies = [](const std::string& csv) {
        std::vector<double> e;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line))
            e.push_back(std::stod(line.substr(line.find(',') + 1)));
        return e;
    };
    const auto a = energies(from_file.output), b = energies(from_flags.output);
    ASSERT_EQ(a.size(), 9u);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(Cli, SampleProfileLoads)
{
    const auto r = run_command(cli(std::string("levels --profile ") + QCAP_SAMPLES_DIR + "/asymmetric_well.json"));
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_GE(json::parse(r.output)["energies_eV"].size(), 1u);
}

TEST(Cli, FigurePresetsWriteCsvs)
{
    const fs::path dir = scratch("figures");
    const struct {
        int figure;
        std::vector<std::string> files;
    } expected[] = {
        {1, {"fig1_infinite_a5.csv", "fig1_infinite_a10.csv"}},
        {4,
         {"fig4_double_b5_gap2_U10.csv", "fig4_double_b5_gap10_U10.csv", "fig4_double_b10_gap2_U10.csv",
          "fig4_double_b10_gap10_U10.csv"}},
        {6, {"fig6_parabolic_x0_10_U10.csv", "fig6_parabolic_x0_5_U10.csv", "fig6_parabolic_x0_2_U10.csv"}},
    };
    for (const auto& e : expected) {
        const auto r = run_command(cli("cq --figure " + std::to_string(e.figure) + " --out " + dir.string()));
        ASSERT_EQ(r.exit_code, 0);
        for (const auto& f : e.files) {
            const std::string csv = slurp((dir / f).string());
            ASSERT_FALSE(csv.empty()) << f;
            EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 501) << f;
            // C_q column non-decreasing
            std::istringstream in(csv);
            std::string line;
            std::getline(in, line);
            double prev = 0.0;
            while (std::getline(in, line)) {
                const auto c1 = line.find(',');
                const double cq = std::stod(line.substr(c1 + 1));
                EXPECT_GE(cq, prev) << f;
                prev = cq;
            }
        }
        const json manifest = json::parse(slurp((dir / ("fig" + std::to_string(e.figure) + "_manifest.json")).string()));
        EXPECT_EQ(manifest["wells"].size(), e.files.size());
    }
}

TEST(Cli, FigureFiveFlagsDepthAssumption)
{
    const fs::path dir = scratch("fig5");
    ASSERT_EQ(run_command(cli("figure 5 --out " + dir.string() + " 2>/dev/null")).exit_code, 0);
    const json manifest = json::parse(slurp((dir / "fig5_manifest.json").string()));
    ASSERT_EQ(manifest["wells"].size(), 4u);
    for (const auto& w : manifest["wells"]) {
        EXPECT_EQ(w["depth_eV"].get<double>(), 10.0);
        EXPECT_EQ(w["assumptions"].size(), 1u);
    }
    const json fig4 = [&] {
        run_command(cli("figure 4 --out " + dir.string()));
        return json::parse(slurp((dir / "fig4_manifest.json").string()));
    }();
    for (const auto& w : fig4["wells"])
        EXPECT_TRUE(w["assumptions"].empty());
}

TEST(Cli, RepeatedRunsAreByteIdentical)
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (int fig : {2, 5}) {
        ASSERT_EQ(run_command(cli("cq --figure " + std::to_string(fig) + " --out " + a.string() + " 2>/dev/null")).exit_code, 0);
        ASSERT_EQ(run_command(cli("cq --figure " + std::to_string(fig) + " --out " + b.string() + " 2>/dev/null")).exit_code, 0);
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path().string()), slurp((b / entry.path().filename()).string()))
            << entry.path().filename();
        ++compared;
    }
    EXPECT_EQ(compared, 8);
}

TEST(Cli, CrosscheckPassesAndFails)
{
    const auto finite = run_command(cli("crosscheck --well finite"));
    EXPECT_EQ(finite.exit_code, 0) << finite.output;
    EXPECT_NE(finite.output.find("PASS"), std::string::npos);

    const auto parabolic = run_command(cli("crosscheck --well parabolic --x0 5 --depth 10 --layers 400"));
    EXPECT_EQ(parabolic.exit_code, 0) << parabolic.output;

    const auto coarse = run_command(cli("crosscheck --well parabolic --x0 5 --depth 10 --layers 2"));
    EXPECT_EQ(coarse.exit_code, 2);
    EXPECT_NE(coarse.output.find("FAIL"), std::string::npos);
}

TEST(Cli, ConfigFileAndEnvironment)
{
    const fs::path dir = scratch("config");
    std::ofstream(dir / "cfg.json") << R"({"well": "infinite", "a": 10, "count": 2})";
    const std::string cfg = (dir / "cfg.json").string();

    const auto from_env = run_command("QCAP_CONFIG=" + cfg + " " + kCli + " levels");
    ASSERT_EQ(from_env.exit_code, 0);
    const json j = json::parse(from_env.output);
    ASSERT_EQ(j["energies_eV"].size(), 2u);
    EXPECT_NEAR(j["energies_eV"][0].get<double>(), 0.150412 / 4.0, 1e-6);

    // flags win over the config file
    const auto flag_wins = run_command(cli("levels --config " + cfg + " --a 5"));
    ASSERT_EQ(flag_wins.exit_code, 0);
    EXPECT_NEAR(json::parse(flag_wins.output)["energies_eV"][0].get<double>(), 0.150412, 1e-6);

    std::ofstream(dir / "bad.json") << R"({"wel": "infinite"})";
    EXPECT_EQ(run_command(cli("levels --config " + (dir / "bad.json").string() + " 2>/dev/null")).exit_code, 1);
}

TEST(Cli, StrictModeTurnsWarningsIntoExitTwo)
{
    // a starved scan without the parity split misses most of the paired levels
    const std::string starved = "levels --well double --a 5 --gap 10 --depth 10 --grid-points 100 --parity off";
    const auto lenient = run_command(cli(starved + " 2>&1 >/dev/null"));
    EXPECT_EQ(lenient.exit_code, 0);
    EXPECT_NE(lenient.output.find("warning"), std::string::npos);
    EXPECT_EQ(run_command(cli(starved + " --strict 2>/dev/null >/dev/null")).exit_code, 2);
    EXPECT_EQ(run_command(cli("levels --well finite --strict >/dev/null")).exit_code, 0);
}
