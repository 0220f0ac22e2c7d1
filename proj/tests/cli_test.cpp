#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

fs::path tmp_dir(const std::string& sub) {
    const fs::path p = fs::path(TSCAUSAL_TEST_TMPDIR) / "cli" / sub;
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("'") + TSCAUSAL_CLI_PATH + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Cli, HelpAndParseFailures) {
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli(""), 2);            // a subcommand is required
    EXPECT_EQ(run_cli("frobnicate"), 2);  // unknown subcommand
    EXPECT_EQ(run_cli("discover"), 2);    // missing required --input
    EXPECT_EQ(run_cli("generate --N 3 --no-such-flag"), 2);
}

TEST(Cli, ConfigVersusRuntimeExitCodes) {
    // the alpha parse fails before any file access
    EXPECT_EQ(run_cli("discover --input nowhere.csv --alpha-pc banana"), 2);
    EXPECT_EQ(run_cli("discover --input nowhere.csv --px sometimes"), 2);
    EXPECT_EQ(run_cli("discover --input nowhere.csv --prewhiten"), 2);
    // a missing dataset is a runtime failure
    EXPECT_EQ(run_cli("discover --input nowhere.csv"), 3);
    // broken config JSON surfaces as a runtime (parse) failure
    const auto dir = tmp_dir("bad_bench");
    std::ofstream(dir / "broken.json") << "{ nope";
    EXPECT_EQ(run_cli("bench --config " + (dir / "broken.json").string() + " --out " +
                      (dir / "m.json").string()),
              3);
    EXPECT_EQ(run_cli("generate --N 0 --out-dir " + dir.string()), 2);
}

TEST(Cli, GenerateWritesModelAndRealizationsDeterministically) {
    const auto d1 = tmp_dir("gen1");
    const auto d2 = tmp_dir("gen2");
    const auto d3 = tmp_dir("gen3");
    const std::string common = "generate --N 3 --L 3 --c 0.4 --T 80 --realizations 2 --pool low";
    ASSERT_EQ(run_cli(common + " --seed 5 --out-dir " + d1.string()), 0);
    ASSERT_EQ(run_cli(common + " --seed 5 --out-dir " + d2.string()), 0);
    ASSERT_EQ(run_cli(common + " --seed 6 --out-dir " + d3.string()), 0);

    for (const char* name : {"model.json", "data_r0.csv", "data_r1.csv"}) {
        ASSERT_TRUE(fs::exists(d1 / name)) << name;
        EXPECT_EQ(read_bytes(d1 / name), read_bytes(d2 / name)) << name;
    }
    EXPECT_NE(read_bytes(d1 / "data_r0.csv"), read_bytes(d3 / "data_r0.csv"));
    EXPECT_NE(read_bytes(d1 / "data_r0.csv"), read_bytes(d1 / "data_r1.csv"));

    const auto model = nlohmann::ordered_json::parse(read_bytes(d1 / "model.json"));
    EXPECT_EQ(model["N"].get<int>(), 3);
    EXPECT_EQ(model["links"].size(), 3u);
    EXPECT_EQ(model["seed"].get<std::uint64_t>(), 5u);
}

TEST(Cli, DiscoverProducesByteStableGraph) {
    const auto dir = tmp_dir("discover");
    ASSERT_EQ(run_cli("generate --N 3 --L 3 --c 0.4 --T 120 --seed 9 --out-dir " + dir.string()),
              0);
    const std::string input = (dir / "data_r0.csv").string();
    const std::string base = "discover --input " + input + " --tau-max 3 --output ";
    ASSERT_EQ(run_cli(base + (dir / "g1.json").string()), 0);
    ASSERT_EQ(run_cli(base + (dir / "g2.json").string()), 0);
    EXPECT_EQ(read_bytes(dir / "g1.json"), read_bytes(dir / "g2.json"));

    const auto g = nlohmann::ordered_json::parse(read_bytes(dir / "g1.json"));
    EXPECT_EQ(g["method"].get<std::string>(), "pcmci");
    EXPECT_EQ(g["test"].get<std::string>(), "parcorr");
    EXPECT_EQ(g["n_vars"].get<int>(), 3);
    EXPECT_EQ(g["tau_max"].get<int>(), 3);
    EXPECT_TRUE(g["links"].is_array());
    EXPECT_EQ(g["runtime_seconds"].get<double>(), 0.0);  // --timing off

    ASSERT_EQ(run_cli(base + (dir / "g3.json").string() + " --timing"), 0);
    const auto g3 = nlohmann::ordered_json::parse(read_bytes(dir / "g3.json"));
    EXPECT_GT(g3["runtime_seconds"].get<double>(), 0.0);
}

TEST(Cli, DiscoverBaselineMethodSelection) {
    const auto dir = tmp_dir("methods");
    // T = 150 keeps the lasso cross-validation blocks above their size floor
    ASSERT_EQ(run_cli("generate --N 3 --L 3 --c 0.4 --T 150 --seed 4 --out-dir " + dir.string()),
              0);
    const std::string input = (dir / "data_r0.csv").string();
    for (const char* method : {"fullci", "bivci", "pairwise", "pc", "lasso", "mci0"}) {
        const std::string out = (dir / (std::string(method) + ".json")).string();
        ASSERT_EQ(run_cli("discover --input " + input + " --tau-max 3 --method " + method +
                          " --output " + out),
                  0)
            << method;
        const auto g = nlohmann::ordered_json::parse(read_bytes(out));
        EXPECT_EQ(g["method"].get<std::string>(), method);
    }
    EXPECT_EQ(run_cli("discover --input " + input + " --method mci0 --tau-max 3 --prewhiten "
                      "--output " + (dir / "pw.json").string()),
              0);
    const auto pw = nlohmann::ordered_json::parse(read_bytes(dir / "pw.json"));
    EXPECT_EQ(pw["method"].get<std::string>(), "mci0_prewhiten");
}

TEST(Cli, NullTableSidecarsAreReproducible) {
    const auto d1 = tmp_dir("null1");
    const auto d2 = tmp_dir("null2");
    const std::string common = "null-table --n 40 --b-null 200 --seed 11 --out-dir ";
    ASSERT_EQ(run_cli(common + d1.string()), 0);
    ASSERT_EQ(run_cli(common + d2.string()), 0);
    const std::string name = "gpdc_null_n40_B200_s11.bin";
    ASSERT_TRUE(fs::exists(d1 / name));
    EXPECT_EQ(read_bytes(d1 / name), read_bytes(d2 / name));
    EXPECT_EQ(run_cli("null-table --n 5 --out-dir " + d1.string()), 2);  // n < 10
}

TEST(Cli, BenchWritesMetricsAndPlotCsv) {
    const auto dir = tmp_dir("bench");
    std::ofstream(dir / "config.json")
        << R"({"methods":["pcmci"],"N":3,"networks":1,"realizations":2,)"
        << R"("T":120,"tau_max":3,"seed":1})";
    const std::string out = (dir / "metrics.json").string();
    const std::string csv = (dir / "plot.csv").string();
    ASSERT_EQ(run_cli("bench --config " + (dir / "config.json").string() + " --out " + out +
                      " --plot-csv " + csv),
              0);
    const auto m = nlohmann::ordered_json::parse(read_bytes(out));
    EXPECT_EQ(m["failures"]["count"].get<int>(), 0);
    EXPECT_TRUE(m.contains("summaries"));
    EXPECT_TRUE(m["summaries"].contains("pcmci"));
    std::ifstream in(csv);
    std::string header;
    ASSERT_TRUE(std::getline(in, header));
    EXPECT_EQ(header, "method,N,autocorr_class,measure,stat,value");
}

}  // namespace
