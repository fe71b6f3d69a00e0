#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaussnet/graph.hpp"
#include "gaussnet/scenario.hpp"

using namespace gaussnet;
namespace fs = std::filesystem;

namespace {

std::string config_dir() { return GAUSSNET_CONFIG_DIR; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json micro_er_config(const std::string& out_dir) {
    return nlohmann::json{
        {"scenario", "er-degree-fidelity"},
        {"n", 8},
        {"edge_probabilities", {0.5}},
        {"networks_per_p", 2},
        {"c3", 3},
        {"mode", 0},
        {"omega0", 1.0},
        {"g", 1.0},
        {"payload", {{"family", "squeezed_vacuum"}, {"r", 1.0}}},
        {"window", {{"length", 4.0}, {"samples", 40}}},
        {"require_connected", true},
        {"seed", 5},
        {"output", {{"dir", out_dir}}}};
}

}  // namespace

TEST_CASE("catalog covers the reproduced figures") {
    auto catalog = scenario_catalog();
    CHECK(catalog.size() == 8);
    std::string all;
    for (const auto& e : catalog) {
        all += e.figures + ", ";
        CHECK_FALSE(e.desk_config.empty());
        CHECK_FALSE(e.paper_config.empty());
    }
    for (const char* fig : {"2", "3", "4", "5(inset)", "6", "8", "9", "10", "11", "12", "13"})
        CHECK(all.find(fig) != std::string::npos);
    nlohmann::json j = nlohmann::json::parse(catalog_json());
    CHECK(j.size() == 8);
    CHECK(j[0].contains("figures"));
}

TEST_CASE("bundled configs validate") {
    for (const auto& entry : fs::directory_iterator(config_dir())) {
        if (entry.path().extension() != ".json") continue;
        ScenarioConfig config = ScenarioConfig::from_file(entry.path().string());
        ValidationReport rep = validate_config(config);
        INFO(entry.path().string(), ": ", rep.to_string());
        CHECK(rep.ok());
    }
}

TEST_CASE("validation reports field paths") {
    // Missing seed on a stochastic scenario.
    nlohmann::json j = micro_er_config("tmp_unused");
    j.erase("seed");
    auto rep = validate_config(ScenarioConfig::from_json(j));
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.errors[0].path == "seed");

    // Out-of-range probability, with the offending index named.
    nlohmann::json j2 = micro_er_config("tmp_unused");
    j2["edge_probabilities"] = {1.2};
    auto rep2 = validate_config(ScenarioConfig::from_json(j2));
    REQUIRE_FALSE(rep2.ok());
    CHECK(rep2.errors[0].path == "edge_probabilities[0]");

    nlohmann::json j3 = micro_er_config("tmp_unused");
    j3["scenario"] = "nope";
    CHECK_FALSE(validate_config(ScenarioConfig::from_json(j3)).ok());

    nlohmann::json j4{{"scenario", "sbm-modes"},
                      {"p_within", 1.2},
                      {"seed", 1},
                      {"output", {{"dir", "x"}}}};
    auto rep4 = validate_config(ScenarioConfig::from_json(j4));
    REQUIRE_FALSE(rep4.ok());
    bool saw_p_within = false, saw_payload = false;
    for (const auto& d : rep4.errors) {
        if (d.path == "p_within") saw_p_within = true;
        if (d.path == "payload") saw_payload = true;  // missing payload also reported
    }
    CHECK(saw_p_within);
    CHECK(saw_payload);

    // Missing dataset file.
    nlohmann::json j5{{"scenario", "node-capacity"},
                      {"dataset", "no/such/file.edges"},
                      {"output", {{"dir", "x"}}}};
    CHECK_FALSE(validate_config(ScenarioConfig::from_json(j5)).ok());
}

TEST_CASE("config overrides") {
    ScenarioConfig config = ScenarioConfig::from_json(micro_er_config("tmp_unused"));
    config.set_override("window.samples", "25");
    CHECK(config.raw()["window"]["samples"] == 25);
    config.set_override("payload.r", "0.5");
    CHECK(config.raw()["payload"]["r"] == 0.5);
    const uint64_t h1 = config.hash();
    config.set_override("seed", "6");
    CHECK(config.hash() != h1);
}

TEST_CASE("micro scenario run produces outputs and a manifest") {
    const std::string dir = "tmp_scenario_out";
    fs::remove_all(dir);
    ScenarioConfig config = ScenarioConfig::from_json(micro_er_config(dir));
    ScenarioResult res = run_scenario(config, "", 1);
    CHECK(fs::exists(dir + "/pairs.csv"));
    CHECK(fs::exists(dir + "/kavg.csv"));
    CHECK(fs::exists(dir + "/manifest.json"));
    CHECK(res.metrics.contains("per_p"));
    CHECK_FALSE(res.summary.empty());

    nlohmann::json manifest = nlohmann::json::parse(read_file(dir + "/manifest.json"));
    CHECK(manifest["scenario"] == "er-degree-fidelity");
    CHECK(manifest["config"]["seed"] == 5);
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("code_version"));
    fs::remove_all(dir);
}

TEST_CASE("serial and parallel runs write identical bytes") {
    const std::string d1 = "tmp_det_serial", d2 = "tmp_det_par", d3 = "tmp_det_rerun";
    for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
    ScenarioConfig config = ScenarioConfig::from_json(micro_er_config("unused"));
    run_scenario(config, d1, 1);
    run_scenario(config, d2, 2);
    run_scenario(config, d3, 1);
    for (const char* name : {"pairs.csv", "kavg.csv", "grid.csv"}) {
        if (!fs::exists(d1 + "/" + name)) continue;
        CHECK(read_file(d1 + "/" + name) == read_file(d2 + "/" + name));
        CHECK(read_file(d1 + "/" + name) == read_file(d3 + "/" + name));
    }
    for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

TEST_CASE("ideal protocols scenario metrics") {
    nlohmann::json j{{"scenario", "ideal-protocols"},
                     {"omega", 1.0},
                     {"c2", 1},
                     {"c3", 1},
                     {"payload", {{"family", "squeezed_vacuum"}, {"r", 0.5}}},
                     {"trajectory_samples", 200},
                     {"output", {{"dir", "tmp_ideal_out"}}}};
    fs::remove_all("tmp_ideal_out");
    ScenarioResult res = run_scenario(ScenarioConfig::from_json(j), "", 1);
    CHECK(res.metrics["two_step"]["efficiency_at_nominal"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.metrics["single_step"]["best_fidelity"].get<double>() > 0.98);
    fs::remove_all("tmp_ideal_out");
}

#ifdef GAUSSNET_CLI_PATH
TEST_CASE("command line interface") {
    const std::string cli = GAUSSNET_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("list") == 0);
    CHECK(run("list --json") == 0);
    CHECK(run(std::string("validate ") + GAUSSNET_CONFIG_DIR + "/sbm-modes.desk.json") == 0);
    CHECK(run("validate /no/such/config.json") == 1);
    CHECK(run("nonsense-subcommand") == 1);

    // A self-loop in an input file is a user-input error, exit code 1.
    std::ofstream bad("tmp_cli_bad.edges");
    bad << "0 0\n";
    bad.close();
    CHECK(run("spectrum tmp_cli_bad.edges") == 1);
    fs::remove("tmp_cli_bad.edges");

    // Rewire round-trips through files.
    CHECK(run(std::string("rewire ") + GAUSSNET_DATA_DIR + "/karate.edges pk 9 tmp_cli_rw.edges") ==
          0);
    Graph rw = load_edge_list("tmp_cli_rw.edges");
    Graph orig = load_edge_list(std::string(GAUSSNET_DATA_DIR) + "/karate.edges");
    CHECK(rw.degrees() == orig.degrees());
    fs::remove("tmp_cli_rw.edges");

    // A micro scenario run through the CLI with field overrides.
    fs::remove_all("tmp_cli_out");
    std::ofstream cfg("tmp_cli_config.json");
    cfg << micro_er_config("tmp_cli_out").dump();
    cfg.close();
    CHECK(run("run tmp_cli_config.json --workers 1 --set networks_per_p=1") == 0);
    CHECK(fs::exists("tmp_cli_out/manifest.json"));
    fs::remove("tmp_cli_config.json");
    fs::remove_all("tmp_cli_out");
}
#endif
