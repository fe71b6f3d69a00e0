#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussnet/graph.hpp"
#include "gaussnet/parallel.hpp"
#include "gaussnet/protocols.hpp"
#include "gaussnet/scenario.hpp"
#include "gaussnet/version.hpp"

using namespace gaussnet;

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& output_dir, int workers) {
    ScenarioConfig config = ScenarioConfig::from_file(config_path);
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: " + ov);
        config.set_override(ov.substr(0, eq), ov.substr(eq + 1));
    }
    ValidationReport rep = validate_config(config);
    if (!rep.ok()) {
        std::cerr << "config error:\n" << rep.to_string();
        return 1;
    }
    ScenarioResult res = run_scenario(config, output_dir, workers);
    std::cout << res.summary << "\n";
    std::cout << "outputs:\n";
    for (const auto& f : res.output_files) std::cout << "  " << f << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    ScenarioConfig config = ScenarioConfig::from_file(config_path);
    ValidationReport rep = validate_config(config);
    if (!rep.ok()) {
        std::cerr << rep.to_string();
        return 1;
    }
    std::cout << "ok: " << config.id() << "\n";
    return 0;
}

int cmd_list(bool as_json) {
    if (as_json) {
        std::cout << catalog_json() << "\n";
        return 0;
    }
    std::printf("%-24s %-12s %s\n", "scenario", "figures", "description");
    for (const auto& e : scenario_catalog()) {
        std::printf("%-24s %-12s %s\n", e.id.c_str(), e.figures.c_str(), e.description.c_str());
        std::printf("%-24s %-12s configs: %s | %s\n", "", "", e.desk_config.c_str(),
                    e.paper_config.c_str());
    }
    return 0;
}

int cmd_rewire(const std::string& in, const std::string& mode_str, uint64_t seed,
               const std::string& out, double ck_tol, bool one_indexed) {
    Graph g = load_edge_list(in, one_indexed);
    RewireParams params;
    params.ck_tol = ck_tol;
    RewireResult res = rewire(g, rewire_mode_from_string(mode_str), seed, params);
    save_edge_list(res.graph, out);
    std::cout << "rewired " << in << " -> " << out << " (mode " << mode_str << ", seed " << seed
              << ")\n";
    if (mode_str.find("ck") != std::string::npos) {
        std::cout << "clustering-spectrum L1 distance: " << res.ck_distance << "\n";
        if (!res.converged)
            std::cerr << "warning: ck target " << ck_tol
                      << " not reached within the move budget (ConvergenceWarning)\n";
    }
    return 0;
}

int cmd_spectrum(const std::string& in, double omega0, double g, int modes,
                 const std::string& communities, bool one_indexed) {
    Graph graph = load_edge_list(in, one_indexed);
    NetworkContext net(graph, omega0, g);
    std::printf("# %d nodes, %d edges, omega0 = %g, g = %g\n", graph.n, graph.edge_count(),
                omega0, g);
    std::printf("%-6s %-16s\n", "mode", "Omega");
    for (int m = 0; m < net.basis.size(); ++m)
        std::printf("%-6d %.12g\n", m, net.basis.Omega(m));
    if (!communities.empty()) {
        Partition part = load_partition(communities);
        if (part.size() != graph.n) throw InvalidPartition("community file size mismatch");
        const int n_comm = part.community_count();
        const int shown = std::min(modes, net.basis.size());
        std::printf("\n# mean |K[i,mode]| per community, %d slowest modes\n", shown);
        std::printf("%-6s", "mode");
        for (int c = 0; c < n_comm; ++c) std::printf(" comm%-12d", c);
        std::printf("\n");
        for (int m = 0; m < shown; ++m) {
            std::printf("%-6d", m);
            for (int c = 0; c < n_comm; ++c) {
                double sum = 0.0;
                int cnt = 0;
                for (int v = 0; v < graph.n; ++v)
                    if (part.labels[v] == c) {
                        sum += std::abs(net.basis.K(v, m));
                        ++cnt;
                    }
                std::printf(" %-16.6g", sum / cnt);
            }
            std::printf("\n");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-state transfer and routing simulator for oscillator networks"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario config");
    std::string run_config, run_output;
    std::vector<std::string> run_overrides;
    int run_workers = 0;
    run->add_option("config", run_config, "scenario config file")->required();
    run->add_option("--set", run_overrides, "override config fields, key.path=value");
    run->add_option("--output-dir", run_output, "override the output directory");
    run->add_option("--workers", run_workers, "worker threads (default: GAUSSNET_WORKERS or cores)");

    auto* validate = app.add_subcommand("validate", "validate a scenario config");
    std::string val_config;
    validate->add_option("config", val_config, "scenario config file")->required();

    auto* list = app.add_subcommand("list", "list scenarios and the figures they reproduce");
    bool list_json = false;
    list->add_flag("--json", list_json, "machine-readable catalog");

    auto* rew = app.add_subcommand("rewire", "degree-preserving graph randomization");
    std::string rew_in, rew_mode, rew_out;
    uint64_t rew_seed = 0;
    double rew_ck_tol = 0.05;
    bool rew_one_indexed = false;
    rew->add_option("edges-in", rew_in, "input edge list")->required();
    rew->add_option("mode", rew_mode, "pk | pkk | pk_ck | pkk_ck")->required();
    rew->add_option("seed", rew_seed, "random seed")->required();
    rew->add_option("edges-out", rew_out, "output edge list")->required();
    rew->add_option("--ck-tol", rew_ck_tol, "clustering spectrum L1 tolerance");
    rew->add_flag("--one-indexed", rew_one_indexed, "input file uses 1-based node ids");

    auto* spec = app.add_subcommand("spectrum", "normal-mode frequencies and overlaps");
    std::string spec_in, spec_comm;
    double spec_omega0 = 1.0, spec_g = 1.0;
    int spec_modes = 4;
    bool spec_one_indexed = false;
    spec->add_option("edges-in", spec_in, "input edge list")->required();
    spec->add_option("--omega0", spec_omega0, "network bare frequency");
    spec->add_option("--g", spec_g, "network coupling strength");
    spec->add_option("--modes", spec_modes, "number of slowest modes for the overlap table");
    spec->add_option("--communities", spec_comm, "community labels file for per-community overlaps");
    spec->add_flag("--one-indexed", spec_one_indexed, "input file uses 1-based node ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(run_config, run_overrides, run_output, run_workers);
        if (*validate) return cmd_validate(val_config);
        if (*list) return cmd_list(list_json);
        if (*rew) return cmd_rewire(rew_in, rew_mode, rew_seed, rew_out, rew_ck_tol,
                                    rew_one_indexed);
        if (*spec)
            return cmd_spectrum(spec_in, spec_omega0, spec_g, spec_modes, spec_comm,
                                spec_one_indexed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidGraph& e) {
        std::cerr << "invalid graph: " << e.what() << "\n";
        return 1;
    } catch (const InvalidPartition& e) {
        std::cerr << "invalid partition: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
