#include "gaussnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gaussnet/parallel.hpp"
#include "gaussnet/protocols.hpp"
#include "gaussnet/routing.hpp"
#include "gaussnet/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaussnet {

namespace {

// ---- small utilities --------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> indices) {
    uint64_t s = mix_seed(base);
    for (uint64_t i : indices) s = mix_seed(s ^ (i + 0x51ed270b0f4a3c71ULL));
    return s;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

struct Csv {
    std::ofstream out;
    explicit Csv(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw ConfigError("cannot write output file: " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ",";
            out << cells[i];
        }
        out << "\n";
    }
};

GaussianState payload_from_json(const json& p, double omega) {
    const std::string family = p.value("family", "squeezed_vacuum");
    if (family == "vacuum") return squeezed_vacuum(0.0, 0.0, omega);
    if (family == "squeezed_vacuum")
        return squeezed_vacuum(p.value("r", 0.0), p.value("phi", 0.0), omega,
                               p.value("n_th", 0.0));
    if (family == "coherent") {
        double re = 0.0, im = 0.0;
        if (p.contains("alpha")) {
            if (p["alpha"].is_array()) {
                re = p["alpha"][0].get<double>();
                im = p["alpha"][1].get<double>();
            } else {
                re = p["alpha"].get<double>();
            }
        }
        return coherent({re, im}, omega);
    }
    if (family == "two_mode_squeezed")
        return two_mode_squeezed(p.value("s", 0.0), p.value("phi", 0.0), omega);
    throw ConfigError("unknown payload family: " + family);
}

WindowSpec window_from_json(const json& cfg, double omega0) {
    WindowSpec w = WindowSpec::standard(omega0);
    if (cfg.contains("window")) {
        const json& jw = cfg["window"];
        if (jw.contains("length")) w.length = jw["length"].get<double>();
        if (jw.contains("samples")) w.samples = jw["samples"].get<int>();
    }
    return w;
}

Graph connected_graph(const std::function<Graph(uint64_t)>& gen, uint64_t seed,
                      bool require_connected) {
    for (uint64_t attempt = 0; attempt < 500; ++attempt) {
        Graph g = gen(derive_seed(seed, {attempt}));
        if (!require_connected || g.is_connected()) return g;
    }
    throw ConfigError("could not generate a connected graph in 500 attempts");
}

struct OutputWriter {
    fs::path dir;
    std::vector<std::string> files;

    explicit OutputWriter(const std::string& d) : dir(d) {
        fs::create_directories(dir);
    }
    std::string path(const std::string& name) {
        files.push_back((dir / name).string());
        return files.back();
    }
};

void write_manifest(OutputWriter& out, const ScenarioConfig& config, int workers) {
    json m;
    m["scenario"] = config.id();
    m["config"] = config.raw();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config.hash()));
    m["config_hash"] = std::string(buf);
    m["code_version"] = kVersion;
    m["workers"] = workers;
    json names = json::array();
    for (const auto& f : out.files) names.push_back(fs::path(f).filename().string());
    m["outputs"] = std::move(names);
    std::ofstream of(out.dir / "manifest.json", std::ios::binary);
    of << m.dump(2) << "\n";
}

// Window-max fidelities for all pairs of a context over one mode, parallel
// over pairs, reduced in pair order.
struct PairRow {
    int i, j;
    double f;
};

std::vector<PairRow> all_pair_fidelities(const NetworkContext& net, const GaussianState& payload,
                                         int mode, int c3, const WindowSpec& window,
                                         int workers) {
    const int n = net.graph.n;
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<double> fs(pairs.size(), 0.0);
    parallel_for(static_cast<int>(pairs.size()), workers, [&](int idx) {
        try {
            fs[idx] = run_single_step(net, pairs[idx].first, pairs[idx].second, mode, c3, payload,
                                      window)
                          .fidelity_best;
        } catch (const NonPhysicalCoupling&) {
        } catch (const NodeDecoupledFromMode&) {
        }
    });
    std::vector<PairRow> rows(pairs.size());
    for (size_t k = 0; k < pairs.size(); ++k)
        rows[k] = {pairs[k].first, pairs[k].second, fs[k]};
    return rows;
}

// ---- scenario implementations ----------------------------------------------

ScenarioResult run_ideal_protocols(const ScenarioConfig& config, OutputWriter& out, int workers) {
    const json& cfg = config.raw();
    const double omega = cfg.value("omega", 1.0);
    const int c2 = cfg.value("c2", 1);
    const int c3 = cfg.value("c3", 1);
    const int samples = cfg.value("trajectory_samples", 600);
    const double extra = cfg.contains("window") && cfg["window"].contains("length")
                             ? cfg["window"]["length"].get<double>()
                             : 4.0 / omega;
    GaussianState payload = payload_from_json(cfg.value("payload", json::object()), omega);

    Csv csv(out.path("trajectory.csv"));
    csv.row({"protocol", "c", "t", "fidelity", "efficiency"});
    json metrics;
    for (auto [kind, c, name] :
         {std::tuple{IdealChainKind::single_step, c3, std::string("single_step")},
          std::tuple{IdealChainKind::two_step, c2, std::string("two_step")}}) {
        const double t_end = ideal_nominal_time(kind, c, omega) + extra;
        std::vector<double> grid(samples);
        for (int i = 0; i < samples; ++i)
            grid[i] = t_end * static_cast<double>(i) / (samples - 1);
        // Make sure the nominal end time is sampled exactly.
        grid.push_back(ideal_nominal_time(kind, c, omega));
        std::sort(grid.begin(), grid.end());
        auto traj = ideal_chain_run(kind, c, payload, grid);
        double best_f = 0.0, best_e = 0.0, f_nom = 0.0, e_nom = 0.0;
        for (const auto& pt : traj) {
            csv.row({name, std::to_string(c), fmt(pt.t), fmt(pt.fidelity), fmt(pt.efficiency)});
            best_f = std::max(best_f, pt.fidelity);
            best_e = std::max(best_e, pt.efficiency);
            if (std::abs(pt.t - ideal_nominal_time(kind, c, omega)) < 1e-12) {
                f_nom = pt.fidelity;
                e_nom = pt.efficiency;
            }
        }
        metrics[name] = {{"c", c},
                         {"best_fidelity", best_f},
                         {"best_efficiency", best_e},
                         {"fidelity_at_nominal", f_nom},
                         {"efficiency_at_nominal", e_nom}};
    }
    (void)workers;
    ScenarioResult res;
    res.metrics = std::move(metrics);
    std::ostringstream ss;
    ss << "ideal-protocols: two-step efficiency at nominal = "
       << fmt(res.metrics["two_step"]["efficiency_at_nominal"].get<double>())
       << ", single-step best efficiency = "
       << fmt(res.metrics["single_step"]["best_efficiency"].get<double>());
    res.summary = ss.str();
    return res;
}

ScenarioResult run_state_scaling(const ScenarioConfig& config, OutputWriter& out, int workers) {
    const json& cfg = config.raw();
    const double omega = cfg.value("omega", 1.0);
    std::vector<int> c3_values = cfg.value("c3_values", std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const json payloads = cfg.value("payloads", json{{"alpha", {0.5, 1.0, 2.0}},
                                                     {"r", {0.25, 0.5, 1.0}},
                                                     {"s", {0.25, 0.5, 1.0}}});
    WindowSpec window = window_from_json(cfg, omega);

    struct Task {
        std::string family;
        double param;
        int c3;
    };
    std::vector<Task> tasks;
    for (const auto& [family, arr] : payloads.items())
        for (double v : arr.get<std::vector<double>>())
            for (int c3 : c3_values) tasks.push_back({family, v, c3});

    struct Out {
        double f = 0.0, e = 0.0;
    };
    std::vector<Out> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), workers, [&](int idx) {
        const Task& t = tasks[idx];
        IdealChainKind kind = IdealChainKind::single_step;
        GaussianState payload = squeezed_vacuum(0.0, 0.0, omega);
        if (t.family == "alpha") payload = coherent({t.param, 0.0}, omega);
        else if (t.family == "r") payload = squeezed_vacuum(t.param, 0.0, omega);
        else {
            payload = two_mode_squeezed(t.param, 0.0, omega);
            kind = IdealChainKind::entanglement;
        }
        const double t_nom = ideal_nominal_time(kind, t.c3, omega);
        std::vector<double> grid(window.samples);
        for (int i = 0; i < window.samples; ++i)
            grid[i] = t_nom + window.length * static_cast<double>(i) /
                                  std::max(1, window.samples - 1);
        auto traj = ideal_chain_run(kind, t.c3, payload, grid);
        for (const auto& pt : traj) {
            results[idx].f = std::max(results[idx].f, pt.fidelity);
            results[idx].e = std::max(results[idx].e, pt.efficiency);
        }
    });

    Csv csv(out.path("scaling.csv"));
    csv.row({"family", "param", "c3", "fidelity", "efficiency"});
    json series = json::array();
    for (size_t k = 0; k < tasks.size(); ++k) {
        csv.row({tasks[k].family, fmt(tasks[k].param), std::to_string(tasks[k].c3),
                 fmt(results[k].f), fmt(results[k].e)});
        series.push_back({{"family", tasks[k].family},
                          {"param", tasks[k].param},
                          {"c3", tasks[k].c3},
                          {"fidelity", results[k].f},
                          {"efficiency", results[k].e}});
    }
    ScenarioResult res;
    res.metrics["series"] = std::move(series);
    res.summary = "state-scaling: " + std::to_string(tasks.size()) + " ideal-chain sweeps";
    return res;
}

ScenarioResult run_er_degree_fidelity(const ScenarioConfig& config, OutputWriter& out,
                                      int workers) {
    const json& cfg = config.raw();
    const int n = cfg.value("n", 30);
    const std::vector<double> ps = cfg.value("edge_probabilities", std::vector<double>{0.2, 0.5, 0.8});
    const int per_p = cfg.value("networks_per_p", 10);
    const int c3 = cfg.value("c3", 7);
    const int mode = cfg.value("mode", 0);
    const double omega0 = cfg.value("omega0", 1.0);
    const double g = cfg.value("g", 1.0);
    const bool require_connected = cfg.value("require_connected", true);
    const uint64_t seed = cfg.at("seed").get<uint64_t>();
    WindowSpec window = window_from_json(cfg, omega0);
    GaussianState payload = payload_from_json(cfg.value("payload", json::object()), omega0);

    Csv pairs_csv(out.path("pairs.csv"));
    pairs_csv.row({"p", "network", "i", "j", "deg_i", "deg_j", "fidelity"});

    struct Entry {
        double kavg, f;
        int khi, klo;
    };
    json metrics = json::array();
    std::map<std::pair<int, double>, std::pair<double, int>> kavg_acc;  // (p_idx,kavg)->(sum,n)

    for (size_t pi = 0; pi < ps.size(); ++pi) {
        std::vector<Entry> entries;
        for (int ni = 0; ni < per_p; ++ni) {
            Graph graph = connected_graph(
                [&](uint64_t s) { return erdos_renyi(n, ps[pi], s); },
                derive_seed(seed, {pi, static_cast<uint64_t>(ni)}), require_connected);
            NetworkContext net(graph, omega0, g);
            auto deg = graph.degrees();
            auto rows = all_pair_fidelities(net, payload, mode, c3, window, workers);
            for (const auto& r : rows) {
                pairs_csv.row({fmt(ps[pi]), std::to_string(ni), std::to_string(r.i),
                               std::to_string(r.j), std::to_string(deg[r.i]),
                               std::to_string(deg[r.j]), fmt(r.f)});
                Entry e;
                e.kavg = 0.5 * (deg[r.i] + deg[r.j]);
                e.f = r.f;
                e.khi = std::max(deg[r.i], deg[r.j]);
                e.klo = std::min(deg[r.i], deg[r.j]);
                entries.push_back(e);
                kavg_acc[{static_cast<int>(pi), e.kavg}].first += r.f;
                kavg_acc[{static_cast<int>(pi), e.kavg}].second += 1;
            }
        }
        // quartile means over k_avg
        std::vector<double> kavgs;
        kavgs.reserve(entries.size());
        for (const auto& e : entries) kavgs.push_back(e.kavg);
        std::sort(kavgs.begin(), kavgs.end());
        const double q1 = quantile_sorted(kavgs, 0.25);
        const double q3 = quantile_sorted(kavgs, 0.75);
        double bot_sum = 0.0, top_sum = 0.0;
        int bot_n = 0, top_n = 0;
        for (const auto& e : entries) {
            if (e.kavg <= q1) {
                bot_sum += e.f;
                ++bot_n;
            }
            if (e.kavg >= q3) {
                top_sum += e.f;
                ++top_n;
            }
        }
        // bottleneck: high-k_hi pairs bucketed by k_lo quartile
        std::vector<double> khis;
        for (const auto& e : entries) khis.push_back(e.khi);
        std::sort(khis.begin(), khis.end());
        const double khi_cut = quantile_sorted(khis, 0.75);
        std::vector<const Entry*> high;
        std::vector<double> klos;
        for (const auto& e : entries)
            if (e.khi >= khi_cut) {
                high.push_back(&e);
                klos.push_back(e.klo);
            }
        std::sort(klos.begin(), klos.end());
        const double b1 = quantile_sorted(klos, 0.25);
        const double b2 = quantile_sorted(klos, 0.5);
        const double b3 = quantile_sorted(klos, 0.75);
        std::vector<std::vector<double>> buckets(4);
        for (const Entry* e : high) {
            int b = e->klo <= b1 ? 0 : e->klo <= b2 ? 1 : e->klo <= b3 ? 2 : 3;
            buckets[b].push_back(e->f);
        }
        json bucket_means = json::array(), bucket_vars = json::array(),
             bucket_ns = json::array();
        for (const auto& b : buckets) {
            double mean = 0.0, var = 0.0;
            for (double v : b) mean += v;
            mean = b.empty() ? 0.0 : mean / b.size();
            for (double v : b) var += (v - mean) * (v - mean);
            var = b.size() > 1 ? var / (b.size() - 1.0) : 0.0;
            bucket_means.push_back(mean);
            bucket_vars.push_back(var);
            bucket_ns.push_back(b.size());
        }
        metrics.push_back({{"p", ps[pi]},
                           {"bottom_quartile_mean", bot_n ? bot_sum / bot_n : 0.0},
                           {"top_quartile_mean", top_n ? top_sum / top_n : 0.0},
                           {"bottleneck_means", bucket_means},
                           {"bottleneck_vars", bucket_vars},
                           {"bottleneck_ns", bucket_ns}});
    }

    Csv kavg_csv(out.path("kavg.csv"));
    kavg_csv.row({"p", "k_avg", "mean_fidelity", "pairs"});
    for (const auto& [key, acc] : kavg_acc)
        kavg_csv.row({fmt(ps[key.first]), fmt(key.second), fmt(acc.first / acc.second),
                      std::to_string(acc.second)});

    ScenarioResult res;
    res.metrics["per_p"] = std::move(metrics);
    std::ostringstream ss;
    ss << "er-degree-fidelity:";
    for (const auto& m : res.metrics["per_p"])
        ss << " p=" << m["p"].get<double>() << " bottomQ="
           << fmt(m["bottom_quartile_mean"].get<double>())
           << " topQ=" << fmt(m["top_quartile_mean"].get<double>()) << ";";
    res.summary = ss.str();
    return res;
}

ScenarioResult run_sbm_modes(const ScenarioConfig& config, OutputWriter& out, int workers) {
    const json& cfg = config.raw();
    const std::vector<int> sizes = cfg.value("community_sizes", std::vector<int>{10, 10, 10, 10});
    const double p_w = cfg.value("p_within", 0.75);
    const double p_b = cfg.value("p_between", 0.025);
    const int realizations = cfg.value("realizations", 20);
    const int c3 = cfg.value("c3", 50);
    const std::vector<int> modes = cfg.value("modes", std::vector<int>{0, 1, 2, 3});
    const double omega0 = cfg.value("omega0", 1.0);
    const double g = cfg.value("g", 1.0);
    const bool require_connected = cfg.value("require_connected", true);
    const uint64_t seed = cfg.at("seed").get<uint64_t>();
    WindowSpec window = window_from_json(cfg, omega0);
    GaussianState payload = payload_from_json(cfg.value("payload", json::object()), omega0);
    const int n_comm = static_cast<int>(sizes.size());

    Csv report_csv(out.path("report.csv"));
    report_csv.row({"realization", "mode", "best", "top_two", "worst", "rest", "all_pairs_mean"});
    Csv overlap_csv(out.path("overlaps.csv"));
    overlap_csv.row({"realization", "mode", "community", "mean_abs_overlap"});

    std::vector<double> mode0_means;
    std::map<int, int> top2_wins, top2_total;
    std::map<int, std::vector<double>> overlap_ratios;

    for (int ri = 0; ri < realizations; ++ri) {
        Partition part({0});
        Graph graph;
        {
            uint64_t s = derive_seed(seed, {static_cast<uint64_t>(ri)});
            for (uint64_t attempt = 0;; ++attempt) {
                auto [gg, pp] = sbm(sizes, p_w, p_b, derive_seed(s, {attempt}));
                if (!require_connected || gg.is_connected()) {
                    graph = std::move(gg);
                    part = std::move(pp);
                    break;
                }
                if (attempt > 500) throw ConfigError("no connected SBM realization found");
            }
        }
        NetworkContext net(graph, omega0, g);
        TensorConfig tc;
        tc.c3 = c3;
        tc.modes = modes;
        tc.kind = FidelityKind::window_max;
        tc.window = window;
        tc.workers = workers;
        FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);
        auto report = community_fidelity_report(tensor, part, static_cast<int>(modes.size()));
        for (const auto& row : report) {
            double total = 0.0;
            int cnt = 0;
            for (int i = 0; i < graph.n; ++i)
                for (int j = i + 1; j < graph.n; ++j) {
                    total += tensor.get(row.mode, i, j);
                    ++cnt;
                }
            const double all_mean = total / cnt;
            report_csv.row({std::to_string(ri), std::to_string(row.mode), fmt(row.best),
                            fmt(row.top_two), fmt(row.worst), fmt(row.rest), fmt(all_mean)});
            if (row.mode == 0) mode0_means.push_back(all_mean);
            if (row.mode != 0) {
                ++top2_total[row.mode];
                if (row.top_two > row.rest) ++top2_wins[row.mode];
            }
        }
        for (int m : modes) {
            std::vector<double> comm_overlap(n_comm, 0.0);
            std::vector<int> comm_n(n_comm, 0);
            for (int v = 0; v < graph.n; ++v) {
                comm_overlap[part.labels[v]] += std::abs(net.basis.K(v, m));
                ++comm_n[part.labels[v]];
            }
            for (int c = 0; c < n_comm; ++c) {
                comm_overlap[c] /= comm_n[c];
                overlap_csv.row({std::to_string(ri), std::to_string(m), std::to_string(c),
                                 fmt(comm_overlap[c])});
            }
            if (m != 0) {
                const double hi = *std::max_element(comm_overlap.begin(), comm_overlap.end());
                const double lo = *std::min_element(comm_overlap.begin(), comm_overlap.end());
                overlap_ratios[m].push_back(lo > 0.0 ? hi / lo : 1e300);
            }
        }
    }

    ScenarioResult res;
    double pooled = 0.0;
    for (double v : mode0_means) pooled += v;
    pooled /= mode0_means.empty() ? 1.0 : mode0_means.size();
    res.metrics["mode0_all_pairs_mean"] = pooled;
    json frac = json::object(), med = json::object();
    for (auto& [m, total] : top2_total)
        frac[std::to_string(m)] = static_cast<double>(top2_wins[m]) / total;
    for (auto& [m, v] : overlap_ratios) {
        std::vector<double> s = v;
        std::sort(s.begin(), s.end());
        med[std::to_string(m)] = quantile_sorted(s, 0.5);
    }
    res.metrics["top2_gt_rest_fraction"] = std::move(frac);
    res.metrics["overlap_ratio_median"] = std::move(med);
    std::ostringstream ss;
    ss << "sbm-modes: mode-0 pooled mean F = " << fmt(pooled) << "; top2>rest fractions";
    for (auto& [m, total] : top2_total)
        ss << " m" << m << "=" << top2_wins[m] << "/" << total;
    res.summary = ss.str();
    return res;
}

ScenarioResult run_karate_communities(const ScenarioConfig& config, OutputWriter& out,
                                      int workers) {
    const json& cfg = config.raw();
    Graph graph = load_edge_list(config.resolve_path(cfg.at("dataset").get<std::string>()),
                                 cfg.value("one_indexed", false));
    Partition original =
        load_partition(config.resolve_path(cfg.at("communities").get<std::string>()));
    const double omega0 = cfg.value("omega0", 1.0);
    const double g = cfg.value("g", 1.0);
    const int c3 = cfg.value("c3", 50);
    const std::vector<int> modes = cfg.value("modes", std::vector<int>{0, 1, 2, 3, 4});
    WindowSpec window = window_from_json(cfg, omega0);
    GaussianState payload = payload_from_json(cfg.value("payload", json::object()), omega0);
    const json pj = cfg.value("partition", json{{"threshold", 0.8}, {"modes", {2, 3, 4}}});

    NetworkContext net(graph, omega0, g);
    TensorConfig tc;
    tc.c3 = c3;
    tc.modes = modes;
    tc.kind = FidelityKind::window_max;
    tc.window = window;
    tc.workers = workers;
    FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);
    tensor.write_csv(out.path("tensor.csv"));

    Csv means_csv(out.path("community_means.csv"));
    means_csv.row({"mode", "within_0", "within_1", "inter"});
    json inter_means = json::array();
    for (int m : modes) {
        double w0 = 0.0, w1 = 0.0, inter = 0.0;
        int n0 = 0, n1 = 0, ni = 0;
        for (int i = 0; i < graph.n; ++i)
            for (int j = i + 1; j < graph.n; ++j) {
                const double f = tensor.get(m, i, j);
                if (original.labels[i] != original.labels[j]) {
                    inter += f;
                    ++ni;
                } else if (original.labels[i] == 0) {
                    w0 += f;
                    ++n0;
                } else {
                    w1 += f;
                    ++n1;
                }
            }
        means_csv.row({std::to_string(m), fmt(w0 / n0), fmt(w1 / n1), fmt(inter / ni)});
        inter_means.push_back(inter / ni);
    }

    Partition fid_part = fidelity_based_partition(tensor, graph, pj.value("threshold", 0.8),
                                                  pj.value("modes", std::vector<int>{2, 3, 4}));
    Csv part_csv(out.path("partition.csv"));
    part_csv.row({"node", "community"});
    for (int v = 0; v < graph.n; ++v)
        part_csv.row({std::to_string(v), std::to_string(fid_part.labels[v])});

    ScenarioResult res;
    res.metrics["q_original"] = modularity(graph, original);
    res.metrics["q_fidelity_partition"] = modularity(graph, fid_part);
    res.metrics["fidelity_partition_communities"] = fid_part.community_count();
    res.metrics["inter_community_means"] = std::move(inter_means);
    std::ostringstream ss;
    ss << "karate-communities: Q(original) = " << fmt(res.metrics["q_original"].get<double>())
       << ", Q(fidelity partition) = "
       << fmt(res.metrics["q_fidelity_partition"].get<double>()) << " ("
       << fid_part.community_count() << " communities)";
    res.summary = ss.str();
    return res;
}

ScenarioResult run_good_transfer_fractions(const ScenarioConfig& config, OutputWriter& out,
                                           int workers) {
    const json& cfg = config.raw();
    const double threshold = cfg.value("threshold", 0.8);
    const int c3 = cfg.value("c3", 50);
    const double omega0 = cfg.value("omega0", 1.0);
    const double g = cfg.value("g", 1.0);
    const bool require_connected = cfg.value("require_connected", true);
    WindowSpec window = window_from_json(cfg, omega0);
    GaussianState payload = payload_from_json(cfg.value("payload", json::object()), omega0);

    Csv csv(out.path("fractions.csv"));
    csv.row({"network", "mode", "fraction"});
    json metrics = json::object();

    const auto& networks = cfg.at("networks");
    for (size_t net_idx = 0; net_idx < networks.size(); ++net_idx) {
        const auto& njson = networks[net_idx];
        const std::string name = njson.at("name").get<std::string>();
        const std::string kind = njson.at("kind").get<std::string>();
        Graph graph;
        if (kind == "er") {
            graph = connected_graph(
                [&](uint64_t s) {
                    return erdos_renyi(njson.at("n").get<int>(), njson.at("p").get<double>(), s);
                },
                derive_seed(cfg.at("seed").get<uint64_t>(), {net_idx}), require_connected);
        } else if (kind == "sbm") {
            uint64_t base = derive_seed(cfg.at("seed").get<uint64_t>(), {net_idx});
            for (uint64_t attempt = 0;; ++attempt) {
                auto [gg, pp] = sbm(njson.at("community_sizes").get<std::vector<int>>(),
                                    njson.at("p_within").get<double>(),
                                    njson.at("p_between").get<double>(),
                                    derive_seed(base, {attempt}));
                if (!require_connected || gg.is_connected()) {
                    graph = std::move(gg);
                    break;
                }
                if (attempt > 500) throw ConfigError("no connected SBM realization found");
            }
        } else if (kind == "dataset") {
            graph = load_edge_list(config.resolve_path(njson.at("path").get<std::string>()),
                                   njson.value("one_indexed", false));
        } else {
            throw ConfigError("unknown network kind: " + kind);
        }
        NetworkContext net(graph, omega0, g);
        TensorConfig tc;
        tc.c3 = c3;
        tc.kind = FidelityKind::window_max;
        tc.window = window;
        tc.workers = workers;
        tc.filter.top_overlap = njson.value("filter_top", 0);
        FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);
        auto fractions = good_transfer_fraction(tensor, threshold);
        int qualifying = 0;
        json flist = json::array();
        for (size_t m = 0; m < fractions.size(); ++m) {
            csv.row({name, std::to_string(tensor.modes()[m]), fmt(fractions[m])});
            flist.push_back(fractions[m]);
            if (fractions[m] >= 0.05) ++qualifying;
        }
        metrics[name] = {{"fractions", std::move(flist)},
                         {"modes_with_fraction_ge_0.05", qualifying},
                         {"filtered", !tc.filter.is_all()}};
    }

    ScenarioResult res;
    res.metrics = std::move(metrics);
    std::ostringstream ss;
    ss << "good-transfer-fractions:";
    for (const auto& [name, m] : res.metrics.items())
        ss << " " << name << "=" << m["modes_with_fraction_ge_0.05"].get<int>() << " modes";
    res.summary = ss.str();
    return res;
}

ScenarioResult run_node_capacity(const ScenarioConfig& config, OutputWriter& out, int workers) {
    const json& cfg = config.raw();
    Graph graph = load_edge_list(config.resolve_path(cfg.at("dataset").get<std::string>()),
                                 cfg.value("one_indexed", false));
    const double omega0 = cfg.value("omega0", 0.25);
    const double g = cfg.value("g", 0.1);
    const int c3 = cfg.value("c3", 20);
    GaussianState payload = payload_from_json(
        cfg.value("payload", json{{"family", "coherent"}, {"alpha", 0.75}}), omega0);

    NetworkContext net(graph, omega0, g);
    TensorConfig tc;
    tc.c3 = c3;
    tc.kind = FidelityKind::nominal;
    tc.workers = workers;
    FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);
    auto cap = node_capacity(tensor);
    auto deg = graph.degrees();

    Csv csv(out.path("capacity.csv"));
    csv.row({"node", "degree", "c_i", "c_i_over_n"});
    for (int v = 0; v < graph.n; ++v)
        csv.row({std::to_string(v), std::to_string(deg[v]), fmt(cap[v]),
                 fmt(cap[v] / graph.n)});

    int argmax = 0;
    for (int v = 1; v < graph.n; ++v)
        if (cap[v] > cap[argmax]) argmax = v;
    ScenarioResult res;
    res.metrics["argmax_node"] = argmax;
    res.metrics["argmax_degree"] = deg[argmax];
    res.metrics["max_degree"] = *std::max_element(deg.begin(), deg.end());
    res.metrics["min_degree"] = *std::min_element(deg.begin(), deg.end());
    json caps = json::array(), degs = json::array();
    for (int v = 0; v < graph.n; ++v) {
        caps.push_back(cap[v]);
        degs.push_back(deg[v]);
    }
    res.metrics["c_i"] = std::move(caps);
    res.metrics["degrees"] = std::move(degs);
    std::ostringstream ss;
    ss << "node-capacity: argmax C_i at node " << argmax << " (degree " << deg[argmax]
       << ", max degree " << res.metrics["max_degree"].get<int>() << ")";
    res.summary = ss.str();
    return res;
}

ScenarioResult run_capacity_benchmark(const ScenarioConfig& config, OutputWriter& out,
                                      int workers) {
    const json& cfg = config.raw();
    Graph graph = load_edge_list(config.resolve_path(cfg.at("dataset").get<std::string>()),
                                 cfg.value("one_indexed", false));
    const double omega0 = cfg.value("omega0", 0.25);
    const double g = cfg.value("g", 0.1);
    const int c3 = cfg.value("c3", 20);
    const int filter_top = cfg.value("filter_top", 12);
    const std::vector<std::string> ensembles =
        cfg.value("ensembles", std::vector<std::string>{"pk", "pkk", "pk_ck", "pkk_ck"});
    const int variants = cfg.value("variants_per_ensemble", 10);
    const uint64_t seed = cfg.at("seed").get<uint64_t>();
    GaussianState payload = payload_from_json(
        cfg.value("payload", json{{"family", "coherent"}, {"alpha", 0.75}}), omega0);
    RewireParams rp;
    if (cfg.contains("rewire")) {
        const json& rj = cfg["rewire"];
        rp.swap_factor = rj.value("swap_factor", rp.swap_factor);
        rp.anneal_factor = rj.value("anneal_factor", rp.anneal_factor);
        rp.ck_tol = rj.value("ck_tol", rp.ck_tol);
        rp.t0 = rj.value("t0", rp.t0);
        rp.cooling = rj.value("cooling", rp.cooling);
    }

    auto cmax_of = [&](const Graph& gr) {
        NetworkContext net(gr, omega0, g);
        TensorConfig tc;
        tc.c3 = c3;
        tc.kind = FidelityKind::nominal;
        tc.workers = workers;
        tc.filter.top_overlap = filter_top;
        FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);
        return max_capacity(tensor) / gr.n;
    };

    Csv csv(out.path("benchmark.csv"));
    csv.row({"network", "ensemble", "variant", "c_max_over_n", "ck_distance", "converged"});
    const double original = cmax_of(graph);
    csv.row({"original", "-", "-", fmt(original), "0", "1"});

    std::map<std::string, std::vector<double>> per_ensemble;
    std::vector<double> pooled;
    int warnings = 0;
    for (size_t ei = 0; ei < ensembles.size(); ++ei) {
        RewireMode mode = rewire_mode_from_string(ensembles[ei]);
        for (int v = 0; v < variants; ++v) {
            RewireResult rw =
                rewire(graph, mode, derive_seed(seed, {ei, static_cast<uint64_t>(v)}), rp);
            if (!rw.converged) ++warnings;
            const double c = cmax_of(rw.graph);
            per_ensemble[ensembles[ei]].push_back(c);
            pooled.push_back(c);
            csv.row({"variant", ensembles[ei], std::to_string(v), fmt(c), fmt(rw.ck_distance),
                     rw.converged ? "1" : "0"});
        }
    }

    Csv sum_csv(out.path("summary.csv"));
    sum_csv.row({"ensemble", "min", "q25", "median", "q75", "max"});
    json ens_stats = json::object();
    for (auto& [name, vals] : per_ensemble) {
        std::vector<double> s = vals;
        std::sort(s.begin(), s.end());
        sum_csv.row({name, fmt(s.front()), fmt(quantile_sorted(s, 0.25)),
                     fmt(quantile_sorted(s, 0.5)), fmt(quantile_sorted(s, 0.75)),
                     fmt(s.back())});
        ens_stats[name] = {{"median", quantile_sorted(s, 0.5)},
                           {"q75", quantile_sorted(s, 0.75)}};
    }
    std::sort(pooled.begin(), pooled.end());
    const double pooled_q75 = quantile_sorted(pooled, 0.75);

    ScenarioResult res;
    res.metrics["original_c_max_over_n"] = original;
    res.metrics["pooled_q75"] = pooled_q75;
    res.metrics["original_beats_pooled_q75"] = original > pooled_q75;
    res.metrics["ensembles"] = std::move(ens_stats);
    res.metrics["convergence_warnings"] = warnings;
    std::ostringstream ss;
    ss << "capacity-benchmark: original C_max/N = " << fmt(original)
       << ", pooled 75th pct = " << fmt(pooled_q75)
       << (original > pooled_q75 ? " (original above)" : " (original not above)");
    res.summary = ss.str();
    return res;
}

}  // namespace

// ---- config plumbing ---------------------------------------------------------

std::string ValidationReport::to_string() const {
    std::ostringstream ss;
    for (const auto& d : errors) ss << d.path << ": " << d.message << "\n";
    return ss.str();
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j, fs::path(path).parent_path().string());
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
    ScenarioConfig c;
    c.json_ = j;
    c.base_dir_ = base_dir.empty() ? "." : base_dir;
    return c;
}

std::string ScenarioConfig::id() const { return json_.value("scenario", ""); }

std::string ScenarioConfig::resolve_path(const std::string& rel) const {
    fs::path p(rel);
    if (p.is_absolute()) return rel;
    return (fs::path(base_dir_) / p).string();
}

uint64_t ScenarioConfig::hash() const {
    const std::string dump = json_.dump();
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void ScenarioConfig::set_override(const std::string& dotted, const std::string& value) {
    json* node = &json_;
    std::string rest = dotted;
    size_t pos;
    while ((pos = rest.find('.')) != std::string::npos) {
        node = &((*node)[rest.substr(0, pos)]);
        rest = rest.substr(pos + 1);
    }
    try {
        (*node)[rest] = json::parse(value);
    } catch (...) {
        (*node)[rest] = value;
    }
}

namespace {

const std::vector<std::string> kStochasticScenarios = {
    "er-degree-fidelity", "sbm-modes", "good-transfer-fractions", "capacity-benchmark"};

void check_prob(const json& cfg, const std::string& key, ValidationReport& rep,
                const std::string& prefix = "") {
    if (!cfg.contains(key)) return;
    if (!cfg[key].is_number()) {
        rep.errors.push_back({prefix + key, "must be a number"});
        return;
    }
    const double v = cfg[key].get<double>();
    if (v < 0.0 || v > 1.0) rep.errors.push_back({prefix + key, "must be in [0,1]"});
}

}  // namespace

ValidationReport validate_config(const ScenarioConfig& config) {
    ValidationReport rep;
    const json& cfg = config.raw();
    const std::string id = config.id();
    if (id.empty()) {
        rep.errors.push_back({"scenario", "missing scenario id"});
        return rep;
    }
    bool known = false;
    for (const auto& e : scenario_catalog())
        if (e.id == id) known = true;
    if (!known) {
        rep.errors.push_back({"scenario", "unknown scenario id: " + id});
        return rep;
    }
    if (!cfg.contains("output") || !cfg["output"].contains("dir"))
        rep.errors.push_back({"output.dir", "missing output directory"});
    if (std::find(kStochasticScenarios.begin(), kStochasticScenarios.end(), id) !=
            kStochasticScenarios.end() &&
        !cfg.contains("seed"))
        rep.errors.push_back({"seed", "stochastic scenario requires a seed"});
    if (id != "state-scaling" && !cfg.contains("payload"))
        rep.errors.push_back({"payload", "missing payload spec"});
    if (cfg.contains("payload") && cfg["payload"].contains("family")) {
        const std::string fam = cfg["payload"]["family"].get<std::string>();
        if (fam != "vacuum" && fam != "squeezed_vacuum" && fam != "coherent" &&
            fam != "two_mode_squeezed")
            rep.errors.push_back({"payload.family", "unknown payload family: " + fam});
    }
    if (cfg.contains("window")) {
        if (cfg["window"].contains("samples") && cfg["window"]["samples"].get<int>() < 1)
            rep.errors.push_back({"window.samples", "must be >= 1"});
        if (cfg["window"].contains("length") && cfg["window"]["length"].get<double>() < 0.0)
            rep.errors.push_back({"window.length", "must be >= 0"});
    }
    for (const char* key : {"c3", "c2"})
        if (cfg.contains(key) && cfg[key].get<int>() < 1)
            rep.errors.push_back({key, "must be >= 1"});
    for (const char* key : {"omega0", "omega", "g"})
        if (cfg.contains(key) && cfg[key].get<double>() <= 0.0 && std::string(key) != "g")
            rep.errors.push_back({key, "must be > 0"});

    if (id == "er-degree-fidelity") {
        if (cfg.contains("edge_probabilities"))
            for (size_t i = 0; i < cfg["edge_probabilities"].size(); ++i) {
                const double p = cfg["edge_probabilities"][i].get<double>();
                if (p < 0.0 || p > 1.0)
                    rep.errors.push_back(
                        {"edge_probabilities[" + std::to_string(i) + "]", "must be in [0,1]"});
            }
        if (cfg.contains("networks_per_p") && cfg["networks_per_p"].get<int>() < 1)
            rep.errors.push_back({"networks_per_p", "must be >= 1"});
    }
    if (id == "sbm-modes") {
        check_prob(cfg, "p_within", rep);
        check_prob(cfg, "p_between", rep);
        if (cfg.contains("realizations") && cfg["realizations"].get<int>() < 1)
            rep.errors.push_back({"realizations", "must be >= 1"});
    }
    if (id == "karate-communities" || id == "node-capacity" || id == "capacity-benchmark") {
        if (!cfg.contains("dataset")) {
            rep.errors.push_back({"dataset", "missing dataset path"});
        } else if (!fs::exists(config.resolve_path(cfg["dataset"].get<std::string>()))) {
            rep.errors.push_back(
                {"dataset", "file not found: " + config.resolve_path(cfg["dataset"].get<std::string>())});
        }
    }
    if (id == "karate-communities") {
        if (!cfg.contains("communities"))
            rep.errors.push_back({"communities", "missing communities path"});
        else if (!fs::exists(config.resolve_path(cfg["communities"].get<std::string>())))
            rep.errors.push_back({"communities", "file not found"});
        if (cfg.contains("partition")) check_prob(cfg["partition"], "threshold", rep, "partition.");
    }
    if (id == "good-transfer-fractions") {
        if (!cfg.contains("networks") || !cfg["networks"].is_array() || cfg["networks"].empty()) {
            rep.errors.push_back({"networks", "must be a non-empty array"});
        } else {
            for (size_t i = 0; i < cfg["networks"].size(); ++i) {
                const json& nj = cfg["networks"][i];
                const std::string prefix = "networks[" + std::to_string(i) + "].";
                if (!nj.contains("name")) rep.errors.push_back({prefix + "name", "missing"});
                if (!nj.contains("kind")) {
                    rep.errors.push_back({prefix + "kind", "missing"});
                    continue;
                }
                const std::string kind = nj["kind"].get<std::string>();
                if (kind == "er") check_prob(nj, "p", rep, prefix);
                else if (kind == "sbm") {
                    check_prob(nj, "p_within", rep, prefix);
                    check_prob(nj, "p_between", rep, prefix);
                } else if (kind == "dataset") {
                    if (!nj.contains("path"))
                        rep.errors.push_back({prefix + "path", "missing"});
                    else if (!fs::exists(config.resolve_path(nj["path"].get<std::string>())))
                        rep.errors.push_back({prefix + "path", "file not found"});
                } else {
                    rep.errors.push_back({prefix + "kind", "unknown kind: " + kind});
                }
            }
        }
        check_prob(cfg, "threshold", rep);
    }
    if (id == "capacity-benchmark") {
        if (cfg.contains("variants_per_ensemble") && cfg["variants_per_ensemble"].get<int>() < 1)
            rep.errors.push_back({"variants_per_ensemble", "must be >= 1"});
        if (cfg.contains("ensembles"))
            for (const auto& e : cfg["ensembles"])
                try {
                    rewire_mode_from_string(e.get<std::string>());
                } catch (const InvalidParameter& ex) {
                    rep.errors.push_back({"ensembles", ex.what()});
                }
        if (cfg.contains("rewire")) {
            const json& rj = cfg["rewire"];
            if (rj.contains("ck_tol") && rj["ck_tol"].get<double>() <= 0.0)
                rep.errors.push_back({"rewire.ck_tol", "must be > 0"});
            if (rj.contains("cooling")) {
                const double c = rj["cooling"].get<double>();
                if (c <= 0.0 || c >= 1.0)
                    rep.errors.push_back({"rewire.cooling", "must be in (0,1)"});
            }
        }
    }
    return rep;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& output_dir,
                            int workers) {
    ValidationReport rep = validate_config(config);
    if (!rep.ok()) throw ConfigError("invalid config:\n" + rep.to_string());
    const json& cfg = config.raw();
    int w = workers > 0 ? workers : cfg.value("workers", 0);
    if (w <= 0) w = default_workers();
    const std::string dir =
        output_dir.empty() ? cfg["output"]["dir"].get<std::string>() : output_dir;
    OutputWriter out(dir);

    const std::string id = config.id();
    ScenarioResult res;
    if (id == "ideal-protocols") res = run_ideal_protocols(config, out, w);
    else if (id == "state-scaling") res = run_state_scaling(config, out, w);
    else if (id == "er-degree-fidelity") res = run_er_degree_fidelity(config, out, w);
    else if (id == "sbm-modes") res = run_sbm_modes(config, out, w);
    else if (id == "karate-communities") res = run_karate_communities(config, out, w);
    else if (id == "good-transfer-fractions") res = run_good_transfer_fractions(config, out, w);
    else if (id == "node-capacity") res = run_node_capacity(config, out, w);
    else if (id == "capacity-benchmark") res = run_capacity_benchmark(config, out, w);
    else throw ConfigError("unknown scenario id: " + id);

    write_manifest(out, config, w);
    res.output_files = out.files;
    res.output_files.push_back((out.dir / "manifest.json").string());
    return res;
}

std::vector<CatalogEntry> scenario_catalog() {
    return {
        {"ideal-protocols", "2",
         "single- vs two-step transfer trajectories on the resonant-mode chain",
         "configs/ideal-protocols.desk.json", "configs/ideal-protocols.paper.json"},
        {"state-scaling", "3",
         "ideal-chain fidelity/efficiency vs protocol speed for coherent, squeezed and twin-beam payloads",
         "configs/state-scaling.desk.json", "configs/state-scaling.paper.json"},
        {"er-degree-fidelity", "4",
         "slowest-mode transfer fidelity vs connection-node degrees on ER ensembles",
         "configs/er-degree-fidelity.desk.json", "configs/er-degree-fidelity.paper.json"},
        {"sbm-modes", "5(inset), 6",
         "community-ranked fidelities and mode overlaps on stochastic block models",
         "configs/sbm-modes.desk.json", "configs/sbm-modes.paper.json"},
        {"karate-communities", "8",
         "per-mode community fidelities and the fidelity-based partition of the karate club",
         "configs/karate-communities.desk.json", "configs/karate-communities.paper.json"},
        {"good-transfer-fractions", "9",
         "fraction of pairs above the fidelity threshold per normal mode",
         "configs/good-transfer-fractions.desk.json",
         "configs/good-transfer-fractions.paper.json"},
        {"node-capacity", "10, 11", "node capacity C_i/N against node degree",
         "configs/node-capacity.desk.json", "configs/node-capacity.paper.json"},
        {"capacity-benchmark", "12, 13",
         "C_max/N of a network against its degree-preserving randomizations",
         "configs/capacity-benchmark.desk.json", "configs/capacity-benchmark.paper.json"},
    };
}

std::string catalog_json() {
    json j = json::array();
    for (const auto& e : scenario_catalog())
        j.push_back({{"id", e.id},
                     {"figures", e.figures},
                     {"description", e.description},
                     {"desk_config", e.desk_config},
                     {"paper_config", e.paper_config}});
    return j.dump(2);
}

}  // namespace gaussnet
