#include "gaussnet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "gaussnet/parallel.hpp"

namespace gaussnet {

namespace {
constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
}

FidelityTensor::FidelityTensor(int n_nodes, std::vector<int> modes, std::vector<double> times,
                               FidelityKind kind, bool filtered, uint64_t graph_hash)
    : n_(n_nodes), modes_(std::move(modes)), times_(std::move(times)), kind_(kind),
      filtered_(filtered), graph_hash_(graph_hash) {
    if (modes_.size() != times_.size())
        throw InvalidParameter("modes/times size mismatch");
    values_.assign(modes_.size(), std::vector<double>(n_ * (n_ - 1) / 2, kAbsent));
}

int FidelityTensor::slot(int mode) const {
    auto it = std::find(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end()) throw std::out_of_range("mode not stored in tensor");
    return static_cast<int>(it - modes_.begin());
}

int FidelityTensor::pair_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_ || i == j) throw std::out_of_range("invalid pair");
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

void FidelityTensor::set(int mode, int i, int j, double f) {
    values_[slot(mode)][pair_index(i, j)] = f;
}

void FidelityTensor::mark_infeasible(int mode, int i, int j) {
    values_[slot(mode)][pair_index(i, j)] = 0.0;
    ++infeasible_;
}

bool FidelityTensor::has(int mode, int i, int j) const {
    return !std::isnan(values_[slot(mode)][pair_index(i, j)]);
}

double FidelityTensor::get(int mode, int i, int j) const {
    double v = values_[slot(mode)][pair_index(i, j)];
    if (std::isnan(v)) throw IncompleteTensor("pair not evaluated");
    return v;
}

double FidelityTensor::get_or_zero(int mode, int i, int j) const {
    double v = values_[slot(mode)][pair_index(i, j)];
    return std::isnan(v) ? 0.0 : v;
}

double FidelityTensor::time_of(int mode) const { return times_[slot(mode)]; }

std::string FidelityTensor::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["kind"] = kind_ == FidelityKind::nominal ? "nominal" : "window_max";
    j["filtered"] = filtered_;
    j["graph_hash"] = graph_hash_;
    j["infeasible_count"] = infeasible_;
    j["modes"] = modes_;
    j["times"] = times_;
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& row : values_) {
        nlohmann::json r = nlohmann::json::array();
        for (double v : row) {
            if (std::isnan(v)) r.push_back(nullptr);
            else r.push_back(v);
        }
        vals.push_back(std::move(r));
    }
    j["values"] = std::move(vals);
    return j.dump();
}

FidelityTensor FidelityTensor::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    FidelityTensor t(j.at("n").get<int>(), j.at("modes").get<std::vector<int>>(),
                     j.at("times").get<std::vector<double>>(),
                     j.at("kind").get<std::string>() == "nominal" ? FidelityKind::nominal
                                                                  : FidelityKind::window_max,
                     j.at("filtered").get<bool>(), j.at("graph_hash").get<uint64_t>());
    const auto& vals = j.at("values");
    for (size_t m = 0; m < t.values_.size(); ++m)
        for (size_t p = 0; p < t.values_[m].size(); ++p)
            t.values_[m][p] = vals[m][p].is_null() ? kAbsent : vals[m][p].get<double>();
    t.infeasible_ = j.value("infeasible_count", 0);
    return t;
}

void FidelityTensor::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write tensor csv: " + path);
    out << "mode,i,j,fidelity,time\n";
    char buf[64];
    for (size_t m = 0; m < modes_.size(); ++m)
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double v = values_[m][pair_index(i, j)];
                if (std::isnan(v)) continue;
                std::snprintf(buf, sizeof(buf), "%.12g", v);
                out << modes_[m] << "," << i << "," << j << "," << buf << ",";
                std::snprintf(buf, sizeof(buf), "%.12g", times_[m]);
                out << buf << "\n";
            }
}

FidelityTensor pairwise_fidelity_tensor(const NetworkContext& net, const GaussianState& payload,
                                        const TensorConfig& config) {
    const int n = net.graph.n;
    std::vector<int> modes = config.modes;
    if (modes.empty()) {
        modes.resize(n);
        std::iota(modes.begin(), modes.end(), 0);
    }
    std::vector<double> times;
    times.reserve(modes.size());
    for (int m : modes) times.push_back(single_step_params(net.basis.Omega(m), config.c3).t_stage);

    FidelityTensor tensor(n, modes, times, config.kind, !config.filter.is_all(),
                          net.graph.hash());

    struct Task {
        int mode, i, j;
    };
    std::vector<Task> tasks;
    for (int m : modes) {
        if (config.filter.is_all()) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) tasks.push_back({m, i, j});
        } else {
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return std::abs(net.basis.K(a, m)) > std::abs(net.basis.K(b, m));
            });
            const int top = std::min(config.filter.top_overlap, n);
            for (int a = 0; a < top; ++a)
                for (int b = a + 1; b < top; ++b) {
                    int i = order[a], j = order[b];
                    if (i > j) std::swap(i, j);
                    tasks.push_back({m, i, j});
                }
        }
    }

    struct Outcome {
        double f = 0.0;
        bool infeasible = false;
    };
    std::vector<Outcome> outcomes(tasks.size());
    const WindowSpec window =
        config.kind == FidelityKind::window_max ? config.window : WindowSpec::nominal_only();
    parallel_for(static_cast<int>(tasks.size()), config.workers, [&](int idx) {
        const Task& task = tasks[idx];
        try {
            TransferResult r = run_single_step(net, task.i, task.j, task.mode, config.c3, payload,
                                               window);
            outcomes[idx].f = config.kind == FidelityKind::window_max ? r.fidelity_best
                                                                      : r.fidelity_at_nominal;
        } catch (const NonPhysicalCoupling&) {
            outcomes[idx].infeasible = true;
        } catch (const NodeDecoupledFromMode&) {
            outcomes[idx].infeasible = true;
        }
    });
    for (size_t idx = 0; idx < tasks.size(); ++idx) {
        if (outcomes[idx].infeasible)
            tensor.mark_infeasible(tasks[idx].mode, tasks[idx].i, tasks[idx].j);
        else
            tensor.set(tasks[idx].mode, tasks[idx].i, tasks[idx].j, outcomes[idx].f);
    }
    return tensor;
}

std::vector<double> node_capacity(const FidelityTensor& tensor) {
    if (tensor.filtered())
        throw IncompleteTensor("node capacity requires an unfiltered tensor");
    const int n = tensor.n_nodes();
    std::vector<double> c(n, 0.0);
    for (int m : tensor.modes()) {
        const double t = tensor.time_of(m);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = tensor.get(m, i, j) / t;
                c[i] += v;
                c[j] += v;
            }
    }
    return c;
}

double max_capacity(const FidelityTensor& tensor) {
    const int n = tensor.n_nodes();
    double total = 0.0;
    for (int m : tensor.modes()) {
        double best = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (tensor.has(m, i, j)) best = std::max(best, tensor.get(m, i, j));
        total += best / tensor.time_of(m);
    }
    return total;
}

std::vector<double> good_transfer_fraction(const FidelityTensor& tensor, double threshold) {
    const int n = tensor.n_nodes();
    const double denom = n * (n - 1) / 2.0;
    std::vector<double> out;
    out.reserve(tensor.modes().size());
    for (int m : tensor.modes()) {
        int count = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (tensor.get_or_zero(m, i, j) > threshold) ++count;
        out.push_back(count / denom);
    }
    return out;
}

std::vector<CommunityReportRow> community_fidelity_report(const FidelityTensor& tensor,
                                                          const Partition& partition,
                                                          int mode_count) {
    if (tensor.filtered())
        throw IncompleteTensor("community report requires an unfiltered tensor");
    const int n = tensor.n_nodes();
    if (partition.size() != n) throw InvalidPartition("partition does not cover all nodes");
    const int n_comm = partition.community_count();
    if (n_comm < 2) throw InvalidPartition("need at least two communities");
    if (mode_count > static_cast<int>(tensor.modes().size()))
        throw InvalidParameter("mode_count exceeds stored modes");

    std::vector<CommunityReportRow> rows;
    for (int mslot = 0; mslot < mode_count; ++mslot) {
        const int m = tensor.modes()[mslot];
        CommunityReportRow row;
        row.mode = m;
        row.community_mean.assign(n_comm, 0.0);
        std::vector<int> counts(n_comm, 0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (partition.labels[i] != partition.labels[j]) continue;
                row.community_mean[partition.labels[i]] += tensor.get(m, i, j);
                ++counts[partition.labels[i]];
            }
        for (int c = 0; c < n_comm; ++c)
            row.community_mean[c] = counts[c] > 0 ? row.community_mean[c] / counts[c] : 0.0;

        std::vector<int> rank(n_comm);
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return row.community_mean[a] > row.community_mean[b];
        });
        row.best_community = rank[0];
        row.second_community = rank[1];
        row.best = row.community_mean[rank[0]];
        row.worst = row.community_mean[rank[n_comm - 1]];

        double top_sum = 0.0, rest_sum = 0.0;
        int top_n = 0, rest_n = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const bool i_top = partition.labels[i] == rank[0] || partition.labels[i] == rank[1];
                const bool j_top = partition.labels[j] == rank[0] || partition.labels[j] == rank[1];
                const double f = tensor.get(m, i, j);
                if (i_top && j_top) {
                    top_sum += f;
                    ++top_n;
                } else {
                    rest_sum += f;
                    ++rest_n;
                }
            }
        row.top_two = top_n > 0 ? top_sum / top_n : 0.0;
        row.rest = rest_n > 0 ? rest_sum / rest_n : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Deterministic Bron-Kerbosch (pivoting, sorted iteration order).
void bron_kerbosch(const std::vector<std::set<int>>& adj, std::set<int>& r, std::set<int> p,
                   std::set<int> x, std::vector<std::vector<int>>& out) {
    if (p.empty() && x.empty()) {
        if (r.size() >= 2) out.emplace_back(r.begin(), r.end());
        return;
    }
    int pivot = -1;
    size_t best = 0;
    for (int u : p) {
        size_t cnt = 0;
        for (int v : p)
            if (adj[u].count(v)) ++cnt;
        if (pivot < 0 || cnt > best) {
            pivot = u;
            best = cnt;
        }
    }
    for (int u : x) {
        size_t cnt = 0;
        for (int v : p)
            if (adj[u].count(v)) ++cnt;
        if (pivot < 0 || cnt > best) {
            pivot = u;
            best = cnt;
        }
    }
    std::vector<int> candidates;
    for (int v : p)
        if (pivot < 0 || !adj[pivot].count(v)) candidates.push_back(v);
    for (int v : candidates) {
        std::set<int> p2, x2;
        for (int w : p)
            if (adj[v].count(w)) p2.insert(w);
        for (int w : x)
            if (adj[v].count(w)) x2.insert(w);
        r.insert(v);
        bron_kerbosch(adj, r, std::move(p2), std::move(x2), out);
        r.erase(v);
        p.erase(v);
        x.insert(v);
    }
}

}  // namespace

Partition fidelity_based_partition(const FidelityTensor& tensor, const Graph& g, double threshold,
                                   const std::vector<int>& modes) {
    const int n = tensor.n_nodes();
    if (g.n != n) throw InvalidParameter("graph size does not match tensor");

    struct Clique {
        std::vector<int> nodes;
        int mode;
    };
    std::vector<Clique> cliques;
    for (int m : modes) {
        if (m == 0) continue;  // center-of-mass mode carries no group structure
        std::vector<std::set<int>> adj(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (tensor.get_or_zero(m, i, j) > threshold) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
        std::set<int> r, p, x;
        for (int v = 0; v < n; ++v)
            if (!adj[v].empty()) p.insert(v);
        std::vector<std::vector<int>> found;
        bron_kerbosch(adj, r, std::move(p), std::move(x), found);
        for (auto& c : found) cliques.push_back({std::move(c), m});
    }
    std::stable_sort(cliques.begin(), cliques.end(), [](const Clique& a, const Clique& b) {
        if (a.nodes.size() != b.nodes.size()) return a.nodes.size() > b.nodes.size();
        if (a.nodes != b.nodes) return a.nodes < b.nodes;
        return a.mode < b.mode;
    });

    std::vector<std::vector<int>> groups;
    std::vector<bool> assigned(n, false);
    for (const auto& c : cliques) {
        int fresh = 0;
        for (int v : c.nodes)
            if (!assigned[v]) ++fresh;
        if (fresh >= 2) {
            groups.push_back(c.nodes);
            for (int v : c.nodes) assigned[v] = true;
        }
    }
    if (groups.empty()) return Partition(std::vector<int>(n, 0));

    const int n_groups = static_cast<int>(groups.size());
    std::vector<std::vector<int>> membership(n);
    for (int gi = 0; gi < n_groups; ++gi)
        for (int v : groups[gi]) membership[v].push_back(gi);

    std::vector<int> labels(n, -1);
    std::vector<int> ambiguous, leftover;
    for (int v = 0; v < n; ++v) {
        if (membership[v].size() == 1) labels[v] = membership[v][0];
        else if (membership[v].size() > 1) {
            labels[v] = membership[v][0];
            ambiguous.push_back(v);
        } else {
            labels[v] = 0;
            leftover.push_back(v);
        }
    }

    // Modularity of a label vector (contiguity not required here).
    auto deg = g.degrees();
    const double m_edges = g.edge_count();
    auto q_of = [&](const std::vector<int>& lbl) {
        if (m_edges == 0) return 0.0;
        double within = 0.0;
        for (auto [i, j] : g.edges)
            if (lbl[i] == lbl[j]) within += 1.0;
        std::map<int, double> dsum;
        for (int v = 0; v < n; ++v) dsum[lbl[v]] += deg[v];
        double penalty = 0.0;
        for (auto& [c, d] : dsum) penalty += d * d;
        return within / m_edges - penalty / (4.0 * m_edges * m_edges);
    };

    std::vector<int> movable = ambiguous;
    movable.insert(movable.end(), leftover.begin(), leftover.end());
    std::set<int> amb_set(ambiguous.begin(), ambiguous.end());
    std::vector<int> all_groups(n_groups);
    std::iota(all_groups.begin(), all_groups.end(), 0);
    for (int sweep = 0; sweep < 16; ++sweep) {
        bool changed = false;
        for (int v : movable) {
            const std::vector<int>& cand = amb_set.count(v) ? membership[v] : all_groups;
            double best_q = q_of(labels);
            int best_label = labels[v];
            for (int gi : cand) {
                if (gi == labels[v]) continue;
                int old = labels[v];
                labels[v] = gi;
                double q = q_of(labels);
                labels[v] = old;
                if (q > best_q + 1e-12) {
                    best_q = q;
                    best_label = gi;
                }
            }
            if (best_label != labels[v]) {
                labels[v] = best_label;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Contiguous relabeling in order of first appearance by group id.
    std::map<int, int> remap;
    std::vector<int> final_labels(n);
    for (int gi = 0; gi < n_groups; ++gi)
        for (int v = 0; v < n; ++v)
            if (labels[v] == gi && !remap.count(gi)) remap[gi] = static_cast<int>(remap.size());
    for (int v = 0; v < n; ++v) final_labels[v] = remap.at(labels[v]);
    return Partition(std::move(final_labels));
}

}  // namespace gaussnet
