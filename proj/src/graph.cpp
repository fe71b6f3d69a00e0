#include "gaussnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace gaussnet {

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0,1) drawn portably from the engine's raw output.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 seeded_engine(uint64_t seed) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s), b = splitmix64(s);
    std::seed_seq seq{static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                      static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

Graph::Graph(int n_nodes, std::vector<std::pair<int, int>> edge_list)
    : n(n_nodes), edges(std::move(edge_list)) {
    if (n < 0) throw InvalidGraph("negative node count");
    for (auto& e : edges) {
        if (e.first == e.second) throw InvalidGraph("self-loop");
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.first < 0 || e.second >= n) throw InvalidGraph("node index out of range");
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw InvalidGraph("duplicate edge");
}

std::vector<int> Graph::degrees() const {
    std::vector<int> d(n, 0);
    for (auto [i, j] : edges) {
        ++d[i];
        ++d[j];
    }
    return d;
}

bool Graph::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

int Graph::component_count() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(n, false);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++comps;
        std::vector<int> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
    }
    return comps;
}

bool Graph::is_connected() const { return n <= 1 || component_count() == 1; }

uint64_t Graph::hash() const {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(static_cast<uint64_t>(n));
    for (auto [i, j] : edges) mix((static_cast<uint64_t>(i) << 32) | static_cast<uint64_t>(j));
    return h;
}

Partition::Partition(std::vector<int> node_labels) : labels(std::move(node_labels)) {
    if (labels.empty()) throw InvalidPartition("empty partition");
    int hi = *std::max_element(labels.begin(), labels.end());
    int lo = *std::min_element(labels.begin(), labels.end());
    if (lo != 0) throw InvalidPartition("community ids must start at 0");
    std::vector<bool> seen(hi + 1, false);
    for (int l : labels) seen[l] = true;
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw InvalidPartition("community ids must form a contiguous range");
}

int Partition::community_count() const {
    return 1 + *std::max_element(labels.begin(), labels.end());
}

Eigen::MatrixXd laplacian(const Graph& g) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.n, g.n);
    for (auto [i, j] : g.edges) {
        l(i, i) += 1.0;
        l(j, j) += 1.0;
        l(i, j) -= 1.0;
        l(j, i) -= 1.0;
    }
    return l;
}

Graph erdos_renyi(int n, double p, uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw InvalidParameter("edge probability must be in [0,1]");
    auto rng = seeded_engine(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (canonical(rng) < p) edges.emplace_back(i, j);
    return Graph(n, std::move(edges));
}

std::pair<Graph, Partition> sbm(const std::vector<int>& sizes, double p_w, double p_b,
                                uint64_t seed) {
    if (p_w < 0.0 || p_w > 1.0 || p_b < 0.0 || p_b > 1.0)
        throw InvalidParameter("edge probability must be in [0,1]");
    std::vector<int> labels;
    for (size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] <= 0) throw InvalidParameter("community sizes must be positive");
        labels.insert(labels.end(), sizes[c], static_cast<int>(c));
    }
    const int n = static_cast<int>(labels.size());
    auto rng = seeded_engine(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double p = labels[i] == labels[j] ? p_w : p_b;
            if (canonical(rng) < p) edges.emplace_back(i, j);
        }
    return {Graph(n, std::move(edges)), Partition(std::move(labels))};
}

Graph load_edge_list(const std::string& path, bool one_indexed) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open edge list: " + path);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int lineno = 0;
    int max_node = -1;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        long a, b;
        if (!(ss >> a)) continue;  // blank line
        if (!(ss >> b))
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected two integers");
        std::string rest;
        if (ss >> rest)
            throw FormatError(path + ":" + std::to_string(lineno) + ": trailing tokens");
        if (one_indexed) {
            --a;
            --b;
        }
        if (a < 0 || b < 0)
            throw FormatError(path + ":" + std::to_string(lineno) + ": negative node index");
        if (a == b)
            throw InvalidGraph(path + ":" + std::to_string(lineno) + ": self-loop");
        edges.emplace_back(static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b)));
        max_node = std::max(max_node, static_cast<int>(std::max(a, b)));
    }
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidGraph(path + ": duplicate edge");
    return Graph(max_node + 1, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write edge list: " + path);
    for (auto [i, j] : g.edges) out << i << " " << j << "\n";
}

Partition load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open partition file: " + path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        int l;
        if (ss >> l) labels.push_back(l);
    }
    return Partition(std::move(labels));
}

double modularity(const Graph& g, const Partition& part) {
    if (static_cast<int>(part.labels.size()) != g.n)
        throw InvalidPartition("partition does not cover all nodes");
    const double m = g.edge_count();
    if (m == 0) throw DegenerateGraph("modularity undefined for empty graph");
    auto deg = g.degrees();
    double within = 0.0;
    for (auto [i, j] : g.edges)
        if (part.labels[i] == part.labels[j]) within += 1.0;
    std::map<int, double> deg_sum;
    for (int v = 0; v < g.n; ++v) deg_sum[part.labels[v]] += deg[v];
    double penalty = 0.0;
    for (auto& [c, d] : deg_sum) penalty += d * d;
    return within / m - penalty / (4.0 * m * m);
}

std::map<int, double> clustering_spectrum(const Graph& g) {
    std::vector<std::set<int>> adj(g.n);
    for (auto [i, j] : g.edges) {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    auto deg = g.degrees();
    std::map<int, std::pair<double, int>> acc;  // degree -> (sum of c_v, count)
    for (int v = 0; v < g.n; ++v) {
        double c = 0.0;
        if (deg[v] >= 2) {
            long tri = 0;
            for (int u : adj[v])
                for (int w : adj[v])
                    if (u < w && adj[u].count(w)) ++tri;
            c = 2.0 * static_cast<double>(tri) / (static_cast<double>(deg[v]) * (deg[v] - 1));
        }
        auto& slot = acc[deg[v]];
        slot.first += c;
        slot.second += 1;
    }
    std::map<int, double> spec;
    for (auto& [k, s] : acc) spec[k] = k < 2 ? 0.0 : s.first / s.second;
    return spec;
}

double clustering_spectrum_distance(const std::map<int, double>& a,
                                    const std::map<int, double>& b) {
    double d = 0.0;
    for (auto& [k, v] : a) {
        auto it = b.find(k);
        d += std::abs(v - (it == b.end() ? 0.0 : it->second));
    }
    for (auto& [k, v] : b)
        if (!a.count(k)) d += std::abs(v);
    return d;
}

std::map<std::pair<int, int>, int> joint_degree_census(const Graph& g) {
    auto deg = g.degrees();
    std::map<std::pair<int, int>, int> census;
    for (auto [i, j] : g.edges) {
        int a = deg[i], b = deg[j];
        if (a > b) std::swap(a, b);
        ++census[{a, b}];
    }
    return census;
}

RewireMode rewire_mode_from_string(const std::string& s) {
    if (s == "pk") return RewireMode::pk;
    if (s == "pkk") return RewireMode::pkk;
    if (s == "pk_ck" || s == "pk-ck") return RewireMode::pk_ck;
    if (s == "pkk_ck" || s == "pkk-ck") return RewireMode::pkk_ck;
    throw InvalidParameter("unknown rewire mode: " + s);
}

std::string to_string(RewireMode mode) {
    switch (mode) {
        case RewireMode::pk: return "pk";
        case RewireMode::pkk: return "pkk";
        case RewireMode::pk_ck: return "pk_ck";
        case RewireMode::pkk_ck: return "pkk_ck";
    }
    return "?";
}

namespace {

// Mutable rewiring state with O(1) swap application and incremental
// triangle counts (64-bit adjacency bitsets).
struct RewireState {
    int n;
    int words;
    std::vector<int> deg;
    std::vector<std::pair<int, int>> edges;
    std::vector<uint64_t> adj;   // n * words bitset
    std::vector<long> tri;       // triangles through each node

    explicit RewireState(const Graph& g)
        : n(g.n), words((g.n + 63) / 64), deg(g.degrees()), edges(g.edges),
          adj(static_cast<size_t>(g.n) * words, 0), tri(g.n, 0) {
        for (auto [i, j] : edges) set_edge(i, j);
        for (int v = 0; v < n; ++v) {
            long t = 0;
            auto nb = neighbors(v);
            for (size_t a = 0; a < nb.size(); ++a)
                for (size_t b = a + 1; b < nb.size(); ++b)
                    if (has(nb[a], nb[b])) ++t;
            tri[v] = t;
        }
    }

    bool has(int i, int j) const { return (adj[static_cast<size_t>(i) * words + j / 64] >> (j % 64)) & 1ULL; }
    void set_edge(int i, int j) {
        adj[static_cast<size_t>(i) * words + j / 64] |= 1ULL << (j % 64);
        adj[static_cast<size_t>(j) * words + i / 64] |= 1ULL << (i % 64);
    }
    void clear_edge(int i, int j) {
        adj[static_cast<size_t>(i) * words + j / 64] &= ~(1ULL << (j % 64));
        adj[static_cast<size_t>(j) * words + i / 64] &= ~(1ULL << (i % 64));
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        out.reserve(deg[v]);
        for (int w = 0; w < words; ++w) {
            uint64_t bits = adj[static_cast<size_t>(v) * words + w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                out.push_back(w * 64 + b);
                bits &= bits - 1;
            }
        }
        return out;
    }

    int common_count(int i, int j) const {
        int c = 0;
        const uint64_t* a = &adj[static_cast<size_t>(i) * words];
        const uint64_t* b = &adj[static_cast<size_t>(j) * words];
        for (int w = 0; w < words; ++w) c += __builtin_popcountll(a[w] & b[w]);
        return c;
    }

    // Adjust triangle counts for adding/removing edge (i, j); sign = +1/-1.
    void bump_triangles(int i, int j, int sign) {
        const uint64_t* a = &adj[static_cast<size_t>(i) * words];
        const uint64_t* b = &adj[static_cast<size_t>(j) * words];
        int c = 0;
        for (int w = 0; w < words; ++w) {
            uint64_t bits = a[w] & b[w];
            c += __builtin_popcountll(bits);
            while (bits) {
                int t = w * 64 + __builtin_ctzll(bits);
                tri[t] += sign;
                bits &= bits - 1;
            }
        }
        tri[i] += sign * c;
        tri[j] += sign * c;
    }

    void remove_edge_tri(int i, int j) {
        clear_edge(i, j);
        bump_triangles(i, j, -1);
    }
    void add_edge_tri(int i, int j) {
        bump_triangles(i, j, +1);
        set_edge(i, j);
    }

    // Clustering spectrum from the maintained triangle counts.
    std::map<int, double> spectrum() const {
        std::map<int, std::pair<double, int>> acc;
        for (int v = 0; v < n; ++v) {
            double c = deg[v] >= 2
                           ? 2.0 * static_cast<double>(tri[v]) /
                                 (static_cast<double>(deg[v]) * (deg[v] - 1))
                           : 0.0;
            auto& slot = acc[deg[v]];
            slot.first += c;
            slot.second += 1;
        }
        std::map<int, double> spec;
        for (auto& [k, s] : acc) spec[k] = k < 2 ? 0.0 : s.first / s.second;
        return spec;
    }
};

struct SwapProposal {
    int e1, e2;
    int a, b, c, d;  // (a,b),(c,d) -> (a,d),(c,b)
};

// Draw a valid double-edge swap; pkk restricts to deg(b) == deg(d) which
// keeps the joint degree census invariant.
std::optional<SwapProposal> propose_swap(RewireState& st, std::mt19937_64& rng, bool kk) {
    const int m = static_cast<int>(st.edges.size());
    int e1 = static_cast<int>(rng() % m);
    int e2 = static_cast<int>(rng() % m);
    if (e1 == e2) return std::nullopt;
    auto [a, b] = st.edges[e1];
    auto [c, d] = st.edges[e2];
    if (rng() & 1) std::swap(c, d);
    if (a == c || a == d || b == c || b == d) return std::nullopt;
    if (kk && st.deg[b] != st.deg[d]) {
        std::swap(c, d);
        if (st.deg[b] != st.deg[d]) return std::nullopt;
    }
    if (st.has(a, d) || st.has(c, b)) return std::nullopt;
    return SwapProposal{e1, e2, a, b, c, d};
}

void apply_swap(RewireState& st, const SwapProposal& sw, bool with_tri) {
    if (with_tri) {
        st.remove_edge_tri(sw.a, sw.b);
        st.remove_edge_tri(sw.c, sw.d);
        st.add_edge_tri(sw.a, sw.d);
        st.add_edge_tri(sw.c, sw.b);
    } else {
        st.clear_edge(sw.a, sw.b);
        st.clear_edge(sw.c, sw.d);
        st.set_edge(sw.a, sw.d);
        st.set_edge(sw.c, sw.b);
    }
    st.edges[sw.e1] = {std::min(sw.a, sw.d), std::max(sw.a, sw.d)};
    st.edges[sw.e2] = {std::min(sw.c, sw.b), std::max(sw.c, sw.b)};
}

void revert_swap(RewireState& st, const SwapProposal& sw, bool with_tri) {
    SwapProposal back{sw.e1, sw.e2, sw.a, sw.d, sw.c, sw.b};
    apply_swap(st, back, with_tri);
}

}  // namespace

RewireResult rewire(const Graph& g, RewireMode mode, uint64_t seed, const RewireParams& params) {
    if (g.edge_count() < 2) throw InvalidGraph("rewiring needs at least two edges");
    const bool kk = mode == RewireMode::pkk || mode == RewireMode::pkk_ck;
    const bool ck = mode == RewireMode::pk_ck || mode == RewireMode::pkk_ck;
    auto rng = seeded_engine(seed);
    RewireState st(g);
    const auto target = clustering_spectrum(g);

    const long swaps = static_cast<long>(params.swap_factor) * g.edge_count();
    for (long it = 0; it < swaps; ++it) {
        auto sw = propose_swap(st, rng, kk);
        if (sw) apply_swap(st, *sw, /*with_tri=*/ck);
    }

    RewireResult result{Graph(g.n, st.edges), 0.0, true};
    if (!ck) {
        result.ck_distance = clustering_spectrum_distance(clustering_spectrum(result.graph), target);
        return result;
    }

    double energy = clustering_spectrum_distance(st.spectrum(), target);
    double temp = params.t0;
    const int m = g.edge_count();
    bool reached = energy <= params.ck_tol;
    for (int sweep = 0; sweep < params.anneal_factor && !reached; ++sweep) {
        for (int it = 0; it < m; ++it) {
            if (energy <= params.ck_tol) {
                reached = true;
                break;
            }
            auto sw = propose_swap(st, rng, kk);
            if (!sw) continue;
            apply_swap(st, *sw, /*with_tri=*/true);
            const double e2 = clustering_spectrum_distance(st.spectrum(), target);
            if (e2 <= energy || canonical(rng) < std::exp(-(e2 - energy) / temp)) {
                energy = e2;
            } else {
                revert_swap(st, *sw, /*with_tri=*/true);
            }
        }
        temp *= params.cooling;
    }
    result.graph = Graph(g.n, st.edges);
    result.ck_distance = energy;
    result.converged = reached;
    return result;
}

}  // namespace gaussnet
