#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaussnet/errors.hpp"

namespace gaussnet {

// Simple undirected graph on nodes 0..n-1; edges kept sorted and unique.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // (i, j) with i < j

    Graph() = default;
    Graph(int n_nodes, std::vector<std::pair<int, int>> edge_list);

    int edge_count() const { return static_cast<int>(edges.size()); }
    std::vector<int> degrees() const;
    bool has_edge(int i, int j) const;
    bool is_connected() const;
    int component_count() const;
    uint64_t hash() const;
};

// Per-node community labels forming a contiguous id range 0..M-1.
struct Partition {
    std::vector<int> labels;

    explicit Partition(std::vector<int> node_labels);
    int community_count() const;
    int size() const { return static_cast<int>(labels.size()); }
};

Eigen::MatrixXd laplacian(const Graph& g);

Graph erdos_renyi(int n, double p, uint64_t seed);

// Stochastic block model; returns the graph and its planted partition.
std::pair<Graph, Partition> sbm(const std::vector<int>& sizes, double p_w, double p_b,
                                uint64_t seed);

// Whitespace-separated integer pairs, one edge per line, '#' comments.
Graph load_edge_list(const std::string& path, bool one_indexed = false);
void save_edge_list(const Graph& g, const std::string& path);

// One community label per line, node order.
Partition load_partition(const std::string& path);

double modularity(const Graph& g, const Partition& part);

// Mean local clustering per occurring degree; degrees < 2 map to 0.
std::map<int, double> clustering_spectrum(const Graph& g);

enum class RewireMode { pk, pkk, pk_ck, pkk_ck };

RewireMode rewire_mode_from_string(const std::string& s);
std::string to_string(RewireMode mode);

struct RewireParams {
    int swap_factor = 100;       // attempted double-edge swaps per edge (pk/pkk phase)
    int anneal_factor = 1000;    // annealing sweeps of |E| attempted moves (ck modes)
    double ck_tol = 0.05;        // target L1 distance between clustering spectra
    double t0 = 0.1;             // initial annealing temperature
    double cooling = 0.99;       // geometric cooling per sweep
};

struct RewireResult {
    Graph graph;
    double ck_distance = 0.0;  // L1 distance to the source spectrum (ck modes)
    bool converged = true;     // false = ConvergenceWarning (budget exhausted)
};

// Degree-preserving randomization via double-edge swaps.  pkk additionally
// preserves the joint degree census exactly; the *_ck modes anneal the
// clustering spectrum back toward the original's.
RewireResult rewire(const Graph& g, RewireMode mode, uint64_t seed,
                    const RewireParams& params = {});

// L1 distance between clustering spectra (union of occurring degrees).
double clustering_spectrum_distance(const std::map<int, double>& a,
                                    const std::map<int, double>& b);

// Joint degree census: sorted (deg_i, deg_j) pair -> edge count.
std::map<std::pair<int, int>, int> joint_degree_census(const Graph& g);

}  // namespace gaussnet
