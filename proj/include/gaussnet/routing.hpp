#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaussnet/graph.hpp"
#include "gaussnet/protocols.hpp"

namespace gaussnet {

// Which fidelity a tensor stores: window-optimized maxima or the value at
// the nominal transfer time.
enum class FidelityKind { window_max, nominal };

struct PairFilter {
    // Evaluate, per mode, all pairs among the top-m nodes by |K[i, mode]|;
    // m <= 0 means all pairs.
    int top_overlap = 0;

    bool is_all() const { return top_overlap <= 0; }
};

struct TensorConfig {
    int c3 = 7;
    std::vector<int> modes;              // empty = all modes
    FidelityKind kind = FidelityKind::nominal;
    WindowSpec window = WindowSpec::nominal_only();
    PairFilter filter;
    int workers = 1;
};

// Pairwise transfer fidelities per normal mode.  Missing pairs (filtered
// out) are marked absent; pairs whose required coupling is unphysical are
// stored as 0 with the infeasible flag.
class FidelityTensor {
  public:
    FidelityTensor(int n_nodes, std::vector<int> modes, std::vector<double> times,
                   FidelityKind kind, bool filtered, uint64_t graph_hash);

    int n_nodes() const { return n_; }
    const std::vector<int>& modes() const { return modes_; }
    const std::vector<double>& times() const { return times_; }
    FidelityKind kind() const { return kind_; }
    bool filtered() const { return filtered_; }
    uint64_t graph_hash() const { return graph_hash_; }
    int infeasible_count() const { return infeasible_; }

    void set(int mode, int i, int j, double f);
    void mark_infeasible(int mode, int i, int j);
    bool has(int mode, int i, int j) const;
    double get(int mode, int i, int j) const;      // throws if absent
    double get_or_zero(int mode, int i, int j) const;
    double time_of(int mode) const;

    std::string to_json() const;
    static FidelityTensor from_json(const std::string& text);
    void write_csv(const std::string& path) const;

  private:
    int slot(int mode) const;
    int pair_index(int i, int j) const;

    int n_;
    std::vector<int> modes_;
    std::vector<double> times_;
    FidelityKind kind_;
    bool filtered_;
    uint64_t graph_hash_;
    int infeasible_ = 0;
    std::vector<std::vector<double>> values_;  // per mode, upper-triangle; NaN = absent
};

// Build the tensor by running the single-step protocol for each selected
// (pair, mode).  Infeasible pairs (NonPhysicalCoupling / decoupled nodes)
// enter as zeros.
FidelityTensor pairwise_fidelity_tensor(const NetworkContext& net, const GaussianState& payload,
                                        const TensorConfig& config);

// C_i = sum_j sum_n F^n_ij / t^n; requires an unfiltered tensor.
std::vector<double> node_capacity(const FidelityTensor& tensor);

// C_max = sum_n max_ij F^n_ij / t^n (a lower bound on filtered tensors).
double max_capacity(const FidelityTensor& tensor);

// Fraction of all N(N-1)/2 pairs with F > threshold, per mode; absent
// pairs count as failures (meaningful on overlap-filtered tensors).
std::vector<double> good_transfer_fraction(const FidelityTensor& tensor, double threshold);

struct CommunityReportRow {
    int mode = 0;
    std::vector<double> community_mean;  // mean within-community fidelity
    double best = 0.0;
    double top_two = 0.0;
    double worst = 0.0;
    double rest = 0.0;
    int best_community = 0;
    int second_community = 0;
};

// Within/between-community fidelity ranking per mode (ties broken by
// community index).
std::vector<CommunityReportRow> community_fidelity_report(const FidelityTensor& tensor,
                                                          const Partition& partition,
                                                          int mode_count);

// Deterministic fidelity-based grouping: greedy maximal cliques of the
// per-mode threshold graphs, ambiguity and leftovers resolved by
// modularity against `g`.
Partition fidelity_based_partition(const FidelityTensor& tensor, const Graph& g, double threshold,
                                   const std::vector<int>& modes);

}  // namespace gaussnet
