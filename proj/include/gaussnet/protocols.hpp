#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaussnet/dynamics.hpp"
#include "gaussnet/gaussian_state.hpp"
#include "gaussnet/graph.hpp"

namespace gaussnet {

enum class ProtocolKind { single_step, two_step };

struct ProtocolParams {
    ProtocolKind kind = ProtocolKind::single_step;
    int c = 1;              // c3 (single step) or c2 (two step)
    int mode_index = 0;
    double g_eff = 0.0;     // effective sender/receiver-to-mode coupling
    double t_stage = 0.0;   // stage duration; two-step transfers take two stages
    double omega_res = 1.0; // resonant normal-mode frequency
};

// g = sqrt(2) w^2 / (2 c3 + 1), t = (2 c3 + 1) pi / w.
ProtocolParams single_step_params(double omega, int c3);

// g = (1 + 2 c2) w^2 / (1 + 2 c2 + 2 c2^2), t = sqrt(1/2 + c2 + c2^2) pi / w.
ProtocolParams two_step_params(double omega, int c2);

struct AsymptoticRatios {
    double t2_over_t1 = 1.0;          // sqrt(1 + 1/(2c+1)^2)
    double g2_over_sqrt2_g1 = 1.0;    // 1 - 1/(2 + 4c(1+c))
};
AsymptoticRatios asymptotic_ratios(int c);

// Bare coupling required for an effective node-to-mode coupling g_eff.
double required_k(double g_eff, double overlap);

struct WindowSpec {
    double length = 4.0;  // absolute time span past the nominal transfer time
    int samples = 400;    // uniform samples including both endpoints

    static WindowSpec standard(double omega0) { return {4.0 / omega0, 400}; }
    static WindowSpec nominal_only() { return {0.0, 1}; }
};

struct TransferMetadata {
    bool degenerate = false;   // near-degenerate composite spectrum
    bool infeasible = false;   // protocol could not be executed for this pair
    std::string note;
    double k_sender = 0.0;
    double k_receiver = 0.0;
};

struct TransferResult {
    double fidelity_best = 0.0;
    double t_best = 0.0;
    double fidelity_at_nominal = 0.0;
    double efficiency = 0.0;             // window max of the resource ratio
    double efficiency_at_nominal = 0.0;
    int mode_index = 0;
    int sender_node = 0;
    int receiver_node = 0;
    ProtocolParams params;
    TransferMetadata metadata;
};

// Isolated-network context reused across transfer runs on the same network.
struct NetworkContext {
    Graph graph;
    double omega0 = 1.0;
    double g = 1.0;
    NormalModeBasis basis;      // modes of omega0^2 I + g L
    GaussianState ground;       // network ground state (unit freqs = omega0)

    NetworkContext(Graph graph_, double omega0_, double g_);
};

// Single-step protocol: sender and receiver simultaneously coupled to the
// chosen network mode; receiver marginal sampled over the window.
TransferResult run_single_step(const NetworkContext& net, int sender_node, int receiver_node,
                               int mode_index, int c3, const GaussianState& payload,
                               const WindowSpec& window);
TransferResult run_single_step(const Graph& graph, double omega0, double g, int sender_node,
                               int receiver_node, int mode_index, int c3,
                               const GaussianState& payload, const WindowSpec& window);

// Two-step protocol: sender swaps with the mode, then the receiver does;
// the window extends the second stage past its nominal end.
TransferResult run_two_step(const NetworkContext& net, int sender_node, int receiver_node,
                            int mode_index, int c2, const GaussianState& payload,
                            const WindowSpec& window);
TransferResult run_two_step(const Graph& graph, double omega0, double g, int sender_node,
                            int receiver_node, int mode_index, int c2,
                            const GaussianState& payload, const WindowSpec& window);

// Entanglement transfer: a two-mode squeezed payload held by a decoupled
// ancilla and the sender; single-step transfer of the sender mode.
// Fidelity is measured against the orthogonal-phase twin beam,
// efficiency as E_N(receiver, ancilla) / E_N(initial); both window maxima.
TransferResult run_entanglement_transfer(const NetworkContext& net, int sender_node,
                                         int receiver_node, int mode_index, int c3, double s,
                                         double phi, const WindowSpec& window);

enum class IdealChainKind { single_step, two_step, entanglement };

struct TrajectoryPoint {
    double t = 0.0;
    double fidelity = 0.0;
    double efficiency = 0.0;
};

// Exact small-system evolution of the resonant-mode-only chains.  The
// payload is single-mode (two-mode twin beam for the entanglement kind);
// the chain frequency is the payload's.
std::vector<TrajectoryPoint> ideal_chain_run(IdealChainKind kind, int c,
                                             const GaussianState& payload,
                                             const std::vector<double>& time_grid);

// Nominal end-to-end transfer time of the ideal protocol.
double ideal_nominal_time(IdealChainKind kind, int c, double omega);

}  // namespace gaussnet
