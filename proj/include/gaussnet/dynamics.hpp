#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaussnet/gaussian_state.hpp"
#include "gaussnet/graph.hpp"

namespace gaussnet {

// One external oscillator attached to a network node with a bilinear
// position coupling -k q_S q_i; k = 0 detaches it.
struct ExternalOscillator {
    int attach_node = 0;
    double k = 0.0;
    double omega = 1.0;
};

// Network of identical oscillators (bare frequency omega0, Laplacian
// coupling strength g) plus externally coupled oscillators.  Modes are
// ordered network first, externals after in list order.
struct CompositeSystem {
    Graph graph;
    double omega0 = 1.0;
    double g = 1.0;
    std::vector<ExternalOscillator> externals;

    CompositeSystem(Graph graph_, double omega0_, double g_,
                    std::vector<ExternalOscillator> externals_ = {});

    int total_modes() const { return graph.n + static_cast<int>(externals.size()); }
    Eigen::VectorXd bare_frequencies() const;
};

// Quadratic-form matrix M of H = p^T p / 2 + q^T M q / 2.  Throws
// NonPhysicalCoupling when M is not positive definite.
Eigen::MatrixXd potential_matrix(const CompositeSystem& sys);

struct NormalModeBasis {
    Eigen::MatrixXd K;       // orthogonal, columns = eigenvectors, Omega ascending
    Eigen::VectorXd Omega;   // normal-mode frequencies, ascending
    bool degenerate = false; // near-coincident frequencies present

    int size() const { return static_cast<int>(Omega.size()); }
};

// Eigendecomposition of a positive definite potential matrix with a
// deterministic sign convention (largest-|.| eigenvector entry positive).
NormalModeBasis normal_modes(const Eigen::MatrixXd& m);

// Symplectic propagator S(t) in the (q.., p..) ordering.
Eigen::MatrixXd propagator(const NormalModeBasis& basis, double t);

GaussianState evolve(const GaussianState& state, const Eigen::MatrixXd& s);

// Ground state of the quadratic Hamiltonian; `freqs` sets the per-mode unit
// convention of the returned state (the bare oscillator frequencies).
GaussianState ground_state(const NormalModeBasis& basis, const Eigen::VectorXd& freqs);

double mode_overlap(const NormalModeBasis& basis, int node, int mode);

// Mean energy <H> of a state under the quadratic Hamiltonian with
// potential matrix m.
double mean_energy(const GaussianState& state, const Eigen::MatrixXd& m);

}  // namespace gaussnet
