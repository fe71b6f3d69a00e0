#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gaussnet/errors.hpp"

namespace gaussnet {

// Gaussian state of n harmonic oscillator modes, stored as a covariance
// matrix and first-moments vector in the quadrature ordering
// x = (q_1..q_n, p_1..p_n), with hbar = 1 and unit mass.  Each mode carries
// its own angular frequency omega_i; positions scale as 1/sqrt(omega),
// momenta as sqrt(omega), so the vacuum of a mode has variances
// (1/(2 omega), omega/2).
class GaussianState {
  public:
    GaussianState(Eigen::MatrixXd cm, Eigen::VectorXd means, Eigen::VectorXd freqs);

    int n_modes() const { return static_cast<int>(freqs_.size()); }
    const Eigen::MatrixXd& cm() const { return cm_; }
    const Eigen::VectorXd& means() const { return means_; }
    const Eigen::VectorXd& freqs() const { return freqs_; }

    // Covariance matrix rescaled to dimensionless quadratures
    // (q~ = sqrt(omega) q, p~ = p / sqrt(omega)); vacuum becomes I/2.
    Eigen::MatrixXd dimensionless_cm() const;
    Eigen::VectorXd dimensionless_means() const;

    // Same dimensionless content expressed at new per-mode frequencies.
    GaussianState at_frequencies(const Eigen::VectorXd& freqs) const;
    GaussianState at_frequency(double omega) const;

    // Full symmetry/uncertainty validation (used by tests and debug paths;
    // construction checks only shape, symmetry and positive frequencies).
    void validate(double sym_tol = 1e-10, double unc_tol = 1e-9) const;

  private:
    Eigen::MatrixXd cm_;
    Eigen::VectorXd means_;
    Eigen::VectorXd freqs_;
};

// Single-mode squeezed (thermal) vacuum; pure iff n_th = 0.
GaussianState squeezed_vacuum(double r, double phi, double omega, double n_th = 0.0);

// Single-mode coherent state.
GaussianState coherent(std::complex<double> alpha, double omega);

// Two-mode squeezed vacuum at a common frequency, zero means.
GaussianState two_mode_squeezed(double s, double phi, double omega);

// Uhlmann fidelity between two single-mode states in the same physical mode.
double fidelity(const GaussianState& s1, const GaussianState& s2);

// Uhlmann fidelity of `state` against a pure n-mode Gaussian target
// (overlap form; exact whenever the target is pure).
double fidelity_pure_target(const GaussianState& state, const GaussianState& pure_target);

// Logarithmic negativity (natural log) of a two-mode state.
double log_negativity(const GaussianState& s);

// Squeezing parameter extracted from the smallest eigenvalue of the
// dimensionless covariance matrix; equals r for pure squeezed vacua.
double squeezing_of(const GaussianState& s);

// Magnitude of the coherent displacement encoded in the first moments.
double displacement_of(const GaussianState& s);

// Reduced state on the selected modes (indices distinct, in range).
GaussianState marginal(const GaussianState& s, const std::vector<int>& modes);

// Symplectic eigenvalues of the dimensionless covariance matrix, ascending,
// one per mode.  All equal 1/2 for pure states.
std::vector<double> symplectic_eigenvalues(const GaussianState& s);

// Direct sum of independent states placed on consecutive modes.
GaussianState tensor_product(const std::vector<GaussianState>& parts);

// Scatter `part` onto the given modes of an existing larger state (the
// affected rows/columns are overwritten; cross correlations to the other
// modes are zeroed).
void embed_state(Eigen::MatrixXd& cm, Eigen::VectorXd& means, Eigen::VectorXd& freqs,
                 const GaussianState& part, const std::vector<int>& modes);

}  // namespace gaussnet
