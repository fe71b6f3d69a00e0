// Test-only truncated-Fock-space oracle for single-mode Gaussian states.
// Builds squeeze/displacement operators by matrix exponentiation, fully
// independent of the covariance-matrix code paths it is used to check.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

namespace fock {

using Cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline CMat annihilation(int dim) {
    CMat a = CMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// Squeezed vacuum in the convention where the covariance matrix reads
// (1/2) diag-ish [cosh 2r + cos(phi) sinh 2r, ...]; the squeeze operator
// phase is then pi - phi.
inline CVec squeezed_vacuum_state(double r, double phi, int dim) {
    CMat a = annihilation(dim);
    CMat ad = a.adjoint();
    Cx xi = std::polar(r, M_PI - phi);
    CMat gen = (std::conj(xi) * (a * a) - xi * (ad * ad)) / 2.0;
    CVec v = CVec::Zero(dim);
    v(0) = 1.0;
    return gen.exp() * v;
}

inline CVec coherent_state(Cx alpha, int dim) {
    CMat a = annihilation(dim);
    CMat gen = alpha * a.adjoint() - std::conj(alpha) * a;
    CVec v = CVec::Zero(dim);
    v(0) = 1.0;
    return gen.exp() * v;
}

inline double overlap_fidelity(const CVec& psi1, const CVec& psi2) {
    return std::norm(psi1.dot(psi2));  // Eigen dot conjugates the left factor
}

// Dimensionless covariance matrix and means of a pure Fock-space state,
// from operator expectation values.
inline void moments(const CVec& psi, Eigen::Matrix2d& cm, Eigen::Vector2d& mean) {
    const int dim = static_cast<int>(psi.size());
    CMat a = annihilation(dim);
    CMat q = (a + a.adjoint()) / std::sqrt(2.0);
    CMat p = (a - a.adjoint()) / (Cx(0.0, 1.0) * std::sqrt(2.0));
    auto ev = [&](const CMat& op) { return std::real(psi.dot(op * psi)); };
    const double mq = ev(q), mp = ev(p);
    cm(0, 0) = ev(q * q) - mq * mq;
    cm(1, 1) = ev(p * p) - mp * mp;
    cm(0, 1) = cm(1, 0) = ev((q * p + p * q) / 2.0) - mq * mp;
    mean << mq, mp;
}

}  // namespace fock
