#include "gaussnet/gaussian_state.hpp"

#include <algorithm>
#include <cmath>

namespace gaussnet {

namespace {

Eigen::VectorXd scale_vector(const Eigen::VectorXd& freqs) {
    const int n = static_cast<int>(freqs.size());
    Eigen::VectorXd d(2 * n);
    for (int i = 0; i < n; ++i) {
        d(i) = std::sqrt(freqs(i));
        d(n + i) = 1.0 / std::sqrt(freqs(i));
    }
    return d;
}

// Standard symplectic form for the (q.., p..) ordering.
Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return omega;
}

std::vector<double> symplectic_eigenvalues_dimensionless(const Eigen::MatrixXd& st) {
    const int n = static_cast<int>(st.rows()) / 2;
    Eigen::MatrixXd a = symplectic_form(n) * st;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    std::vector<double> mags(2 * n);
    for (int i = 0; i < 2 * n; ++i) mags[i] = std::abs(solver.eigenvalues()(i));
    std::sort(mags.begin(), mags.end());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (mags[2 * i] + mags[2 * i + 1]);
    return out;
}

}  // namespace

GaussianState::GaussianState(Eigen::MatrixXd cm, Eigen::VectorXd means, Eigen::VectorXd freqs)
    : cm_(std::move(cm)), means_(std::move(means)), freqs_(std::move(freqs)) {
    const int n = static_cast<int>(freqs_.size());
    if (n < 1) throw IncompatibleStates("state needs at least one mode");
    if (cm_.rows() != 2 * n || cm_.cols() != 2 * n || means_.size() != 2 * n)
        throw IncompatibleStates("covariance/means dimensions do not match mode count");
    if ((freqs_.array() <= 0.0).any()) throw InvalidFrequency("mode frequency must be positive");
    if ((cm_ - cm_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw IncompatibleStates("covariance matrix not symmetric");
    cm_ = 0.5 * (cm_ + cm_.transpose().eval());
}

Eigen::MatrixXd GaussianState::dimensionless_cm() const {
    Eigen::VectorXd d = scale_vector(freqs_);
    return d.asDiagonal() * cm_ * d.asDiagonal();
}

Eigen::VectorXd GaussianState::dimensionless_means() const {
    return scale_vector(freqs_).cwiseProduct(means_);
}

GaussianState GaussianState::at_frequencies(const Eigen::VectorXd& freqs) const {
    if (freqs.size() != freqs_.size())
        throw IncompatibleStates("frequency vector size mismatch");
    if ((freqs.array() <= 0.0).any()) throw InvalidFrequency("mode frequency must be positive");
    const int n = n_modes();
    Eigen::VectorXd inv(2 * n);
    for (int i = 0; i < n; ++i) {
        inv(i) = 1.0 / std::sqrt(freqs(i));
        inv(n + i) = std::sqrt(freqs(i));
    }
    Eigen::MatrixXd st = dimensionless_cm();
    Eigen::VectorXd mt = dimensionless_means();
    return GaussianState(inv.asDiagonal() * st * inv.asDiagonal(), inv.cwiseProduct(mt), freqs);
}

GaussianState GaussianState::at_frequency(double omega) const {
    return at_frequencies(Eigen::VectorXd::Constant(n_modes(), omega));
}

void GaussianState::validate(double sym_tol, double unc_tol) const {
    if ((cm_ - cm_.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw IncompatibleStates("covariance matrix not symmetric");
    auto nu = symplectic_eigenvalues(*this);
    if (nu.front() < 0.5 - unc_tol)
        throw IncompatibleStates("uncertainty relation violated: nu_min = " +
                                 std::to_string(nu.front()));
}

GaussianState squeezed_vacuum(double r, double phi, double omega, double n_th) {
    if (omega <= 0.0) throw InvalidFrequency("omega must be positive");
    if (r < 0.0) throw InvalidParameter("squeezing parameter must be >= 0");
    if (n_th < 0.0) throw InvalidParameter("thermal occupation must be >= 0");
    const double y = std::cosh(2.0 * r);
    const double zc = std::cos(phi) * std::sinh(2.0 * r);
    const double zs = -std::sin(phi) * std::sinh(2.0 * r);
    Eigen::MatrixXd cm(2, 2);
    cm << (y + zc) / omega, zs, zs, (y - zc) * omega;
    cm *= n_th + 0.5;
    return GaussianState(cm, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, omega));
}

GaussianState coherent(std::complex<double> alpha, double omega) {
    if (omega <= 0.0) throw InvalidFrequency("omega must be positive");
    Eigen::MatrixXd cm(2, 2);
    cm << 0.5 / omega, 0.0, 0.0, 0.5 * omega;
    Eigen::VectorXd means(2);
    means << alpha.real() * std::sqrt(2.0 / omega), alpha.imag() * std::sqrt(2.0 * omega);
    return GaussianState(cm, means, Eigen::VectorXd::Constant(1, omega));
}

GaussianState two_mode_squeezed(double s, double phi, double omega) {
    if (omega <= 0.0) throw InvalidFrequency("omega must be positive");
    if (s < 0.0) throw InvalidParameter("squeezing parameter must be >= 0");
    const double y = std::cosh(2.0 * s);
    const double zc = std::cos(phi) * std::sinh(2.0 * s);
    const double zs = std::sin(phi) * std::sinh(2.0 * s);
    // (q1, q2, p1, p2) ordering.
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(4, 4);
    cm(0, 0) = cm(1, 1) = y / omega;
    cm(0, 1) = cm(1, 0) = zc / omega;
    cm(2, 2) = cm(3, 3) = y * omega;
    cm(2, 3) = cm(3, 2) = -zc * omega;
    cm(0, 3) = cm(3, 0) = zs;
    cm(1, 2) = cm(2, 1) = zs;
    cm *= 0.5;
    return GaussianState(cm, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Constant(2, omega));
}

double fidelity(const GaussianState& s1, const GaussianState& s2) {
    if (s1.n_modes() != 1 || s2.n_modes() != 1)
        throw IncompatibleStates("single-mode fidelity requires single-mode states");
    const double w1 = s1.freqs()(0), w2 = s2.freqs()(0);
    if (std::abs(w1 - w2) > 1e-9 * std::max(w1, w2))
        throw IncompatibleStates("states live in modes of different frequency");
    Eigen::Matrix2d a = s1.dimensionless_cm();
    Eigen::Matrix2d b = s2.dimensionless_cm();
    Eigen::Vector2d du = s1.dimensionless_means() - s2.dimensionless_means();
    Eigen::Matrix2d sum = a + b;
    const double big_delta = sum.determinant();
    // Clamped: pure states sit numerically a hair below det = 1/4.
    const double small_delta =
        std::max(0.0, 4.0 * (a.determinant() - 0.25) * (b.determinant() - 0.25));
    const double quad = du.dot(sum.inverse() * du);
    const double denom = std::sqrt(big_delta + small_delta) - std::sqrt(small_delta);
    const double f = std::exp(-0.5 * quad) / denom;
    return std::min(1.0, f);
}

double fidelity_pure_target(const GaussianState& state, const GaussianState& pure_target) {
    if (state.n_modes() != pure_target.n_modes())
        throw IncompatibleStates("mode count mismatch");
    for (int i = 0; i < state.n_modes(); ++i) {
        const double w1 = state.freqs()(i), w2 = pure_target.freqs()(i);
        if (std::abs(w1 - w2) > 1e-9 * std::max(w1, w2))
            throw IncompatibleStates("states live in modes of different frequency");
    }
    Eigen::MatrixXd sum = state.dimensionless_cm() + pure_target.dimensionless_cm();
    Eigen::VectorXd du = state.dimensionless_means() - pure_target.dimensionless_means();
    Eigen::LLT<Eigen::MatrixXd> llt(sum);
    const double quad = du.dot(llt.solve(du));
    double logdet = 0.0;
    for (int i = 0; i < sum.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
    const double f = std::exp(-0.5 * quad - logdet);
    return std::min(1.0, f);
}

double log_negativity(const GaussianState& s) {
    if (s.n_modes() != 2) throw IncompatibleStates("log negativity requires a two-mode state");
    Eigen::MatrixXd st = s.dimensionless_cm();
    // Partial transpose on mode 2: p2 -> -p2.
    Eigen::Vector4d pt(1.0, 1.0, 1.0, -1.0);
    Eigen::MatrixXd stp = pt.asDiagonal() * st * pt.asDiagonal();
    auto nu = symplectic_eigenvalues_dimensionless(stp);
    return std::max(0.0, -std::log(2.0 * nu.front()));
}

double squeezing_of(const GaussianState& s) {
    if (s.n_modes() != 1) throw IncompatibleStates("squeezing_of requires a single-mode state");
    Eigen::Matrix2d st = s.dimensionless_cm();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(st);
    return std::max(0.0, -0.5 * std::log(2.0 * solver.eigenvalues()(0)));
}

double displacement_of(const GaussianState& s) {
    if (s.n_modes() != 1) throw IncompatibleStates("displacement_of requires a single-mode state");
    return s.dimensionless_means().norm() / std::sqrt(2.0);
}

GaussianState marginal(const GaussianState& s, const std::vector<int>& modes) {
    const int n = s.n_modes();
    const int k = static_cast<int>(modes.size());
    if (k < 1) throw std::out_of_range("marginal needs at least one mode");
    std::vector<bool> seen(n, false);
    for (int m : modes) {
        if (m < 0 || m >= n) throw std::out_of_range("mode index out of range");
        if (seen[m]) throw std::out_of_range("duplicate mode index");
        seen[m] = true;
    }
    std::vector<int> idx(2 * k);
    for (int a = 0; a < k; ++a) {
        idx[a] = modes[a];
        idx[k + a] = n + modes[a];
    }
    Eigen::MatrixXd cm(2 * k, 2 * k);
    Eigen::VectorXd means(2 * k);
    Eigen::VectorXd freqs(k);
    for (int a = 0; a < 2 * k; ++a) {
        means(a) = s.means()(idx[a]);
        for (int b = 0; b < 2 * k; ++b) cm(a, b) = s.cm()(idx[a], idx[b]);
    }
    for (int a = 0; a < k; ++a) freqs(a) = s.freqs()(modes[a]);
    return GaussianState(cm, means, freqs);
}

std::vector<double> symplectic_eigenvalues(const GaussianState& s) {
    return symplectic_eigenvalues_dimensionless(s.dimensionless_cm());
}

GaussianState tensor_product(const std::vector<GaussianState>& parts) {
    int n = 0;
    for (const auto& p : parts) n += p.n_modes();
    if (n == 0) throw IncompatibleStates("empty tensor product");
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::VectorXd means = Eigen::VectorXd::Zero(2 * n);
    Eigen::VectorXd freqs(n);
    int off = 0;
    for (const auto& p : parts) {
        std::vector<int> modes(p.n_modes());
        for (int i = 0; i < p.n_modes(); ++i) modes[i] = off + i;
        embed_state(cm, means, freqs, p, modes);
        off += p.n_modes();
    }
    return GaussianState(cm, means, freqs);
}

void embed_state(Eigen::MatrixXd& cm, Eigen::VectorXd& means, Eigen::VectorXd& freqs,
                 const GaussianState& part, const std::vector<int>& modes) {
    const int n = static_cast<int>(freqs.size());
    const int k = part.n_modes();
    if (static_cast<int>(modes.size()) != k)
        throw IncompatibleStates("mode index list does not match part size");
    std::vector<int> idx(2 * k);
    for (int a = 0; a < k; ++a) {
        if (modes[a] < 0 || modes[a] >= n) throw std::out_of_range("mode index out of range");
        idx[a] = modes[a];
        idx[k + a] = n + modes[a];
        freqs(modes[a]) = part.freqs()(a);
    }
    for (int a = 0; a < 2 * k; ++a) {
        means(idx[a]) = part.means()(a);
        for (int b = 0; b < 2 * k; ++b) cm(idx[a], idx[b]) = part.cm()(a, b);
    }
}

}  // namespace gaussnet
