#include "gaussnet/dynamics.hpp"

#include <cmath>
#include <set>

namespace gaussnet {

CompositeSystem::CompositeSystem(Graph graph_, double omega0_, double g_,
                                 std::vector<ExternalOscillator> externals_)
    : graph(std::move(graph_)), omega0(omega0_), g(g_), externals(std::move(externals_)) {
    if (omega0 <= 0.0) throw InvalidFrequency("omega0 must be positive");
    std::set<int> used;
    for (const auto& e : externals) {
        if (e.attach_node < 0 || e.attach_node >= graph.n)
            throw std::out_of_range("external attach node out of range");
        if (e.omega <= 0.0) throw InvalidFrequency("external frequency must be positive");
        if (!used.insert(e.attach_node).second)
            throw InvalidParameter("only one external per network node");
    }
}

Eigen::VectorXd CompositeSystem::bare_frequencies() const {
    Eigen::VectorXd f(total_modes());
    f.head(graph.n).setConstant(omega0);
    for (size_t e = 0; e < externals.size(); ++e) f(graph.n + e) = externals[e].omega;
    return f;
}

Eigen::MatrixXd potential_matrix(const CompositeSystem& sys) {
    const int n = sys.graph.n;
    const int nt = sys.total_modes();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nt, nt);
    m.topLeftCorner(n, n) =
        sys.omega0 * sys.omega0 * Eigen::MatrixXd::Identity(n, n) + sys.g * laplacian(sys.graph);
    for (size_t e = 0; e < sys.externals.size(); ++e) {
        const auto& ext = sys.externals[e];
        const int row = n + static_cast<int>(e);
        m(row, row) = ext.omega * ext.omega;
        m(row, ext.attach_node) -= ext.k;
        m(ext.attach_node, row) -= ext.k;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw NonPhysicalCoupling("potential matrix not positive definite");
    return m;
}

NormalModeBasis normal_modes(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    Eigen::VectorXd lam = solver.eigenvalues();
    if (lam(0) <= 0.0)
        throw NonPhysicalCoupling("potential matrix not positive definite");
    NormalModeBasis basis;
    basis.K = solver.eigenvectors();
    basis.Omega = lam.cwiseSqrt();
    for (int c = 0; c < basis.K.cols(); ++c) {
        int imax;
        basis.K.col(c).cwiseAbs().maxCoeff(&imax);
        if (basis.K(imax, c) < 0.0) basis.K.col(c) *= -1.0;
    }
    for (int i = 0; i + 1 < basis.size(); ++i)
        if (basis.Omega(i + 1) - basis.Omega(i) < 1e-9 * basis.Omega(i + 1))
            basis.degenerate = true;
    return basis;
}

Eigen::MatrixXd propagator(const NormalModeBasis& basis, double t) {
    if (t < 0.0) throw InvalidParameter("propagation time must be >= 0");
    const int n = basis.size();
    Eigen::ArrayXd wt = basis.Omega.array() * t;
    Eigen::ArrayXd c = wt.cos();
    Eigen::ArrayXd s = wt.sin();
    Eigen::MatrixXd kc = basis.K * c.matrix().asDiagonal() * basis.K.transpose();
    Eigen::MatrixXd ks =
        basis.K * (s / basis.Omega.array()).matrix().asDiagonal() * basis.K.transpose();
    Eigen::MatrixXd kos =
        basis.K * (s * basis.Omega.array()).matrix().asDiagonal() * basis.K.transpose();
    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = kc;
    out.topRightCorner(n, n) = ks;
    out.bottomLeftCorner(n, n) = -kos;
    out.bottomRightCorner(n, n) = kc;
    return out;
}

GaussianState evolve(const GaussianState& state, const Eigen::MatrixXd& s) {
    if (s.rows() != 2 * state.n_modes() || s.cols() != 2 * state.n_modes())
        throw IncompatibleStates("propagator dimension does not match state");
    return GaussianState(s * state.cm() * s.transpose(), s * state.means(), state.freqs());
}

GaussianState ground_state(const NormalModeBasis& basis, const Eigen::VectorXd& freqs) {
    const int n = basis.size();
    if (freqs.size() != n) throw IncompatibleStates("frequency vector size mismatch");
    Eigen::MatrixXd qq =
        0.5 * basis.K * basis.Omega.cwiseInverse().asDiagonal() * basis.K.transpose();
    Eigen::MatrixXd pp = 0.5 * basis.K * basis.Omega.asDiagonal() * basis.K.transpose();
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cm.topLeftCorner(n, n) = qq;
    cm.bottomRightCorner(n, n) = pp;
    return GaussianState(cm, Eigen::VectorXd::Zero(2 * n), freqs);
}

double mode_overlap(const NormalModeBasis& basis, int node, int mode) {
    if (node < 0 || node >= basis.size() || mode < 0 || mode >= basis.size())
        throw std::out_of_range("node or mode index out of range");
    return basis.K(node, mode);
}

double mean_energy(const GaussianState& state, const Eigen::MatrixXd& m) {
    const int n = state.n_modes();
    if (m.rows() != n || m.cols() != n)
        throw IncompatibleStates("potential matrix dimension mismatch");
    const auto& cm = state.cm();
    const Eigen::VectorXd q = state.means().head(n);
    const Eigen::VectorXd p = state.means().tail(n);
    double e = 0.5 * cm.bottomRightCorner(n, n).trace();
    e += 0.5 * (m * cm.topLeftCorner(n, n)).trace();
    e += 0.5 * p.squaredNorm() + 0.5 * q.dot(m * q);
    return e;
}

}  // namespace gaussnet
