#include "gaussnet/protocols.hpp"

#include <cmath>

namespace gaussnet {

namespace {

constexpr double kOverlapFloor = 1e-8;

// ---- closed forms on dimensionless marginals -------------------------------

struct SingleModeTarget {
    Eigen::Matrix2d cm;
    Eigen::Vector2d u;
    double det_m4 = 0.0;  // det(cm) - 1/4
};

SingleModeTarget make_target(const GaussianState& s) {
    SingleModeTarget t;
    t.cm = s.dimensionless_cm();
    t.u = s.dimensionless_means();
    t.det_m4 = t.cm.determinant() - 0.25;
    return t;
}

double fidelity_vs_target(const Eigen::Matrix2d& st, const Eigen::Vector2d& u,
                          const SingleModeTarget& tgt) {
    Eigen::Matrix2d sum = st + tgt.cm;
    const double det_sum = sum(0, 0) * sum(1, 1) - sum(0, 1) * sum(1, 0);
    const double det_st_m4 = st(0, 0) * st(1, 1) - st(0, 1) * st(1, 0) - 0.25;
    const double small_delta = std::max(0.0, 4.0 * det_st_m4 * tgt.det_m4);
    const Eigen::Vector2d du = u - tgt.u;
    const double quad =
        (sum(1, 1) * du(0) * du(0) - 2.0 * sum(0, 1) * du(0) * du(1) + sum(0, 0) * du(1) * du(1)) /
        det_sum;
    const double f =
        std::exp(-0.5 * quad) / (std::sqrt(det_sum + small_delta) - std::sqrt(small_delta));
    return std::min(1.0, f);
}

double squeezing_dimensionless(const Eigen::Matrix2d& st) {
    const double h = 0.5 * (st(0, 0) + st(1, 1));
    const double d = std::sqrt(0.25 * (st(0, 0) - st(1, 1)) * (st(0, 0) - st(1, 1)) +
                               st(0, 1) * st(1, 0));
    const double lam_min = h - d;
    if (lam_min <= 0.0) return 0.0;
    return std::max(0.0, -0.5 * std::log(2.0 * lam_min));
}

// Smallest symplectic eigenvalue of the partially transposed two-mode
// dimensionless cm, ordering (q1, q2, p1, p2).
double log_negativity_dimensionless(const Eigen::Matrix4d& st) {
    Eigen::Matrix2d a, b, c;
    a << st(0, 0), st(0, 2), st(2, 0), st(2, 2);
    b << st(1, 1), st(1, 3), st(3, 1), st(3, 3);
    c << st(0, 1), st(0, 3), st(2, 1), st(2, 3);
    const double det_sigma = st.determinant();
    const double delta_pt = a.determinant() + b.determinant() - 2.0 * c.determinant();
    const double disc = std::max(0.0, delta_pt * delta_pt - 4.0 * det_sigma);
    const double nu2 = 0.5 * (delta_pt - std::sqrt(disc));
    if (nu2 <= 0.0) return 0.0;
    const double nu = std::sqrt(nu2);
    return std::max(0.0, -std::log(2.0 * nu));
}

enum class Resource { none, squeezing, displacement };

Resource resource_of(const GaussianState& payload) {
    if (squeezing_of(payload) > 1e-12) return Resource::squeezing;
    if (displacement_of(payload) > 1e-12) return Resource::displacement;
    return Resource::none;
}

// ---- fast composite sampling ------------------------------------------------

// State rotated to the composite normal-mode frame; marginals of a few
// physical modes are then O(N^2) per time sample.
struct FrameState {
    const NormalModeBasis* basis;
    Eigen::MatrixXd sigma_hat;
    Eigen::VectorXd m_hat;

    FrameState(const NormalModeBasis& b, const Eigen::MatrixXd& cm, const Eigen::VectorXd& u)
        : basis(&b) {
        const int n = b.size();
        sigma_hat.resize(2 * n, 2 * n);
        Eigen::MatrixXd tmp(2 * n, 2 * n);
        tmp.topRows(n) = b.K.transpose() * cm.topRows(n);
        tmp.bottomRows(n) = b.K.transpose() * cm.bottomRows(n);
        sigma_hat.leftCols(n) = tmp.leftCols(n) * b.K;
        sigma_hat.rightCols(n) = tmp.rightCols(n) * b.K;
        m_hat.resize(2 * n);
        m_hat.head(n) = b.K.transpose() * u.head(n);
        m_hat.tail(n) = b.K.transpose() * u.tail(n);
    }

    // Marginal cm ((q.., p..) ordering) and means of the selected physical
    // modes after evolving for time t.
    void sample(double t, const std::vector<int>& modes, Eigen::MatrixXd& cm_out,
                Eigen::VectorXd& u_out) const {
        const int n = basis->size();
        const int k = static_cast<int>(modes.size());
        Eigen::ArrayXd wt = basis->Omega.array() * t;
        Eigen::ArrayXd cos_wt = wt.cos();
        Eigen::ArrayXd sin_wt = wt.sin();
        Eigen::MatrixXd v(2 * k, 2 * n);
        for (int a = 0; a < k; ++a) {
            Eigen::ArrayXd row = basis->K.row(modes[a]).transpose().array();
            v.row(a).head(n) = (row * cos_wt).matrix();
            v.row(a).tail(n) = (row * sin_wt / basis->Omega.array()).matrix();
            v.row(k + a).head(n) = (-row * sin_wt * basis->Omega.array()).matrix();
            v.row(k + a).tail(n) = (row * cos_wt).matrix();
        }
        cm_out.noalias() = v * sigma_hat * v.transpose();
        u_out.noalias() = v * m_hat;
    }
};

Eigen::Matrix2d rescale2(const Eigen::MatrixXd& cm, double omega) {
    Eigen::Matrix2d out;
    out(0, 0) = cm(0, 0) * omega;
    out(0, 1) = cm(0, 1);
    out(1, 0) = cm(1, 0);
    out(1, 1) = cm(1, 1) / omega;
    return out;
}

Eigen::Vector2d rescale2_means(const Eigen::VectorXd& u, double omega) {
    return {u(0) * std::sqrt(omega), u(1) / std::sqrt(omega)};
}

std::vector<double> window_grid(double t_nominal, const WindowSpec& w) {
    if (w.samples < 1) throw InvalidParameter("window needs at least one sample");
    std::vector<double> ts(w.samples);
    if (w.samples == 1) {
        ts[0] = t_nominal;
        return ts;
    }
    for (int i = 0; i < w.samples; ++i)
        ts[i] = t_nominal + w.length * static_cast<double>(i) / (w.samples - 1);
    return ts;
}

// Initial composite state: network ground state, payload on the sender
// external, vacuum on every other external.
void build_initial(const NetworkContext& net, const CompositeSystem& sys, int sender_ext,
                   const GaussianState& payload_at_ws, Eigen::MatrixXd& cm, Eigen::VectorXd& u,
                   Eigen::VectorXd& freqs) {
    const int n = net.graph.n;
    const int nt = sys.total_modes();
    cm = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
    u = Eigen::VectorXd::Zero(2 * nt);
    freqs = sys.bare_frequencies();
    std::vector<int> net_modes(n);
    for (int i = 0; i < n; ++i) net_modes[i] = i;
    embed_state(cm, u, freqs, net.ground, net_modes);
    for (int e = 0; e < static_cast<int>(sys.externals.size()); ++e) {
        if (n + e == sender_ext) continue;
        embed_state(cm, u, freqs, squeezed_vacuum(0.0, 0.0, sys.externals[e].omega), {n + e});
    }
    embed_state(cm, u, freqs, payload_at_ws, {sender_ext});
}

}  // namespace

ProtocolParams single_step_params(double omega, int c3) {
    if (c3 < 1) throw InvalidParameter("c3 must be >= 1");
    if (omega <= 0.0) throw InvalidFrequency("omega must be positive");
    ProtocolParams p;
    p.kind = ProtocolKind::single_step;
    p.c = c3;
    p.omega_res = omega;
    p.g_eff = std::sqrt(2.0) * omega * omega / (2.0 * c3 + 1.0);
    p.t_stage = (2.0 * c3 + 1.0) * M_PI / omega;
    return p;
}

ProtocolParams two_step_params(double omega, int c2) {
    if (c2 < 1) throw InvalidParameter("c2 must be >= 1");
    if (omega <= 0.0) throw InvalidFrequency("omega must be positive");
    ProtocolParams p;
    p.kind = ProtocolKind::two_step;
    p.c = c2;
    p.omega_res = omega;
    const double c = c2;
    p.g_eff = (1.0 + 2.0 * c) * omega * omega / (1.0 + 2.0 * c + 2.0 * c * c);
    p.t_stage = std::sqrt(0.5 + c + c * c) * M_PI / omega;
    return p;
}

AsymptoticRatios asymptotic_ratios(int c) {
    if (c < 1) throw InvalidParameter("c must be >= 1");
    AsymptoticRatios r;
    const double odd = 2.0 * c + 1.0;
    r.t2_over_t1 = std::sqrt(1.0 + 1.0 / (odd * odd));
    r.g2_over_sqrt2_g1 = 1.0 - 1.0 / (2.0 + 4.0 * static_cast<double>(c) * (1.0 + c));
    return r;
}

double required_k(double g_eff, double overlap) {
    if (std::abs(overlap) < kOverlapFloor)
        throw NodeDecoupledFromMode("node-mode overlap below " + std::to_string(kOverlapFloor));
    return g_eff / overlap;
}

NetworkContext::NetworkContext(Graph graph_, double omega0_, double g_)
    : graph(std::move(graph_)), omega0(omega0_), g(g_),
      basis(normal_modes(omega0_ * omega0_ * Eigen::MatrixXd::Identity(graph.n, graph.n) +
                         g_ * laplacian(graph))),
      ground(ground_state(basis, Eigen::VectorXd::Constant(graph.n, omega0_))) {}

TransferResult run_single_step(const NetworkContext& net, int sender_node, int receiver_node,
                               int mode_index, int c3, const GaussianState& payload,
                               const WindowSpec& window) {
    if (sender_node == receiver_node)
        throw InvalidParameter("sender and receiver must differ");
    if (payload.n_modes() != 1) throw IncompatibleStates("payload must be single-mode");
    const double omega_res = net.basis.Omega(mode_index);
    ProtocolParams params = single_step_params(omega_res, c3);
    params.mode_index = mode_index;
    const double ks = required_k(params.g_eff, mode_overlap(net.basis, sender_node, mode_index));
    const double kr = required_k(params.g_eff, mode_overlap(net.basis, receiver_node, mode_index));

    CompositeSystem sys(net.graph, net.omega0, net.g,
                        {{sender_node, ks, omega_res}, {receiver_node, kr, omega_res}});
    NormalModeBasis basis = normal_modes(potential_matrix(sys));

    const int n = net.graph.n;
    GaussianState payload_ws = payload.at_frequency(omega_res);
    Eigen::MatrixXd cm0;
    Eigen::VectorXd u0, freqs;
    build_initial(net, sys, n, payload_ws, cm0, u0, freqs);
    FrameState frame(basis, cm0, u0);

    SingleModeTarget target = make_target(payload_ws);
    const Resource res = resource_of(payload);
    const double r0 = res == Resource::squeezing ? squeezing_of(payload) : 0.0;
    const double a0 = res == Resource::displacement ? displacement_of(payload) : 0.0;

    TransferResult out;
    out.mode_index = mode_index;
    out.sender_node = sender_node;
    out.receiver_node = receiver_node;
    out.params = params;
    out.metadata.degenerate = basis.degenerate;
    out.metadata.k_sender = ks;
    out.metadata.k_receiver = kr;
    out.t_best = params.t_stage;

    Eigen::MatrixXd marg;
    Eigen::VectorXd mu;
    bool first = true;
    for (double t : window_grid(params.t_stage, window)) {
        frame.sample(t, {n + 1}, marg, mu);
        Eigen::Matrix2d st = rescale2(marg, omega_res);
        Eigen::Vector2d du = rescale2_means(mu, omega_res);
        const double f = fidelity_vs_target(st, du, target);
        double eff = 1.0;
        if (res == Resource::squeezing) eff = squeezing_dimensionless(st) / r0;
        else if (res == Resource::displacement) eff = du.norm() / std::sqrt(2.0) / a0;
        if (first) {
            out.fidelity_at_nominal = f;
            out.efficiency_at_nominal = eff;
            first = false;
        }
        if (f > out.fidelity_best) {
            out.fidelity_best = f;
            out.t_best = t;
        }
        out.efficiency = std::max(out.efficiency, eff);
    }
    return out;
}

TransferResult run_single_step(const Graph& graph, double omega0, double g, int sender_node,
                               int receiver_node, int mode_index, int c3,
                               const GaussianState& payload, const WindowSpec& window) {
    NetworkContext net(graph, omega0, g);
    return run_single_step(net, sender_node, receiver_node, mode_index, c3, payload, window);
}

TransferResult run_two_step(const NetworkContext& net, int sender_node, int receiver_node,
                            int mode_index, int c2, const GaussianState& payload,
                            const WindowSpec& window) {
    if (sender_node == receiver_node)
        throw InvalidParameter("sender and receiver must differ");
    if (payload.n_modes() != 1) throw IncompatibleStates("payload must be single-mode");
    const double omega_res = net.basis.Omega(mode_index);
    ProtocolParams params = two_step_params(omega_res, c2);
    params.mode_index = mode_index;
    const double ks = required_k(params.g_eff, mode_overlap(net.basis, sender_node, mode_index));
    const double kr = required_k(params.g_eff, mode_overlap(net.basis, receiver_node, mode_index));

    const int n = net.graph.n;
    // Stage 1: only the sender coupled.  Stage 2: only the receiver.
    CompositeSystem sys1(net.graph, net.omega0, net.g,
                         {{sender_node, ks, omega_res}, {receiver_node, 0.0, omega_res}});
    CompositeSystem sys2(net.graph, net.omega0, net.g,
                         {{sender_node, 0.0, omega_res}, {receiver_node, kr, omega_res}});
    NormalModeBasis basis1 = normal_modes(potential_matrix(sys1));
    NormalModeBasis basis2 = normal_modes(potential_matrix(sys2));

    GaussianState payload_ws = payload.at_frequency(omega_res);
    Eigen::MatrixXd cm0;
    Eigen::VectorXd u0, freqs;
    build_initial(net, sys1, n, payload_ws, cm0, u0, freqs);

    Eigen::MatrixXd s1 = propagator(basis1, params.t_stage);
    Eigen::MatrixXd cm1 = s1 * cm0 * s1.transpose();
    Eigen::VectorXd u1 = s1 * u0;
    FrameState frame(basis2, cm1, u1);

    SingleModeTarget target = make_target(payload_ws);
    const Resource res = resource_of(payload);
    const double r0 = res == Resource::squeezing ? squeezing_of(payload) : 0.0;
    const double a0 = res == Resource::displacement ? displacement_of(payload) : 0.0;

    TransferResult out;
    out.mode_index = mode_index;
    out.sender_node = sender_node;
    out.receiver_node = receiver_node;
    out.params = params;
    out.metadata.degenerate = basis1.degenerate || basis2.degenerate;
    out.metadata.k_sender = ks;
    out.metadata.k_receiver = kr;
    out.t_best = 2.0 * params.t_stage;

    Eigen::MatrixXd marg;
    Eigen::VectorXd mu;
    bool first = true;
    for (double tau : window_grid(params.t_stage, window)) {
        frame.sample(tau, {n + 1}, marg, mu);
        Eigen::Matrix2d st = rescale2(marg, omega_res);
        Eigen::Vector2d du = rescale2_means(mu, omega_res);
        const double f = fidelity_vs_target(st, du, target);
        double eff = 1.0;
        if (res == Resource::squeezing) eff = squeezing_dimensionless(st) / r0;
        else if (res == Resource::displacement) eff = du.norm() / std::sqrt(2.0) / a0;
        if (first) {
            out.fidelity_at_nominal = f;
            out.efficiency_at_nominal = eff;
            first = false;
        }
        if (f > out.fidelity_best) {
            out.fidelity_best = f;
            out.t_best = params.t_stage + tau;
        }
        out.efficiency = std::max(out.efficiency, eff);
    }
    return out;
}

TransferResult run_two_step(const Graph& graph, double omega0, double g, int sender_node,
                            int receiver_node, int mode_index, int c2,
                            const GaussianState& payload, const WindowSpec& window) {
    NetworkContext net(graph, omega0, g);
    return run_two_step(net, sender_node, receiver_node, mode_index, c2, payload, window);
}

TransferResult run_entanglement_transfer(const NetworkContext& net, int sender_node,
                                         int receiver_node, int mode_index, int c3, double s,
                                         double phi, const WindowSpec& window) {
    if (sender_node == receiver_node)
        throw InvalidParameter("sender and receiver must differ");
    const int n = net.graph.n;
    int anc_node = -1;
    for (int v = 0; v < n; ++v)
        if (v != sender_node && v != receiver_node) {
            anc_node = v;
            break;
        }
    if (anc_node < 0) throw InvalidParameter("entanglement transfer needs a third network node");

    const double omega_res = net.basis.Omega(mode_index);
    ProtocolParams params = single_step_params(omega_res, c3);
    params.mode_index = mode_index;
    const double ks = required_k(params.g_eff, mode_overlap(net.basis, sender_node, mode_index));
    const double kr = required_k(params.g_eff, mode_overlap(net.basis, receiver_node, mode_index));

    // Externals: sender, receiver, and a fully decoupled ancilla.
    CompositeSystem sys(net.graph, net.omega0, net.g,
                        {{sender_node, ks, omega_res},
                         {receiver_node, kr, omega_res},
                         {anc_node, 0.0, omega_res}});
    NormalModeBasis basis = normal_modes(potential_matrix(sys));

    const int nt = sys.total_modes();
    Eigen::MatrixXd cm0 = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(2 * nt);
    Eigen::VectorXd freqs = sys.bare_frequencies();
    std::vector<int> net_modes(n);
    for (int i = 0; i < n; ++i) net_modes[i] = i;
    embed_state(cm0, u0, freqs, net.ground, net_modes);
    embed_state(cm0, u0, freqs, squeezed_vacuum(0.0, 0.0, omega_res), {n + 1});
    // Twin beam on (ancilla, sender).
    embed_state(cm0, u0, freqs, two_mode_squeezed(s, phi, omega_res), {n + 2, n});
    FrameState frame(basis, cm0, u0);

    GaussianState target = two_mode_squeezed(s, phi + M_PI, omega_res);
    Eigen::Matrix4d tgt_cm = target.dimensionless_cm();
    const double en0 = 2.0 * s;

    TransferResult out;
    out.mode_index = mode_index;
    out.sender_node = sender_node;
    out.receiver_node = receiver_node;
    out.params = params;
    out.metadata.degenerate = basis.degenerate;
    out.metadata.k_sender = ks;
    out.metadata.k_receiver = kr;
    out.t_best = params.t_stage;

    Eigen::MatrixXd marg;
    Eigen::VectorXd mu;
    Eigen::Vector4d scale;
    scale << std::sqrt(omega_res), std::sqrt(omega_res), 1.0 / std::sqrt(omega_res),
        1.0 / std::sqrt(omega_res);
    bool first = true;
    for (double t : window_grid(params.t_stage, window)) {
        frame.sample(t, {n + 2, n + 1}, marg, mu);  // (ancilla, receiver)
        Eigen::Matrix4d st = scale.asDiagonal() * marg * scale.asDiagonal();
        Eigen::Vector4d du = scale.asDiagonal() * mu;
        // Overlap fidelity against the pure orthogonal-phase twin beam.
        Eigen::Matrix4d sum = st + tgt_cm;
        const double f =
            std::min(1.0, std::exp(-0.5 * du.dot(sum.inverse() * du)) /
                              std::sqrt(sum.determinant()));
        const double eff = en0 > 0.0 ? log_negativity_dimensionless(st) / en0 : 1.0;
        if (first) {
            out.fidelity_at_nominal = f;
            out.efficiency_at_nominal = eff;
            first = false;
        }
        if (f > out.fidelity_best) {
            out.fidelity_best = f;
            out.t_best = t;
        }
        out.efficiency = std::max(out.efficiency, eff);
    }
    return out;
}

double ideal_nominal_time(IdealChainKind kind, int c, double omega) {
    if (kind == IdealChainKind::two_step) return 2.0 * two_step_params(omega, c).t_stage;
    return single_step_params(omega, c).t_stage;
}

std::vector<TrajectoryPoint> ideal_chain_run(IdealChainKind kind, int c,
                                             const GaussianState& payload,
                                             const std::vector<double>& time_grid) {
    const double omega = payload.freqs()(0);
    std::vector<TrajectoryPoint> out;
    out.reserve(time_grid.size());

    if (kind == IdealChainKind::two_step) {
        ProtocolParams params = two_step_params(omega, c);
        if (payload.n_modes() != 1) throw IncompatibleStates("payload must be single-mode");
        const double g = params.g_eff, ts = params.t_stage;
        auto chain = [&](std::initializer_list<std::pair<int, int>> edges) {
            Eigen::Matrix3d m = omega * omega * Eigen::Matrix3d::Identity();
            for (auto [i, j] : edges) {
                m(i, j) -= g;
                m(j, i) -= g;
            }
            return normal_modes(m);
        };
        NormalModeBasis b1 = chain({{0, 1}});
        NormalModeBasis b2 = chain({{1, 2}});
        GaussianState vac = squeezed_vacuum(0.0, 0.0, omega);
        GaussianState init = tensor_product({payload, vac, vac});
        SingleModeTarget target = make_target(payload);
        const Resource res = resource_of(payload);
        const double r0 = res == Resource::squeezing ? squeezing_of(payload) : 0.0;
        const double a0 = res == Resource::displacement ? displacement_of(payload) : 0.0;
        Eigen::MatrixXd s1_full = propagator(b1, ts);
        Eigen::MatrixXd cm_mid = s1_full * init.cm() * s1_full.transpose();
        Eigen::VectorXd u_mid = s1_full * init.means();
        FrameState stage1(b1, init.cm(), init.means());
        FrameState stage2(b2, cm_mid, u_mid);
        Eigen::MatrixXd marg;
        Eigen::VectorXd mu;
        for (double t : time_grid) {
            if (t <= ts) stage1.sample(t, {2}, marg, mu);
            else stage2.sample(t - ts, {2}, marg, mu);
            Eigen::Matrix2d st = rescale2(marg, omega);
            Eigen::Vector2d du = rescale2_means(mu, omega);
            double eff = 1.0;
            if (res == Resource::squeezing) eff = squeezing_dimensionless(st) / r0;
            else if (res == Resource::displacement) eff = du.norm() / std::sqrt(2.0) / a0;
            out.push_back({t, fidelity_vs_target(st, du, target), eff});
        }
        return out;
    }

    if (kind == IdealChainKind::single_step) {
        if (payload.n_modes() != 1) throw IncompatibleStates("payload must be single-mode");
        ProtocolParams params = single_step_params(omega, c);
        Eigen::Matrix3d m = omega * omega * Eigen::Matrix3d::Identity();
        m(0, 1) = m(1, 0) = -params.g_eff;
        m(1, 2) = m(2, 1) = -params.g_eff;
        NormalModeBasis basis = normal_modes(m);
        GaussianState vac = squeezed_vacuum(0.0, 0.0, omega);
        GaussianState init = tensor_product({payload, vac, vac});
        FrameState frame(basis, init.cm(), init.means());
        SingleModeTarget target = make_target(payload);
        const Resource res = resource_of(payload);
        const double r0 = res == Resource::squeezing ? squeezing_of(payload) : 0.0;
        const double a0 = res == Resource::displacement ? displacement_of(payload) : 0.0;
        Eigen::MatrixXd marg;
        Eigen::VectorXd mu;
        for (double t : time_grid) {
            frame.sample(t, {2}, marg, mu);
            Eigen::Matrix2d st = rescale2(marg, omega);
            Eigen::Vector2d du = rescale2_means(mu, omega);
            double eff = 1.0;
            if (res == Resource::squeezing) eff = squeezing_dimensionless(st) / r0;
            else if (res == Resource::displacement) eff = du.norm() / std::sqrt(2.0) / a0;
            out.push_back({t, fidelity_vs_target(st, du, target), eff});
        }
        return out;
    }

    // Entanglement: decoupled ancilla + sender-mode-receiver chain.
    if (payload.n_modes() != 2)
        throw IncompatibleStates("entanglement payload must be a two-mode twin beam");
    ProtocolParams params = single_step_params(omega, c);
    Eigen::Matrix4d m = omega * omega * Eigen::Matrix4d::Identity();
    m(1, 2) = m(2, 1) = -params.g_eff;
    m(2, 3) = m(3, 2) = -params.g_eff;
    NormalModeBasis basis = normal_modes(m);

    // Recover (s, phi) from the twin-beam covariance to build the
    // orthogonal-phase target.
    Eigen::Matrix4d pcm = payload.dimensionless_cm();
    const double zc = 2.0 * pcm(0, 1);
    const double zs = 2.0 * pcm(0, 3);
    const double s_par = 0.5 * std::asinh(std::sqrt(zc * zc + zs * zs));
    const double phi = (zc == 0.0 && zs == 0.0) ? 0.0 : std::atan2(zs, zc);
    GaussianState target = two_mode_squeezed(s_par, phi + M_PI, omega);
    Eigen::Matrix4d tgt_cm = target.dimensionless_cm();
    const double en0 = 2.0 * s_par;

    GaussianState vac = squeezed_vacuum(0.0, 0.0, omega);
    const int nt = 4;
    Eigen::MatrixXd cm0 = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(2 * nt);
    Eigen::VectorXd freqs = Eigen::VectorXd::Constant(nt, omega);
    embed_state(cm0, u0, freqs, payload, {0, 1});
    embed_state(cm0, u0, freqs, vac, {2});
    embed_state(cm0, u0, freqs, vac, {3});
    FrameState frame(basis, cm0, u0);

    Eigen::Vector4d scale;
    scale << std::sqrt(omega), std::sqrt(omega), 1.0 / std::sqrt(omega), 1.0 / std::sqrt(omega);
    Eigen::MatrixXd marg;
    Eigen::VectorXd mu;
    for (double t : time_grid) {
        frame.sample(t, {0, 3}, marg, mu);
        Eigen::Matrix4d st = scale.asDiagonal() * marg * scale.asDiagonal();
        Eigen::Vector4d du = scale.asDiagonal() * mu;
        Eigen::Matrix4d sum = st + tgt_cm;
        const double f = std::min(
            1.0, std::exp(-0.5 * du.dot(sum.inverse() * du)) / std::sqrt(sum.determinant()));
        const double eff = en0 > 0.0 ? log_negativity_dimensionless(st) / en0 : 1.0;
        out.push_back({t, f, eff});
    }
    return out;
}

}  // namespace gaussnet
