#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaussnet/dynamics.hpp"

using namespace gaussnet;

namespace {

Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return omega;
}

CompositeSystem random_system(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> up(0.2, 0.8);
    Graph g = erdos_renyi(n, up(rng), rng());
    std::vector<ExternalOscillator> ext;
    if (rng() & 1) ext.push_back({0, 0.2, 1.3});
    return CompositeSystem(std::move(g), 1.0, 0.7, std::move(ext));
}

}  // namespace

TEST_CASE("potential matrix layout") {
    CompositeSystem lone(Graph(2, {}), 2.0, 1.0);
    Eigen::MatrixXd m = potential_matrix(lone);
    CHECK((m - 4.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    // One node with one external: 2x2 coupling block.
    CompositeSystem pair(Graph(1, {}), 1.5, 1.0, {{0, 0.4, 1.5}});
    Eigen::MatrixXd mp = potential_matrix(pair);
    CHECK(mp(0, 1) == doctest::Approx(-0.4));
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mp).eigenvalues();
    CHECK(ev(0) == doctest::Approx(1.5 * 1.5 - 0.4).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(1.5 * 1.5 + 0.4).epsilon(1e-12));

    // Network block is omega0^2 I + g L.
    Graph g = erdos_renyi(30, 0.5, 3);
    CompositeSystem net(g, 1.0, 1.0);
    Eigen::MatrixXd mn = potential_matrix(net);
    CHECK((mn - Eigen::MatrixXd::Identity(30, 30) - laplacian(g)).cwiseAbs().maxCoeff() < 1e-14);

    // Excessive coupling drives the matrix indefinite.
    CompositeSystem bad(Graph(1, {}), 1.0, 1.0, {{0, 5.0, 1.0}});
    CHECK_THROWS_AS(potential_matrix(bad), NonPhysicalCoupling);
    CHECK_THROWS_AS(CompositeSystem(Graph(2, {{0, 1}}), 1.0, 1.0,
                                    {{0, 0.1, 1.0}, {0, 0.1, 1.0}}),
                    InvalidParameter);
}

TEST_CASE("normal modes of simple systems") {
    // 2-node chain, omega0 = 1, g = 1: Omega = {1, sqrt(3)}.
    CompositeSystem chain(Graph(2, {{0, 1}}), 1.0, 1.0);
    NormalModeBasis b = normal_modes(potential_matrix(chain));
    CHECK(b.Omega(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.Omega(1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK((b.K.transpose() * b.K - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-10);

    // Uniform 3-chain with edge coupling g: Omega^2 = w^2 -/+ sqrt(2) g.
    const double w = 1.0, g = 0.3;
    Eigen::Matrix3d m = w * w * Eigen::Matrix3d::Identity();
    m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = -g;
    NormalModeBasis b3 = normal_modes(m);
    CHECK(b3.Omega(0) == doctest::Approx(std::sqrt(w * w - std::sqrt(2.0) * g)).epsilon(1e-12));
    CHECK(b3.Omega(1) == doctest::Approx(w).epsilon(1e-12));
    CHECK(b3.Omega(2) == doctest::Approx(std::sqrt(w * w + std::sqrt(2.0) * g)).epsilon(1e-12));

    // Slowest mode of a connected isolated network is uniform 1/sqrt(n).
    Graph er = erdos_renyi(12, 0.6, 11);
    REQUIRE(er.is_connected());
    CompositeSystem sys(er, 1.3, 0.8);
    NormalModeBasis bn = normal_modes(potential_matrix(sys));
    for (int i = 0; i < 12; ++i)
        CHECK(bn.K(i, 0) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-9));
    CHECK(bn.Omega(0) == doctest::Approx(1.3).epsilon(1e-10));

    // Mode overlaps are rows of an orthogonal matrix.
    double row_norm = 0.0;
    for (int mcol = 0; mcol < 12; ++mcol) {
        const double o = mode_overlap(bn, 3, mcol);
        row_norm += o * o;
    }
    CHECK(row_norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(mode_overlap(bn, 99, 0), std::out_of_range);
}

TEST_CASE("frequency mapping on random graphs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uw(0.3, 2.0), ug(0.1, 1.5), up(0.2, 0.9);
    for (int it = 0; it < 20; ++it) {
        const double w0 = uw(rng), g = ug(rng);
        Graph graph = erdos_renyi(10 + static_cast<int>(rng() % 8), up(rng), rng());
        Eigen::VectorXd lam =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(laplacian(graph)).eigenvalues();
        CompositeSystem sys(graph, w0, g);
        NormalModeBasis b = normal_modes(potential_matrix(sys));
        for (int i = 0; i < graph.n; ++i)
            CHECK(b.Omega(i) * b.Omega(i) ==
                  doctest::Approx(w0 * w0 + g * lam(i)).epsilon(1e-10));
    }
}

TEST_CASE("propagator properties") {
    std::mt19937_64 rng(5);
    CompositeSystem sys = random_system(rng, 10);
    NormalModeBasis b = normal_modes(potential_matrix(sys));
    const int nt = b.size();

    Eigen::MatrixXd s0 = propagator(b, 0.0);
    CHECK((s0 - Eigen::MatrixXd::Identity(2 * nt, 2 * nt)).cwiseAbs().maxCoeff() < 1e-12);

    // Symplecticity and the group property at random times.
    std::uniform_real_distribution<double> ut(0.0, 20.0);
    Eigen::MatrixXd form = symplectic_form(nt);
    for (int it = 0; it < 5; ++it) {
        const double t1 = ut(rng), t2 = ut(rng);
        Eigen::MatrixXd s1 = propagator(b, t1);
        CHECK((s1.transpose() * form * s1 - form).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::MatrixXd s12 = propagator(b, t1 + t2);
        CHECK((s12 - s1 * propagator(b, t2)).cwiseAbs().maxCoeff() < 1e-9);
    }

    // Single free oscillator is periodic.
    CompositeSystem lone(Graph(1, {}), 0.7, 1.0);
    NormalModeBasis bl = normal_modes(potential_matrix(lone));
    Eigen::MatrixXd sp = propagator(bl, 2.0 * M_PI / 0.7);
    CHECK((sp - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(propagator(bl, -1.0), InvalidParameter);
}

TEST_CASE("ground state is pure and stationary") {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 5; ++it) {
        CompositeSystem sys = random_system(rng, 8);
        Eigen::MatrixXd m = potential_matrix(sys);
        NormalModeBasis b = normal_modes(m);
        GaussianState gs = ground_state(b, sys.bare_frequencies());
        auto nu = symplectic_eigenvalues(gs);
        for (double v : nu) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));

        std::uniform_real_distribution<double> ut(0.1, 15.0);
        GaussianState evolved = evolve(gs, propagator(b, ut(rng)));
        CHECK((evolved.cm() - gs.cm()).cwiseAbs().maxCoeff() < 1e-10);
    }

    // Empty graph: product of vacua at omega0.
    CompositeSystem lone(Graph(3, {}), 1.4, 1.0);
    NormalModeBasis bl = normal_modes(potential_matrix(lone));
    GaussianState gs = ground_state(bl, lone.bare_frequencies());
    CHECK(gs.cm()(0, 0) == doctest::Approx(0.5 / 1.4).epsilon(1e-12));
    CHECK(gs.cm()(3, 3) == doctest::Approx(0.5 * 1.4).epsilon(1e-12));
}

TEST_CASE("evolution preserves energy, purity and uncertainty") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ut(0.1, 30.0);
    for (int it = 0; it < 5; ++it) {
        CompositeSystem sys = random_system(rng, 7);
        Eigen::MatrixXd m = potential_matrix(sys);
        NormalModeBasis b = normal_modes(m);
        const int nt = b.size();

        // Excited pure initial state: displaced ground state.
        GaussianState gs = ground_state(b, sys.bare_frequencies());
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * nt);
        u(0) = 0.8;
        u(nt) = -0.3;
        GaussianState init(gs.cm(), u, gs.freqs());

        const double e0 = mean_energy(init, m);
        for (int k = 0; k < 3; ++k) {
            GaussianState st = evolve(init, propagator(b, ut(rng)));
            CHECK(mean_energy(st, m) == doctest::Approx(e0).epsilon(1e-8));
            auto nu = symplectic_eigenvalues(st);
            CHECK(nu.front() >= 0.5 - 1e-9);
            CHECK(nu.back() <= 0.5 + 1e-9);
        }
    }

    // Coherent state on a free oscillator rotates at omega.
    CompositeSystem lone(Graph(1, {}), 2.0, 1.0);
    NormalModeBasis bl = normal_modes(potential_matrix(lone));
    GaussianState c = coherent({1.0, 0.0}, 2.0);
    const double t = 0.37;
    GaussianState moved = evolve(c, propagator(bl, t));
    CHECK(displacement_of(moved) == doctest::Approx(1.0).epsilon(1e-10));
    // alpha(t) = alpha e^{-i w t}: q~ picks up cos, p~ picks up -sin.
    Eigen::Vector2d want(std::sqrt(2.0) * std::cos(2.0 * t),
                         -std::sqrt(2.0) * std::sin(2.0 * t));
    CHECK((moved.dimensionless_means() - want).norm() < 1e-10);

    CHECK_THROWS_AS(evolve(c, propagator(bl, 0.0).topLeftCorner(1, 1)), IncompatibleStates);
}

TEST_CASE("disconnected graphs are permitted and flagged degenerate") {
    Graph two_cliques(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    CompositeSystem sys(two_cliques, 1.0, 1.0);
    NormalModeBasis b = normal_modes(potential_matrix(sys));
    CHECK(b.degenerate);
    CHECK(b.Omega(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.Omega(1) == doctest::Approx(1.0).epsilon(1e-12));
}
