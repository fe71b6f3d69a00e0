#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gaussnet/routing.hpp"

using namespace gaussnet;

namespace {

// Hand-built tensor with constant fidelity and constant times.
FidelityTensor uniform_tensor(int n, int n_modes, double f, double t) {
    std::vector<int> modes(n_modes);
    std::vector<double> times(n_modes, t);
    for (int m = 0; m < n_modes; ++m) modes[m] = m;
    FidelityTensor tensor(n, modes, times, FidelityKind::nominal, false, 0);
    for (int m = 0; m < n_modes; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) tensor.set(m, i, j, f);
    return tensor;
}

Graph connected_er(int n, double p, uint64_t seed) {
    for (uint64_t k = 0;; ++k) {
        Graph g = erdos_renyi(n, p, seed + k);
        if (g.is_connected()) return g;
    }
}

}  // namespace

TEST_CASE("tensor storage and serialization") {
    FidelityTensor t(4, {0, 2}, {3.0, 1.5}, FidelityKind::window_max, true, 99);
    t.set(0, 1, 2, 0.75);
    t.set(2, 0, 3, 0.5);
    t.mark_infeasible(2, 1, 3);
    CHECK(t.get(0, 2, 1) == 0.75);  // unordered pair
    CHECK(t.has(0, 1, 2));
    CHECK_FALSE(t.has(0, 0, 1));
    CHECK(t.get_or_zero(0, 0, 1) == 0.0);
    CHECK_THROWS_AS(t.get(0, 0, 1), IncompleteTensor);
    CHECK(t.get(2, 1, 3) == 0.0);
    CHECK(t.infeasible_count() == 1);
    CHECK(t.time_of(2) == 1.5);
    CHECK_THROWS_AS(t.set(1, 0, 1, 0.1), std::out_of_range);

    FidelityTensor back = FidelityTensor::from_json(t.to_json());
    CHECK(back.n_nodes() == 4);
    CHECK(back.get(0, 1, 2) == 0.75);
    CHECK_FALSE(back.has(0, 0, 1));
    CHECK(back.kind() == FidelityKind::window_max);
    CHECK(back.filtered());
    CHECK(back.graph_hash() == 99);

    t.write_csv("routing_tmp.csv");
    std::ifstream in("routing_tmp.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "mode,i,j,fidelity,time");
    std::remove("routing_tmp.csv");
}

TEST_CASE("tensor construction matches standalone runs") {
    Graph g = connected_er(6, 0.7, 19);
    NetworkContext net(g, 1.0, 1.0);
    auto payload = squeezed_vacuum(1.0, 0.0, 1.0);

    TensorConfig tc;
    tc.c3 = 7;
    tc.modes = {0};
    tc.kind = FidelityKind::window_max;
    tc.window = {4.0, 50};
    FidelityTensor tensor = pairwise_fidelity_tensor(net, payload, tc);

    auto direct = run_single_step(net, 1, 4, 0, 7, payload, {4.0, 50});
    CHECK(tensor.get(0, 1, 4) == doctest::Approx(direct.fidelity_best).epsilon(1e-12));
    CHECK(tensor.time_of(0) ==
          doctest::Approx(single_step_params(net.basis.Omega(0), 7).t_stage).epsilon(1e-12));

    // Parallel construction is bit-identical to serial.
    tc.workers = 2;
    FidelityTensor par = pairwise_fidelity_tensor(net, payload, tc);
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) CHECK(par.get(0, i, j) == tensor.get(0, i, j));
}

TEST_CASE("node capacity") {
    auto zero = uniform_tensor(5, 5, 0.0, 2.0);
    auto cz = node_capacity(zero);
    for (double v : cz) CHECK(v == 0.0);

    const int n = 6, n_modes = 6;
    const double t = 3.0;
    auto uni = uniform_tensor(n, n_modes, 1.0, t);
    auto cu = node_capacity(uni);
    for (double v : cu) CHECK(v == doctest::Approx((n - 1) * n_modes / t).epsilon(1e-12));

    // Sum identity: sum_i C_i double-counts each unordered pair.
    double lhs = 0.0;
    for (double v : cu) lhs += v;
    double rhs = 0.0;
    for (int m = 0; m < n_modes; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) rhs += 2.0 * uni.get(m, i, j) / t;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    FidelityTensor filtered(4, {0}, {1.0}, FidelityKind::nominal, true, 0);
    CHECK_THROWS_AS(node_capacity(filtered), IncompleteTensor);
}

TEST_CASE("max capacity") {
    auto zero = uniform_tensor(5, 5, 0.0, 2.0);
    CHECK(max_capacity(zero) == 0.0);

    FidelityTensor t(4, {0}, {2.0}, FidelityKind::nominal, false, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) t.set(0, i, j, 0.1 * (i + j));
    CHECK(max_capacity(t) == doctest::Approx(0.1 * 5 / 2.0).epsilon(1e-12));

    // Filtering can only lower the reported maximum.
    Graph g = connected_er(8, 0.6, 4);
    NetworkContext net(g, 1.0, 1.0);
    auto payload = coherent({0.75, 0.0}, 1.0);
    TensorConfig full;
    full.c3 = 5;
    full.kind = FidelityKind::nominal;
    TensorConfig cut = full;
    cut.filter.top_overlap = 4;
    CHECK(max_capacity(pairwise_fidelity_tensor(net, payload, cut)) <=
          max_capacity(pairwise_fidelity_tensor(net, payload, full)) + 1e-12);
}

TEST_CASE("good transfer fraction") {
    auto t = uniform_tensor(5, 3, 0.9, 1.0);
    auto f0 = good_transfer_fraction(t, 0.0);
    for (double v : f0) CHECK(v == 1.0);
    auto f2 = good_transfer_fraction(t, 1.01);
    for (double v : f2) CHECK(v == 0.0);

    // Monotone non-increasing in the threshold.
    FidelityTensor mix(6, {0}, {1.0}, FidelityKind::nominal, false, 0);
    int k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) mix.set(0, i, j, (k++ % 10) / 10.0);
    double prev = 2.0;
    for (double thr : {0.0, 0.2, 0.5, 0.8, 0.95}) {
        const double frac = good_transfer_fraction(mix, thr)[0];
        CHECK(frac <= prev);
        prev = frac;
    }
}

TEST_CASE("community fidelity report") {
    Partition part({0, 0, 1, 1, 2, 2});
    auto flat = uniform_tensor(6, 2, 0.6, 1.0);
    auto rows = community_fidelity_report(flat, part, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].best == doctest::Approx(0.6));
    CHECK(rows[0].worst == doctest::Approx(0.6));
    CHECK(rows[0].top_two == doctest::Approx(0.6));
    CHECK(rows[0].rest == doctest::Approx(0.6));

    // Structured case: community 0 strong over mode 0, pairs touching 2 weak.
    FidelityTensor t(6, {0}, {1.0}, FidelityKind::nominal, false, 0);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            double f = 0.2;
            if (part.labels[i] == 0 && part.labels[j] == 0) f = 0.95;
            else if (part.labels[i] <= 1 && part.labels[j] <= 1) f = 0.8;
            t.set(0, i, j, f);
        }
    auto r = community_fidelity_report(t, part, 1);
    CHECK(r[0].best_community == 0);
    CHECK(r[0].best == doctest::Approx(0.95));
    CHECK(r[0].top_two > r[0].rest);

    // Relabeling communities permutes nothing that matters.
    Partition relabeled({2, 2, 0, 0, 1, 1});
    auto r2 = community_fidelity_report(t, relabeled, 1);
    CHECK(r2[0].best == doctest::Approx(r[0].best));
    CHECK(r2[0].top_two == doctest::Approx(r[0].top_two));
    CHECK(r2[0].rest == doctest::Approx(r[0].rest));

    CHECK_THROWS_AS(community_fidelity_report(t, Partition(std::vector<int>(6, 0)), 1),
                    InvalidPartition);
}

TEST_CASE("fidelity based partition") {
    // Two disjoint perfect blocks over one non-COM mode.
    Graph g(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
    FidelityTensor t(6, {1}, {1.0}, FidelityKind::window_max, false, 0);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const bool left = i <= 2 && j <= 2, right = i >= 3 && j >= 3;
            t.set(1, i, j, left || right ? 0.95 : 0.1);
        }
    Partition part = fidelity_based_partition(t, g, 0.8, {1});
    CHECK(part.community_count() == 2);
    CHECK(part.labels[0] == part.labels[1]);
    CHECK(part.labels[0] == part.labels[2]);
    CHECK(part.labels[3] == part.labels[4]);
    CHECK(part.labels[0] != part.labels[3]);

    // Threshold above every fidelity collapses to a single community.
    Partition collapsed = fidelity_based_partition(t, g, 0.99, {1});
    CHECK(collapsed.community_count() == 1);

    // Determinism.
    Partition again = fidelity_based_partition(t, g, 0.8, {1});
    CHECK(again.labels == part.labels);
}
